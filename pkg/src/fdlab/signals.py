"""Complex baseband signal container, power bookkeeping and I/Q file I/O.

Power convention used across the whole package: a signal with mean
squared magnitude of 1.0 carries 1 W (30 dBm) into a unit reference
impedance, so ``power_dbm = 10*log10(mean(|x|^2)) + 30``.  A 0 dBm
signal therefore has ``mean(|x|^2) == 1e-3``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

IQ_FORMAT = "interleaved-float32-le"
POWER_CONVENTION = "dbm = 10*log10(mean(abs(x)**2)) + 30"


@dataclass(frozen=True)
class ComplexBasebandSignal:
    """Uniformly sampled complex baseband samples with their sample rate."""

    samples: np.ndarray
    sample_rate_hz: float

    def __post_init__(self):
        sx = np.asarray(self.samples, dtype=np.complex128)
        object.__setattr__(self, "samples", sx)
        if sx.ndim != 1:
            raise ValueError(f"samples must be 1-D, got shape {sx.shape}")
        if not self.sample_rate_hz > 0:
            raise ValueError(f"sample_rate_hz must be positive, got {self.sample_rate_hz}")

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz


def power_dbm(sig: ComplexBasebandSignal | np.ndarray) -> float:
    """Average power of a signal in dBm under the unit-impedance convention."""
    x = sig.samples if isinstance(sig, ComplexBasebandSignal) else np.asarray(sig)
    if x.size == 0:
        raise ValueError("cannot measure power of an empty signal")
    p = float(np.mean(np.abs(x) ** 2))
    if p == 0.0:
        return -np.inf
    return 10.0 * np.log10(p) + 30.0


def dbm_to_mean_square(level_dbm: float) -> float:
    """Mean |x|^2 corresponding to a dBm level (inverse of power_dbm)."""
    return 10.0 ** ((level_dbm - 30.0) / 10.0)


def write_iq(sig: ComplexBasebandSignal, path: str | Path) -> Path:
    """Write samples as interleaved little-endian float32 I/Q plus a JSON sidecar.

    The sidecar lands next to the payload as ``<path>.json`` and records the
    sample rate, the sample count and the power convention so the capture can
    be interpreted without out-of-band knowledge.
    """
    path = Path(path)
    inter = np.empty(2 * len(sig), dtype="<f4")
    inter[0::2] = sig.samples.real.astype("<f4")
    inter[1::2] = sig.samples.imag.astype("<f4")
    path.write_bytes(inter.tobytes())
    sidecar = {
        "format": IQ_FORMAT,
        "sample_rate_hz": sig.sample_rate_hz,
        "num_samples": len(sig),
        "power_convention": POWER_CONVENTION,
    }
    Path(str(path) + ".json").write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    return path


def read_iq(path: str | Path) -> ComplexBasebandSignal:
    """Read a signal written by :func:`write_iq` (sidecar required)."""
    path = Path(path)
    sidecar_path = Path(str(path) + ".json")
    if not sidecar_path.exists():
        raise FileNotFoundError(f"missing I/Q sidecar {sidecar_path}")
    meta = json.loads(sidecar_path.read_text())
    if meta.get("format") != IQ_FORMAT:
        raise ValueError(f"unsupported I/Q format {meta.get('format')!r}")
    raw = np.frombuffer(path.read_bytes(), dtype="<f4")
    if raw.size % 2:
        raise ValueError(f"I/Q payload of {path} has odd float count {raw.size}")
    samples = raw[0::2].astype(np.float64) + 1j * raw[1::2].astype(np.float64)
    n = int(meta["num_samples"])
    if samples.size != n:
        raise ValueError(f"sidecar promises {n} samples, payload holds {samples.size}")
    return ComplexBasebandSignal(samples=samples, sample_rate_hz=float(meta["sample_rate_hz"]))
