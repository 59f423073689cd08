"""Averaged-periodogram spectral estimation with power-true bins.

Bins are normalized so their linear sum equals the signal's total mean
power (window power corrected), making the estimate directly comparable
with the time-domain dBm bookkeeping: integrating the PSD recovers
``power_dbm`` of the input to within the estimator variance.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from fdlab.signals import ComplexBasebandSignal

PSD_CSV_HEADER = "freq_hz,psd_dbm"


@dataclass(frozen=True)
class PsdEstimate:
    """DC-centered per-bin power spectrum in dBm."""

    freqs_hz: np.ndarray
    psd_dbm: np.ndarray
    nfft: int
    window: str
    n_segments: int
    sample_rate_hz: float

    def linear_mw(self) -> np.ndarray:
        """Per-bin power in milliwatts."""
        return 10.0 ** (self.psd_dbm / 10.0)


def _window(name: str, nfft: int) -> np.ndarray:
    if name == "hann":
        # periodic Hann tiles to a constant at 50% overlap
        return 0.5 * (1.0 - np.cos(2.0 * np.pi * np.arange(nfft) / nfft))
    if name == "rect":
        return np.ones(nfft)
    raise ValueError(f"unknown window {name!r} (use 'hann' or 'rect')")


def welch_psd(
    sig: ComplexBasebandSignal,
    nfft: int = 1024,
    window: str = "hann",
    overlap: float = 0.5,
) -> PsdEstimate:
    """Averaged modified periodograms of a complex baseband signal.

    Segments of ``nfft`` samples advance by ``nfft * (1 - overlap)``;
    each is windowed, transformed and accumulated.  Per-bin powers are
    corrected by the window power so that the linear bin sum matches the
    mean signal power; bins are returned DC-centered.
    """
    x = sig.samples
    if nfft < 2:
        raise ValueError(f"nfft must be >= 2, got {nfft}")
    if x.size < nfft:
        raise ValueError(f"signal of {x.size} samples shorter than nfft {nfft}")
    if not 0.0 <= overlap < 1.0:
        raise ValueError(f"overlap must be in [0, 1), got {overlap}")
    hop = max(1, int(round(nfft * (1.0 - overlap))))
    w = _window(window, nfft)
    w_power = float(np.sum(w**2))

    n_segments = 1 + (x.size - nfft) // hop
    acc = np.zeros(nfft)
    for s in range(n_segments):
        seg = x[s * hop : s * hop + nfft] * w
        acc += np.abs(np.fft.fft(seg)) ** 2
    bin_mw = acc / (n_segments * nfft * w_power) * 1e3  # unit impedance: W -> mW
    bin_mw = np.fft.fftshift(bin_mw)
    freqs = (np.arange(nfft) - nfft // 2) * (sig.sample_rate_hz / nfft)
    with np.errstate(divide="ignore"):
        psd_dbm = 10.0 * np.log10(bin_mw)
    return PsdEstimate(
        freqs_hz=freqs,
        psd_dbm=psd_dbm,
        nfft=nfft,
        window=window,
        n_segments=n_segments,
        sample_rate_hz=sig.sample_rate_hz,
    )


def integrated_power_dbm(psd: PsdEstimate, band_hz: float | None = None) -> float:
    """Total (or in-band) power recovered from the PSD bins, in dBm."""
    mw = psd.linear_mw()
    if band_hz is not None:
        mask = np.abs(psd.freqs_hz) <= band_hz / 2.0
        if not mask.any():
            raise ValueError(f"no PSD bins inside band of {band_hz} Hz")
        mw = mw[mask]
    return 10.0 * np.log10(float(np.sum(mw)))


def export_psd_csv(psd: PsdEstimate, path: str | Path | None = None) -> str:
    """Render (and optionally write) the PSD as ``freq_hz,psd_dbm`` CSV.

    Floats are written with ``repr`` so a round-trip through the file
    preserves them bit-exactly.
    """
    buf = io.StringIO()
    buf.write(PSD_CSV_HEADER + "\n")
    for f, p in zip(psd.freqs_hz, psd.psd_dbm):
        buf.write(f"{float(f)!r},{float(p)!r}\n")
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def read_psd_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Read a CSV written by :func:`export_psd_csv`."""
    lines = Path(path).read_text().strip().splitlines()
    if not lines or lines[0] != PSD_CSV_HEADER:
        raise ValueError(f"{path} is not a PSD CSV (bad header)")
    freqs, powers = [], []
    for line in lines[1:]:
        f_s, p_s = line.split(",")
        freqs.append(float(f_s))
        powers.append(float(p_s))
    return np.array(freqs), np.array(powers)
