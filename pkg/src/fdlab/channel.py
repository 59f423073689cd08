"""Analog self-interference path of a shared-antenna transceiver.

The TX-to-RX leakage is modeled at complex baseband as the sum of two
paths: direct leakage through the circulator, and the reflection of the
transmit signal off the (imperfectly matched) antenna interface seen
through the digitally tunable matching network.  Responses are
evaluated on a grid of baseband frequency offsets relative to the RF
carrier; constant carrier-referenced path phases are absorbed into the
path definitions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TUNER_TOPOLOGY_PI = "pi"  # shunt C1 - series L+C2 - shunt C3 (default)
TUNER_TOPOLOGY_SINGLE_SHUNT = "single-shunt"  # shunt C1 only


@dataclass(frozen=True)
class FrequencyResponse:
    """Complex gain sampled on an ascending grid of baseband offsets."""

    freqs_hz: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.freqs_hz, dtype=np.float64)
        h = np.asarray(self.h, dtype=np.complex128)
        object.__setattr__(self, "freqs_hz", f)
        object.__setattr__(self, "h", h)
        if f.ndim != 1 or h.shape != f.shape:
            raise ValueError(f"grid and gains must be matching 1-D arrays, got {f.shape} vs {h.shape}")
        if f.size == 0:
            raise ValueError("frequency grid is empty")
        if f.size > 1 and not np.all(np.diff(f) > 0):
            raise ValueError("frequency grid must be strictly ascending")

    def band_mask(self, band_hz: float) -> np.ndarray:
        """Boolean mask of grid points with |f| <= band_hz / 2."""
        if band_hz <= 0:
            raise ValueError(f"band must be positive, got {band_hz}")
        mask = np.abs(self.freqs_hz) <= band_hz / 2.0
        if not mask.any():
            raise ValueError(f"no grid points inside band of {band_hz} Hz")
        return mask


@dataclass(frozen=True)
class CirculatorParams:
    """Three-port circulator: TX->RX isolation and per-hop insertion loss.

    ``insertion_loss_db`` applies to each hop of the reflection path
    (TX->ANT and ANT->RX) separately.  ``leakage_delay_ns`` is the group
    delay of the direct leakage path.
    """

    isolation_db: float = 20.0
    insertion_loss_db: float = 1.5
    leakage_delay_ns: float = 5.0


@dataclass(frozen=True)
class AntennaImpedance:
    """Antenna load: impedance at the carrier plus a linear slope vs offset.

    ``feed_delay_ns`` is the one-way electrical delay of the feed line
    between the circulator antenna port and the tuner/antenna assembly;
    the reflection path picks it up twice.
    """

    z_ohm: complex = 50.0 + 8.0j
    slope_ohm_per_hz: complex = 0.0
    feed_delay_ns: float = 0.0

    def z_at(self, offset_hz):
        return self.z_ohm + self.slope_ohm_per_hz * np.asarray(offset_hz)


@dataclass(frozen=True)
class TunerConfig:
    """Pi-network antenna tuner with three 5-bit digitally tunable caps.

    Topology (``pi``): shunt C1 at the circulator-facing port, series
    branch of the fixed inductor plus C2, shunt C3 across the antenna.
    Capacitance mapping is affine in the 5-bit code:
    ``C = cap_min_f + code * cap_step_f``.
    """

    cap_codes: tuple[int, int, int] = (16, 6, 6)
    inductance_h: float = 5.1e-9
    cap_min_f: float = 0.6e-12
    cap_step_f: float = 0.131e-12
    topology: str = TUNER_TOPOLOGY_PI

    def __post_init__(self):
        if len(self.cap_codes) != 3:
            raise ValueError(f"need exactly 3 cap codes, got {self.cap_codes}")
        for c in self.cap_codes:
            if not 0 <= int(c) <= 31:
                raise ValueError(f"cap code {c} outside 0..31")
        if self.topology not in (TUNER_TOPOLOGY_PI, TUNER_TOPOLOGY_SINGLE_SHUNT):
            raise ValueError(f"unknown tuner topology {self.topology!r}")
        if self.cap_min_f <= 0 or self.cap_step_f < 0:
            raise ValueError("capacitance mapping must be positive")
        if self.inductance_h <= 0:
            raise ValueError(f"inductance must be positive, got {self.inductance_h}")


def cap_code_to_capacitance(code: int, cfg: TunerConfig) -> float:
    """Capacitance in farads for a 5-bit tuner cap code."""
    if not 0 <= code <= 31:
        raise ValueError(f"cap code {code} outside 0..31")
    return cfg.cap_min_f + code * cfg.cap_step_f


def tuner_input_impedance(cfg: TunerConfig, z_load, freq_hz):
    """Input impedance of the loaded tuner seen from the circulator side.

    Direct nodal evaluation: the shunt/series elements are combined
    right to left (antenna to input).  Accepts scalar or array
    ``z_load``/``freq_hz`` (broadcast together).
    """
    z_load = np.asarray(z_load, dtype=np.complex128)
    w = 2.0 * np.pi * np.asarray(freq_hz, dtype=np.float64)
    if np.any(w <= 0):
        raise ValueError("frequency must be positive")
    c1, c2, c3 = (cap_code_to_capacitance(c, cfg) for c in cfg.cap_codes)
    z_c1 = 1.0 / (1j * w * c1)
    if cfg.topology == TUNER_TOPOLOGY_SINGLE_SHUNT:
        return z_c1 * z_load / (z_c1 + z_load)
    z_c3 = 1.0 / (1j * w * c3)
    z_shunt3 = z_c3 * z_load / (z_c3 + z_load)
    z_series = 1j * w * cfg.inductance_h + 1.0 / (1j * w * c2) + z_shunt3
    return z_c1 * z_series / (z_c1 + z_series)


def reflection_coefficient(z, z0: float = 50.0):
    """Voltage reflection coefficient of impedance ``z`` against real ``z0``."""
    z = np.asarray(z, dtype=np.complex128)
    denom = z + z0
    if np.any(np.abs(denom) < 1e-12):
        raise ValueError(f"reflection coefficient singular: z + z0 ~ 0 (z0={z0})")
    return (z - z0) / denom


def si_channel_response(
    circ: CirculatorParams,
    tuner: TunerConfig,
    antenna: AntennaImpedance,
    freq_offsets_hz,
    carrier_hz: float,
    z0_ohm: float = 50.0,
) -> FrequencyResponse:
    """Baseband-equivalent TX-to-RX self-interference response.

    Per offset ``f`` with RF frequency ``F = carrier + f``::

        h(f) = 10^(-isolation/20) * exp(-j*2*pi*F*tau_leak)
             + 10^(-2*insertion/20) * Gamma(f) * exp(-j*2*pi*F*tau_feed_roundtrip)

    where ``Gamma`` is the reflection coefficient at the tuner input with
    the antenna load evaluated at ``F``.  Delays rotate the carrier too,
    so a path's phase at zero offset reflects its electrical length.
    With a perfectly matched antenna interface the response reduces to
    the pure circulator leakage.
    """
    f = np.asarray(freq_offsets_hz, dtype=np.float64)
    if carrier_hz <= 0:
        raise ValueError(f"carrier must be positive, got {carrier_hz}")
    if np.any(np.abs(f) >= carrier_hz):
        raise ValueError("baseband offset magnitude must stay below the carrier")
    rf = carrier_hz + f
    leak_mag = 10.0 ** (-circ.isolation_db / 20.0)
    tau_leak = circ.leakage_delay_ns * 1e-9
    leak = leak_mag * np.exp(-2j * np.pi * rf * tau_leak)

    z_in = tuner_input_impedance(tuner, antenna.z_at(f), rf)
    gamma = reflection_coefficient(z_in, z0_ohm)
    hop = 10.0 ** (-circ.insertion_loss_db / 20.0)
    tau_refl = 2.0 * antenna.feed_delay_ns * 1e-9
    refl = hop * hop * gamma * np.exp(-2j * np.pi * rf * tau_refl)

    return FrequencyResponse(freqs_hz=f, h=leak + refl)
