"""Transmit waveform generation and front-end impairments.

Generators produce :class:`~fdlab.signals.ComplexBasebandSignal` at an
exactly calibrated power level; the power amplifier model and the
receiver noise injection live here too so an experiment can assemble a
full TX-to-RX sample path from one module.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from fdlab.signals import ComplexBasebandSignal, dbm_to_mean_square

# Third/fifth order coefficients are referenced to the unit-impedance
# amplitude convention (mean |x|^2 = 1e-3 at 0 dBm), sized so a 0 dBm
# drive produces third-order products near -30 dBc and fifth-order
# products near -46 dBc.
DEFAULT_PA_A3 = 31.62 * cmath.exp(1j * np.deg2rad(10.0))
DEFAULT_PA_A5 = 5.0e3 * cmath.exp(1j * np.deg2rad(-20.0))


@dataclass(frozen=True)
class TxChainParams:
    """Memoryless polynomial PA model ``y = g*(x + a3*x|x|^2 + a5*x|x|^4)``."""

    tx_gain_db: float = 0.0
    pa_a3: complex = DEFAULT_PA_A3
    pa_a5: complex = DEFAULT_PA_A5


def gen_tone(
    sample_rate_hz: float,
    offset_hz: float,
    level_dbm: float,
    num_samples: int,
    phase_rad: float = 0.0,
) -> ComplexBasebandSignal:
    """Complex exponential at a baseband frequency offset.

    The offset must be strictly inside the Nyquist interval
    ``(-sample_rate/2, +sample_rate/2)``.
    """
    if num_samples <= 0:
        raise ValueError(f"num_samples must be positive, got {num_samples}")
    if not abs(offset_hz) < sample_rate_hz / 2:
        raise ValueError(
            f"tone offset {offset_hz} Hz aliases at sample rate {sample_rate_hz} Hz"
        )
    amp = np.sqrt(dbm_to_mean_square(level_dbm))
    k = np.arange(num_samples)
    x = amp * np.exp(1j * (2.0 * np.pi * offset_hz / sample_rate_hz * k + phase_rad))
    return ComplexBasebandSignal(samples=x, sample_rate_hz=sample_rate_hz)


def rrc_taps(rolloff: float, span_symbols: int, samples_per_symbol: int) -> np.ndarray:
    """Root-raised-cosine filter taps, peak-normalized, odd length.

    Length is ``span_symbols * samples_per_symbol + 1`` so the filter is
    symmetric about an integer sample.
    """
    if not 0.0 < rolloff <= 1.0:
        raise ValueError(f"rolloff must be in (0, 1], got {rolloff}")
    if span_symbols <= 0 or span_symbols % 2:
        raise ValueError(f"span_symbols must be a positive even integer, got {span_symbols}")
    n = span_symbols * samples_per_symbol + 1
    t = (np.arange(n) - (n - 1) / 2) / samples_per_symbol  # time in symbols
    beta = rolloff
    h = np.empty(n)
    for i, ti in enumerate(t):
        if abs(ti) < 1e-12:
            h[i] = 1.0 - beta + 4.0 * beta / np.pi
        elif abs(abs(ti) - 1.0 / (4.0 * beta)) < 1e-9:
            h[i] = (beta / np.sqrt(2.0)) * (
                (1.0 + 2.0 / np.pi) * np.sin(np.pi / (4.0 * beta))
                + (1.0 - 2.0 / np.pi) * np.cos(np.pi / (4.0 * beta))
            )
        else:
            num = np.sin(np.pi * ti * (1.0 - beta)) + 4.0 * beta * ti * np.cos(
                np.pi * ti * (1.0 + beta)
            )
            den = np.pi * ti * (1.0 - (4.0 * beta * ti) ** 2)
            h[i] = num / den
    return h / h.max()


def gen_psk(
    order: int,
    symbol_rate_hz: float,
    sample_rate_hz: float,
    level_dbm: float,
    num_symbols: int,
    seed: int,
    rrc_rolloff: float = 0.25,
    rrc_span_symbols: int = 8,
) -> ComplexBasebandSignal:
    """Seeded BPSK/QPSK burst with root-raised-cosine pulse shaping.

    The sample rate must be an integer multiple of the symbol rate.  At
    one sample per symbol no shaping is applied and the samples are the
    constellation points themselves.  Output power is normalized to
    ``level_dbm`` exactly (measured over the generated burst).

    Args:
        order: 2 for BPSK, 4 for QPSK.
        seed: symbol generator seed; equal seeds give identical bursts.
    """
    if order not in (2, 4):
        raise ValueError(f"order must be 2 or 4, got {order}")
    if num_symbols <= 0:
        raise ValueError(f"num_symbols must be positive, got {num_symbols}")
    sps_exact = sample_rate_hz / symbol_rate_hz
    sps = int(round(sps_exact))
    if sps < 1 or abs(sps_exact - sps) > 1e-9:
        raise ValueError(
            f"sample rate {sample_rate_hz} is not an integer multiple "
            f"of symbol rate {symbol_rate_hz}"
        )
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, order, size=num_symbols)
    if order == 2:
        constellation = np.array([1.0 + 0j, -1.0 + 0j])
    else:
        constellation = np.exp(1j * (np.pi / 4.0 + np.pi / 2.0 * np.arange(4)))
    symbols = constellation[idx]

    if sps == 1:
        x = symbols.astype(np.complex128)
    else:
        up = np.zeros(num_symbols * sps, dtype=np.complex128)
        up[::sps] = symbols
        h = rrc_taps(rrc_rolloff, rrc_span_symbols, sps)
        x = np.convolve(up, h, mode="same")

    rms = np.sqrt(np.mean(np.abs(x) ** 2))
    x *= np.sqrt(dbm_to_mean_square(level_dbm)) / rms
    return ComplexBasebandSignal(samples=x, sample_rate_hz=sample_rate_hz)


def apply_pa(sig: ComplexBasebandSignal, params: TxChainParams) -> ComplexBasebandSignal:
    """Memoryless odd-order polynomial PA.

    ``y = g * (x + a3*x*|x|^2 + a5*x*|x|^4)`` with ``g`` the linear gain
    for ``tx_gain_db``.  With ``a3 = a5 = 0`` this is a pure gain.
    """
    g = 10.0 ** (params.tx_gain_db / 20.0)
    x = sig.samples
    mag2 = np.abs(x) ** 2
    y = g * (x + params.pa_a3 * x * mag2 + params.pa_a5 * x * mag2**2)
    return ComplexBasebandSignal(samples=y, sample_rate_hz=sig.sample_rate_hz)


def add_awgn(
    sig: ComplexBasebandSignal,
    noise_floor_dbm: float | None,
    seed: int,
) -> ComplexBasebandSignal:
    """Add circular complex white Gaussian noise at a total power level.

    ``noise_floor_dbm`` is the total noise power over the full sample
    rate.  ``None`` or ``-inf`` disables the noise entirely.
    """
    if noise_floor_dbm is None or noise_floor_dbm == -np.inf:
        return sig
    sigma2 = dbm_to_mean_square(noise_floor_dbm)
    rng = np.random.default_rng(seed)
    n = len(sig)
    noise = np.sqrt(sigma2 / 2.0) * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    return ComplexBasebandSignal(samples=sig.samples + noise, sample_rate_hz=sig.sample_rate_hz)
