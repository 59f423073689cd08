"""Tap-and-subtract RF canceller with quantized amplitude/phase controls.

The canceller taps the PA output through a directional coupler, applies
a digitally stepped attenuator (7-bit, 0.25 dB/step) and a phase
shifter driven by an 8-bit DAC (full 360 degrees), and subtracts the
result at the receiver input.  Its complex gain is frequency-flat
across the modeled bandwidths, so the achievable cancellation of a
frequency-selective self-interference channel is limited by how well a
single complex point approximates the in-band response.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fdlab.channel import FrequencyResponse

ATT_CODES = 128
PS_CODES = 256
SIC_CAP_DB = 150.0


@dataclass(frozen=True)
class CancellerParams:
    """Gain mapping of the cancellation path.

    Path gain at attenuator code 0 is ``-(coupler_tap_db + base_loss_db)``
    (default -17.5 dB); each attenuator code adds ``att_step_db``.
    ``measured_span_db`` switches on a compressive attenuator profile
    that reaches exactly that span at full code instead of the ideal
    ``127 * att_step_db``; it is off by default.
    """

    coupler_tap_db: float = 6.0
    base_loss_db: float = 11.5
    att_step_db: float = 0.25
    phase_step_deg: float = 360.0 / PS_CODES
    measured_span_db: float | None = None


@dataclass(frozen=True)
class CancellerCode:
    """Knob state of the canceller box: ATT, PS and the three tuner caps."""

    att: int
    ps: int
    caps: tuple[int, int, int] = (16, 6, 6)

    def __post_init__(self):
        if not 0 <= self.att <= ATT_CODES - 1:
            raise ValueError(f"ATT code {self.att} outside 0..{ATT_CODES - 1}")
        if not 0 <= self.ps <= PS_CODES - 1:
            raise ValueError(f"PS code {self.ps} outside 0..{PS_CODES - 1}")
        if len(self.caps) != 3 or any(not 0 <= c <= 31 for c in self.caps):
            raise ValueError(f"cap codes {self.caps} outside 0..31")


@dataclass(frozen=True)
class TuneResult:
    code: CancellerCode
    rf_sic_db: float
    evaluations: int
    sweeps: int = 0


def att_code_to_attenuation_db(code: int, params: CancellerParams) -> float:
    """Attenuation added by the stepped attenuator at a 7-bit code."""
    if not 0 <= code <= ATT_CODES - 1:
        raise ValueError(f"ATT code {code} outside 0..{ATT_CODES - 1}")
    ideal_span = (ATT_CODES - 1) * params.att_step_db
    if params.measured_span_db is None:
        return code * params.att_step_db
    # Compressive profile: slope att_step_db at code 0, saturating to
    # exactly measured_span_db at full code.
    span = params.measured_span_db
    gamma = ideal_span / span
    return span * (1.0 - (1.0 - code / (ATT_CODES - 1)) ** gamma)


def ps_code_to_phase_deg(code: int, params: CancellerParams) -> float:
    """Phase in degrees at an 8-bit phase shifter DAC code."""
    if not 0 <= code <= PS_CODES - 1:
        raise ValueError(f"PS code {code} outside 0..{PS_CODES - 1}")
    return code * params.phase_step_deg


def canceller_gain(code: CancellerCode, params: CancellerParams) -> complex:
    """Frequency-flat complex gain of the cancellation path."""
    loss_db = params.coupler_tap_db + params.base_loss_db + att_code_to_attenuation_db(
        code.att, params
    )
    mag = 10.0 ** (-loss_db / 20.0)
    phase = np.deg2rad(ps_code_to_phase_deg(code.ps, params))
    return complex(mag * np.exp(1j * phase))


def canceller_response(
    code: CancellerCode, params: CancellerParams, freqs_hz
) -> FrequencyResponse:
    """The flat canceller gain replicated onto a frequency grid."""
    f = np.asarray(freqs_hz, dtype=np.float64)
    g = canceller_gain(code, params)
    return FrequencyResponse(freqs_hz=f, h=np.full(f.shape, g, dtype=np.complex128))


def residual_response(h_si: FrequencyResponse, h_c: FrequencyResponse) -> FrequencyResponse:
    """Self-interference left after subtracting the canceller path."""
    if h_si.freqs_hz.shape != h_c.freqs_hz.shape or not np.array_equal(
        h_si.freqs_hz, h_c.freqs_hz
    ):
        raise ValueError("response grids do not match")
    return FrequencyResponse(freqs_hz=h_si.freqs_hz, h=h_si.h - h_c.h)


def rf_sic_db(
    h_before: FrequencyResponse,
    h_after: FrequencyResponse,
    band_hz: float,
) -> float:
    """In-band cancellation: power ratio of two responses in dB.

    Averages |h|^2 over grid points with |f| <= band_hz/2 and returns
    ``10*log10(before/after)`` capped at 150 dB (a perfect null would
    otherwise be unbounded).
    """
    if not np.array_equal(h_before.freqs_hz, h_after.freqs_hz):
        raise ValueError("response grids do not match")
    mask = h_before.band_mask(band_hz)
    p_before = float(np.mean(np.abs(h_before.h[mask]) ** 2))
    p_after = float(np.mean(np.abs(h_after.h[mask]) ** 2))
    if p_before == 0.0:
        raise ValueError("reference response is identically zero in band")
    if p_after == 0.0:
        return SIC_CAP_DB
    return min(10.0 * np.log10(p_before / p_after), SIC_CAP_DB)


def _gain_tables(params: CancellerParams) -> tuple[np.ndarray, np.ndarray]:
    atts = np.array(
        [att_code_to_attenuation_db(a, params) for a in range(ATT_CODES)]
    )
    mags = 10.0 ** (-(params.coupler_tap_db + params.base_loss_db + atts) / 20.0)
    phases = np.exp(1j * np.deg2rad(params.phase_step_deg * np.arange(PS_CODES)))
    return mags, phases


def tune_canceller(
    h_si: FrequencyResponse,
    params: CancellerParams,
    band_hz: float,
    strategy: str = "exhaustive",
    caps: tuple[int, int, int] = (16, 6, 6),
    start: CancellerCode | None = None,
) -> TuneResult:
    """Search ATT/PS codes maximizing in-band cancellation.

    ``exhaustive`` scans all 128 x 256 code pairs; ``coordinate-descent``
    alternates full sweeps of one knob holding the other, at most 20
    sweep pairs, never below the starting point.  Ties resolve to the
    lexicographically smallest (att, ps).  Tuner cap codes are held
    fixed for the whole call and passed through into the result.

    The in-band cost of a flat gain ``g`` expands to
    ``mean|h|^2 - 2*Re(conj(g)*mean(h)) + |g|^2``, so each candidate is
    scored from two precomputed in-band moments.
    """
    mask = h_si.band_mask(band_hz)
    hb = h_si.h[mask]
    h_mean = complex(np.mean(hb))
    h_pow = float(np.mean(np.abs(hb) ** 2))
    mags, phases = _gain_tables(params)

    def cost_grid(att_idx, ps_idx):
        g = np.outer(mags[att_idx], phases[ps_idx])
        return h_pow - 2.0 * np.real(np.conj(g) * h_mean) + np.abs(g) ** 2

    if strategy == "exhaustive":
        cost = cost_grid(np.arange(ATT_CODES), np.arange(PS_CODES))
        flat = int(np.argmin(cost))  # C-order argmin: smallest att, then ps
        att, ps = divmod(flat, PS_CODES)
        evals = ATT_CODES * PS_CODES
        sweeps = 0
    elif strategy == "coordinate-descent":
        att = start.att if start is not None else ATT_CODES // 2
        ps = start.ps if start is not None else PS_CODES // 2
        evals = 0
        sweeps = 0
        for _ in range(20):
            sweeps += 1
            att_costs = cost_grid(np.arange(ATT_CODES), [ps])[:, 0]
            new_att = int(np.argmin(att_costs))
            ps_costs = cost_grid([new_att], np.arange(PS_CODES))[0]
            new_ps = int(np.argmin(ps_costs))
            evals += ATT_CODES + PS_CODES
            if (new_att, new_ps) == (att, ps):
                att, ps = new_att, new_ps
                break
            att, ps = new_att, new_ps
    else:
        raise ValueError(f"unknown tuning strategy {strategy!r}")

    code = CancellerCode(att=att, ps=ps, caps=tuple(caps))
    resid = residual_response(h_si, canceller_response(code, params, h_si.freqs_hz))
    sic = rf_sic_db(h_si, resid, band_hz)
    return TuneResult(code=code, rf_sic_db=sic, evaluations=evals, sweeps=sweeps)


def residual_response_for_code(
    h_si: FrequencyResponse, code: CancellerCode, params: CancellerParams
) -> FrequencyResponse:
    """Residual after subtracting the flat gain of a specific code."""
    return residual_response(h_si, canceller_response(code, params, h_si.freqs_hz))
