"""End-to-end cancellation experiments on one simulated node.

A run generates the transmit waveform, pushes it through the PA model
and the self-interference channel, subtracts the tuned (or manually
set) RF canceller tap, adds receiver noise, then trains the polynomial
digital stage on one window and scores it on a held-out window.  The
report carries the stage-power budget in the same line format the
hardware bring-up console prints, plus response-level diagnostics.

All randomness derives from the config seed, and reports serialize with
sorted keys and no timestamps, so a given config yields byte-identical
JSON on every run.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Union

import numpy as np

from fdlab.canceller import (
    CancellerCode,
    TuneResult,
    canceller_response,
    residual_response,
    rf_sic_db,
    tune_canceller,
)
from fdlab.channel import FrequencyResponse, si_channel_response
from fdlab.config import NodeProfile, default_profile, profile_from_dict, profile_to_dict
from fdlab.signals import ComplexBasebandSignal, dbm_to_mean_square, power_dbm
from fdlab.spectral import PsdEstimate, welch_psd
from fdlab.volterra import VolterraBasis, align_lag, build_volterra_features, fit_volterra
from fdlab.waveforms import add_awgn, apply_pa, gen_psk, gen_tone

DEFAULT_TUNE_BAND_HZ = 5e6
ALIGN_MAX_LAG = 32


@dataclass(frozen=True)
class WaveSpec:
    """Local transmit waveform: a CW tone or a shaped PSK burst."""

    kind: str = "tone"
    offset_hz: float = 200e3  # tone only
    order: int = 4  # psk only
    symbol_rate_hz: float = 2.5e6  # psk only
    rrc_rolloff: float = 0.25
    rrc_span_symbols: int = 8

    def __post_init__(self):
        if self.kind not in ("tone", "psk"):
            raise ValueError(f"wave kind must be 'tone' or 'psk', got {self.kind!r}")

    def to_dict(self) -> dict:
        if self.kind == "tone":
            return {"kind": "tone", "offset_hz": self.offset_hz}
        return {
            "kind": "psk",
            "order": self.order,
            "symbol_rate_hz": self.symbol_rate_hz,
            "rrc_rolloff": self.rrc_rolloff,
            "rrc_span_symbols": self.rrc_span_symbols,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "WaveSpec":
        known = {"kind", "offset_hz", "order", "symbol_rate_hz", "rrc_rolloff",
                 "rrc_span_symbols"}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"wave: unknown fields {sorted(unknown)}")
        return cls(**doc)


@dataclass(frozen=True)
class RemoteSpec:
    """Far-end tone arriving on top of the self-interference.

    ``power_dbm=None`` places the tone 20 dB above the configured noise
    floor, the stock link-budget operating point.
    """

    offset_hz: float = 400e3
    power_dbm: float | None = None

    def to_dict(self) -> dict:
        return {"offset_hz": self.offset_hz, "power_dbm": self.power_dbm}

    @classmethod
    def from_dict(cls, doc: dict) -> "RemoteSpec":
        unknown = set(doc) - {"offset_hz", "power_dbm"}
        if unknown:
            raise ValueError(f"remote: unknown fields {sorted(unknown)}")
        return cls(**doc)


@dataclass(frozen=True)
class ExperimentConfig:
    sample_rate_hz: float = 5e6
    carrier_hz: float = 900e6
    tx_power_dbm: float = 0.0
    # Front-end register settings, recorded for provenance only: all
    # powers in the simulator are referenced to the baseband waveform.
    tx_gain_db: float = 10.0
    rx_gain_db: float = 10.0
    wave: WaveSpec = field(default_factory=WaveSpec)
    canceller: Union[str, CancellerCode] = "auto"
    tune_strategy: str = "exhaustive"
    tune_band_hz: float | None = None  # None: min(5 MHz, sample rate)
    remote: RemoteSpec | None = None
    profile: NodeProfile = field(default_factory=default_profile)
    seed: int = 1234
    num_samples: int = 20160
    n_train: int = 10000
    n_eval: int = 10000
    guard_rows: int = 64
    volterra_orders: tuple[int, ...] = (1, 3, 5)
    volterra_memory: int = 20
    volterra_pre_cursor: int = 4

    def __post_init__(self):
        if self.sample_rate_hz <= 0:
            raise ValueError(f"sample rate must be positive, got {self.sample_rate_hz}")
        if isinstance(self.canceller, str) and self.canceller != "auto":
            raise ValueError(f"canceller is 'auto' or an explicit code, got {self.canceller!r}")
        if self.guard_rows < 0 or self.n_train <= 0 or self.n_eval <= 0:
            raise ValueError("window sizes must be positive (guard may be zero)")
        rows = self.num_samples - self.volterra_memory + 1
        if rows < self.guard_rows + self.n_train + self.n_eval:
            raise ValueError(
                f"num_samples {self.num_samples} too short for guard+train+eval windows"
            )

    def basis(self) -> VolterraBasis:
        return VolterraBasis(
            orders=tuple(self.volterra_orders),
            memory_taps=self.volterra_memory,
            pre_cursor=self.volterra_pre_cursor,
        )

    def effective_tune_band_hz(self) -> float:
        if self.tune_band_hz is not None:
            return self.tune_band_hz
        return min(DEFAULT_TUNE_BAND_HZ, self.sample_rate_hz)


def experiment_config_to_dict(cfg: ExperimentConfig) -> dict:
    canc = cfg.canceller
    if isinstance(canc, CancellerCode):
        canc = {"att": canc.att, "ps": canc.ps, "caps": list(canc.caps)}
    return {
        "sample_rate_hz": cfg.sample_rate_hz,
        "carrier_hz": cfg.carrier_hz,
        "tx_power_dbm": cfg.tx_power_dbm,
        "tx_gain_db": cfg.tx_gain_db,
        "rx_gain_db": cfg.rx_gain_db,
        "wave": cfg.wave.to_dict(),
        "canceller": canc,
        "tune_strategy": cfg.tune_strategy,
        "tune_band_hz": cfg.tune_band_hz,
        "remote": None if cfg.remote is None else cfg.remote.to_dict(),
        "profile": profile_to_dict(cfg.profile),
        "seed": cfg.seed,
        "num_samples": cfg.num_samples,
        "n_train": cfg.n_train,
        "n_eval": cfg.n_eval,
        "guard_rows": cfg.guard_rows,
        "volterra_orders": list(cfg.volterra_orders),
        "volterra_memory": cfg.volterra_memory,
        "volterra_pre_cursor": cfg.volterra_pre_cursor,
    }


def _as_float(name: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"{name} must be a number, got {value!r}")
    return float(value)


def _as_int(name: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    return value


def experiment_config_from_dict(doc: dict) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ValueError(f"experiment config must be an object, got {type(doc).__name__}")
    known = {"sample_rate_hz", "carrier_hz", "tx_power_dbm", "tx_gain_db", "rx_gain_db",
             "wave", "canceller", "tune_strategy", "tune_band_hz", "remote", "profile",
             "seed", "num_samples", "n_train", "n_eval", "guard_rows",
             "volterra_orders", "volterra_memory", "volterra_pre_cursor"}
    unknown = set(doc) - known
    if unknown:
        raise ValueError(f"experiment config: unknown fields {sorted(unknown)}")
    kwargs = dict(doc)
    for key in ("sample_rate_hz", "carrier_hz", "tx_power_dbm", "tx_gain_db",
                "rx_gain_db", "tune_band_hz"):
        if kwargs.get(key) is not None:
            kwargs[key] = _as_float(key, kwargs[key])
    for key in ("seed", "num_samples", "n_train", "n_eval", "guard_rows",
                "volterra_memory", "volterra_pre_cursor"):
        if key in kwargs:
            kwargs[key] = _as_int(key, kwargs[key])
    if "wave" in kwargs:
        kwargs["wave"] = WaveSpec.from_dict(kwargs["wave"])
    if "remote" in kwargs and kwargs["remote"] is not None:
        kwargs["remote"] = RemoteSpec.from_dict(kwargs["remote"])
    if "profile" in kwargs:
        kwargs["profile"] = profile_from_dict(kwargs["profile"])
    if "canceller" in kwargs and isinstance(kwargs["canceller"], dict):
        c = kwargs["canceller"]
        unknown = set(c) - {"att", "ps", "caps"}
        if unknown:
            raise ValueError(f"canceller: unknown fields {sorted(unknown)}")
        kwargs["canceller"] = CancellerCode(
            att=int(c["att"]), ps=int(c["ps"]),
            caps=tuple(int(v) for v in c.get("caps", (16, 6, 6))),
        )
    if "volterra_orders" in kwargs:
        kwargs["volterra_orders"] = tuple(int(k) for k in kwargs["volterra_orders"])
    return ExperimentConfig(**kwargs)


@dataclass(frozen=True)
class LinkMetrics:
    remote_offset_hz: float
    remote_power_dbm: float
    snr_before_db: float
    snr_after_db: float
    snr_ideal_db: float
    snr_loss_db: float


@dataclass(frozen=True)
class ExperimentReport:
    """Stage powers, cancellation amounts and diagnostics of one run."""

    mode: str
    config: dict
    tx_power_dbm: float
    pa_out_dbm: float
    pre_cancel_dbm: float
    post_rf_dbm: float
    post_digital_dbm: float
    rf_sic_db: float
    digital_sic_db: float
    total_sic_db: float
    response_isolation_db: float
    response_rf_sic_db: float
    canceller_code: CancellerCode
    tuned: bool
    tune_evaluations: int
    tune_sweeps: int
    align_lag: int
    noise_floor_dbm: float
    ridge: float
    link: LinkMetrics | None = None

    def to_dict(self) -> dict:
        d = {
            "mode": self.mode,
            "config": self.config,
            "tx_power_dbm": self.tx_power_dbm,
            "pa_out_dbm": self.pa_out_dbm,
            "pre_cancel_dbm": self.pre_cancel_dbm,
            "post_rf_dbm": self.post_rf_dbm,
            "post_digital_dbm": self.post_digital_dbm,
            "rf_sic_db": self.rf_sic_db,
            "digital_sic_db": self.digital_sic_db,
            "total_sic_db": self.total_sic_db,
            "response_isolation_db": self.response_isolation_db,
            "response_rf_sic_db": self.response_rf_sic_db,
            "canceller_code": {
                "att": self.canceller_code.att,
                "ps": self.canceller_code.ps,
                "caps": list(self.canceller_code.caps),
            },
            "tuned": self.tuned,
            "tune_evaluations": self.tune_evaluations,
            "tune_sweeps": self.tune_sweeps,
            "align_lag": self.align_lag,
            "noise_floor_dbm": self.noise_floor_dbm,
            "ridge": self.ridge,
            "link": None,
        }
        if self.link is not None:
            d["link"] = {
                "remote_offset_hz": self.link.remote_offset_hz,
                "remote_power_dbm": self.link.remote_power_dbm,
                "snr_before_db": self.link.snr_before_db,
                "snr_after_db": self.link.snr_after_db,
                "snr_ideal_db": self.link.snr_ideal_db,
                "snr_loss_db": self.link.snr_loss_db,
            }
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def text(self) -> str:
        """Budget lines in the bring-up console format."""
        code = self.canceller_code
        lines = [
            f"TX Signal: {self.tx_power_dbm:.2f} dBm",
            f"RX Signal after RF SIC: {self.post_rf_dbm:.2f} dBm",
            f"Amount of RF SIC: {self.rf_sic_db:.2f} dB",
            f"RX Signal after Digital SIC: {self.post_digital_dbm:.2f} dBm",
            f"Amount of Digital SIC: {self.digital_sic_db:.2f} dB",
            f"Total SIC: {self.total_sic_db:.2f} dB",
            f"Canceller code: ATT={code.att} PS={code.ps} "
            f"CAPS={code.caps[0]},{code.caps[1]},{code.caps[2]}"
            + (f" (tuned, {self.tune_evaluations} evaluations)" if self.tuned else " (manual)"),
            f"Alignment lag: {self.align_lag} samples",
            f"Noise floor: {self.noise_floor_dbm:.2f} dBm",
        ]
        if self.link is not None:
            lk = self.link
            lines += [
                f"Remote tone: {lk.remote_power_dbm:.2f} dBm at "
                f"{lk.remote_offset_hz:+.0f} Hz",
                f"SNR before Digital SIC: {lk.snr_before_db:.2f} dB",
                f"SNR after Digital SIC: {lk.snr_after_db:.2f} dB",
                f"SNR loss vs noise-floor ideal: {lk.snr_loss_db:.2f} dB",
            ]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ExperimentResult:
    """Report plus spectral artifacts of the held-out window."""

    report: ExperimentReport
    psd_tx: PsdEstimate
    psd_rx: PsdEstimate
    psd_residual: PsdEstimate
    tx: ComplexBasebandSignal
    rx: ComplexBasebandSignal
    residual: ComplexBasebandSignal


def _gen_wave(cfg: ExperimentConfig) -> ComplexBasebandSignal:
    w = cfg.wave
    if w.kind == "tone":
        return gen_tone(cfg.sample_rate_hz, w.offset_hz, cfg.tx_power_dbm, cfg.num_samples)
    sps = cfg.sample_rate_hz / w.symbol_rate_hz
    n_symbols = int(np.ceil(cfg.num_samples / sps))
    sig = gen_psk(
        order=w.order,
        symbol_rate_hz=w.symbol_rate_hz,
        sample_rate_hz=cfg.sample_rate_hz,
        level_dbm=cfg.tx_power_dbm,
        num_symbols=n_symbols,
        seed=cfg.seed,
        rrc_rolloff=w.rrc_rolloff,
        rrc_span_symbols=w.rrc_span_symbols,
    )
    if len(sig) == cfg.num_samples:
        return sig
    return ComplexBasebandSignal(
        samples=sig.samples[: cfg.num_samples], sample_rate_hz=cfg.sample_rate_hz
    )


def _apply_response(x: np.ndarray, resp: FrequencyResponse) -> np.ndarray:
    """Circular application of a DC-centered frequency response."""
    h_bins = np.fft.ifftshift(resp.h)
    return np.fft.ifft(np.fft.fft(x) * h_bins)


def _project_snr_db(reference: np.ndarray, observed: np.ndarray) -> float:
    """SNR of ``observed`` against the known ``reference`` waveform.

    Projects the observation onto the reference; everything orthogonal
    counts as noise-plus-interference.
    """
    denom = np.vdot(reference, reference)
    if denom == 0:
        raise ValueError("reference waveform is identically zero")
    alpha = np.vdot(reference, observed) / denom
    sig = alpha * reference
    other = observed - sig
    p_sig = float(np.mean(np.abs(sig) ** 2))
    p_other = float(np.mean(np.abs(other) ** 2))
    if p_other == 0.0:
        return np.inf
    return 10.0 * np.log10(p_sig / p_other)


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    profile = cfg.profile
    fs = cfg.sample_rate_hz
    n = cfg.num_samples
    basis = cfg.basis()

    grid = np.fft.fftshift(np.fft.fftfreq(n, d=1.0 / fs))
    band = cfg.effective_tune_band_hz()

    # Canceller: either exhaustively tuned on the response, or forced.
    if isinstance(cfg.canceller, CancellerCode):
        caps = cfg.canceller.caps
        tuner = replace(profile.tuner, cap_codes=caps)
        h_si = si_channel_response(profile.circulator, tuner, profile.antenna,
                                   grid, cfg.carrier_hz, profile.z0_ohm)
        code = cfg.canceller
        tuned = False
        evaluations = 0
        sweeps = 0
    else:
        caps = profile.tuner.cap_codes
        h_si = si_channel_response(profile.circulator, profile.tuner, profile.antenna,
                                   grid, cfg.carrier_hz, profile.z0_ohm)
        tune = tune_canceller(h_si, profile.canceller, band,
                              strategy=cfg.tune_strategy, caps=caps)
        code = tune.code
        tuned = True
        evaluations = tune.evaluations
        sweeps = tune.sweeps

    h_res = residual_response(h_si, canceller_response(code, profile.canceller, grid))

    mask = h_si.band_mask(band)
    response_isolation_db = -10.0 * np.log10(float(np.mean(np.abs(h_si.h[mask]) ** 2)))
    response_rf_sic_db = rf_sic_db(h_si, h_res, band) + response_isolation_db

    # Waveform chain.
    tx = _gen_wave(cfg)
    tx_pa = apply_pa(tx, profile.tx_chain)
    rx_pre = _apply_response(tx_pa.samples, h_si)
    rx_post = _apply_response(tx_pa.samples, h_res)

    link_ref = None
    remote_dbm = None
    if cfg.remote is not None:
        remote_dbm = cfg.remote.power_dbm
        if remote_dbm is None:
            remote_dbm = profile.noise_floor_dbm + 20.0
        remote = gen_tone(fs, cfg.remote.offset_hz, remote_dbm, n)
        rx_post = rx_post + remote.samples
        link_ref = remote.samples

    rx_sig = add_awgn(
        ComplexBasebandSignal(samples=rx_post, sample_rate_hz=fs),
        profile.noise_floor_dbm,
        seed=cfg.seed + 1,
    )

    # Digital stage: align, build features from the clean baseband tx,
    # fit on the training window, score on the held-out window.
    lag = align_lag(tx.samples, rx_sig.samples, max_lag=ALIGN_MAX_LAG)
    tx_al = np.roll(tx.samples, lag)
    feats = build_volterra_features(tx_al, basis)
    head = basis.edge_head()
    y = rx_sig.samples[head : head + feats.shape[0]]

    tr = slice(cfg.guard_rows, cfg.guard_rows + cfg.n_train)
    ev = slice(cfg.guard_rows + cfg.n_train, cfg.guard_rows + cfg.n_train + cfg.n_eval)
    model = fit_volterra(feats[tr], y[tr], basis=basis)
    resid_ev = y[ev] - feats[ev] @ model.coeffs

    # Sample indices of the held-out rows, for stage-power bookkeeping.
    ev_idx = slice(head + ev.start, head + ev.stop)
    pa_out_dbm = power_dbm(tx_pa.samples[ev_idx])
    pre_cancel_dbm = power_dbm(rx_pre[ev_idx])
    post_rf_dbm = power_dbm(rx_sig.samples[ev_idx])
    post_digital_dbm = power_dbm(resid_ev)

    rf_amount = cfg.tx_power_dbm - post_rf_dbm
    dig_amount = post_rf_dbm - post_digital_dbm
    total = cfg.tx_power_dbm - post_digital_dbm

    link = None
    if link_ref is not None:
        ref_ev = link_ref[ev_idx]
        snr_before = _project_snr_db(ref_ev, rx_sig.samples[ev_idx])
        snr_after = _project_snr_db(ref_ev, resid_ev)
        snr_ideal = remote_dbm - profile.noise_floor_dbm
        link = LinkMetrics(
            remote_offset_hz=cfg.remote.offset_hz,
            remote_power_dbm=remote_dbm,
            snr_before_db=snr_before,
            snr_after_db=snr_after,
            snr_ideal_db=snr_ideal,
            snr_loss_db=snr_ideal - snr_after,
        )

    report = ExperimentReport(
        mode="link" if link is not None else "node",
        config=experiment_config_to_dict(cfg),
        tx_power_dbm=cfg.tx_power_dbm,
        pa_out_dbm=pa_out_dbm,
        pre_cancel_dbm=pre_cancel_dbm,
        post_rf_dbm=post_rf_dbm,
        post_digital_dbm=post_digital_dbm,
        rf_sic_db=rf_amount,
        digital_sic_db=dig_amount,
        total_sic_db=total,
        response_isolation_db=response_isolation_db,
        response_rf_sic_db=response_rf_sic_db,
        canceller_code=code,
        tuned=tuned,
        tune_evaluations=evaluations,
        tune_sweeps=sweeps,
        align_lag=lag,
        noise_floor_dbm=profile.noise_floor_dbm,
        ridge=model.ridge,
        link=link,
    )
    _check_report(report)

    ev_sig = ComplexBasebandSignal(samples=rx_sig.samples[ev_idx], sample_rate_hz=fs)
    resid_sig = ComplexBasebandSignal(samples=resid_ev, sample_rate_hz=fs)
    tx_ev = ComplexBasebandSignal(samples=tx_pa.samples[ev_idx], sample_rate_hz=fs)
    return ExperimentResult(
        report=report,
        psd_tx=welch_psd(tx_ev),
        psd_rx=welch_psd(ev_sig),
        psd_residual=welch_psd(resid_sig),
        tx=tx_ev,
        rx=ev_sig,
        residual=resid_sig,
    )


def _check_report(r: ExperimentReport) -> None:
    """Internal consistency of the reported budget.

    The three amounts must close exactly, the residual can never sit
    below the receiver noise floor (the fit is scored on held-out data,
    so it cannot cancel noise), and a tuned canceller must not amplify.
    """
    if abs((r.rf_sic_db + r.digital_sic_db) - r.total_sic_db) > 1e-9:
        raise RuntimeError("budget identity violated: rf + digital != total")
    if np.isfinite(r.noise_floor_dbm) and r.post_digital_dbm < r.noise_floor_dbm - 1.0:
        raise RuntimeError(
            f"residual {r.post_digital_dbm:.2f} dBm fell below the "
            f"{r.noise_floor_dbm:.2f} dBm noise floor"
        )
    if r.tuned and r.post_rf_dbm > r.pre_cancel_dbm + 0.1:
        raise RuntimeError("tuned RF stage increased in-band power")


def run_node_experiment(cfg: ExperimentConfig | None = None) -> ExperimentResult:
    """Single-node budget experiment (no remote signal)."""
    cfg = cfg or ExperimentConfig()
    if cfg.remote is not None:
        cfg = replace(cfg, remote=None)
    return run_experiment(cfg)


def run_link_experiment(cfg: ExperimentConfig | None = None) -> ExperimentResult:
    """Budget experiment with a far-end tone; adds SNR metrics."""
    cfg = cfg or ExperimentConfig()
    if cfg.remote is None:
        cfg = replace(cfg, remote=RemoteSpec())
    return run_experiment(cfg)


def node_tone_config(**overrides) -> ExperimentConfig:
    """Stock tone experiment: 200 kHz tone at 5 MS/s, 0 dBm."""
    base = dict(sample_rate_hz=5e6, wave=WaveSpec(kind="tone", offset_hz=200e3))
    base.update(overrides)
    return ExperimentConfig(**base)


def node_qpsk_config(**overrides) -> ExperimentConfig:
    """Stock wideband experiment: 2.5 Msym/s QPSK at 10 MS/s, 0 dBm."""
    base = dict(
        sample_rate_hz=10e6,
        wave=WaveSpec(kind="psk", order=4, symbol_rate_hz=2.5e6),
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def link_tone_config(**overrides) -> ExperimentConfig:
    """Stock link experiment: tone node plus a 400 kHz remote tone."""
    base = dict(
        sample_rate_hz=5e6,
        wave=WaveSpec(kind="tone", offset_hz=200e3),
        remote=RemoteSpec(),
    )
    base.update(overrides)
    return ExperimentConfig(**base)
