"""End-to-end acceptance gate.

Each test exercises one advertised capability of the bench simulator at
its stated tolerance and records a PASS/FAIL line that the pytest
terminal summary prints as a block, so the whole contract is readable
in one place at the end of a run.
"""

import time

import numpy as np
import pytest

import acceptance_log
from test_canceller import _brute_force_best, _random_channel
from test_volterra import _normal_equations_oracle

from fdlab.canceller import (
    CancellerCode,
    CancellerParams,
    att_code_to_attenuation_db,
    canceller_gain,
    ps_code_to_phase_deg,
    tune_canceller,
)
from fdlab.experiment import (
    link_tone_config,
    node_qpsk_config,
    node_tone_config,
    run_link_experiment,
    run_node_experiment,
)
from fdlab.signals import ComplexBasebandSignal, power_dbm
from fdlab.spectral import integrated_power_dbm, welch_psd
from fdlab.spi import SpiTarget, decode_word, encode_config, encode_word, transfer_time_us
from fdlab.volterra import VolterraBasis, build_volterra_features, fit_volterra
from fdlab.waveforms import add_awgn, gen_tone


def _check(criterion: str, ok: bool, detail: str) -> None:
    acceptance_log.record(criterion, ok, detail)
    assert ok, f"{criterion}: {detail}"


def test_tone_budget():
    t0 = time.perf_counter()
    r = run_node_experiment(node_tone_config()).report
    elapsed = time.perf_counter() - t0
    ok = (
        r.total_sic_db >= 87.0
        and abs(r.post_digital_dbm - (-85.0)) <= 3.0
        and 40.0 <= r.rf_sic_db <= 50.0
        and 40.0 <= r.digital_sic_db <= 50.0
        and elapsed < 10.0
    )
    _check(
        "tone budget (5 MS/s, 200 kHz, 0 dBm, auto-tune)",
        ok,
        f"total {r.total_sic_db:.2f} dB = rf {r.rf_sic_db:.2f} + dig "
        f"{r.digital_sic_db:.2f}, residual {r.post_digital_dbm:.2f} dBm, "
        f"{elapsed:.2f} s",
    )


def test_qpsk_budget():
    t0 = time.perf_counter()
    r = run_node_experiment(node_qpsk_config()).report
    elapsed = time.perf_counter() - t0
    ok = (
        r.total_sic_db >= 82.0
        and r.rf_sic_db >= 40.0
        and r.response_rf_sic_db >= 40.0
        and elapsed < 30.0
    )
    _check(
        "qpsk budget (2.5 MHz symbols, 10 MS/s, 0 dBm)",
        ok,
        f"total {r.total_sic_db:.2f} dB, rf {r.rf_sic_db:.2f} dB measured / "
        f"{r.response_rf_sic_db:.2f} dB across the 5 MHz band, {elapsed:.2f} s",
    )


def test_link_snr_preserved():
    r = run_link_experiment(link_tone_config()).report
    m = r.link
    ok = m.snr_loss_db <= 1.0 and abs(m.snr_after_db - m.snr_ideal_db) <= 1.0
    _check(
        "link: remote tone survives digital SIC",
        ok,
        f"SNR {m.snr_before_db:.2f} -> {m.snr_after_db:.2f} dB "
        f"(ideal {m.snr_ideal_db:.2f}, loss {m.snr_loss_db:.2f} dB)",
    )


def test_exhaustive_tuner_equals_oracle():
    rng = np.random.default_rng(2718)
    params = CancellerParams()
    worst_gap = 0.0
    exact = 0
    for _ in range(10):
        h = _random_channel(rng)
        result = tune_canceller(h, params, 4e6)
        att, ps = _brute_force_best(h, params, 4e6)
        assert result.evaluations == 128 * 256
        if (result.code.att, result.code.ps) == (att, ps):
            exact += 1
            continue
        hb = h.h[h.band_mask(4e6)]
        ref = np.mean(np.abs(hb) ** 2)

        def sic(code):
            res = np.mean(np.abs(hb - canceller_gain(code, params)) ** 2)
            return -10.0 * np.log10(res / ref)

        gap = abs(sic(result.code) - sic(CancellerCode(att=att, ps=ps)))
        worst_gap = max(worst_gap, gap)
    ok = exact == 10 or worst_gap < 1e-9
    _check(
        "exhaustive ATT/PS search equals brute-force oracle",
        ok,
        f"{exact}/10 exact code matches over 32768 codes each, "
        f"worst SIC gap {worst_gap:.2e} dB",
    )


def test_volterra_fit_equals_oracle():
    rng = np.random.default_rng(99)
    basis = VolterraBasis(orders=(1, 3, 5), memory_taps=8, pre_cursor=2)
    worst = 0.0
    for _ in range(20):
        n = 1500
        x = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2)
        feats = build_volterra_features(x, basis)
        w = rng.standard_normal(feats.shape[1]) + 1j * rng.standard_normal(feats.shape[1])
        rows = feats.shape[0]
        y = feats @ w + 1e-3 * (rng.standard_normal(rows) + 1j * rng.standard_normal(rows))
        model = fit_volterra(feats, y, basis=basis)
        oracle = _normal_equations_oracle(feats, y, model.ridge)
        worst = max(worst, np.linalg.norm(model.coeffs - oracle) / np.linalg.norm(oracle))
    ok = worst < 1e-6
    _check(
        "volterra LS equals normal-equations oracle",
        ok,
        f"20 random instances, worst relative coefficient error {worst:.2e}",
    )


def test_volterra_recovers_planted_kernels():
    rng = np.random.default_rng(7)
    basis = VolterraBasis(orders=(1, 3, 5), memory_taps=8, pre_cursor=2)
    worst = 0.0
    for _ in range(5):
        x = (rng.standard_normal(1500) + 1j * rng.standard_normal(1500)) / np.sqrt(2)
        feats = build_volterra_features(x, basis)
        w = rng.standard_normal(feats.shape[1]) + 1j * rng.standard_normal(feats.shape[1])
        model = fit_volterra(feats, feats @ w, ridge=0.0, basis=basis)
        worst = max(worst, np.linalg.norm(model.coeffs - w) / np.linalg.norm(w))
    ok = worst < 1e-9
    _check(
        "noiseless planted kernels recovered",
        ok,
        f"5 instances, worst relative error {worst:.2e}",
    )


def test_quantization_exact():
    params = CancellerParams()
    att_ok = att_code_to_attenuation_db(127, params) == 31.75
    ps_ok = ps_code_to_phase_deg(1, params) * 256 == 360.0
    _check(
        "hardware quantization is exact",
        att_ok and ps_ok,
        f"ATT 127 -> {att_code_to_attenuation_db(127, params)} dB, "
        f"PS step x256 -> {ps_code_to_phase_deg(1, params) * 256} deg",
    )


def test_spi_all_codes_round_trip():
    checked = 0
    ok = True
    for code in range(128):
        w = encode_word(SpiTarget.ATT, code)
        ok &= decode_word(w.data) == w
        checked += 1
    for code in range(256):
        w = encode_word(SpiTarget.PS_DAC, code)
        ok &= decode_word(w.data) == w
        checked += 1
    for code in range(32):
        for bank in (SpiTarget.CAP1, SpiTarget.CAP2, SpiTarget.CAP3):
            w = encode_word(bank, code)
            ok &= decode_word(w.data) == w
        checked += 1
    timing = transfer_time_us(encode_config(30, 110, (16, 6, 6)), clock_hz=8e6)
    ok = ok and checked == 416 and timing == 7.0
    _check(
        "SPI codec round-trips every code",
        ok,
        f"{checked} codes (480 wire words), full-config transfer "
        f"{timing} us at 8 MHz",
    )


def test_psd_power_accounting():
    fs = 5e6
    tone = gen_tone(fs, 321e3, -10.0, 100_000)
    tone_gap = abs(
        integrated_power_dbm(welch_psd(tone, nfft=1024, window="hann")) - power_dbm(tone)
    )
    silence = ComplexBasebandSignal(samples=np.zeros(100_000, complex), sample_rate_hz=fs)
    noise = add_awgn(silence, -85.0, seed=5)
    noise_gap = abs(
        integrated_power_dbm(welch_psd(noise, nfft=1024, window="hann")) - power_dbm(noise)
    )
    floor_gap = abs(integrated_power_dbm(welch_psd(noise, nfft=1024, window="hann")) - (-85.0))
    ok = tone_gap <= 0.1 and noise_gap <= 0.1 and floor_gap <= 0.3
    _check(
        "welch PSD integrates to time-domain power",
        ok,
        f"tone gap {tone_gap:.3f} dB, noise gap {noise_gap:.3f} dB, "
        f"-85 dBm floor read back within {floor_gap:.3f} dB at 1e5 samples",
    )


def test_reports_byte_identical():
    first = run_node_experiment(node_tone_config()).report.to_json()
    second = run_node_experiment(node_tone_config()).report.to_json()
    third = run_link_experiment(link_tone_config()).report.to_json()
    fourth = run_link_experiment(link_tone_config()).report.to_json()
    ok = first == second and third == fourth
    _check(
        "identical config+seed gives byte-identical reports",
        ok,
        f"node report {len(first)} bytes, link report {len(third)} bytes, "
        "both reproduced exactly",
    )
