import json

import numpy as np
import pytest

from fdlab.signals import (
    ComplexBasebandSignal,
    dbm_to_mean_square,
    power_dbm,
    read_iq,
    write_iq,
)


def test_power_convention_closed_forms():
    # unit mean-square complex waveform sits at +30 dBm by convention
    x = np.exp(1j * np.linspace(0, 7, 1000))
    assert power_dbm(x) == pytest.approx(30.0, abs=1e-12)
    # scaling by 10^(-3/2) in amplitude drops 30 dB
    assert power_dbm(x * 10 ** -1.5) == pytest.approx(0.0, abs=1e-12)


def test_power_of_signal_object():
    sig = ComplexBasebandSignal(samples=np.full(64, 0.5 + 0j), sample_rate_hz=1e6)
    # mean |x|^2 = 0.25 -> 10*log10(0.25) + 30
    assert power_dbm(sig) == pytest.approx(10 * np.log10(0.25) + 30)


def test_dbm_round_trip():
    for level in (-85.0, -20.0, 0.0, 5.0):
        ms = dbm_to_mean_square(level)
        assert 10 * np.log10(ms) + 30 == pytest.approx(level, abs=1e-12)


def test_power_empty_and_zero():
    with pytest.raises(ValueError):
        power_dbm(np.array([], dtype=complex))
    assert power_dbm(np.zeros(8, dtype=complex)) == -np.inf


def test_signal_validation():
    with pytest.raises(ValueError):
        ComplexBasebandSignal(samples=np.zeros((2, 2), dtype=complex), sample_rate_hz=1e6)
    with pytest.raises(ValueError):
        ComplexBasebandSignal(samples=np.zeros(4, dtype=complex), sample_rate_hz=0.0)


def test_duration():
    sig = ComplexBasebandSignal(samples=np.zeros(500, dtype=complex), sample_rate_hz=5e6)
    assert sig.duration_s == pytest.approx(1e-4)
    assert len(sig) == 500


def test_iq_round_trip(tmp_path):
    rng = np.random.default_rng(7)
    x = rng.standard_normal(300) + 1j * rng.standard_normal(300)
    sig = ComplexBasebandSignal(samples=x, sample_rate_hz=10e6)
    path = tmp_path / "cap.iq"
    write_iq(sig, path)

    back = read_iq(path)
    assert back.sample_rate_hz == 10e6
    assert len(back) == 300
    # float32 storage: about 7 significant digits survive
    np.testing.assert_allclose(back.samples, x, rtol=1e-6, atol=1e-6)


def test_iq_file_layout(tmp_path):
    # two samples with known values, checked against the raw bytes
    sig = ComplexBasebandSignal(
        samples=np.array([1.0 + 2.0j, -3.0 + 0.5j]), sample_rate_hz=1e6
    )
    path = tmp_path / "two.iq"
    write_iq(sig, path)
    raw = np.frombuffer(path.read_bytes(), dtype="<f4")
    np.testing.assert_array_equal(raw, np.array([1.0, 2.0, -3.0, 0.5], dtype="<f4"))

    meta = json.loads((tmp_path / "two.iq.json").read_text())
    assert meta["num_samples"] == 2
    assert meta["sample_rate_hz"] == 1e6


def test_read_iq_validates_sidecar(tmp_path):
    sig = ComplexBasebandSignal(samples=np.ones(4, dtype=complex), sample_rate_hz=1e6)
    path = tmp_path / "cap.iq"
    write_iq(sig, path)

    meta_path = tmp_path / "cap.iq.json"
    meta = json.loads(meta_path.read_text())
    meta["num_samples"] = 99
    meta_path.write_text(json.dumps(meta))
    with pytest.raises(ValueError):
        read_iq(path)

    meta_path.unlink()
    with pytest.raises(FileNotFoundError):
        read_iq(path)
