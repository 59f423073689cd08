import json

import numpy as np
import pytest

from fdlab.cli import main
from fdlab.signals import read_iq
from fdlab.spectral import read_psd_csv


def test_node_text_report(capsys):
    assert main(["node"]) == 0
    out = capsys.readouterr().out
    assert "TX Signal: 0.00 dBm" in out
    assert "Amount of RF SIC: 42.59 dB" in out
    assert "Total SIC: 87.62 dB" in out
    assert "Canceller code: ATT=9 PS=209" in out


def test_node_json_matches_text_run(capsys):
    assert main(["node", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["mode"] == "node"
    assert doc["total_sic_db"] == pytest.approx(87.62, abs=0.01)
    assert doc["config"]["seed"] == 1234


def test_link_reports_snr(capsys):
    assert main(["link", "--seed", "9"]) == 0
    out = capsys.readouterr().out
    assert "Remote tone:" in out
    assert "SNR after Digital SIC:" in out


def test_manual_canceller_flag(capsys):
    assert main(["node", "--canceller", "30,110", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["canceller_code"] == {"att": 30, "ps": 110, "caps": [16, 6, 6]}
    assert doc["tuned"] is False


def test_artifact_outputs(tmp_path, capsys):
    prefix = tmp_path / "run"
    code = main([
        "node", "--json",
        "--json-out", str(tmp_path / "report.json"),
        "--psd-out", str(prefix),
        "--iq-out", str(prefix),
    ])
    assert code == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["total_sic_db"] > 87.0
    freqs, psd = read_psd_csv(prefix.with_name("run-residual.csv"))
    assert freqs.size == 1024
    rx = read_iq(prefix.with_name("run-rx.iq"))
    assert len(rx) == 10000 and rx.sample_rate_hz == 5e6
    # residual capture carries less energy than the rx capture
    resid = read_iq(prefix.with_name("run-residual.iq"))
    assert np.mean(np.abs(resid.samples) ** 2) < np.mean(np.abs(rx.samples) ** 2)


def test_tune_text_and_json(capsys):
    assert main(["tune"]) == 0
    text = capsys.readouterr().out
    assert "RF SIC: 44.02 dB over 5 MHz" in text
    assert main(["tune", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert (doc["att"], doc["ps"]) == (9, 209)
    assert doc["evaluations"] == 32768


def test_spi_words(capsys):
    assert main(["spi", "30", "110", "16", "6", "6"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("41 1E\n51 B8\nB0\nC6\nE6\n")
    assert "5 words, 7 us at 8 MHz" in out


def test_bad_arguments_exit_2(capsys):
    # argparse rejects malformed knob values before the run starts
    with pytest.raises(SystemExit) as exc:
        main(["node", "--canceller", "999,0"])
    assert exc.value.code == 2
    assert "outside 0..127" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["node", "--wave", "chirp"])
