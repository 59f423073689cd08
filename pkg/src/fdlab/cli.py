"""Command line front end.

``fd-lab node`` and ``fd-lab link`` run the budget experiments and
print the bring-up style report (or JSON with ``--json``).  ``fd-lab
tune`` searches canceller codes against the configured channel,
``fd-lab spi`` shows the control words a knob state programs, and
``fd-lab serve`` starts the HTTP/WebSocket service.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from fdlab.canceller import CancellerCode, tune_canceller
from fdlab.channel import si_channel_response
from fdlab.config import default_profile, load_profile
from fdlab.experiment import (
    ExperimentConfig,
    RemoteSpec,
    WaveSpec,
    run_experiment,
)
from fdlab.signals import write_iq
from fdlab.spectral import export_psd_csv
from fdlab.spi import DEFAULT_SPI_CLOCK_HZ, encode_config, hex_dump, transfer_time_us

import json

import numpy as np


def _parse_canceller(text: str):
    if text == "auto":
        return "auto"
    parts = [p for p in text.split(",") if p]
    if len(parts) not in (2, 5):
        raise argparse.ArgumentTypeError(
            "canceller is 'auto', 'ATT,PS' or 'ATT,PS,C1,C2,C3'"
        )
    vals = [int(p) for p in parts]
    caps = tuple(vals[2:]) if len(vals) == 5 else (16, 6, 6)
    try:
        return CancellerCode(att=vals[0], ps=vals[1], caps=caps)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def _add_experiment_args(p: argparse.ArgumentParser, link: bool) -> None:
    p.add_argument("--rate", type=float, default=5e6,
                   help="sample rate in S/s (default 5e6)")
    p.add_argument("--freq", type=float, default=900e6,
                   help="carrier frequency in Hz (default 900e6)")
    p.add_argument("--tx-power", type=float, default=0.0,
                   help="transmit level in dBm (default 0)")
    p.add_argument("--tx-gain", type=float, default=10.0,
                   help="front-end TX gain register, recorded in the report")
    p.add_argument("--rx-gain", type=float, default=10.0,
                   help="front-end RX gain register, recorded in the report")
    p.add_argument("--wave", choices=("tone", "psk"), default="tone")
    p.add_argument("--wave-freq", type=float, default=200e3,
                   help="tone offset in Hz (default 200e3)")
    p.add_argument("--symbol-rate", type=float, default=2.5e6,
                   help="PSK symbol rate in sym/s (default 2.5e6)")
    p.add_argument("--psk-order", type=int, choices=(2, 4), default=4)
    p.add_argument("--seed", type=int, default=1234)
    p.add_argument("--profile", type=Path, default=None,
                   help="hardware profile JSON (default: built-in profile)")
    p.add_argument("--canceller", type=_parse_canceller, default="auto",
                   metavar="auto|ATT,PS[,C1,C2,C3]")
    p.add_argument("--strategy", choices=("exhaustive", "coordinate-descent"),
                   default="exhaustive")
    p.add_argument("--json", action="store_true", help="print the report as JSON")
    p.add_argument("--json-out", type=Path, default=None,
                   help="also write the JSON report to a file")
    p.add_argument("--psd-out", type=Path, default=None, metavar="PREFIX",
                   help="write PREFIX-{tx,rx,residual}.csv spectra")
    p.add_argument("--iq-out", type=Path, default=None, metavar="PREFIX",
                   help="write PREFIX-{rx,residual}.iq capture files")
    if link:
        p.add_argument("--remote-freq", type=float, default=400e3,
                       help="remote tone offset in Hz (default 400e3)")
        p.add_argument("--remote-power", type=float, default=None,
                       help="remote level in dBm (default: floor + 20)")


def _experiment_config(args, link: bool) -> ExperimentConfig:
    profile = load_profile(args.profile) if args.profile else default_profile()
    if args.wave == "tone":
        wave = WaveSpec(kind="tone", offset_hz=args.wave_freq)
    else:
        wave = WaveSpec(kind="psk", order=args.psk_order,
                        symbol_rate_hz=args.symbol_rate)
    remote = None
    if link:
        remote = RemoteSpec(offset_hz=args.remote_freq, power_dbm=args.remote_power)
    return ExperimentConfig(
        sample_rate_hz=args.rate,
        carrier_hz=args.freq,
        tx_power_dbm=args.tx_power,
        tx_gain_db=args.tx_gain,
        rx_gain_db=args.rx_gain,
        wave=wave,
        canceller=args.canceller,
        tune_strategy=args.strategy,
        remote=remote,
        profile=profile,
        seed=args.seed,
    )


def _run_experiment_cmd(args, link: bool) -> int:
    cfg = _experiment_config(args, link)
    result = run_experiment(cfg)
    report = result.report
    if args.json:
        sys.stdout.write(report.to_json())
    else:
        sys.stdout.write(report.text())
    if args.json_out:
        args.json_out.write_text(report.to_json())
    if args.psd_out:
        prefix = str(args.psd_out)
        export_psd_csv(result.psd_tx, prefix + "-tx.csv")
        export_psd_csv(result.psd_rx, prefix + "-rx.csv")
        export_psd_csv(result.psd_residual, prefix + "-residual.csv")
    if args.iq_out:
        prefix = str(args.iq_out)
        write_iq(result.rx, prefix + "-rx.iq")
        write_iq(result.residual, prefix + "-residual.iq")
    return 0


def _tune_cmd(args) -> int:
    profile = load_profile(args.profile) if args.profile else default_profile()
    grid = np.linspace(-args.rate / 2, args.rate / 2, 2049)
    h_si = si_channel_response(profile.circulator, profile.tuner, profile.antenna,
                               grid, args.freq, profile.z0_ohm)
    band = min(args.band, args.rate)
    result = tune_canceller(h_si, profile.canceller, band,
                            strategy=args.strategy,
                            caps=profile.tuner.cap_codes)
    mask = h_si.band_mask(band)
    isolation_db = -10.0 * float(np.log10(np.mean(np.abs(h_si.h[mask]) ** 2)))
    out = {
        "att": result.code.att,
        "ps": result.code.ps,
        "caps": list(result.code.caps),
        "canceller_sic_db": result.rf_sic_db,
        "isolation_db": isolation_db,
        "rf_sic_db": result.rf_sic_db + isolation_db,
        "evaluations": result.evaluations,
        "sweeps": result.sweeps,
    }
    if args.json:
        print(json.dumps(out, indent=2, sort_keys=True))
    else:
        print(f"ATT={out['att']} PS={out['ps']} "
              f"CAPS={out['caps'][0]},{out['caps'][1]},{out['caps'][2]}")
        print(f"RF SIC: {out['rf_sic_db']:.2f} dB over {band / 1e6:g} MHz "
              f"(isolation {isolation_db:.2f} dB + canceller "
              f"{out['canceller_sic_db']:.2f} dB, {out['evaluations']} evaluations)")
    return 0


def _spi_cmd(args) -> int:
    words = encode_config(att=args.att, ps=args.ps,
                          caps=(args.cap1, args.cap2, args.cap3))
    sys.stdout.write(hex_dump(words))
    total = sum(transfer_time_us(w, clock_hz=args.clock) for w in words)
    print(f"total: {len(words)} words, {total:g} us at {args.clock / 1e6:g} MHz")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="fd-lab",
        description="Full-duplex self-interference cancellation lab bench.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_node = sub.add_parser("node", help="single-node cancellation budget")
    _add_experiment_args(p_node, link=False)

    p_link = sub.add_parser("link", help="budget with a far-end tone")
    _add_experiment_args(p_link, link=True)

    p_tune = sub.add_parser("tune", help="search canceller codes")
    p_tune.add_argument("--rate", type=float, default=5e6)
    p_tune.add_argument("--freq", type=float, default=900e6)
    p_tune.add_argument("--band", type=float, default=5e6,
                        help="tuning bandwidth in Hz (default 5e6)")
    p_tune.add_argument("--profile", type=Path, default=None)
    p_tune.add_argument("--strategy", choices=("exhaustive", "coordinate-descent"),
                        default="exhaustive")
    p_tune.add_argument("--json", action="store_true")

    p_spi = sub.add_parser("spi", help="control words for a knob state")
    p_spi.add_argument("att", type=int)
    p_spi.add_argument("ps", type=int)
    p_spi.add_argument("cap1", type=int)
    p_spi.add_argument("cap2", type=int)
    p_spi.add_argument("cap3", type=int)
    p_spi.add_argument("--clock", type=float, default=DEFAULT_SPI_CLOCK_HZ)

    p_serve = sub.add_parser("serve", help="start the HTTP/WebSocket service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)

    args = parser.parse_args(argv)
    try:
        if args.command == "node":
            return _run_experiment_cmd(args, link=False)
        if args.command == "link":
            return _run_experiment_cmd(args, link=True)
        if args.command == "tune":
            return _tune_cmd(args)
        if args.command == "spi":
            return _spi_cmd(args)
        if args.command == "serve":
            from fdlab.service import serve

            serve(host=args.host, port=args.port)
            return 0
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
