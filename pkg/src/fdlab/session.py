"""Live tuning sessions: a continuously running node you can poke.

Each session owns a three-stage pipeline connected by bounded queues,
one thread per producing stage:

  waveform blocks -> [q] -> channel + canceller + noise -> [q] -> frames

Stage one synthesizes transmit blocks.  Stage two applies the
self-interference response minus the *current* canceller tap and adds
receiver noise; it snapshots the knob state under the session lock, so
a knob write takes effect on the next simulated block.  The consumer
side turns blocks into PSD frames with a monotone sequence number.

Knob writes are last-writer-wins: concurrent writers all get an ack for
their own value, and whichever write lands last is what the following
frames show.  Digital-stage fits run synchronously in the caller's
thread, separate from the streaming threads.
"""

from __future__ import annotations

import queue
import threading
from dataclasses import replace

import numpy as np

from fdlab.canceller import (
    CancellerCode,
    canceller_response,
    residual_response,
    tune_canceller,
)
from fdlab.channel import FrequencyResponse, si_channel_response
from fdlab.experiment import ExperimentConfig, run_experiment
from fdlab.signals import ComplexBasebandSignal, dbm_to_mean_square
from fdlab.spectral import welch_psd
from fdlab.waveforms import apply_pa, gen_psk, gen_tone

FRAME_SAMPLES = 4096
FRAME_RATE_HZ = 10.0
_QUEUE_DEPTH = 2


def _response_sic_db(h_res: FrequencyResponse, band_hz: float) -> float:
    """Total TX-to-RX suppression of the residual response, in dB."""
    mask = h_res.band_mask(band_hz)
    p = float(np.mean(np.abs(h_res.h[mask]) ** 2))
    if p == 0.0:
        return np.inf
    return -10.0 * np.log10(p)


class Session:
    """One live node; create through :class:`SessionManager`."""

    def __init__(self, session_id: str, cfg: ExperimentConfig):
        self.id = session_id
        self.cfg = cfg
        self.profile = cfg.profile
        self.frame_samples = FRAME_SAMPLES
        self.frame_interval_s = 1.0 / FRAME_RATE_HZ
        self._lock = threading.Lock()
        self._stop = threading.Event()
        self._seq = 0
        self._grid = np.fft.fftshift(
            np.fft.fftfreq(self.frame_samples, d=1.0 / cfg.sample_rate_hz)
        )
        self._band = cfg.effective_tune_band_hz()
        self._h_si_cache: dict[tuple[int, int, int], FrequencyResponse] = {}

        if isinstance(cfg.canceller, CancellerCode):
            self._code = cfg.canceller
        else:
            h_si = self._h_si_for(self.profile.tuner.cap_codes)
            tuned = tune_canceller(h_si, self.profile.canceller, self._band,
                                   strategy=cfg.tune_strategy,
                                   caps=self.profile.tuner.cap_codes)
            self._code = tuned.code
        self._h_res = self._residual_for(self._code)

        self._noise_rng = np.random.default_rng(cfg.seed + 2)
        self._q_tx: queue.Queue = queue.Queue(maxsize=_QUEUE_DEPTH)
        self._q_rx: queue.Queue = queue.Queue(maxsize=_QUEUE_DEPTH)
        self._t_tx = threading.Thread(target=self._tx_loop, daemon=True,
                                      name=f"{session_id}-tx")
        self._t_rx = threading.Thread(target=self._rx_loop, daemon=True,
                                      name=f"{session_id}-rx")
        self._t_tx.start()
        self._t_rx.start()

    # -- responses ----------------------------------------------------

    def _h_si_for(self, caps: tuple[int, int, int]) -> FrequencyResponse:
        caps = tuple(caps)
        if caps not in self._h_si_cache:
            tuner = replace(self.profile.tuner, cap_codes=caps)
            self._h_si_cache[caps] = si_channel_response(
                self.profile.circulator, tuner, self.profile.antenna,
                self._grid, self.cfg.carrier_hz, self.profile.z0_ohm,
            )
        return self._h_si_cache[caps]

    def _residual_for(self, code: CancellerCode) -> FrequencyResponse:
        h_si = self._h_si_for(code.caps)
        return residual_response(
            h_si, canceller_response(code, self.profile.canceller, self._grid)
        )

    # -- pipeline stages ----------------------------------------------

    def _gen_block(self, idx: int) -> np.ndarray:
        cfg = self.cfg
        w = cfg.wave
        n = self.frame_samples
        if w.kind == "tone":
            # continuous phase across blocks
            k = np.arange(idx * n, (idx + 1) * n)
            amp = np.sqrt(dbm_to_mean_square(cfg.tx_power_dbm))
            x = amp * np.exp(2j * np.pi * w.offset_hz / cfg.sample_rate_hz * k)
        else:
            sps = int(round(cfg.sample_rate_hz / w.symbol_rate_hz))
            sig = gen_psk(
                order=w.order,
                symbol_rate_hz=w.symbol_rate_hz,
                sample_rate_hz=cfg.sample_rate_hz,
                level_dbm=cfg.tx_power_dbm,
                num_symbols=-(-n // sps),
                seed=cfg.seed + 1000 + idx,
                rrc_rolloff=w.rrc_rolloff,
                rrc_span_symbols=w.rrc_span_symbols,
            )
            x = sig.samples[:n]
        sig = ComplexBasebandSignal(samples=x, sample_rate_hz=cfg.sample_rate_hz)
        return apply_pa(sig, self.profile.tx_chain).samples

    def _put(self, q: queue.Queue, item) -> bool:
        while not self._stop.is_set():
            try:
                q.put(item, timeout=0.1)
                return True
            except queue.Full:
                continue
        return False

    def _tx_loop(self):
        idx = 0
        while not self._stop.is_set():
            block = self._gen_block(idx)
            if not self._put(self._q_tx, (idx, block)):
                return
            idx += 1

    def _rx_loop(self):
        sigma = 0.0
        if self.profile.noise_floor_dbm is not None and np.isfinite(self.profile.noise_floor_dbm):
            sigma = np.sqrt(dbm_to_mean_square(self.profile.noise_floor_dbm))
        while not self._stop.is_set():
            try:
                idx, tx = self._q_tx.get(timeout=0.1)
            except queue.Empty:
                continue
            with self._lock:
                code = self._code
                h_res = self._h_res
            rx = np.fft.ifft(np.fft.fft(tx) * np.fft.ifftshift(h_res.h))
            if sigma > 0.0:
                n = rx.size
                rx = rx + sigma / np.sqrt(2.0) * (
                    self._noise_rng.standard_normal(n)
                    + 1j * self._noise_rng.standard_normal(n)
                )
            sic = _response_sic_db(h_res, self._band)
            if not self._put(self._q_rx, (idx, rx, code, sic)):
                return

    # -- consumer API ---------------------------------------------------

    def get_frame(self, timeout: float = 5.0) -> dict:
        """Freshest PSD frame; blocks until the pipeline produces one.

        The stream is a live monitor, so anything queued behind the
        newest finished block is dropped rather than replayed.
        """
        if self._stop.is_set():
            raise RuntimeError(f"session {self.id} is closed")
        idx, rx, code, sic = self._q_rx.get(timeout=timeout)
        while True:
            try:
                idx, rx, code, sic = self._q_rx.get_nowait()
            except queue.Empty:
                break
        psd = welch_psd(
            ComplexBasebandSignal(samples=rx, sample_rate_hz=self.cfg.sample_rate_hz)
        )
        with self._lock:
            seq = self._seq
            self._seq += 1
        return {
            "seq": seq,
            "freqs_hz": psd.freqs_hz.tolist(),
            "psd_dbm": psd.psd_dbm.tolist(),
            "rf_sic_db": sic,
            "code": {"att": code.att, "ps": code.ps, "caps": list(code.caps)},
        }

    def set_canceller(self, att: int | None = None, ps: int | None = None,
                      caps=None) -> dict:
        """Write knobs (any subset) and ack with the applied state.

        Raises ValueError when a code is out of range; nothing is
        applied in that case.
        """
        with self._lock:
            cur = self._code
            new = CancellerCode(
                att=cur.att if att is None else int(att),
                ps=cur.ps if ps is None else int(ps),
                caps=tuple(cur.caps) if caps is None else tuple(int(c) for c in caps),
            )
            h_res = self._residual_for(new)
            self._code = new
            self._h_res = h_res
            sic = _response_sic_db(h_res, self._band)
        # flush frames made with the old knobs so the change shows fast
        while True:
            try:
                self._q_rx.get_nowait()
            except queue.Empty:
                break
        return {
            "att": new.att, "ps": new.ps, "caps": list(new.caps),
            "rf_sic_db": sic,
        }

    def tune(self, strategy: str = "exhaustive") -> dict:
        """Re-tune ATT/PS for the current caps and apply the result."""
        with self._lock:
            caps = self._code.caps
        h_si = self._h_si_for(caps)
        result = tune_canceller(h_si, self.profile.canceller, self._band,
                                strategy=strategy, caps=caps)
        ack = self.set_canceller(att=result.code.att, ps=result.code.ps,
                                 caps=result.code.caps)
        ack["evaluations"] = result.evaluations
        ack["sweeps"] = result.sweeps
        return ack

    def run_digital_sic(self) -> dict:
        """Full budget run with the knobs as currently set."""
        with self._lock:
            code = self._code
        cfg = replace(self.cfg, canceller=code)
        return run_experiment(cfg).report.to_dict()

    def state(self) -> dict:
        with self._lock:
            code = self._code
            sic = _response_sic_db(self._h_res, self._band)
            seq = self._seq
        return {
            "id": self.id,
            "sample_rate_hz": self.cfg.sample_rate_hz,
            "carrier_hz": self.cfg.carrier_hz,
            "tx_power_dbm": self.cfg.tx_power_dbm,
            "wave": self.cfg.wave.to_dict(),
            "noise_floor_dbm": self.profile.noise_floor_dbm,
            "code": {"att": code.att, "ps": code.ps, "caps": list(code.caps)},
            "rf_sic_db": sic,
            "seq": seq,
            "frame_rate_hz": FRAME_RATE_HZ,
            "frame_samples": self.frame_samples,
        }

    def close(self):
        self._stop.set()
        for q in (self._q_tx, self._q_rx):
            try:
                while True:
                    q.get_nowait()
            except queue.Empty:
                pass
        self._t_tx.join(timeout=2.0)
        self._t_rx.join(timeout=2.0)

    @property
    def closed(self) -> bool:
        return self._stop.is_set()


class SessionManager:
    """Registry creating, finding and tearing down sessions."""

    def __init__(self):
        self._lock = threading.Lock()
        self._sessions: dict[str, Session] = {}
        self._counter = 0

    def create(self, cfg: ExperimentConfig | None = None) -> Session:
        cfg = cfg or ExperimentConfig()
        with self._lock:
            self._counter += 1
            sid = f"s{self._counter}"
            sess = Session(sid, cfg)
            self._sessions[sid] = sess
        return sess

    def get(self, session_id: str) -> Session:
        with self._lock:
            sess = self._sessions.get(session_id)
        if sess is None:
            raise KeyError(f"no session {session_id!r}")
        return sess

    def ids(self) -> list[str]:
        with self._lock:
            return sorted(self._sessions, key=lambda s: int(s[1:]))

    def delete(self, session_id: str) -> None:
        with self._lock:
            sess = self._sessions.pop(session_id, None)
        if sess is None:
            raise KeyError(f"no session {session_id!r}")
        sess.close()

    def close_all(self) -> None:
        with self._lock:
            sessions = list(self._sessions.values())
            self._sessions.clear()
        for sess in sessions:
            sess.close()
