"""Desk-scale full-duplex transceiver lab.

Simulates the analog self-interference path of a shared-antenna
full-duplex node (circulator leakage plus antenna reflection through a
digitally tunable matching network), a tap-and-subtract RF canceller
with quantized attenuator/phase-shifter controls, and a least-squares
digital canceller built on a memory-polynomial basis.  Ships the
experiment drivers, a live-tuning HTTP/WebSocket service and a small
CLI under the ``fd-lab`` entry point.
"""

from fdlab.canceller import CancellerCode, CancellerParams, tune_canceller
from fdlab.channel import (
    AntennaImpedance,
    CirculatorParams,
    FrequencyResponse,
    TunerConfig,
    si_channel_response,
)
from fdlab.config import NodeProfile, default_profile, load_profile, save_profile
from fdlab.experiment import (
    ExperimentConfig,
    ExperimentReport,
    RemoteSpec,
    WaveSpec,
    link_tone_config,
    node_qpsk_config,
    node_tone_config,
    run_experiment,
    run_link_experiment,
    run_node_experiment,
)
from fdlab.signals import ComplexBasebandSignal, power_dbm, read_iq, write_iq
from fdlab.spectral import welch_psd
from fdlab.volterra import VolterraBasis, VolterraModel, apply_digital_sic, fit_volterra

__all__ = [
    "AntennaImpedance",
    "CancellerCode",
    "CancellerParams",
    "CirculatorParams",
    "ComplexBasebandSignal",
    "ExperimentConfig",
    "ExperimentReport",
    "FrequencyResponse",
    "NodeProfile",
    "RemoteSpec",
    "TunerConfig",
    "VolterraBasis",
    "VolterraModel",
    "WaveSpec",
    "apply_digital_sic",
    "default_profile",
    "fit_volterra",
    "link_tone_config",
    "load_profile",
    "node_qpsk_config",
    "node_tone_config",
    "power_dbm",
    "read_iq",
    "run_experiment",
    "run_link_experiment",
    "run_node_experiment",
    "save_profile",
    "si_channel_response",
    "tune_canceller",
    "welch_psd",
    "write_iq",
]
