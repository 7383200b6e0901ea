"""Amplitude-level simulator for single-photon time-bin quantum error
rejection and correction with linear optics."""

from .channel import ChannelParams, ChannelSampler, apply_channel, channel_matrix, sample_channel
from .elements import (
    ActivationWindow,
    Arrival,
    ElementSpec,
    apply_balanced_interferometer_fig2,
    apply_hwp,
    apply_pockels,
    apply_unbalanced_interferometer,
    classify_arrival,
)
from .errors import (
    BinRangeError,
    ConfigError,
    EmptyBranchError,
    NormalizationError,
    OutOfRangeError,
    UnknownModeError,
)
from .harness import ExperimentConfig, QubitSource, RunReport, run_experiment
from .oracle import build_dense_circuit, oracle_compare
from .protocols import (
    CorrectionOutcome,
    Protocol,
    RejectionOutcome,
    alice_encode,
    bob_decode_correct,
    bob_decode_reject,
    run_correction,
    run_rejection,
)
from .state import (
    BasisMode,
    PhotonState,
    Polarization,
    Qubit,
    SpatialMode,
    fidelity_with_qubit,
    new_qubit_state,
    norm_squared,
    project_time_bin,
    renormalize,
)

__version__ = "0.1.0"
