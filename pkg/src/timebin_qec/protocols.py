"""Alice's time-bin encoder and Bob's two decoders.

Pockels-cell timings are part of each protocol and are not configurable
here: Alice fires on delay 1 (long-path component), Bob's entry cell on
delay 0, and inside the balanced interferometer the H-arm cell on delay 0
and the V-arm cell on delay 1.  Use :mod:`timebin_qec.elements` directly to
experiment with other timings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .channel import ChannelParams, apply_channel
from .elements import (
    ActivationWindow,
    apply_balanced_interferometer_fig2,
    apply_hwp,
    apply_pockels,
    apply_unbalanced_interferometer,
)
from .errors import BinRangeError
from .state import (
    BRANCH_NORM_TOL,
    Polarization,
    PhotonState,
    Qubit,
    SpatialMode,
    branch_overlap,
    new_qubit_state,
    norm_squared,
)


class Protocol(Enum):
    REJECT = "reject"
    CORRECT = "correct"


LINE = SpatialMode.LINE
OUT1 = SpatialMode.OUT1
OUT2 = SpatialMode.OUT2

ALICE_WINDOW = ActivationWindow({1})
BOB_ENTRY_WINDOW = ActivationWindow({0})
ARM_H_WINDOW = ActivationWindow({0})
ARM_V_WINDOW = ActivationWindow({1})
ON_TIME = 1


def _fidelity_or_none(branch: PhotonState, prob: float, q: Qubit | None, spatial: int):
    """(fidelity, <q|branch>) of an on-time branch, or (None, None) if empty."""
    if q is None or prob <= BRANCH_NORM_TOL:
        return None, None
    overlap, n2 = branch_overlap(branch, q, spatial, ON_TIME)
    fid = min((overlap.real**2 + overlap.imag**2) / (n2 * q.norm_squared), 1.0)
    return fid, overlap


def _complex_pair(z: complex | None):
    return None if z is None else [z.real, z.imag]


@dataclass
class RejectionOutcome:
    accepted_state: PhotonState
    accept_probability: float
    early_probability: float
    late_probability: float
    fidelity_accepted: float | None
    branch_factor: complex | None
    output_state: PhotonState

    def to_dict(self) -> dict:
        return {
            "accept_probability": self.accept_probability,
            "early_probability": self.early_probability,
            "late_probability": self.late_probability,
            "fidelity_accepted": self.fidelity_accepted,
            "branch_factor": _complex_pair(self.branch_factor),
            "accepted_state": self.accepted_state.to_records(),
            "output_state": self.output_state.to_records(),
        }


@dataclass
class CorrectionOutcome:
    port1_state: PhotonState
    port2_state: PhotonState
    port1_probability: float
    port2_probability: float
    fidelity_port1: float | None
    fidelity_port2: float | None
    branch_factor_port1: complex | None
    branch_factor_port2: complex | None
    stray_probability: float
    output_state: PhotonState

    def to_dict(self) -> dict:
        return {
            "port1_probability": self.port1_probability,
            "port2_probability": self.port2_probability,
            "stray_probability": self.stray_probability,
            "fidelity_port1": self.fidelity_port1,
            "fidelity_port2": self.fidelity_port2,
            "branch_factor_port1": _complex_pair(self.branch_factor_port1),
            "branch_factor_port2": _complex_pair(self.branch_factor_port2),
            "port1_state": self.port1_state.to_records(),
            "port2_state": self.port2_state.to_records(),
            "output_state": self.output_state.to_records(),
        }


def alice_encode(q: Qubit) -> PhotonState:
    """alpha|H> + beta|V>  ->  alpha|H>_0 + beta|H>_1 on the line."""
    s = new_qubit_state(q, LINE)
    s = apply_unbalanced_interferometer(s, LINE)
    return apply_pockels(s, LINE, ALICE_WINDOW)


def _check_received(s: PhotonState) -> None:
    for m in s.raw_keys():
        if m.spatial != LINE:
            raise ValueError(f"received state must live on the line mode, found {m}")
        if m.bin not in (0, 1):
            raise BinRangeError(f"received state occupies delay {m.bin}; expected 0 or 1")


def propagate_reject(s: PhotonState) -> PhotonState:
    """Bob's rejection optics: entry Pockels cell, unbalanced interferometer, half-wave plate."""
    _check_received(s)
    s = apply_pockels(s, LINE, BOB_ENTRY_WINDOW)
    s = apply_unbalanced_interferometer(s, LINE)
    return apply_hwp(s, LINE)


def propagate_correct(s: PhotonState) -> PhotonState:
    """Bob's correction optics up to (not including) the time gate."""
    _check_received(s)
    s = apply_pockels(s, LINE, BOB_ENTRY_WINDOW)
    s = apply_balanced_interferometer_fig2(s, LINE, OUT1, OUT2, ARM_H_WINDOW, ARM_V_WINDOW)
    for port in (OUT1, OUT2):
        s = apply_unbalanced_interferometer(s, port)
        s = apply_hwp(s, port)
    return s


def bob_decode_reject(s: PhotonState, reference: Qubit | None = None) -> RejectionOutcome:
    """Decode with the rejection circuit and time-gate at delays 0, 1, 2.

    ``reference`` is the qubit Alice sent; when given, the fidelity of the
    accepted branch is filled in (it stays ``None`` for an empty branch).
    """
    out = propagate_reject(s)
    by_delay: tuple[list, list, list] = ([], [], [])
    accepted_amps = {}
    for m, a in out.raw_items():
        by_delay[m.bin].append(a.real * a.real + a.imag * a.imag)
        if m.bin == ON_TIME:
            accepted_amps[m] = a
    accepted = PhotonState._build(accepted_amps, False, prune=False)
    p_early, p_accept, p_late = (math.fsum(terms) for terms in by_delay)
    fid, factor = _fidelity_or_none(accepted, p_accept, reference, LINE)
    return RejectionOutcome(
        accepted_state=accepted,
        accept_probability=p_accept,
        early_probability=p_early,
        late_probability=p_late,
        fidelity_accepted=fid,
        branch_factor=factor,
        output_state=out,
    )


def bob_decode_correct(s: PhotonState, reference: Qubit | None = None) -> CorrectionOutcome:
    out = propagate_correct(s)
    # one pass: on-time amplitudes per port, everything else is stray
    amps1, amps2, stray_terms = {}, {}, []
    for m, a in out.raw_items():
        if m.bin == ON_TIME and m.spatial == OUT1:
            amps1[m] = a
        elif m.bin == ON_TIME and m.spatial == OUT2:
            amps2[m] = a
        else:
            stray_terms.append(a.real * a.real + a.imag * a.imag)
    port1 = PhotonState._build(amps1, False, prune=False)
    port2 = PhotonState._build(amps2, False, prune=False)
    p1, p2 = norm_squared(port1), norm_squared(port2)
    stray = math.fsum(stray_terms)
    fid1, f1 = _fidelity_or_none(port1, p1, reference, OUT1)
    fid2, f2 = _fidelity_or_none(port2, p2, reference, OUT2)
    return CorrectionOutcome(
        port1_state=port1,
        port2_state=port2,
        port1_probability=p1,
        port2_probability=p2,
        fidelity_port1=fid1,
        fidelity_port2=fid2,
        branch_factor_port1=f1,
        branch_factor_port2=f2,
        stray_probability=stray,
        output_state=out,
    )


def transmit(q: Qubit, p: ChannelParams) -> PhotonState:
    """Alice's encoded photon after the noisy line."""
    return apply_channel(alice_encode(q), p, LINE)


def run_rejection(q: Qubit, p: ChannelParams) -> RejectionOutcome:
    return bob_decode_reject(transmit(q, p), reference=q)


def run_correction(q: Qubit, p: ChannelParams) -> CorrectionOutcome:
    return bob_decode_correct(transmit(q, p), reference=q)
