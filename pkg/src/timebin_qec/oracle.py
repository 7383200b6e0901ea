"""Dense-matrix model of both protocols, used to cross-check the sparse code.

Every element is written out as an explicit matrix over the full canonical
basis (spatial mode, delay, polarization with H before V) and the circuit is
their ordered product.  The matrices are built from index arithmetic alone,
never from :mod:`timebin_qec.elements`; only the 2x2 channel definition is
shared with the sparse path.  :func:`oracle_compare` then runs the sparse
pipeline and reports the largest amplitude disagreement.

The long path of an unbalanced interferometer is a cyclic shift on the
finite delay axis (V at the last delay wraps to delay 0) so that the matrix
stays a permutation.  Physical inputs never reach the wrap-around.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import BLOCK_SIZE, ChannelParams, ChannelSampler, channel_matrix
from .harness import haar_qubits
from .protocols import Protocol, propagate_correct, propagate_reject, transmit
from .state import MAX_DELAY, PhotonState, Qubit, SpatialMode

N_DELAYS = MAX_DELAY + 1

_MODES = {
    Protocol.REJECT: (SpatialMode.LINE,),
    Protocol.CORRECT: tuple(SpatialMode),
}


@dataclass(frozen=True)
class DenseBasis:
    modes: tuple[int, ...]
    n_delays: int = N_DELAYS

    @property
    def dim(self) -> int:
        return len(self.modes) * 2 * self.n_delays

    def index(self, spatial: int, pol: int, delay: int) -> int:
        return (self.modes.index(spatial) * self.n_delays + delay) * 2 + int(pol)

    def labels(self) -> list[tuple[int, int, int]]:
        """(spatial, pol, delay) for every basis index, in order."""
        return [(m, p, d) for m in self.modes for d in range(self.n_delays) for p in (0, 1)]

    def vector(self, s: PhotonState) -> np.ndarray:
        """Dense amplitude vector of ``s``; raises if ``s`` leaves the basis."""
        vec = np.zeros(self.dim, dtype=complex)
        for m, a in s.items():
            if m.spatial not in self.modes or not 0 <= m.bin < self.n_delays:
                raise ValueError(f"{m} lies outside the dense basis")
            vec[self.index(m.spatial, m.pol, m.bin)] = a
        return vec


def _swap_matrix(basis: DenseBasis, pairs) -> np.ndarray:
    perm = np.arange(basis.dim)
    for i, j in pairs:
        perm[i], perm[j] = j, i
    mat = np.zeros((basis.dim, basis.dim), dtype=complex)
    mat[perm, np.arange(basis.dim)] = 1.0
    return mat


def hwp_matrix(basis: DenseBasis, mode: int) -> np.ndarray:
    return pockels_matrix(basis, mode, range(basis.n_delays))


def pockels_matrix(basis: DenseBasis, mode: int, bins) -> np.ndarray:
    pairs = [(basis.index(mode, 0, d), basis.index(mode, 1, d)) for d in bins]
    return _swap_matrix(basis, pairs)


def delay_matrix(basis: DenseBasis, mode: int) -> np.ndarray:
    """V component on ``mode`` moves one delay later (cyclically)."""
    mat = np.eye(basis.dim, dtype=complex)
    for d in range(basis.n_delays):
        src = basis.index(mode, 1, d)
        dst = basis.index(mode, 1, (d + 1) % basis.n_delays)
        mat[:, src] = 0.0
        mat[dst, src] = 1.0
    return mat


def channel_dense(basis: DenseBasis, mode: int, p: ChannelParams) -> np.ndarray:
    block = channel_matrix(p)
    mat = np.eye(basis.dim, dtype=complex)
    for d in range(basis.n_delays):
        idx = [basis.index(mode, 0, d), basis.index(mode, 1, d)]
        mat[np.ix_(idx, idx)] = block
    return mat


def pbs_split_matrix(basis: DenseBasis, in_mode: int, h_mode: int, v_mode: int) -> np.ndarray:
    pairs = []
    for d in range(basis.n_delays):
        pairs.append((basis.index(in_mode, 0, d), basis.index(h_mode, 0, d)))
        pairs.append((basis.index(in_mode, 1, d), basis.index(v_mode, 1, d)))
    return _swap_matrix(basis, pairs)


def recombine_matrix(basis: DenseBasis, arm_h: int, arm_v: int, out1: int, out2: int) -> np.ndarray:
    pairs = []
    for d in range(basis.n_delays):
        pairs.append((basis.index(arm_h, 0, d), basis.index(out1, 0, d)))
        pairs.append((basis.index(arm_h, 1, d), basis.index(out2, 1, d)))
        pairs.append((basis.index(arm_v, 1, d), basis.index(out1, 1, d)))
        pairs.append((basis.index(arm_v, 0, d), basis.index(out2, 0, d)))
    return _swap_matrix(basis, pairs)


@dataclass
class DenseCircuit:
    basis: DenseBasis
    elements: list[tuple[str, np.ndarray]] = field(default_factory=list)

    def add(self, name: str, mat: np.ndarray) -> "DenseCircuit":
        self.elements.append((name, mat))
        return self

    @property
    def matrix(self) -> np.ndarray:
        total = np.eye(self.basis.dim, dtype=complex)
        for _, mat in self.elements:
            total = mat @ total
        return total

    def unitarity_error(self) -> float:
        m = self.matrix
        return float(np.max(np.abs(m @ m.conj().T - np.eye(self.basis.dim))))

    def input_vector(self, q: Qubit) -> np.ndarray:
        vec = np.zeros(self.basis.dim, dtype=complex)
        vec[self.basis.index(SpatialMode.LINE, 0, 0)] = q.alpha
        vec[self.basis.index(SpatialMode.LINE, 1, 0)] = q.beta
        return vec

    def run(self, q: Qubit) -> np.ndarray:
        return self.matrix @ self.input_vector(q)


def build_dense_circuit(protocol: Protocol | str, p: ChannelParams) -> DenseCircuit:
    """Full circuit from Alice's raw qubit (line, delay 0) to Bob's detectors."""
    protocol = Protocol(protocol)
    basis = DenseBasis(_MODES[protocol])
    line = SpatialMode.LINE
    c = DenseCircuit(basis)
    c.add("alice interferometer", delay_matrix(basis, line))
    c.add("alice cell", pockels_matrix(basis, line, [1]))
    c.add("channel", channel_dense(basis, line, p))
    c.add("bob entry cell", pockels_matrix(basis, line, [0]))
    if protocol is Protocol.REJECT:
        c.add("bob interferometer", delay_matrix(basis, line))
        c.add("half-wave plate", hwp_matrix(basis, line))
        return c
    arm_h, arm_v = SpatialMode.ARM_H, SpatialMode.ARM_V
    out1, out2 = SpatialMode.OUT1, SpatialMode.OUT2
    c.add("balanced PBS in", pbs_split_matrix(basis, line, arm_h, arm_v))
    c.add("H-arm cell", pockels_matrix(basis, arm_h, [0]))
    c.add("V-arm cell", pockels_matrix(basis, arm_v, [1]))
    c.add("balanced PBS out", recombine_matrix(basis, arm_h, arm_v, out1, out2))
    c.add("interferometer 1", delay_matrix(basis, out1))
    c.add("half-wave plate 1", hwp_matrix(basis, out1))
    c.add("interferometer 2", delay_matrix(basis, out2))
    c.add("half-wave plate 2", hwp_matrix(basis, out2))
    return c


def sparse_output(protocol: Protocol | str, q: Qubit, p: ChannelParams) -> PhotonState:
    s = transmit(q, p)
    if Protocol(protocol) is Protocol.REJECT:
        return propagate_reject(s)
    return propagate_correct(s)


def oracle_compare(protocol: Protocol | str, q: Qubit, p: ChannelParams) -> float:
    """Max elementwise |sparse - dense| over the protocol's full output basis."""
    circuit = build_dense_circuit(protocol, p)
    dense = circuit.run(q)
    try:
        sparse = circuit.basis.vector(sparse_output(protocol, q, p))
    except ValueError:
        return float("inf")
    return float(np.max(np.abs(sparse - dense)))


VERIFY_TOL = 1e-12


def random_cases(n: int, seed: int) -> list[tuple[Qubit, ChannelParams]]:
    """``n`` Haar qubits paired with uniform (theta, phi, chi), reproducible from ``seed``."""
    sampler = ChannelSampler.uniform_theta(seed)
    cases = []
    for block in range(-(-n // BLOCK_SIZE)):
        qs = haar_qubits(seed, block).tolist()
        ps = sampler.draw_block(block).tolist()
        for (a, b), (t, f, c) in zip(qs, ps):
            if len(cases) == n:
                break
            cases.append((Qubit(a, b), ChannelParams(t, f, c)))
    return cases


def verify_oracle(samples: int, seed: int = 0) -> dict[Protocol, float]:
    """Largest sparse-vs-dense deviation per protocol over random cases."""
    cases = random_cases(samples, seed)
    return {
        protocol: max(oracle_compare(protocol, q, p) for q, p in cases)
        for protocol in Protocol
    }
