"""Seeded Monte Carlo runs of either protocol over sampled qubits and channels.

Randomness is drawn per block of ``BLOCK_SIZE`` trials.  For block ``b``:

* Haar qubits come from ``default_rng([seed, QUBIT_STREAM, b])``: a
  (BLOCK_SIZE, 4) standard-normal array whose rows are
  (Re alpha, Im alpha, Re beta, Im beta) before normalization;
* channel parameters come from the sampler (see :mod:`timebin_qec.channel`);
* detector clicks, when shot noise is on, come from
  ``default_rng([seed, SHOT_STREAM, b])``: BLOCK_SIZE uniforms.

Full blocks are always drawn, so trial ``k`` sees the same numbers whatever
the trial count, and blocks can be run on any worker in any order.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import jsonio
from .channel import BLOCK_SIZE, ChannelParams, ChannelSampler
from .errors import ConfigError
from .protocols import Protocol, run_correction, run_rejection
from .state import Qubit

QUBIT_STREAM = 0
SHOT_STREAM = 2
SCHEMA_VERSION = 1

TRIAL_HEADER = (
    "trial",
    "theta",
    "phi",
    "chi",
    "p_accept_or_p1",
    "p_early_or_p2",
    "p_late",
    "fidelity_accept_or_p1",
    "fidelity_p2",
    "detected",
    "alpha_re",
    "alpha_im",
    "beta_re",
    "beta_im",
)


@dataclass(frozen=True)
class QubitSource:
    """``fixed`` always sends ``qubit``; ``haar`` draws Haar-random qubits."""

    kind: str
    qubit: Qubit | None = None

    def __post_init__(self):
        if self.kind not in ("fixed", "haar"):
            raise ConfigError(f"qubit.kind must be 'fixed' or 'haar', got {self.kind!r}")
        if self.kind == "fixed":
            if self.qubit is None:
                raise ConfigError("qubit: fixed source needs alpha and beta")
            try:
                self.qubit.check()
            except ValueError as exc:
                raise ConfigError(f"qubit: {exc}") from None

    @classmethod
    def fixed(cls, alpha: complex, beta: complex) -> "QubitSource":
        return cls("fixed", Qubit(complex(alpha), complex(beta)))

    @classmethod
    def haar(cls) -> "QubitSource":
        return cls("haar")

    def to_dict(self) -> dict:
        if self.kind == "haar":
            return {"kind": "haar"}
        q = self.qubit
        return {
            "kind": "fixed",
            "alpha": [q.alpha.real, q.alpha.imag],
            "beta": [q.beta.real, q.beta.imag],
        }


@dataclass(frozen=True)
class ExperimentConfig:
    protocol: Protocol
    trials: int
    qubits: QubitSource
    channel: ChannelSampler
    seed: int = 0
    shot_noise: bool = False
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "protocol", Protocol(self.protocol))
        if isinstance(self.trials, bool) or not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError(f"trials must be a positive integer, got {self.trials!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed!r}")
        if not isinstance(self.workers, int) or self.workers < 1:
            raise ConfigError(f"workers must be a positive integer, got {self.workers!r}")

    def to_dict(self) -> dict:
        # workers is an execution detail and never changes the numbers
        return {
            "protocol": self.protocol.value,
            "trials": self.trials,
            "seed": self.seed,
            "qubit": self.qubits.to_dict(),
            "channel": self.channel.to_dict(),
            "shot_noise": self.shot_noise,
        }


@dataclass(slots=True)
class TrialRecord:
    trial: int
    theta: float
    phi: float
    chi: float
    p_accept_or_p1: float
    p_early_or_p2: float
    p_late: float
    fidelity_accept_or_p1: float | None
    fidelity_p2: float | None
    detected: str | None
    qubit: Qubit

    def row(self) -> list:
        q = self.qubit
        return [
            self.trial,
            self.theta,
            self.phi,
            self.chi,
            self.p_accept_or_p1,
            self.p_early_or_p2,
            self.p_late,
            self.fidelity_accept_or_p1,
            self.fidelity_p2,
            self.detected,
            q.alpha.real,
            q.alpha.imag,
            q.beta.real,
            q.beta.imag,
        ]


def haar_qubits(seed: int, block: int) -> np.ndarray:
    """``BLOCK_SIZE`` Haar-random qubits of one block as an (n, 2) complex array."""
    rng = np.random.default_rng([seed, QUBIT_STREAM, block])
    g = rng.standard_normal((BLOCK_SIZE, 4))
    z = g[:, 0::2] + 1j * g[:, 1::2]
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def _click(probs: list[tuple[str, float]], u: float) -> str:
    acc = 0.0
    for label, prob in probs:
        acc += prob
        if u < acc:
            return label
    return probs[-1][0]


def run_block(cfg: ExperimentConfig, block: int) -> list[TrialRecord]:
    start = block * BLOCK_SIZE
    n = min(BLOCK_SIZE, cfg.trials - start)
    if n <= 0:
        return []
    if cfg.qubits.kind == "haar":
        qs = [Qubit(a, b) for a, b in haar_qubits(cfg.seed, block)[:n].tolist()]
    else:
        qs = [cfg.qubits.qubit] * n
    params = cfg.channel.draw_block(block)[:n].tolist()
    clicks = None
    if cfg.shot_noise:
        clicks = np.random.default_rng([cfg.seed, SHOT_STREAM, block]).random(BLOCK_SIZE)

    records = []
    reject = cfg.protocol is Protocol.REJECT
    for i in range(n):
        theta, phi, chi = params[i]
        q = qs[i]
        p = ChannelParams(theta, phi, chi)
        if reject:
            r = run_rejection(q, p)
            vals = (r.accept_probability, r.early_probability, r.late_probability,
                    r.fidelity_accepted, None)
            probs = [("on_time", vals[0]), ("early", vals[1]), ("late", vals[2])]
        else:
            c = run_correction(q, p)
            vals = (c.port1_probability, c.port2_probability, 0.0,
                    c.fidelity_port1, c.fidelity_port2)
            probs = [("port1", vals[0]), ("port2", vals[1])]
        detected = _click(probs, float(clicks[i])) if clicks is not None else None
        records.append(TrialRecord(start + i, theta, phi, chi, *vals, detected, q))
    return records


def _mean_var(xs: list[float]) -> tuple[float, float]:
    n = len(xs)
    mean = math.fsum(xs) / n
    var = math.fsum((x - mean) ** 2 for x in xs) / n
    return mean, var


@dataclass
class RunReport:
    config: ExperimentConfig
    records: list[TrialRecord]
    aggregates: dict[str, Any] = field(default_factory=dict)

    @property
    def seed(self) -> int:
        return self.config.seed

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "protocol": self.config.protocol.value,
            "seed": self.config.seed,
            "config": self.config.to_dict(),
            "aggregates": self.aggregates,
        }

    def to_json(self) -> str:
        return jsonio.dumps(self.to_dict()) + "\n"

    def to_csv(self) -> str:
        return jsonio.csv_text(TRIAL_HEADER, [r.row() for r in self.records])


def aggregate(cfg: ExperimentConfig, records: list[TrialRecord]) -> dict[str, Any]:
    first = [r.p_accept_or_p1 for r in records]
    second = [r.p_early_or_p2 for r in records]
    fids = [f for r in records for f in (r.fidelity_accept_or_p1, r.fidelity_p2) if f is not None]
    mean1, var1 = _mean_var(first)
    mean2, var2 = _mean_var(second)
    agg: dict[str, Any] = {"trials": len(records)}
    if cfg.protocol is Protocol.REJECT:
        mean_late, _ = _mean_var([r.p_late for r in records])
        agg.update(
            mean_accept=mean1,
            var_accept=var1,
            mean_early=mean2,
            mean_late=mean_late,
        )
    else:
        agg.update(
            mean_port1=mean1,
            var_port1=var1,
            mean_port2=mean2,
            var_port2=var2,
            max_total_deviation=max(abs(a + b - 1.0) for a, b in zip(first, second)),
        )
    agg.update(
        fidelity_count=len(fids),
        mean_fidelity=math.fsum(fids) / len(fids) if fids else None,
        min_fidelity=min(fids) if fids else None,
    )
    if cfg.shot_noise:
        counts: dict[str, int] = {}
        for r in records:
            counts[r.detected] = counts.get(r.detected, 0) + 1
        agg["detections"] = dict(sorted(counts.items()))
    return agg


def run_experiment(cfg: ExperimentConfig) -> RunReport:
    """Run ``cfg.trials`` independent trials; the result depends only on cfg.

    With ``cfg.workers > 1`` blocks are farmed out to a process pool; the
    report is identical to a serial run.
    """
    if not isinstance(cfg, ExperimentConfig):
        raise ConfigError("run_experiment expects an ExperimentConfig")
    n_blocks = -(-cfg.trials // BLOCK_SIZE)
    blocks = range(n_blocks)
    if cfg.workers > 1 and n_blocks > 1:
        with ProcessPoolExecutor(max_workers=min(cfg.workers, n_blocks)) as pool:
            chunks = list(pool.map(run_block, [cfg] * n_blocks, blocks))
    else:
        chunks = [run_block(cfg, b) for b in blocks]
    records = [r for chunk in chunks for r in chunk]
    return RunReport(cfg, records, aggregate(cfg, records))


def default_workers() -> int:
    return os.cpu_count() or 1


SWEEP_HEADERS = {
    Protocol.REJECT: ("theta", "phi", "chi", "p_accept", "p_early", "p_late", "fidelity_accept"),
    Protocol.CORRECT: ("theta", "phi", "chi", "p_port1", "p_port2", "fidelity_port1", "fidelity_port2"),
}


def run_sweep(
    protocol: Protocol, q: Qubit, thetas, phi: float = 0.0, chi: float = 0.0
) -> list[list]:
    """Exact probabilities at each theta of a grid, one row per grid point."""
    protocol = Protocol(protocol)
    rows = []
    for theta in thetas:
        p = ChannelParams(theta, phi, chi)
        if protocol is Protocol.REJECT:
            r = run_rejection(q, p)
            rows.append([p.theta, phi, chi, r.accept_probability, r.early_probability,
                         r.late_probability, r.fidelity_accepted])
        else:
            c = run_correction(q, p)
            rows.append([p.theta, phi, chi, c.port1_probability, c.port2_probability,
                         c.fidelity_port1, c.fidelity_port2])
    return rows
