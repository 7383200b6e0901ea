"""JSON configuration files for the command-line tool.

Schema (version 1); every key outside this list is rejected::

    {
      "schema_version": 1,
      "seed": 2024,                      # non-negative int, default 0
      "trials": 100000,                  # reject / correct
      "workers": 4,                      # default: available cores
      "shot_noise": false,
      "qubit":   {"kind": "haar"}
               | {"kind": "fixed", "alpha": [re, im], "beta": [re, im]},
      "channel": {"kind": "fixed", "theta": t, "phi": p, "chi": c}
               | {"kind": "uniform_theta", "seed": s}
               | {"kind": "small_theta", "theta_max": m, "seed": s},
      "sweep":   {"protocol": "reject" | "correct",
                  "thetas": [...]  or  "start": a, "stop": b, "steps": n,
                  "phi": p, "chi": c},
      "verify":  {"samples": 100}
    }

A channel sampler without its own ``seed`` uses the top-level seed.
Complex amplitudes may be given as a number or as a ``[re, im]`` pair.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Mapping

from .channel import ChannelSampler, SamplerKind
from .errors import ConfigError
from .harness import ExperimentConfig, QubitSource
from .protocols import Protocol
from .state import Qubit

SCHEMA_VERSION = 1

_TOP_KEYS = {
    "schema_version", "seed", "trials", "workers", "shot_noise",
    "qubit", "channel", "sweep", "verify",
}


def _check_keys(section: str, obj: Any, allowed: set[str]) -> Mapping:
    if not isinstance(obj, Mapping):
        raise ConfigError(f"{section}: expected an object")
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ConfigError(f"{section}: unknown field(s) {', '.join(unknown)}")
    return obj


def _int(field: str, value: Any, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigError(f"{field}: expected an integer >= {minimum}, got {value!r}")
    return value


def _real(field: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{field}: expected a finite number, got {value!r}")
    return float(value)


def _complex(field: str, value: Any) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigError(f"{field}: expected [re, im], got {value!r}")
        return complex(_real(field, value[0]), _real(field, value[1]))
    return complex(_real(field, value), 0.0)


@dataclass(frozen=True)
class SweepSpec:
    protocol: Protocol
    thetas: tuple[float, ...]
    phi: float = 0.0
    chi: float = 0.0

    def to_dict(self) -> dict:
        return {
            "protocol": self.protocol.value,
            "thetas": list(self.thetas),
            "phi": self.phi,
            "chi": self.chi,
        }


@dataclass(frozen=True)
class RunConfig:
    """Validated contents of a config file."""

    seed: int = 0
    trials: int | None = None
    workers: int = 1
    shot_noise: bool = False
    qubits: QubitSource | None = None
    channel: ChannelSampler | None = None
    sweep: SweepSpec | None = None
    verify_samples: int | None = None
    # true when the channel section carried its own seed
    channel_seed_explicit: bool = False

    def experiment(self, protocol: Protocol) -> ExperimentConfig:
        missing = [
            name
            for name, value in (("trials", self.trials), ("channel", self.channel))
            if value is None
        ]
        if missing:
            raise ConfigError(f"missing field(s) {', '.join(missing)}")
        return ExperimentConfig(
            protocol=protocol,
            trials=self.trials,
            qubits=self.qubits or QubitSource.haar(),
            channel=self.channel,
            seed=self.seed,
            shot_noise=self.shot_noise,
            workers=self.workers,
        )

    def with_overrides(self, seed: int | None = None, trials: int | None = None) -> "RunConfig":
        cfg = self
        if seed is not None:
            seed = _int("--seed", seed, 0)
            channel = cfg.channel
            inherits = channel is not None and not cfg.channel_seed_explicit
            if inherits and channel.kind is not SamplerKind.FIXED:
                channel = replace(channel, seed=seed)
            cfg = replace(cfg, seed=seed, channel=channel)
        if trials is not None:
            cfg = replace(cfg, trials=_int("--trials", trials, 1))
        return cfg

    def to_dict(self) -> dict:
        d: dict = {"schema_version": SCHEMA_VERSION, "seed": self.seed}
        if self.trials is not None:
            d["trials"] = self.trials
        d["shot_noise"] = self.shot_noise
        if self.qubits is not None:
            d["qubit"] = self.qubits.to_dict()
        if self.channel is not None:
            d["channel"] = self.channel.to_dict()
        if self.sweep is not None:
            d["sweep"] = self.sweep.to_dict()
        if self.verify_samples is not None:
            d["verify"] = {"samples": self.verify_samples}
        return d


def _parse_qubit(obj: Any) -> QubitSource:
    kind = _check_keys("qubit", obj, {"kind", "alpha", "beta"}).get("kind")
    if kind == "haar":
        _check_keys("qubit", obj, {"kind"})
        return QubitSource.haar()
    if kind == "fixed":
        for name in ("alpha", "beta"):
            if name not in obj:
                raise ConfigError(f"qubit.{name}: required for a fixed qubit")
        q = Qubit(_complex("qubit.alpha", obj["alpha"]), _complex("qubit.beta", obj["beta"]))
        return QubitSource("fixed", q)
    raise ConfigError(f"qubit.kind: expected 'haar' or 'fixed', got {kind!r}")


def _parse_channel(obj: Any, default_seed: int) -> ChannelSampler:
    obj = _check_keys("channel", obj, {"kind", "theta", "phi", "chi", "theta_max", "seed"})
    kind = obj.get("kind")
    if kind == "fixed":
        _check_keys("channel", obj, {"kind", "theta", "phi", "chi"})
        if "theta" not in obj:
            raise ConfigError("channel.theta: required for a fixed channel")
        return ChannelSampler.fixed(
            _real("channel.theta", obj["theta"]),
            _real("channel.phi", obj.get("phi", 0.0)),
            _real("channel.chi", obj.get("chi", 0.0)),
        )
    seed = _int("channel.seed", obj.get("seed", default_seed), 0)
    if kind == "uniform_theta":
        _check_keys("channel", obj, {"kind", "seed"})
        sampler = ChannelSampler.uniform_theta(seed)
    elif kind == "small_theta":
        _check_keys("channel", obj, {"kind", "theta_max", "seed"})
        if "theta_max" not in obj:
            raise ConfigError("channel.theta_max: required for small_theta")
        theta_max = _real("channel.theta_max", obj["theta_max"])
        try:
            sampler = ChannelSampler.small_theta(theta_max, seed)
        except ConfigError as exc:
            raise ConfigError(f"channel.theta_max: {exc}") from None
    else:
        raise ConfigError(
            f"channel.kind: expected 'fixed', 'uniform_theta' or 'small_theta', got {kind!r}"
        )
    return sampler


def _parse_sweep(obj: Any) -> SweepSpec:
    obj = _check_keys(
        "sweep", obj, {"protocol", "thetas", "start", "stop", "steps", "phi", "chi"}
    )
    try:
        protocol = Protocol(obj.get("protocol", "reject"))
    except ValueError:
        raise ConfigError(f"sweep.protocol: expected 'reject' or 'correct', got {obj['protocol']!r}") from None
    if "thetas" in obj:
        if any(k in obj for k in ("start", "stop", "steps")):
            raise ConfigError("sweep: give either thetas or start/stop/steps, not both")
        if not isinstance(obj["thetas"], list):
            raise ConfigError("sweep.thetas: expected a list of numbers")
        thetas = tuple(_real("sweep.thetas", t) for t in obj["thetas"])
    else:
        for name in ("start", "stop", "steps"):
            if name not in obj:
                raise ConfigError(f"sweep.{name}: required when thetas is not given")
        start = _real("sweep.start", obj["start"])
        stop = _real("sweep.stop", obj["stop"])
        steps = _int("sweep.steps", obj["steps"], 0)
        if steps == 1:
            thetas = (start,)
        else:
            thetas = tuple(start + k * (stop - start) / (steps - 1) for k in range(steps))
    if not thetas:
        raise ConfigError("sweep: the theta grid is empty")
    return SweepSpec(
        protocol,
        thetas,
        _real("sweep.phi", obj.get("phi", 0.0)),
        _real("sweep.chi", obj.get("chi", 0.0)),
    )


def parse_config(obj: Any) -> RunConfig:
    obj = _check_keys("config", obj, _TOP_KEYS)
    version = obj.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version: expected {SCHEMA_VERSION}, got {version!r}")
    seed = _int("seed", obj.get("seed", 0), 0)
    trials = _int("trials", obj["trials"], 1) if "trials" in obj else None
    workers = _int("workers", obj.get("workers", os.cpu_count() or 1), 1)
    shot_noise = obj.get("shot_noise", False)
    if not isinstance(shot_noise, bool):
        raise ConfigError(f"shot_noise: expected true or false, got {shot_noise!r}")
    qubits = _parse_qubit(obj["qubit"]) if "qubit" in obj else None
    channel = _parse_channel(obj["channel"], seed) if "channel" in obj else None
    sweep = _parse_sweep(obj["sweep"]) if "sweep" in obj else None
    verify = None
    if "verify" in obj:
        v = _check_keys("verify", obj["verify"], {"samples"})
        if "samples" not in v:
            raise ConfigError("verify.samples: required")
        verify = _int("verify.samples", v["samples"], 1)
    return RunConfig(
        seed,
        trials,
        workers,
        shot_noise,
        qubits,
        channel,
        sweep,
        verify,
        channel_seed_explicit="channel" in obj and "seed" in obj["channel"],
    )


def load_config(path: str | os.PathLike) -> RunConfig:
    """Read and validate a config file.

    Raises OSError if the file cannot be read and ConfigError if it is not
    valid JSON or fails validation.
    """
    text = Path(path).read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from None
    return parse_config(obj)
