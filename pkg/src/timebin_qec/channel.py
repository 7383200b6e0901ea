"""Noisy birefringent channel U(theta, phi, chi) and its parameter samplers.

The channel acts identically on every time-bin of the line mode:

    |H> -> e^{i phi} cos(theta) |H> + e^{i chi} sin(theta) |V>
    |V> -> -e^{-i chi} sin(theta) |H> + e^{-i phi} cos(theta) |V>

Sampling is counter-based.  Draws are grouped in blocks of ``BLOCK_SIZE``;
block ``b`` of a sampler seeded with ``seed`` comes from
``numpy.random.default_rng([seed, CHANNEL_STREAM, b])`` (PCG64 behind a
SeedSequence), which yields all thetas of the block, then all phis, then all
chis.  Draw ``k`` is row ``k % BLOCK_SIZE`` of block ``k // BLOCK_SIZE``, so
any draw can be reproduced on its own, in any order and on any worker.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .elements import H, V
from .errors import ConfigError
from .state import BasisMode, PhotonState, SpatialMode, basis_mode, check_mode

TWO_PI = 2.0 * math.pi
BLOCK_SIZE = 1024
CHANNEL_STREAM = 1


@dataclass(frozen=True)
class ChannelParams:
    theta: float
    phi: float = 0.0
    chi: float = 0.0

    def __post_init__(self):
        theta, phi, chi = float(self.theta), float(self.phi), float(self.chi)
        if not (math.isfinite(theta) and math.isfinite(phi) and math.isfinite(chi)):
            raise ConfigError(f"channel parameters must be finite, got {(theta, phi, chi)}")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "chi", chi)

    def wrapped(self) -> "ChannelParams":
        """Same channel with every angle wrapped into [0, 2 pi)."""
        return ChannelParams(*(a % TWO_PI for a in (self.theta, self.phi, self.chi)))

    def inverse(self) -> "ChannelParams":
        """Parameters whose matrix is the adjoint of this one's."""
        return ChannelParams(-self.theta, -self.phi, self.chi)

    def as_dict(self) -> dict:
        return {"theta": self.theta, "phi": self.phi, "chi": self.chi}


def channel_matrix(p: ChannelParams) -> np.ndarray:
    """2x2 matrix whose columns are the images of |H> and |V>."""
    c, s = math.cos(p.theta), math.sin(p.theta)
    return np.array(
        [
            [cmath.exp(1j * p.phi) * c, -cmath.exp(-1j * p.chi) * s],
            [cmath.exp(1j * p.chi) * s, cmath.exp(-1j * p.phi) * c],
        ],
        dtype=complex,
    )


def apply_channel(
    s: PhotonState, p: ChannelParams, mode: int = SpatialMode.LINE
) -> PhotonState:
    """Apply U(p) to the (H, V) pair of every time-bin on ``mode``."""
    mode = check_mode(mode)
    c, sn = math.cos(p.theta), math.sin(p.theta)
    e_phi = cmath.exp(1j * p.phi)
    e_chi = cmath.exp(1j * p.chi)
    hh = e_phi * c
    vh = e_chi * sn
    hv = -e_chi.conjugate() * sn
    vv = e_phi.conjugate() * c

    out: dict[BasisMode, complex] = {}
    for m, a in s._amps.items():
        if m.spatial != mode:
            out[m] = out.get(m, 0j) + a
            continue
        kh = basis_mode(mode, H, m.bin)
        kv = basis_mode(mode, V, m.bin)
        if m.pol is H:
            out[kh] = out.get(kh, 0j) + hh * a
            out[kv] = out.get(kv, 0j) + vh * a
        else:
            out[kh] = out.get(kh, 0j) + hv * a
            out[kv] = out.get(kv, 0j) + vv * a
    return PhotonState._build(out, s.normalized)


class SamplerKind(Enum):
    FIXED = "fixed"
    UNIFORM_THETA = "uniform_theta"
    SMALL_THETA = "small_theta"


@dataclass(frozen=True)
class ChannelSampler:
    """Distribution over channel parameters.

    ``fixed`` always returns ``params``; ``uniform_theta`` draws theta, phi,
    chi independently uniform on [0, 2 pi); ``small_theta`` draws theta
    uniform on [0, theta_max] and phi, chi uniform on [0, 2 pi).
    """

    kind: SamplerKind
    seed: int = 0
    params: ChannelParams | None = None
    theta_max: float | None = None

    def __post_init__(self):
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError(f"sampler seed must be a non-negative integer, got {self.seed!r}")
        if self.kind is SamplerKind.FIXED and self.params is None:
            raise ConfigError("fixed channel sampler needs theta/phi/chi")
        if self.kind is SamplerKind.SMALL_THETA:
            tm = self.theta_max
            if tm is None or not (0.0 < tm <= math.pi / 2):
                raise ConfigError(f"theta_max must lie in (0, pi/2], got {tm!r}")

    @classmethod
    def fixed(cls, theta: float, phi: float = 0.0, chi: float = 0.0) -> "ChannelSampler":
        return cls(SamplerKind.FIXED, params=ChannelParams(theta, phi, chi))

    @classmethod
    def uniform_theta(cls, seed: int = 0) -> "ChannelSampler":
        return cls(SamplerKind.UNIFORM_THETA, seed=seed)

    @classmethod
    def small_theta(cls, theta_max: float, seed: int = 0) -> "ChannelSampler":
        return cls(SamplerKind.SMALL_THETA, seed=seed, theta_max=theta_max)

    def draw_arrays(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """``n`` parameter triples as an (n, 3) array drawn from ``rng``.

        Column order theta, phi, chi; ``rng`` is consumed in that order.
        """
        if self.kind is SamplerKind.FIXED:
            p = self.params
            return np.tile([p.theta, p.phi, p.chi], (n, 1)).astype(float)
        hi = TWO_PI if self.kind is SamplerKind.UNIFORM_THETA else self.theta_max
        theta = rng.uniform(0.0, hi, n)
        phi = rng.uniform(0.0, TWO_PI, n)
        chi = rng.uniform(0.0, TWO_PI, n)
        return np.column_stack([theta, phi, chi])

    def draw_block(self, block: int) -> np.ndarray:
        """All ``BLOCK_SIZE`` draws of block ``block`` as an array of rows."""
        rng = np.random.default_rng([self.seed, CHANNEL_STREAM, block])
        return self.draw_arrays(rng, BLOCK_SIZE)

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind.value}
        if self.kind is SamplerKind.FIXED:
            d.update(self.params.as_dict())
        else:
            if self.kind is SamplerKind.SMALL_THETA:
                d["theta_max"] = self.theta_max
            d["seed"] = self.seed
        return d


def sample_channel(sampler: ChannelSampler, index: int = 0) -> ChannelParams:
    """Draw number ``index`` from ``sampler``; a pure function of (seed, index)."""
    if sampler.kind is SamplerKind.FIXED:
        return sampler.params
    if index < 0:
        raise ValueError(f"draw index must be non-negative, got {index}")
    block, row = divmod(index, BLOCK_SIZE)
    theta, phi, chi = sampler.draw_block(block)[row]
    return ChannelParams(float(theta), float(phi), float(chi))


def iter_channel(sampler: ChannelSampler, start: int = 0):
    """Endless stream of draws ``start, start+1, ...``."""
    block, row = divmod(start, BLOCK_SIZE)
    while True:
        rows = sampler.draw_block(block)
        for theta, phi, chi in rows[row:]:
            yield ChannelParams(float(theta), float(phi), float(chi))
        block, row = block + 1, 0
