"""Single-photon state space over spatial x polarization x time-bin modes.

A photon is described by a sparse map from :class:`BasisMode` to complex
amplitude.  Time is discrete: one time-bin unit equals the path-length
difference between the short and long arms of an unbalanced interferometer,
so a delay of 0 is the all-short (SS) arrival, 1 is SL/LS and 2 is LL.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from enum import IntEnum
from typing import Iterable, Iterator, Mapping, NamedTuple

from .errors import EmptyBranchError, NormalizationError, UnknownModeError

PRUNE_TOL = 1e-15
BRANCH_NORM_TOL = 1e-12
QUBIT_NORM_TOL = 1e-9
MAX_DELAY = 2


class Polarization(IntEnum):
    H = 0
    V = 1

    @property
    def flipped(self) -> "Polarization":
        return Polarization.V if self is Polarization.H else Polarization.H


class SpatialMode(IntEnum):
    """Declared spatial modes shared by both protocols.

    ``LINE`` is the transmission line (and Alice's/Bob's single-path optics);
    ``ARM_H`` and ``ARM_V`` are the internal arms of Bob's balanced
    interferometer; ``OUT1`` and ``OUT2`` are its two output ports.
    """

    LINE = 0
    ARM_H = 1
    ARM_V = 2
    OUT1 = 3
    OUT2 = 4


DECLARED_MODES = frozenset(SpatialMode)
_MODE_BY_ID = {int(m): m for m in SpatialMode}


def check_mode(mode: int) -> SpatialMode:
    try:
        return _MODE_BY_ID[mode]
    except (KeyError, TypeError):
        raise UnknownModeError(f"spatial mode {mode!r} is not declared") from None


class BasisMode(NamedTuple):
    """One occupied optical mode.

    Canonical order is (spatial, bin, pol) with H before V; tuple comparison
    is overridden so that ``sorted`` yields that order.
    """

    spatial: int
    pol: Polarization
    bin: int

    @property
    def sort_key(self) -> tuple[int, int, int]:
        return (self.spatial, self.bin, self.pol)

    def __lt__(self, other):  # type: ignore[override]
        return self.sort_key < other.sort_key

    def __le__(self, other):  # type: ignore[override]
        return self.sort_key <= other.sort_key

    def __gt__(self, other):  # type: ignore[override]
        return self.sort_key > other.sort_key

    def __ge__(self, other):  # type: ignore[override]
        return self.sort_key >= other.sort_key


@lru_cache(maxsize=None)
def basis_mode(spatial: int, pol: Polarization, delay: int) -> BasisMode:
    """Interned :class:`BasisMode` (cheaper than building a fresh tuple)."""
    return BasisMode(spatial, Polarization(pol), delay)


@lru_cache(maxsize=None)
def flipped(m: BasisMode) -> BasisMode:
    """``m`` with H and V exchanged."""
    return BasisMode(m.spatial, m.pol.flipped, m.bin)


@lru_cache(maxsize=None)
def delayed(m: BasisMode) -> BasisMode:
    """``m`` one time-bin later."""
    return BasisMode(m.spatial, m.pol, m.bin + 1)


@lru_cache(maxsize=None)
def moved(m: BasisMode, spatial: int) -> BasisMode:
    """``m`` relocated to another spatial mode."""
    return BasisMode(spatial, m.pol, m.bin)


@dataclass(frozen=True)
class Qubit:
    """Polarization qubit alpha|H> + beta|V>."""

    alpha: complex
    beta: complex

    @property
    def norm_squared(self) -> float:
        return abs(self.alpha) ** 2 + abs(self.beta) ** 2

    def check(self, tol: float = QUBIT_NORM_TOL) -> "Qubit":
        if not abs(self.norm_squared - 1.0) <= tol:
            raise NormalizationError(
                f"|alpha|^2 + |beta|^2 = {self.norm_squared!r}, expected 1"
            )
        return self

    @classmethod
    def normalized(cls, alpha: complex, beta: complex) -> "Qubit":
        n = math.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
        if n == 0.0:
            raise NormalizationError("cannot normalize the zero vector")
        return cls(complex(alpha) / n, complex(beta) / n)


class PhotonState:
    """Immutable sparse single-photon wavefunction.

    ``normalized`` distinguishes a full state (norm 1) from an unnormalized
    post-selection branch.  Amplitudes with magnitude below ``PRUNE_TOL`` are
    dropped on construction.
    """

    __slots__ = ("_amps", "normalized")

    def __init__(
        self,
        amplitudes: Mapping[BasisMode, complex] | Iterable[tuple[BasisMode, complex]] = (),
        *,
        normalized: bool = True,
    ):
        items = amplitudes.items() if isinstance(amplitudes, Mapping) else amplitudes
        amps: dict[BasisMode, complex] = {}
        for mode, amp in items:
            mode = BasisMode(int(mode[0]), Polarization(mode[1]), int(mode[2]))
            amp = complex(amp)
            if abs(amp) >= PRUNE_TOL:
                amps[mode] = amps.get(mode, 0j) + amp
        self._amps = {m: a for m, a in amps.items() if abs(a) >= PRUNE_TOL}
        self.normalized = normalized

    @classmethod
    def _build(
        cls, amps: dict[BasisMode, complex], normalized: bool, prune: bool = True
    ) -> "PhotonState":
        # fast path for element code that already holds BasisMode keys;
        # pure permutations pass prune=False since magnitudes are unchanged
        state = cls.__new__(cls)
        state._amps = {m: a for m, a in amps.items() if abs(a) >= PRUNE_TOL} if prune else amps
        state.normalized = normalized
        return state

    def __getitem__(self, mode: BasisMode) -> complex:
        return self._amps.get(mode, 0j)

    def get(self, spatial: int, pol: Polarization, delay: int) -> complex:
        # a plain tuple hashes and compares equal to the BasisMode key
        return self._amps.get((spatial, pol, delay), 0j)

    def __len__(self) -> int:
        return len(self._amps)

    def __iter__(self) -> Iterator[BasisMode]:
        return iter(sorted(self._amps))

    def __contains__(self, mode: object) -> bool:
        return mode in self._amps

    def items(self) -> list[tuple[BasisMode, complex]]:
        """Amplitudes in canonical basis order."""
        return sorted(self._amps.items(), key=lambda kv: kv[0].sort_key)

    def raw(self) -> dict[BasisMode, complex]:
        return dict(self._amps)

    def raw_keys(self):
        """Occupied modes in storage (not canonical) order."""
        return self._amps.keys()

    def raw_items(self):
        """(mode, amplitude) pairs in storage (not canonical) order."""
        return self._amps.items()

    @property
    def bins(self) -> set[int]:
        return {m.bin for m in self._amps}

    @property
    def spatial_modes(self) -> set[int]:
        return {m.spatial for m in self._amps}

    def restrict(self, spatial: int | None = None, delay: int | None = None) -> "PhotonState":
        amps = {
            m: a
            for m, a in self._amps.items()
            if (spatial is None or m.spatial == spatial) and (delay is None or m.bin == delay)
        }
        return PhotonState._build(amps, normalized=False, prune=False)

    def scaled(self, factor: complex) -> "PhotonState":
        return PhotonState._build({m: a * factor for m, a in self._amps.items()}, self.normalized)

    def to_records(self) -> list[dict]:
        return [
            {
                "spatial": int(m.spatial),
                "pol": m.pol.name,
                "delay": int(m.bin),
                "re": float(a.real),
                "im": float(a.imag),
            }
            for m, a in self.items()
        ]

    @classmethod
    def from_records(cls, records: Iterable[Mapping], *, normalized: bool = True) -> "PhotonState":
        return cls(
            (
                (
                    BasisMode(int(r["spatial"]), Polarization[r["pol"]], int(r["delay"])),
                    complex(r["re"], r["im"]),
                )
                for r in records
            ),
            normalized=normalized,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PhotonState):
            return NotImplemented
        return self._amps == other._amps

    def __hash__(self):
        return hash(tuple(self.items()))

    def __repr__(self) -> str:
        terms = " + ".join(
            f"({a:.6g})|{m.pol.name},{m.bin}>@{m.spatial}" for m, a in self.items()
        )
        kind = "" if self.normalized else ", branch"
        return f"PhotonState({terms or '0'}{kind})"


def new_qubit_state(q: Qubit, home: int = SpatialMode.LINE) -> PhotonState:
    """Place qubit ``q`` on spatial mode ``home`` at delay 0."""
    q.check()
    home = check_mode(home)
    return PhotonState._build(
        {
            basis_mode(home, Polarization.H, 0): complex(q.alpha),
            basis_mode(home, Polarization.V, 0): complex(q.beta),
        },
        normalized=True,
    )


def norm_squared(s: PhotonState) -> float:
    return math.fsum([a.real * a.real + a.imag * a.imag for a in s._amps.values()])


def project_time_bin(s: PhotonState, delay: int) -> tuple[PhotonState, float]:
    """Return the unnormalized branch of ``s`` at ``delay`` and its probability."""
    branch = s.restrict(delay=delay)
    return branch, norm_squared(branch)


def renormalize(s: PhotonState) -> PhotonState:
    n2 = norm_squared(s)
    if n2 <= BRANCH_NORM_TOL:
        raise EmptyBranchError(f"branch norm^2 {n2!r} too small to renormalize")
    n = math.sqrt(n2)
    return PhotonState._build({m: a / n for m, a in s._amps.items()}, True, prune=False)


def branch_overlap(s: PhotonState, q: Qubit, spatial: int, delay: int) -> tuple[complex, float]:
    """(<q|branch>, norm^2 of branch) for the branch of ``s`` at (spatial, delay).

    The branch holds at most the two polarization modes of that slot, read
    as the qubit pair (H, V).
    """
    h = s._amps.get((spatial, Polarization.H, delay), 0j)
    v = s._amps.get((spatial, Polarization.V, delay), 0j)
    overlap = q.alpha.conjugate() * h + q.beta.conjugate() * v
    return overlap, math.fsum([h.real * h.real, h.imag * h.imag, v.real * v.real, v.imag * v.imag])


def fidelity_with_qubit(s: PhotonState, q: Qubit, spatial: int, delay: int) -> float:
    """|<q|branch>|^2 for the renormalized branch of ``s`` at (spatial, delay).

    The overall phase of the branch drops out.
    """
    overlap, n2 = branch_overlap(s, q, spatial, delay)
    if n2 <= BRANCH_NORM_TOL:
        raise EmptyBranchError(
            f"no amplitude at spatial mode {spatial}, delay {delay} (norm^2 {n2!r})"
        )
    fid = (overlap.real**2 + overlap.imag**2) / (n2 * q.norm_squared)
    return min(fid, 1.0)
