"""Ideal linear-optical elements acting on :class:`PhotonState`.

Routing through a polarizing beam splitter imparts no phase; any fixed
reflection phase is absorbed into the mode definitions.  A Pockels cell is a
full H<->V swap inside its activation window (the one-directional
``|V>_L -> |H>_L`` description agrees with this on every state the protocols
produce, and the swap keeps the element unitary).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .errors import ConfigError, OutOfRangeError
from .state import (
    MAX_DELAY,
    BasisMode,
    PhotonState,
    Polarization,
    SpatialMode,
    check_mode,
    delayed,
    flipped,
    moved,
)

H = Polarization.H
V = Polarization.V


@dataclass(frozen=True)
class ActivationWindow:
    """Set of time-bin delays during which a Pockels cell is switched on."""

    active_bins: frozenset[int] = field(default_factory=frozenset)

    def __init__(self, active_bins: Iterable[int] = ()):
        bins = frozenset(int(b) for b in active_bins)
        if any(b < 0 for b in bins):
            raise OutOfRangeError(f"negative delay in activation window {sorted(bins)}")
        object.__setattr__(self, "active_bins", bins)

    def __contains__(self, delay: object) -> bool:
        return delay in self.active_bins

    @classmethod
    def always(cls, max_delay: int = MAX_DELAY) -> "ActivationWindow":
        return cls(range(max_delay + 1))


def _active_bins(w: ActivationWindow | Iterable[int]) -> frozenset[int]:
    if isinstance(w, ActivationWindow):
        return w.active_bins
    return ActivationWindow(w).active_bins


def _swap_pol(s: PhotonState, mode: int, active: frozenset[int] | None) -> PhotonState:
    out = {}
    for m, a in s._amps.items():
        if m.spatial == mode and (active is None or m.bin in active):
            m = flipped(m)
        out[m] = a
    return PhotonState._build(out, s.normalized, prune=False)


def apply_hwp(s: PhotonState, mode: int) -> PhotonState:
    """Half-wave plate on ``mode``: swap H and V in every time-bin."""
    return _swap_pol(s, check_mode(mode), None)


def apply_pockels(
    s: PhotonState, mode: int, window: ActivationWindow | Iterable[int]
) -> PhotonState:
    """Pockels cell on ``mode``: swap H and V only for delays in ``window``."""
    return _swap_pol(s, check_mode(mode), _active_bins(window))


def apply_unbalanced_interferometer(s: PhotonState, mode: int) -> PhotonState:
    """PBS pair: H takes the short path, V the long path (+1 delay)."""
    mode = check_mode(mode)
    out = {}
    for m, a in s._amps.items():
        if m.spatial == mode and m.pol is V:
            m = delayed(m)
        out[m] = a
    return PhotonState._build(out, s.normalized, prune=False)


def _add(out: dict, key: BasisMode, amp: complex) -> None:
    out[key] = out.get(key, 0j) + amp


def apply_pbs_split(s: PhotonState, in_mode: int, h_mode: int, v_mode: int) -> PhotonState:
    """Transmit H from ``in_mode`` to ``h_mode`` and reflect V to ``v_mode``."""
    in_mode, h_mode, v_mode = check_mode(in_mode), check_mode(h_mode), check_mode(v_mode)
    out: dict[BasisMode, complex] = {}
    for m, a in s._amps.items():
        if m.spatial == in_mode:
            m = moved(m, h_mode if m.pol is H else v_mode)
        _add(out, m, a)
    return PhotonState._build(out, s.normalized)


def apply_balanced_interferometer_fig2(
    s: PhotonState,
    in_mode: int,
    out1: int,
    out2: int,
    window_H: ActivationWindow | Iterable[int],
    window_V: ActivationWindow | Iterable[int],
    arm_h: int = SpatialMode.ARM_H,
    arm_v: int = SpatialMode.ARM_V,
) -> PhotonState:
    """Balanced polarization interferometer with one gated Pockels cell per arm.

    The input PBS sends H to ``arm_h`` and V to ``arm_v`` (equal arm lengths);
    the cell in ``arm_h`` fires during ``window_H`` and the one in ``arm_v``
    during ``window_V``.  The recombining PBS routes an arm's unflipped
    polarization to ``out1`` and its flipped polarization to ``out2``:

        arm_h: H -> out1 (as H),  V -> out2 (as V)
        arm_v: V -> out1 (as V),  H -> out2 (as H)

    Split, cells and recombination are applied in a single pass over the
    amplitudes; anything already sitting in an arm is treated as having
    entered that arm.
    """
    target = _balanced_router(
        in_mode, out1, out2, arm_h, arm_v, _active_bins(window_H), _active_bins(window_V)
    )
    out: dict[BasisMode, complex] = {}
    for m, a in s._amps.items():
        _add(out, target(m), a)
    return PhotonState._build(out, s.normalized)


@lru_cache(maxsize=64)
def _balanced_router(in_mode, out1, out2, arm_h, arm_v, bins_h, bins_v):
    modes = [check_mode(m) for m in (in_mode, out1, out2, arm_h, arm_v)]
    if len(set(modes)) != len(modes):
        raise ValueError(f"balanced interferometer modes must be distinct, got {modes}")
    in_mode, out1, out2, arm_h, arm_v = modes
    cells = {arm_h: bins_h, arm_v: bins_v}
    route = {
        (arm_h, H): out1,
        (arm_h, V): out2,
        (arm_v, V): out1,
        (arm_v, H): out2,
    }

    @lru_cache(maxsize=None)
    def target(m: BasisMode) -> BasisMode:
        spatial = m.spatial
        if spatial == in_mode:
            spatial = arm_h if m.pol is H else arm_v
        elif spatial != arm_h and spatial != arm_v:
            return m
        if m.bin in cells[spatial]:
            m = flipped(m)
        return moved(m, route[spatial, m.pol])

    return target


class Arrival(Enum):
    TOO_EARLY = "TooEarly"
    ON_TIME = "OnTime"
    TOO_LATE = "TooLate"


def classify_arrival(delay: int) -> Arrival:
    """Map an arrival delay of the two-interferometer protocols to SS / SL,LS / LL."""
    if delay == 0:
        return Arrival.TOO_EARLY
    if delay == 1:
        return Arrival.ON_TIME
    if delay == 2:
        return Arrival.TOO_LATE
    raise OutOfRangeError(f"delay {delay} outside 0..{MAX_DELAY}")


def apply_time_gate(s: PhotonState, mode: int, delay: int) -> PhotonState:
    """Keep only the amplitude on ``mode`` arriving at ``delay`` (a branch)."""
    return s.restrict(spatial=check_mode(mode), delay=delay)


class ElementKind(Enum):
    PBS = "PBS"
    UNBALANCED_INTERFEROMETER = "UnbalancedInterferometer"
    BALANCED_INTERFEROMETER_FIG2 = "BalancedInterferometerFig2"
    HWP = "HWP"
    POCKELS_CELL = "PockelsCell"
    TIME_GATE = "TimeGate"


# number of target modes each kind expects, and whether it carries windows
_ARITY = {
    ElementKind.PBS: 3,
    ElementKind.UNBALANCED_INTERFEROMETER: 1,
    ElementKind.BALANCED_INTERFEROMETER_FIG2: 3,
    ElementKind.HWP: 1,
    ElementKind.POCKELS_CELL: 1,
    ElementKind.TIME_GATE: 1,
}


@dataclass(frozen=True)
class ElementSpec:
    """One element of a circuit description.

    ``windows`` holds the activation windows: one for a Pockels cell, two
    (H arm, V arm) for the balanced interferometer, one single-delay window
    for a time gate.
    """

    kind: ElementKind
    modes: tuple[int, ...]
    windows: tuple[ActivationWindow, ...] = ()

    def __post_init__(self):
        modes = tuple(check_mode(m) for m in self.modes)
        if len(set(modes)) != len(modes):
            raise ConfigError(f"{self.kind.value}: target modes must be distinct")
        if len(modes) != _ARITY[self.kind]:
            raise ConfigError(
                f"{self.kind.value}: expected {_ARITY[self.kind]} modes, got {len(modes)}"
            )
        need = {
            ElementKind.POCKELS_CELL: 1,
            ElementKind.BALANCED_INTERFEROMETER_FIG2: 2,
            ElementKind.TIME_GATE: 1,
        }.get(self.kind, 0)
        if len(self.windows) != need:
            raise ConfigError(f"{self.kind.value}: expected {need} activation windows")
        if self.kind is ElementKind.TIME_GATE and len(self.windows[0].active_bins) != 1:
            raise ConfigError("TimeGate: window must name exactly one delay")
        object.__setattr__(self, "modes", modes)

    @classmethod
    def from_dict(cls, record: Mapping) -> "ElementSpec":
        unknown = set(record) - {"kind", "modes", "active_bins"}
        if unknown:
            raise ConfigError(f"element: unknown field(s) {sorted(unknown)}")
        try:
            kind = ElementKind(record["kind"])
        except KeyError:
            raise ConfigError("element: missing field 'kind'") from None
        except ValueError:
            raise ConfigError(f"element: unknown kind {record['kind']!r}") from None
        bins = record.get("active_bins", [])
        if kind is ElementKind.BALANCED_INTERFEROMETER_FIG2:
            windows = tuple(ActivationWindow(b) for b in bins)
        elif bins or kind in (ElementKind.POCKELS_CELL, ElementKind.TIME_GATE):
            windows = (ActivationWindow(bins),)
        else:
            windows = ()
        try:
            return cls(kind, tuple(record["modes"]), windows)
        except KeyError:
            raise ConfigError("element: missing field 'modes'") from None
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"element {kind.value}: {exc}") from None

    def to_dict(self) -> dict:
        record: dict = {"kind": self.kind.value, "modes": [int(m) for m in self.modes]}
        if self.kind is ElementKind.BALANCED_INTERFEROMETER_FIG2:
            record["active_bins"] = [sorted(w.active_bins) for w in self.windows]
        elif self.windows:
            record["active_bins"] = sorted(self.windows[0].active_bins)
        return record


def apply_element(s: PhotonState, spec: ElementSpec) -> PhotonState:
    kind, modes = spec.kind, spec.modes
    if kind is ElementKind.HWP:
        return apply_hwp(s, modes[0])
    if kind is ElementKind.POCKELS_CELL:
        return apply_pockels(s, modes[0], spec.windows[0])
    if kind is ElementKind.UNBALANCED_INTERFEROMETER:
        return apply_unbalanced_interferometer(s, modes[0])
    if kind is ElementKind.PBS:
        return apply_pbs_split(s, *modes)
    if kind is ElementKind.BALANCED_INTERFEROMETER_FIG2:
        return apply_balanced_interferometer_fig2(s, *modes, *spec.windows)
    (delay,) = spec.windows[0].active_bins
    return apply_time_gate(s, modes[0], delay)


def run_elements(s: PhotonState, specs: Sequence[ElementSpec]) -> PhotonState:
    for spec in specs:
        s = apply_element(s, spec)
    return s
