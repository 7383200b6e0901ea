import cmath
import math

import numpy as np
import pytest

from timebin_qec.channel import ChannelParams
from timebin_qec.state import BasisMode, PhotonState, Polarization, Qubit, SpatialMode


def random_qubit(rng) -> Qubit:
    z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    z /= np.linalg.norm(z)
    return Qubit(complex(z[0]), complex(z[1]))


def random_params(rng) -> ChannelParams:
    theta, phi, chi = rng.uniform(0.0, 2 * math.pi, 3)
    return ChannelParams(theta, phi, chi)


def random_state(rng, modes=(SpatialMode.LINE,), delays=(0, 1, 2), density=1.0) -> PhotonState:
    """Normalized state with random amplitudes on a random subset of modes."""
    keys = [
        BasisMode(m, p, d)
        for m in modes
        for d in delays
        for p in (Polarization.H, Polarization.V)
        if rng.random() < density
    ]
    if not keys:
        keys = [BasisMode(modes[0], Polarization.H, delays[0])]
    amps = rng.standard_normal(len(keys)) + 1j * rng.standard_normal(len(keys))
    amps /= np.linalg.norm(amps)
    return PhotonState(dict(zip(keys, amps.tolist())))


def max_amp_diff(a: PhotonState, b: PhotonState) -> float:
    keys = set(a.raw_keys()) | set(b.raw_keys())
    return max((abs(a[k] - b[k]) for k in keys), default=0.0)


def expi(x: float) -> complex:
    return cmath.exp(1j * x)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# -- acceptance summary ------------------------------------------------------

_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, {})

    def record(number: int, title: str, ok: bool, detail: str) -> None:
        line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
        lines[number] = line
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
