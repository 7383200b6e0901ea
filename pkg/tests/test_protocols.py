import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import expi, max_amp_diff, random_params, random_qubit
from timebin_qec.channel import ChannelParams
from timebin_qec.errors import BinRangeError, EmptyBranchError
from timebin_qec.protocols import (
    alice_encode,
    bob_decode_correct,
    bob_decode_reject,
    run_correction,
    run_rejection,
    transmit,
)
from timebin_qec.state import PhotonState, Polarization, Qubit, SpatialMode, fidelity_with_qubit

H, V = Polarization.H, Polarization.V
LINE, OUT1, OUT2 = SpatialMode.LINE, SpatialMode.OUT1, SpatialMode.OUT2

Q = Qubit(0.6, 0.8j)
P = ChannelParams(math.pi / 3, 0.7, -0.2)

unit = st.floats(0.0, 2 * math.pi, allow_nan=False)


@st.composite
def qubits(draw):
    t = draw(st.floats(0.0, math.pi / 2))
    a, b = draw(unit), draw(unit)
    return Qubit(math.cos(t) * expi(a), math.sin(t) * expi(b))


# -- encoding ----------------------------------------------------------------


def test_encode_example():
    assert alice_encode(Q) == PhotonState({(LINE, H, 0): 0.6, (LINE, H, 1): 0.8j})


@pytest.mark.parametrize(
    "q,expected",
    [
        (Qubit(1, 0), {(LINE, H, 0): 1}),
        (Qubit(0, 1), {(LINE, H, 1): 1}),
        (Qubit(1 / math.sqrt(2), 1 / math.sqrt(2)), {(LINE, H, 0): 1 / math.sqrt(2), (LINE, H, 1): 1 / math.sqrt(2)}),
    ],
)
def test_encode_basis_cases(q, expected):
    assert alice_encode(q) == PhotonState(expected)


@settings(max_examples=200, deadline=None)
@given(qubits())
def test_encoded_photon_is_horizontal(q):
    s = alice_encode(q)
    assert all(m.pol is H and m.spatial == LINE for m in s.raw_keys())
    assert abs(s.get(LINE, H, 0) - q.alpha) < 1e-15
    assert abs(s.get(LINE, H, 1) - q.beta) < 1e-15


# -- rejection ---------------------------------------------------------------


def test_reject_example():
    r = run_rejection(Q, P)
    assert abs(r.accept_probability - 0.25) < 1e-15
    assert abs(r.early_probability - 0.36 * 0.75) < 1e-15
    assert abs(r.late_probability - 0.64 * 0.75) < 1e-15
    assert abs(r.fidelity_accepted - 1.0) < 1e-12


def test_reject_amplitudes(rng):
    for _ in range(200):
        q, p = random_qubit(rng), random_params(rng)
        c, s = math.cos(p.theta), math.sin(p.theta)
        expected = PhotonState(
            {
                (LINE, H, 1): expi(p.phi) * c * q.alpha,
                (LINE, V, 1): expi(p.phi) * c * q.beta,
                (LINE, V, 0): expi(p.chi) * s * q.alpha,
                (LINE, H, 2): expi(p.chi) * s * q.beta,
            }
        )
        r = run_rejection(q, p)
        assert max_amp_diff(r.output_state, expected) < 1e-14
        if r.branch_factor is not None:
            assert abs(r.branch_factor - expi(p.phi) * c) < 1e-14


def test_reject_noiseless_accepts_everything(rng):
    for _ in range(50):
        q = random_qubit(rng)
        r = run_rejection(q, ChannelParams(0.0))
        assert r.accept_probability == pytest.approx(1.0, abs=1e-15)
        assert r.early_probability == r.late_probability == 0.0


def test_reject_full_flip_empty_branch():
    r = run_rejection(Q, ChannelParams(math.pi / 2))
    assert r.accept_probability < 1e-30
    assert r.fidelity_accepted is None and r.branch_factor is None
    with pytest.raises(EmptyBranchError):
        fidelity_with_qubit(r.accepted_state, Q, LINE, 1)


def test_reject_invariants(rng):
    for _ in range(1000):
        q, p = random_qubit(rng), random_params(rng)
        r = run_rejection(q, p)
        total = r.accept_probability + r.early_probability + r.late_probability
        assert abs(total - 1.0) < 1e-12
        assert abs(r.accept_probability - math.cos(p.theta) ** 2) < 1e-12
        assert abs(r.early_probability - abs(q.alpha) ** 2 * math.sin(p.theta) ** 2) < 1e-12
        assert abs(r.late_probability - abs(q.beta) ** 2 * math.sin(p.theta) ** 2) < 1e-12
        if r.accept_probability > 1e-9:
            assert abs(r.fidelity_accepted - 1.0) < 1e-10


@settings(max_examples=200, deadline=None)
@given(qubits(), unit, unit, unit, unit, unit)
def test_reject_phases_do_not_matter(q, theta, phi1, chi1, phi2, chi2):
    a = run_rejection(q, ChannelParams(theta, phi1, chi1))
    b = run_rejection(q, ChannelParams(theta, phi2, chi2))
    assert abs(a.accept_probability - b.accept_probability) < 1e-12
    assert abs(a.early_probability - b.early_probability) < 1e-12


def test_reject_without_reference_has_no_fidelity():
    r = bob_decode_reject(transmit(Q, P))
    assert r.fidelity_accepted is None and r.accept_probability == pytest.approx(0.25)


def test_reject_to_dict_is_plain():
    d = run_rejection(Q, P).to_dict()
    assert set(d) >= {"accept_probability", "fidelity_accepted", "branch_factor", "output_state"}
    assert isinstance(d["branch_factor"], list)


# -- correction --------------------------------------------------------------


def test_correct_example():
    c = run_correction(Q, P)
    assert abs(c.port1_probability - 0.25) < 1e-15
    assert abs(c.port2_probability - 0.75) < 1e-15
    assert abs(c.fidelity_port1 - 1.0) < 1e-12
    assert abs(c.fidelity_port2 - 1.0) < 1e-12
    assert c.stray_probability == 0.0


def test_correct_amplitudes(rng):
    for _ in range(200):
        q, p = random_qubit(rng), random_params(rng)
        c, s = math.cos(p.theta), math.sin(p.theta)
        expected = PhotonState(
            {
                (OUT1, H, 1): expi(p.phi) * c * q.alpha,
                (OUT1, V, 1): expi(p.phi) * c * q.beta,
                (OUT2, H, 1): expi(p.chi) * s * q.alpha,
                (OUT2, V, 1): expi(p.chi) * s * q.beta,
            }
        )
        assert max_amp_diff(run_correction(q, p).output_state, expected) < 1e-14


def test_correct_invariants(rng):
    for _ in range(1000):
        q, p = random_qubit(rng), random_params(rng)
        c = run_correction(q, p)
        assert abs(c.port1_probability + c.port2_probability - 1.0) < 1e-12
        assert abs(c.port1_probability - math.cos(p.theta) ** 2) < 1e-12
        assert abs(c.port2_probability - math.sin(p.theta) ** 2) < 1e-12
        assert c.stray_probability < 1e-12
        for prob, fid in ((c.port1_probability, c.fidelity_port1), (c.port2_probability, c.fidelity_port2)):
            if prob > 1e-9:
                assert abs(fid - 1.0) < 1e-10


@pytest.mark.parametrize("theta,empty", [(0.0, "port2"), (math.pi / 2, "port1")])
def test_correct_extreme_angles(theta, empty):
    c = run_correction(Q, ChannelParams(theta, 0.4, 0.9))
    assert getattr(c, f"fidelity_{empty}") is None
    other = "port1" if empty == "port2" else "port2"
    assert abs(getattr(c, f"fidelity_{other}") - 1.0) < 1e-12


def test_correct_to_dict_is_plain():
    d = bob_decode_correct(transmit(Q, P), reference=Q).to_dict()
    assert d["stray_probability"] == 0.0 and len(d["port1_state"]) == 2


# -- input checks ------------------------------------------------------------


@pytest.mark.parametrize("decode", [bob_decode_reject, bob_decode_correct])
def test_received_state_outside_two_bins(decode):
    with pytest.raises(BinRangeError):
        decode(PhotonState({(LINE, H, 2): 1}))


@pytest.mark.parametrize("decode", [bob_decode_reject, bob_decode_correct])
def test_received_state_off_the_line(decode):
    with pytest.raises(ValueError):
        decode(PhotonState({(OUT1, H, 0): 1}))
