import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellsim import gates
from bellsim.errors import ConfigurationError, NumericalDegeneracyError, ValidationError
from bellsim.statevector import (
    StateVector,
    apply_controlled,
    apply_single,
    measure_qubit,
    new_zero_state,
    outcome_probabilities,
)

from .conftest import controlled_full, kron, single_full

H = gates.H.matrix
X = gates.X.matrix
Z = gates.Z.matrix
R = np.sqrt(0.5)


@pytest.mark.parametrize("n", [1, 2, 4])
def test_zero_state(n):
    s = new_zero_state(n)
    expected = np.zeros(2**n)
    expected[0] = 1
    np.testing.assert_array_equal(s.amps, expected)


@pytest.mark.parametrize("n", [0, 7, -1])
def test_zero_state_range(n):
    with pytest.raises(ConfigurationError):
        new_zero_state(n)


def test_x_on_second_qubit():
    s = apply_single(new_zero_state(2), gates.X, 1)
    assert s.ket("01") == 1


def test_hadamard():
    s = apply_single(new_zero_state(1), gates.H, 0)
    np.testing.assert_allclose(s.amps, [0.70710678, 0.70710678], atol=1e-8)


def test_bell_prep_intermediate_against_matrix_oracle():
    s = new_zero_state(2)
    for q in (0, 1):
        s = apply_single(s, gates.X, q)
    s = apply_single(s, gates.H, 0)
    oracle = kron(H, np.eye(2)) @ kron(X, X) @ np.array([1, 0, 0, 0])
    np.testing.assert_allclose(s.amps, oracle, atol=1e-15)
    np.testing.assert_allclose(s.amps, [0, R, 0, -R], atol=1e-15)


def test_cnot_makes_bell_state():
    s = StateVector(2, np.array([0, R, 0, -R]))
    s = apply_controlled(s, gates.X, 0, 1)
    np.testing.assert_allclose(s.amps, [0, R, -R, 0], atol=1e-15)


def test_controlled_with_unset_control():
    s = apply_controlled(new_zero_state(2), gates.X, 0, 1)
    assert s.ket("00") == 1


def test_controlled_z_cascade_kickback():
    # ancilla on top, |phi> = |01>, U = Z1 Z2
    s = apply_single(new_zero_state(3), gates.X, 2)
    s = apply_single(s, gates.H, 0)
    s = apply_controlled(s, gates.Z, 0, 1)
    s = apply_controlled(s, gates.Z, 0, 2)
    phi = np.array([0, 1, 0, 0])
    u = kron(Z, Z)
    oracle = 0.5 * (np.kron([1, 0], phi + u @ phi) + np.kron([0, 1], phi - u @ phi))
    s = apply_single(s, gates.H, 0)
    np.testing.assert_allclose(s.amps, oracle, atol=1e-15)
    full = single_full(H, 0, 3) @ controlled_full(Z, 0, 2, 3) @ controlled_full(Z, 0, 1, 3) @ single_full(H, 0, 3)
    np.testing.assert_allclose(s.amps, full @ np.kron([1, 0], phi), atol=1e-15)


def test_control_equals_target():
    with pytest.raises(IndexError):
        apply_controlled(new_zero_state(2), gates.X, 1, 1)


def test_qubit_out_of_range():
    with pytest.raises(IndexError):
        apply_single(new_zero_state(2), gates.X, 2)


def test_non_unitary_rejected():
    with pytest.raises(ValidationError):
        apply_single(new_zero_state(1), np.array([[1, 1], [0, 1]]), 0)


def test_probabilities_of_bell_state():
    s = StateVector(2, np.array([0, R, -R, 0]))
    np.testing.assert_allclose(outcome_probabilities(s), [0, 0.5, 0.5, 0], atol=1e-15)


def test_measure_basis_state(rng):
    rec, post = measure_qubit(new_zero_state(2), 0, rng)
    assert (rec.outcome, rec.probability) == (0, 1.0)
    np.testing.assert_array_equal(post.amps, new_zero_state(2).amps)


def test_measure_bell_state_branches():
    bell = StateVector(2, np.array([0, R, -R, 0]))
    seen = set()
    for seed in range(40):
        rec, post = measure_qubit(bell, 0, np.random.default_rng(seed))
        assert rec.probability == pytest.approx(0.5, abs=1e-15)
        expected = [0, 1, 0, 0] if rec.outcome == 0 else [0, 0, -1, 0]
        np.testing.assert_allclose(post.amps, expected, atol=1e-15)
        seen.add(rec.outcome)
    assert seen == {0, 1}


def test_ancilla_probability_for_z_on_plus_state(rng):
    # p0 = (1 + <Z>)/2 with <Z> = 0 for H|0>
    s = apply_single(new_zero_state(2), gates.H, 1)
    s = apply_single(s, gates.H, 0)
    s = apply_controlled(s, gates.Z, 0, 1)
    s = apply_single(s, gates.H, 0)
    assert outcome_probabilities(s)[:2].sum() == pytest.approx(0.5, abs=1e-15)
    rec, _ = measure_qubit(s, 0, rng)
    assert rec.probability == pytest.approx(0.5, abs=1e-15)


def test_measurement_idempotent():
    bell = StateVector(2, np.array([0, R, -R, 0]))
    for seed in range(20):
        rng = np.random.default_rng(seed)
        first, post = measure_qubit(bell, 1, rng)
        second, _ = measure_qubit(post, 1, rng)
        assert first.outcome == second.outcome
        assert second.probability == 1.0


def test_degenerate_branch_never_sampled():
    # near-zero branch: sampling follows exact probabilities and never lands there
    amps = np.array([1.0, 1e-9])
    s = StateVector(1, amps / np.linalg.norm(amps))
    for seed in range(100):
        rec, _ = measure_qubit(s, 0, np.random.default_rng(seed))
        assert rec.outcome == 0


def test_degenerate_branch_error():
    from bellsim.statevector import measure_rows

    psi = np.array([[1.0 + 0j, 1e-20]])
    with pytest.raises(NumericalDegeneracyError):
        measure_rows(psi, 0, 1, np.array([0.0]))


def test_born_rule_frequencies():
    from bellsim.circuits import Measure, CircuitSpec, GateOp, final_state
    from bellsim.sampler import sample_counts

    ops = [GateOp(gates.ry(1.1), 0), GateOp(gates.H, 1), GateOp(gates.ry(-0.4), 2)]
    ops.append(ops[0].__class__(gates.rz(0.3), 1))
    spec = CircuitSpec(3, ops + [Measure(q, q) for q in range(3)])
    probs = np.abs(final_state(spec).amps) ** 2
    shots = 100_000
    counts = sample_counts(spec, shots, seed=3)
    for idx, p in enumerate(probs):
        observed = counts.get(format(idx, "03b"), 0) / shots
        se = np.sqrt(p * (1 - p) / shots)
        assert abs(observed - p) < 4 * se + 1e-12


_gate_choice = st.one_of(
    st.sampled_from([gates.X, gates.Y, gates.Z, gates.H]),
    st.floats(-10, 10).map(gates.ry),
    st.floats(-10, 10).map(gates.rz),
    st.floats(-10, 10).map(gates.phase),
)


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(1, 6),
    steps=st.lists(st.tuples(_gate_choice, st.integers(0, 5), st.integers(0, 5), st.booleans()), max_size=30),
)
def test_norm_preserved(n, steps):
    s = new_zero_state(n)
    for gate, a, b, controlled in steps:
        a, b = a % n, b % n
        if controlled and a != b:
            s = apply_controlled(s, gate, a, b)
        else:
            s = apply_single(s, gate, a)
        assert abs(s.norm_squared - 1) < 1e-12
        assert np.all(np.isfinite(s.amps))


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 4), q=st.integers(0, 3), c=st.integers(0, 3), theta=st.floats(-7, 7))
def test_kernels_match_kronecker_oracle(n, q, c, theta):
    q, c = q % n, c % n
    rng = np.random.default_rng(0)
    amps = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    s = StateVector(n, amps / np.linalg.norm(amps))
    g = gates.ry(theta) @ gates.rz(theta / 3)
    np.testing.assert_allclose(apply_single(s, g, q).amps, single_full(g.matrix, q, n) @ s.amps, atol=1e-13)
    if c != q:
        np.testing.assert_allclose(
            apply_controlled(s, g, c, q).amps, controlled_full(g.matrix, c, q, n) @ s.amps, atol=1e-13
        )
