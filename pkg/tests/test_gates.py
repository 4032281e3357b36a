from math import pi, sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellsim import gates
from bellsim.circuits import controlled_fragment, fragment_unitary
from bellsim.errors import ConfigurationError, ValidationError

X = np.array([[0, 1], [1, 0]])
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1, -1])
H = np.array([[1, 1], [1, -1]]) / sqrt(2)
S = -np.sqrt(0.5) * np.array([[1, 1], [1, -1]])
T = np.sqrt(0.5) * np.array([[1, -1], [-1, -1]])


def _ry(t):
    # independent form: cos(t/2) I - i sin(t/2) Y
    return np.cos(t / 2) * np.eye(2) - 1j * np.sin(t / 2) * Y


def _block_controlled(u):
    out = np.zeros((4, 4), dtype=complex)
    out[:2, :2] = np.eye(2)
    out[2:, 2:] = u
    return out


def test_ry_zero_is_identity():
    np.testing.assert_allclose(gates.ry(0).matrix, np.eye(2), atol=1e-15)


@settings(max_examples=50)
@given(st.floats(-20, 20))
def test_ry_matches_pauli_form(t):
    np.testing.assert_allclose(gates.ry(t).matrix, _ry(t), atol=1e-14)
    np.testing.assert_allclose(gates.ry(t).matrix.real, [[np.cos(t / 2), -np.sin(t / 2)], [np.sin(t / 2), np.cos(t / 2)]], atol=1e-14)


def test_rz_and_phase_conventions():
    t = 0.37
    np.testing.assert_allclose(gates.rz(t).matrix, np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)]), atol=1e-15)
    np.testing.assert_allclose(gates.phase(t).matrix, np.diag([1, np.exp(1j * t)]), atol=1e-15)


@pytest.mark.parametrize("label,expected", [("Q", Z), ("R", X), ("S", S), ("T", T)])
def test_observable_matrices(label, expected):
    u = gates.observable(label).matrix
    np.testing.assert_allclose(u, expected, atol=1e-15)
    np.testing.assert_allclose(u, u.conj().T, atol=1e-12)
    np.testing.assert_allclose(np.linalg.eigvalsh(u), [-1, 1], atol=1e-12)


def test_unknown_observable():
    with pytest.raises(ConfigurationError):
        gates.observable("U")


@pytest.mark.parametrize("label", "QRST")
def test_diagonalizer(label):
    o = gates.diagonalizer(label).matrix
    u = gates.observable(label).matrix
    np.testing.assert_allclose(o @ u @ o.conj().T, Z, atol=1e-10)


def test_named_diagonalizers():
    assert gates.diagonalizer("Q") is gates.I
    assert gates.diagonalizer("R") is gates.H
    np.testing.assert_allclose(gates.diagonalizer("S").matrix, _ry(-5 * pi / 4), atol=1e-15)
    np.testing.assert_allclose(gates.diagonalizer("T").matrix, _ry(pi / 4), atol=1e-15)


def test_conjugation_identities():
    np.testing.assert_allclose(H @ X @ H, Z, atol=1e-12)
    th, al = -5 * pi / 4, pi / 4
    np.testing.assert_allclose(_ry(th) @ S @ _ry(-th), Z, atol=1e-12)
    np.testing.assert_allclose(_ry(al) @ T @ _ry(-al), Z, atol=1e-12)


def test_commutators():
    np.testing.assert_allclose(gates.commutator(Y, S), 1j * sqrt(2) * (Z - X), atol=1e-12)
    np.testing.assert_allclose(gates.commutator(Y, T), 1j * sqrt(2) * (Z + X), atol=1e-12)


def test_non_unitary_gate_rejected():
    with pytest.raises(ValidationError):
        gates.Gate("bad", np.array([[1, 0], [0, 2]]))
    with pytest.raises(ValidationError):
        gates.Gate("bad", np.eye(3))
    with pytest.raises(ValidationError):
        gates.Gate("bad", np.array([[np.nan, 0], [0, 1]]))


def test_gate_matrix_immutable():
    with pytest.raises(ValueError):
        gates.H.matrix[0, 0] = 0


@pytest.mark.parametrize(
    "label,angles",
    [
        ("Q", (pi / 2, pi, 0, 0)),
        ("R", (-pi / 2, pi, pi, 0)),
        ("S", (pi / 2, 0, pi / 2, -pi)),
        ("T", (pi / 2, pi, pi / 2, 0)),
        ("H", (pi / 2, 0, pi / 2, pi)),
    ],
)
def test_abc_tables(label, angles):
    dec = gates.abc_decompose(label)
    assert (dec.eta, dec.beta, dec.gamma, dec.delta) == pytest.approx(angles)
    target = H if label == "H" else {"Q": Z, "R": X, "S": S, "T": T}[label]
    np.testing.assert_allclose(dec.euler(), target, atol=1e-12)
    np.testing.assert_allclose(dec.reconstruct(), target, atol=1e-10)
    np.testing.assert_allclose(dec.abc_product(), np.eye(2), atol=1e-10)


def test_abc_ry_phi():
    phi = -3 * pi / 2
    dec = gates.abc_decompose("Ry", phi)
    np.testing.assert_allclose(dec.A.matrix, _ry(-3 * pi / 4), atol=1e-15)
    np.testing.assert_allclose(dec.B.matrix, _ry(3 * pi / 4), atol=1e-15)
    np.testing.assert_allclose(dec.C.matrix, np.eye(2), atol=1e-15)
    np.testing.assert_allclose(dec.reconstruct(), _ry(phi), atol=1e-12)


def test_abc_errors():
    with pytest.raises(ConfigurationError):
        gates.abc_decompose("W")
    with pytest.raises(ConfigurationError):
        gates.abc_decompose("Ry")


@pytest.mark.parametrize("label", ["Q", "R", "S", "T", "H"])
def test_fragment_equals_block_controlled(label):
    dec = gates.abc_decompose(label)
    u = fragment_unitary(controlled_fragment(dec, 0, 1), 2)
    np.testing.assert_allclose(u, _block_controlled(dec.target.matrix), atol=1e-10)


def test_fragment_ry_quarter_pi():
    dec = gates.abc_decompose("Ry", pi / 4)
    u = fragment_unitary(controlled_fragment(dec, 0, 1), 2)
    np.testing.assert_allclose(u, _block_controlled(_ry(pi / 4)), atol=1e-10)


def test_fragment_reversed_wires():
    # control below target: |c t> order swapped, so compare against a swapped oracle
    dec = gates.abc_decompose("S")
    u = fragment_unitary(controlled_fragment(dec, 1, 0), 2)
    swap = np.eye(4)[[0, 2, 1, 3]]
    np.testing.assert_allclose(u, swap @ _block_controlled(S) @ swap, atol=1e-10)


def test_identity_fragment():
    dec = gates.ABCDecomposition(0.0, 0.0, 0.0, 0.0, gates.I)
    u = fragment_unitary(controlled_fragment(dec, 0, 1), 2)
    np.testing.assert_allclose(u, np.eye(4), atol=1e-15)


def test_fragment_same_wire():
    with pytest.raises(IndexError):
        controlled_fragment(gates.abc_decompose("Q"), 1, 1)


@settings(max_examples=40)
@given(st.floats(-4 * pi, 4 * pi))
def test_ry_decomposition_any_angle(phi):
    dec = gates.abc_decompose("Ry", phi)
    np.testing.assert_allclose(dec.abc_product(), np.eye(2), atol=1e-10)
    u = fragment_unitary(controlled_fragment(dec, 0, 1), 2)
    np.testing.assert_allclose(u, _block_controlled(_ry(phi)), atol=1e-10)
