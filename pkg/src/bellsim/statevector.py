"""Dense statevector simulation.

Qubit 0 is the top circuit wire and the most significant bit of the amplitude
index, so ``|q0 q1 ...>`` reads left to right.  The array kernels below work
on a batch of states of shape ``(batch, 2**n)``; the single-state API wraps
them with a batch of one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, NumericalDegeneracyError, ValidationError
from .gates import UNITARY_TOL, Gate, controlled_matrix

MAX_QUBITS = 6
NORM_TOL = 1e-12
DEGENERATE_BRANCH = 1e-15


def apply_matrix(psi: np.ndarray, u: np.ndarray, qubits, n: int) -> np.ndarray:
    """Apply a ``2**k x 2**k`` matrix to ``qubits`` (first = most significant) of each row."""
    k = len(qubits)
    batch = psi.shape[0]
    t = psi.reshape((batch,) + (2,) * n)
    src = [1 + q for q in qubits]
    dst = list(range(n + 1 - k, n + 1))
    t = np.moveaxis(t, src, dst)
    shape = t.shape
    t = (t.reshape(-1, 1 << k) @ u.T).reshape(shape)
    return np.ascontiguousarray(np.moveaxis(t, dst, src)).reshape(batch, 1 << n)


def qubit_one_probability(psi: np.ndarray, q: int, n: int) -> np.ndarray:
    t = np.abs(psi.reshape((psi.shape[0],) + (2,) * n)) ** 2
    t = np.moveaxis(t, 1 + q, 1)
    return t[:, 1].reshape(psi.shape[0], -1).sum(axis=1)


def project(psi: np.ndarray, q: int, n: int, outcomes: np.ndarray, probs: np.ndarray) -> np.ndarray:
    """Collapse each row onto its outcome for qubit ``q`` and renormalise."""
    t = psi.reshape((psi.shape[0],) + (2,) * n).copy()
    view = np.moveaxis(t, 1 + q, 1)
    rows = np.arange(psi.shape[0])
    view[rows, 1 - outcomes] = 0
    return t.reshape(psi.shape) / np.sqrt(probs)[:, None]


def measure_rows(psi: np.ndarray, q: int, n: int, uniforms: np.ndarray):
    """Born-rule measurement of qubit ``q`` in every row, driven by uniform draws.

    Returns ``(outcomes, branch_probabilities, collapsed_psi)``.  Outcome 1 is
    chosen when the draw falls below P(1).
    """
    p1 = np.clip(qubit_one_probability(psi, q, n), 0.0, 1.0)
    outcomes = (uniforms < p1).astype(np.int64)
    probs = np.where(outcomes == 1, p1, 1.0 - p1)
    if np.any(probs < DEGENERATE_BRANCH):
        raise NumericalDegeneracyError(
            f"sampled a measurement branch of qubit {q} with probability {probs.min():.3g}"
        )
    return outcomes, probs, project(psi, q, n, outcomes, probs)


def _check_qubit(q: int, n: int):
    if not 0 <= q < n:
        raise IndexError(f"qubit {q} out of range for {n} qubits")


def _as_unitary(gate) -> np.ndarray:
    if isinstance(gate, Gate):
        return gate.matrix
    m = np.asarray(gate, dtype=complex)
    if m.shape != (2, 2) or np.max(np.abs(m.conj().T @ m - np.eye(2))) >= UNITARY_TOL:
        raise ValidationError("gate matrix must be a 2x2 unitary")
    return m


@dataclass(frozen=True, eq=False)
class StateVector:
    n_qubits: int
    amps: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ConfigurationError(f"n_qubits must be in 1..{MAX_QUBITS}, got {self.n_qubits}")
        amps = np.asarray(self.amps, dtype=complex)
        if amps.shape != (1 << self.n_qubits,):
            raise ValidationError(f"expected {1 << self.n_qubits} amplitudes, got {amps.shape}")
        if not np.all(np.isfinite(amps)):
            raise ValidationError("non-finite amplitude")
        object.__setattr__(self, "amps", amps)

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def ket(self, bits: str) -> complex:
        """Amplitude of the basis state written as a bitstring, e.g. ``"01"``."""
        return complex(self.amps[int(bits, 2)])


@dataclass(frozen=True)
class MeasurementRecord:
    qubit: int
    outcome: int
    probability: float


def new_zero_state(n: int) -> StateVector:
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_QUBITS:
        raise ConfigurationError(f"qubit count must be in 1..{MAX_QUBITS}, got {n!r}")
    amps = np.zeros(1 << n, dtype=complex)
    amps[0] = 1.0
    return StateVector(int(n), amps)


def apply_single(state: StateVector, gate, q: int) -> StateVector:
    u = _as_unitary(gate)
    _check_qubit(q, state.n_qubits)
    out = apply_matrix(state.amps[None, :], u, [q], state.n_qubits)[0]
    return StateVector(state.n_qubits, out)


def apply_controlled(state: StateVector, gate, control: int, target: int) -> StateVector:
    u = _as_unitary(gate)
    n = state.n_qubits
    _check_qubit(control, n)
    _check_qubit(target, n)
    if control == target:
        raise IndexError("control and target must differ")
    out = apply_matrix(state.amps[None, :], controlled_matrix(u), [control, target], n)[0]
    return StateVector(n, out)


def outcome_probabilities(state: StateVector) -> np.ndarray:
    return np.abs(state.amps) ** 2


def measure_qubit(state: StateVector, q: int, rng: np.random.Generator):
    _check_qubit(q, state.n_qubits)
    outcomes, probs, psi = measure_rows(state.amps[None, :], q, state.n_qubits, rng.random(1))
    record = MeasurementRecord(q, int(outcomes[0]), float(probs[0]))
    return record, StateVector(state.n_qubits, psi[0])
