"""Density matrices, Kraus channels and the noisy CHSH expectation values.

Channel names: B (bit flip), P (phase flip), BP (bit-phase flip),
A (amplitude damping), GA (generalized amplitude damping) and D (two-qubit
depolarizing).  For the flip channels ``p`` is the probability that *no*
error occurs; amplitude damping uses ``theta`` with damping probability
``sin(theta)**2``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import cos, sqrt

import numpy as np

from .errors import ConfigurationError, ValidationError
from .gates import SQRT1_2, Gate, observable
from .statevector import StateVector, apply_matrix

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
COMPLETENESS_TOL = 1e-10

CHANNEL_NAMES = ("B", "P", "BP", "A", "GA", "D")

PAULIS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    n_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        dim = 1 << self.n_qubits
        if m.shape != (dim, dim):
            raise ValidationError(f"density matrix must be {dim}x{dim}, got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            raise ValidationError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1) > TRACE_TOL:
            raise ValidationError(f"density matrix trace {np.trace(m).real:.15g} != 1")
        if np.linalg.eigvalsh(m).min() < -PSD_TOL:
            raise ValidationError("density matrix is not positive semidefinite")
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True, eq=False)
class KrausChannel:
    name: str
    operators: tuple[np.ndarray, ...]
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        ops = tuple(np.asarray(e, dtype=complex) for e in self.operators)
        dim = ops[0].shape[0]
        total = sum(e.conj().T @ e for e in ops)
        resid = np.max(np.abs(total - np.eye(dim)))
        if resid > COMPLETENESS_TOL:
            raise ValidationError(f"channel {self.name} is not trace preserving (residual {resid:.3g})")
        object.__setattr__(self, "operators", ops)

    @property
    def n_qubits(self) -> int:
        return self.operators[0].shape[0].bit_length() - 1


def density_from_state(state: StateVector) -> DensityMatrix:
    psi = state.amps
    return DensityMatrix(state.n_qubits, np.outer(psi, psi.conj()))


def _probability(params: dict, key: str) -> float:
    if key not in params:
        raise ConfigurationError(f"missing channel parameter {key!r}")
    p = float(params[key])
    if not 0.0 <= p <= 1.0:
        raise ConfigurationError(f"{key} must lie in [0, 1], got {p}")
    return p


def make_channel(name: str, params: dict | None = None, **kwargs) -> KrausChannel:
    """Build a Kraus channel.

    ``B``/``P``/``BP`` take ``p``; ``A`` takes ``theta``; ``GA`` takes ``theta``
    and ``p2``; ``D`` takes ``p_d``.
    """
    params = dict(params or {}, **kwargs)
    if name in ("B", "P", "BP"):
        p = _probability(params, "p")
        flip = {"B": "X", "P": "Z", "BP": "Y"}[name]
        ops = (sqrt(p) * PAULIS["I"], sqrt(1 - p) * PAULIS[flip])
        return KrausChannel(name, ops, {"p": p})
    if name in ("A", "GA"):
        if "theta" not in params:
            raise ConfigurationError("missing channel parameter 'theta'")
        theta = float(params["theta"])
        if not np.isfinite(theta):
            raise ConfigurationError("theta must be finite")
        c, s = np.cos(theta), np.sin(theta)
        e0 = np.array([[1, 0], [0, c]], dtype=complex)
        e1 = np.array([[0, s], [0, 0]], dtype=complex)
        if name == "A":
            return KrausChannel(name, (e0, e1), {"theta": theta})
        p2 = _probability(params, "p2")
        e2 = np.array([[c, 0], [0, 1]], dtype=complex)
        e3 = np.array([[0, 0], [s, 0]], dtype=complex)
        ops = (sqrt(p2) * e0, sqrt(p2) * e1, sqrt(1 - p2) * e2, sqrt(1 - p2) * e3)
        return KrausChannel(name, ops, {"theta": theta, "p2": p2})
    if name == "D":
        pd = _probability(params, "p_d")
        ops = []
        for a, b in itertools.product("IXYZ", repeat=2):
            weight = 1 - 15 * pd / 16 if a == b == "I" else pd / 16
            ops.append(sqrt(weight) * np.kron(PAULIS[a], PAULIS[b]))
        return KrausChannel(name, tuple(ops), {"p_d": pd})
    raise ConfigurationError(f"unknown channel {name!r}; expected one of {', '.join(CHANNEL_NAMES)}")


def embed(op: np.ndarray, qubits, n: int) -> np.ndarray:
    """Full ``2**n`` operator acting as ``op`` on ``qubits`` and identity elsewhere."""
    dim = 1 << n
    return apply_matrix(np.eye(dim, dtype=complex), op, list(qubits), n).T


def apply_channel(rho: DensityMatrix, ch: KrausChannel, qubit: int | None = 0) -> DensityMatrix:
    """E(rho) = sum_k E_k rho E_k^dagger.

    Single-qubit channels act on ``qubit`` (default: the first data qubit);
    ``qubit=None`` means the channel covers the whole register, which must then
    match the channel width.  A two-qubit channel given an integer acts on
    ``(qubit, qubit + 1)``.
    """
    n = rho.n_qubits
    m = ch.n_qubits
    if qubit is None:
        if m != n:
            raise ValidationError(f"{m}-qubit channel cannot act on a {n}-qubit register")
        qubits = list(range(n))
    else:
        qubits = list(range(qubit, qubit + m))
        if qubits[-1] >= n or qubit < 0:
            raise ValidationError(f"channel on qubits {qubits} does not fit {n} qubits")
    out = np.zeros_like(rho.matrix)
    for e in ch.operators:
        full = embed(e, qubits, n)
        out += full @ rho.matrix @ full.conj().T
    # restore exact Hermiticity lost to rounding
    return DensityMatrix(n, (out + out.conj().T) / 2)


def noisy_expectation(rho: DensityMatrix, obs_pair: tuple[Gate, Gate]) -> float:
    """tr[(A1 (x) A2) rho] for a two-qubit density matrix."""
    a = np.kron(obs_pair[0].matrix, obs_pair[1].matrix)
    value = np.trace(a @ rho.matrix)
    if abs(value.imag) > 1e-10:
        raise ValidationError(f"expectation has imaginary part {value.imag:.3g}")
    return float(value.real)


def bell_density() -> DensityMatrix:
    """Density matrix of (|01> - |10>)/sqrt(2)."""
    psi = np.array([0, SQRT1_2, -SQRT1_2, 0], dtype=complex)
    return DensityMatrix(2, np.outer(psi, psi.conj()))


PAIRS = ("QS", "QT", "RS", "RT")


def chsh_correlations(rho: DensityMatrix) -> dict[str, float]:
    """sqrt(2) <AB> for each observable pair."""
    return {
        pair: sqrt(2) * noisy_expectation(rho, (observable(pair[0]), observable(pair[1])))
        for pair in PAIRS
    }


def closed_form_correlations(name: str, params: dict) -> dict[str, float]:
    """Closed-form sqrt(2) <AB> for the Bell state after channel ``name``."""
    if name in ("B", "P", "BP"):
        f = 2 * params["p"] - 1
        q, r = {"B": (f, 1.0), "P": (1.0, f), "BP": (f, f)}[name]
        return {"QS": q, "QT": -q, "RS": r, "RT": r}
    if name in ("A", "GA"):
        c = cos(params["theta"])
        return {"QS": c * c, "QT": -c * c, "RS": c, "RT": c}
    if name == "D":
        f = 1 - params["p_d"]
        return {"QS": f, "QT": -f, "RS": f, "RT": f}
    raise ConfigurationError(f"unknown channel {name!r}")


def default_grid(name: str, points: int = 11) -> list[dict]:
    """Parameter grid used for the noise table; GA keeps ``p2`` fixed."""
    if name in ("A", "GA"):
        thetas = np.linspace(0.0, np.pi / 2, points)
        if name == "A":
            return [{"theta": float(t)} for t in thetas]
        return [{"theta": float(t), "p2": 0.3} for t in thetas]
    key = "p_d" if name == "D" else "p"
    return [{key: float(p)} for p in np.linspace(0.0, 1.0, points)]


def noise_table_rows(name: str, grid: list[dict] | None = None):
    """Yield ``(channel, params, pair, analytic, computed, abs_error)`` rows."""
    rho = bell_density()
    for params in grid if grid is not None else default_grid(name):
        ch = make_channel(name, params)
        noisy = apply_channel(rho, ch, None if name == "D" else 0)
        computed = chsh_correlations(noisy)
        analytic = closed_form_correlations(name, params)
        for pair in PAIRS:
            yield name, params, pair, analytic[pair], computed[pair], abs(analytic[pair] - computed[pair])
