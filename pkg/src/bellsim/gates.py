"""Single-qubit gates, the CHSH observables and controlled-unitary decomposition.

Conventions:
    Ry(t) = cos(t/2) I - i sin(t/2) Y
    Rz(t) = diag(exp(-i t/2), exp(i t/2))
    P(eta) = diag(1, exp(i eta))
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import pi, sqrt

import numpy as np

from .errors import ConfigurationError, ValidationError

UNITARY_TOL = 1e-10

SQRT1_2 = sqrt(0.5)

# measurement angles of the S and T settings, and their difference
THETA = -5 * pi / 4
ALPHA = pi / 4
PHI = THETA - ALPHA

OBSERVABLE_LABELS = ("Q", "R", "S", "T")


@dataclass(frozen=True, eq=False)
class Gate:
    """A named 2x2 unitary. ``params`` holds the rotation angle(s), if any."""

    name: str
    matrix: np.ndarray
    params: tuple[float, ...] = field(default=())

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValidationError(f"gate {self.name!r} must be 2x2, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValidationError(f"gate {self.name!r} has non-finite entries")
        resid = np.max(np.abs(m.conj().T @ m - np.eye(2)))
        if resid >= UNITARY_TOL:
            raise ValidationError(f"gate {self.name!r} is not unitary (residual {resid:.3g})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dagger(self) -> Gate:
        return Gate(self.name + "^dag", self.matrix.conj().T)

    def __matmul__(self, other: Gate) -> Gate:
        return Gate(f"{self.name}*{other.name}", self.matrix @ other.matrix)

    def __repr__(self):
        if self.params:
            args = ", ".join(f"{p:.6g}" for p in self.params)
            return f"Gate({self.name}({args}))"
        return f"Gate({self.name})"


_I = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) * SQRT1_2

I = Gate("i", _I)
X = Gate("x", _X)
Y = Gate("y", _Y)
Z = Gate("z", _Z)
H = Gate("h", _H)


def ry(theta: float) -> Gate:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return Gate("ry", np.array([[c, -s], [s, c]], dtype=complex), (float(theta),))


def rz(theta: float) -> Gate:
    return Gate(
        "rz",
        np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)]),
        (float(theta),),
    )


def phase(eta: float) -> Gate:
    return Gate("p", np.diag([1.0, np.exp(1j * eta)]), (float(eta),))


_OBSERVABLES = {
    "Q": _Z,
    "R": _X,
    "S": -SQRT1_2 * (_Z + _X),
    "T": SQRT1_2 * (_Z - _X),
}


def observable(label: str) -> Gate:
    """Return one of the four CHSH observables Q=Z, R=X, S, T as a gate."""
    try:
        return Gate(label, _OBSERVABLES[label])
    except KeyError:
        raise ConfigurationError(f"unknown observable {label!r}; expected one of Q, R, S, T") from None


def diagonalizer(label: str) -> Gate:
    """Rotation O with O U O^dagger = Z for the observable U named by ``label``."""
    if label == "Q":
        return I
    if label == "R":
        return H
    if label == "S":
        return ry(THETA)
    if label == "T":
        return ry(ALPHA)
    raise ConfigurationError(f"unknown observable {label!r}")


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def controlled_matrix(u: np.ndarray) -> np.ndarray:
    """4x4 block matrix [[I, 0], [0, U]] with the control as the high bit."""
    out = np.eye(4, dtype=complex)
    out[2:, 2:] = u
    return out


@dataclass(frozen=True, eq=False)
class ABCDecomposition:
    """U = exp(i eta) Rz(beta) Ry(gamma) Rz(delta) = exp(i eta) A X B X C, with ABC = I."""

    eta: float
    beta: float
    gamma: float
    delta: float
    target: Gate | None = None

    @property
    def A(self) -> Gate:
        return Gate("A", rz(self.beta).matrix @ ry(self.gamma / 2).matrix)

    @property
    def B(self) -> Gate:
        return Gate(
            "B", ry(-self.gamma / 2).matrix @ rz(-(self.delta + self.beta) / 2).matrix
        )

    @property
    def C(self) -> Gate:
        return Gate("C", rz((self.delta - self.beta) / 2).matrix)

    def euler(self) -> np.ndarray:
        """exp(i eta) Rz(beta) Ry(gamma) Rz(delta)."""
        return (
            np.exp(1j * self.eta)
            * rz(self.beta).matrix
            @ ry(self.gamma).matrix
            @ rz(self.delta).matrix
        )

    def reconstruct(self) -> np.ndarray:
        """exp(i eta) A X B X C."""
        return np.exp(1j * self.eta) * self.A.matrix @ _X @ self.B.matrix @ _X @ self.C.matrix

    def abc_product(self) -> np.ndarray:
        return self.A.matrix @ self.B.matrix @ self.C.matrix

    def factors(self, which: str) -> list[Gate]:
        """Elementary rotations realising A, B or C, in time order; zero angles dropped."""
        if which == "A":
            seq = [ry(self.gamma / 2), rz(self.beta)]
        elif which == "B":
            seq = [rz(-(self.delta + self.beta) / 2), ry(-self.gamma / 2)]
        elif which == "C":
            seq = [rz((self.delta - self.beta) / 2)]
        else:
            raise ValueError(which)
        return [g for g in seq if g.params[0] != 0.0]


# (eta, beta, gamma, delta) for the named gates
ABC_ANGLES = {
    "Q": (pi / 2, pi, 0.0, 0.0),
    "R": (-pi / 2, pi, pi, 0.0),
    "S": (pi / 2, 0.0, pi / 2, -pi),
    "T": (pi / 2, pi, pi / 2, 0.0),
    "H": (pi / 2, 0.0, pi / 2, pi),
}


def abc_decompose(label: str, phi: float | None = None) -> ABCDecomposition:
    """Angle table for Q, R, S, T, H, or ``"Ry"`` with rotation angle ``phi``."""
    if label == "Ry":
        if phi is None:
            raise ConfigurationError("Ry decomposition needs an angle phi")
        return ABCDecomposition(0.0, 0.0, float(phi), 0.0, ry(phi))
    if label not in ABC_ANGLES:
        raise ConfigurationError(f"no decomposition for {label!r}")
    target = H if label == "H" else observable(label)
    return ABCDecomposition(*ABC_ANGLES[label], target=target)
