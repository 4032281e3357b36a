"""Analytic identity checks run by ``bellsim verify``."""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from . import channels, circuits, gates
from .gates import ALPHA, PHI, THETA

MATRIX_TOL = 1e-10
PROB_TOL = 1e-12


@dataclass
class Check:
    name: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.residual < self.tol


def _maxabs(a) -> float:
    return float(np.max(np.abs(a)))


def gate_identities(theta: float = THETA) -> list[Check]:
    X, Y, Z, H = (g.matrix for g in (gates.X, gates.Y, gates.Z, gates.H))
    S = gates.observable("S").matrix
    T = gates.observable("T").matrix
    r2 = sqrt(2)

    def conj(g, u):
        return g @ u @ g.conj().T

    out = [
        Check("HXH = Z", _maxabs(H @ X @ H - Z), MATRIX_TOL),
        Check("Ry(theta) S Ry(-theta) = Z", _maxabs(conj(gates.ry(theta).matrix, S) - Z), MATRIX_TOL),
        Check("Ry(alpha) T Ry(-alpha) = Z", _maxabs(conj(gates.ry(ALPHA).matrix, T) - Z), MATRIX_TOL),
        Check("[Y,S] = i sqrt2 (Z - X)", _maxabs(gates.commutator(Y, S) - 1j * r2 * (Z - X)), MATRIX_TOL),
        Check("[Y,T] = i sqrt2 (Z + X)", _maxabs(gates.commutator(Y, T) - 1j * r2 * (Z + X)), MATRIX_TOL),
        Check("YSY = S + sqrt2 (Z + X)", _maxabs(Y @ S @ Y - S - r2 * (Z + X)), MATRIX_TOL),
        Check("YTY = T + sqrt2 (X - Z)", _maxabs(Y @ T @ Y - T - r2 * (X - Z)), MATRIX_TOL),
    ]
    for label in gates.OBSERVABLE_LABELS:
        u = gates.observable(label).matrix
        ev = np.linalg.eigvalsh(u)
        out.append(Check(f"{label} Hermitian, eigenvalues -1, +1", max(_maxabs(u - u.conj().T), _maxabs(ev - [-1, 1])), MATRIX_TOL))
    return out


def abc_identities() -> list[Check]:
    out = []
    decs = [(label, gates.abc_decompose(label)) for label in ("Q", "R", "S", "T", "H")]
    decs.append(("Ry(phi)", gates.abc_decompose("Ry", PHI)))
    for label, dec in decs:
        u = dec.target.matrix
        frag = circuits.controlled_fragment(dec, 0, 1)
        out += [
            Check(f"{label}: exp(i eta) Rz Ry Rz = U", _maxabs(dec.euler() - u), MATRIX_TOL),
            Check(f"{label}: exp(i eta) A X B X C = U", _maxabs(dec.reconstruct() - u), MATRIX_TOL),
            Check(f"{label}: A B C = I", _maxabs(dec.abc_product() - np.eye(2)), MATRIX_TOL),
            Check(
                f"{label}: controlled fragment = controlled-U",
                _maxabs(circuits.fragment_unitary(frag, 2) - gates.controlled_matrix(u)),
                MATRIX_TOL,
            ),
        ]
    return out


def randomized_closed_forms() -> dict[str, float]:
    """Joint outcome probabilities of the four-qubit randomized circuit.

    Each ancilla pattern selects a two-qubit observable AB; the data bits then
    follow the Bell-state statistics of AB, with even parity weighted by
    (1 + <AB>)/2 within the 1/4 selection probability.
    """
    r2 = sqrt(2)
    lo, hi = (2 - r2) / 32, (2 + r2) / 32
    theory = circuits.theoretical_expectations()
    out = {}
    for (a1, a2), obs in circuits.SELECTION.items():
        even = hi if theory[obs] > 0 else lo
        odd = lo if theory[obs] > 0 else hi
        for d1 in (0, 1):
            for d2 in (0, 1):
                out[f"{a1}{d1}{d2}{a2}"] = even if d1 == d2 else odd
    return out


def distribution_identities() -> list[Check]:
    r2 = sqrt(2)
    quantum = circuits.exact_distribution(circuits.build_variant_iii("quantum"))
    classical = circuits.exact_distribution(circuits.build_variant_iii("classical"))
    closed = randomized_closed_forms()
    keys = sorted(set(quantum) | set(closed) | set(classical))
    out = [
        Check("III joint distribution = (2 +- sqrt2)/32 table", max(abs(quantum.get(k, 0) - closed[k]) for k in keys), PROB_TOL),
        Check("III quantum = III classical control", max(abs(quantum.get(k, 0) - classical.get(k, 0)) for k in keys), PROB_TOL),
    ]
    marg = {}
    for k, p in quantum.items():
        marg[k[0] + k[3]] = marg.get(k[0] + k[3], 0) + p
    out.append(Check("III ancilla patterns each 1/4", max(abs(v - 0.25) for v in marg.values()), PROB_TOL))

    four = circuits.exact_distribution(circuits.build_variant_iv())
    theory = circuits.theoretical_expectations()
    resid = 0.0
    for (a1, a2), obs in circuits.SELECTION.items():
        plus = (2 + r2) / 16 if theory[obs] > 0 else (2 - r2) / 16
        minus = (2 + r2) / 16 + (2 - r2) / 16 - plus
        resid = max(resid, abs(four[f"{a1}{a2}0"] - plus), abs(four[f"{a1}{a2}1"] - minus))
    out.append(Check("IV branch probabilities (2 -+ sqrt2)/16", resid, PROB_TOL))

    resid = 0.0
    for obs in circuits.OBSERVABLES:
        p0 = circuits.exact_distribution(circuits.build_variant_ii(obs))["0"]
        resid = max(resid, abs(p0 - 0.5 * (1 + theory[obs])))
    out.append(Check("II ancilla p0 = (1 + <U1 U2>)/2", resid, PROB_TOL))

    out.append(Check("CHSH = 2 sqrt2", abs(circuits.chsh(theory) - 2 * r2), PROB_TOL))
    return out


def noise_identities() -> list[Check]:
    out = []
    for name in channels.CHANNEL_NAMES:
        err = max(row[-1] for row in channels.noise_table_rows(name))
        out.append(Check(f"noisy correlations, channel {name}", err, MATRIX_TOL))
    prep = circuits.CircuitSpec(2, circuits.bell_prep(0, 1))
    bell = channels.density_from_state(circuits.final_state(prep))
    explicit = 0.5 * np.array([[0, 0, 0, 0], [0, 1, -1, 0], [0, -1, 1, 0], [0, 0, 0, 0]])
    out.append(Check("Bell density matrix", _maxabs(bell.matrix - explicit), PROB_TOL))
    return out


def run_all(theta: float = THETA) -> list[Check]:
    return gate_identities(theta) + abc_identities() + distribution_identities() + noise_identities()
