"""Circuit description, the Bell-experiment builders and exact distributions.

Wire layouts (qubit 0 on top):

    I    data1, data2
    II   ancilla1, data1, data2
    III  ancilla1, data1, data2, ancilla2
    IV   ancilla1, data1, data2, ancilla2, ancilla3

Classical bit ``c`` receives the outcome of ``measure q -> c``; a shot's
bitstring is the classical register read c0, c1, ...
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from . import gates
from .channels import PAULIS, KrausChannel
from .errors import ConfigurationError, ParseError, ValidationError
from .gates import ALPHA, PHI, Gate, abc_decompose, controlled_matrix, diagonalizer
from .statevector import MAX_QUBITS, StateVector, apply_matrix, new_zero_state

OBSERVABLES = ("QS", "RS", "RT", "QT")
VARIANTS = ("I", "II", "III_quantum", "III_classical", "IV")
RANDOMIZED = ("III_quantum", "III_classical", "IV")

# ancilla pattern (a1, a2) -> observable selected by the randomized variants
SELECTION = {(0, 0): "QT", (0, 1): "QS", (1, 0): "RT", (1, 1): "RS"}


@dataclass(frozen=True)
class GateOp:
    gate: Gate
    target: int

    @property
    def qubits(self):
        return (self.target,)


@dataclass(frozen=True)
class ControlledOp:
    gate: Gate
    control: int
    target: int

    @property
    def qubits(self):
        return (self.control, self.target)


@dataclass(frozen=True)
class Measure:
    qubit: int
    cbit: int

    @property
    def qubits(self):
        return (self.qubit,)


@dataclass(frozen=True)
class ClassicalOp:
    """Apply ``gate`` to ``target`` when classical bit ``cbit`` is 1."""

    gate: Gate
    cbit: int
    target: int

    @property
    def qubits(self):
        return (self.target,)


@dataclass(frozen=True)
class ChannelOp:
    """A Kraus channel on consecutive ``qubits``; used for noise injection only."""

    channel: KrausChannel
    qubits: tuple[int, ...]


CircuitOp = Union[GateOp, ControlledOp, Measure, ClassicalOp, ChannelOp]


@dataclass(frozen=True)
class CircuitSpec:
    n_qubits: int
    ops: tuple
    wire_roles: dict = field(default_factory=dict)
    name: str = ""
    bell_end: int | None = None  # index just after Bell-state preparation

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValidationError(f"circuit width {self.n_qubits} outside 1..{MAX_QUBITS}")
        produced = set()
        for i, op in enumerate(self.ops):
            for q in op.qubits:
                if not 0 <= q < self.n_qubits:
                    raise ValidationError(f"op {i} references qubit {q} outside 0..{self.n_qubits - 1}")
            if isinstance(op, ControlledOp) and op.control == op.target:
                raise ValidationError(f"op {i}: control equals target")
            if isinstance(op, Measure):
                produced.add(op.cbit)
            elif isinstance(op, ClassicalOp) and op.cbit not in produced:
                raise ValidationError(f"op {i} uses classical bit c{op.cbit} before it is measured")

    @property
    def n_cbits(self) -> int:
        return max((op.cbit + 1 for op in self.ops if isinstance(op, Measure)), default=0)

    @property
    def measured_qubits(self) -> list[int]:
        return [op.qubit for op in self.ops if isinstance(op, Measure)]

    def with_ops(self, ops, bell_end=None) -> CircuitSpec:
        return CircuitSpec(self.n_qubits, tuple(ops), dict(self.wire_roles), self.name, bell_end)

    def data_qubits(self) -> tuple[int, int]:
        roles = {r: q for q, r in self.wire_roles.items()}
        return roles["data1"], roles["data2"]


def controlled_fragment(dec: gates.ABCDecomposition, control: int, target: int) -> list:
    """C, CNOT, B, CNOT, A on the target, then P(eta) on the control."""
    if control == target:
        raise IndexError("control and target must differ")
    ops = [GateOp(g, target) for g in dec.factors("C")]
    ops.append(ControlledOp(gates.X, control, target))
    ops += [GateOp(g, target) for g in dec.factors("B")]
    ops.append(ControlledOp(gates.X, control, target))
    ops += [GateOp(g, target) for g in dec.factors("A")]
    if dec.eta != 0.0:
        ops.append(GateOp(gates.phase(dec.eta), control))
    return ops


build_controlled_from_abc = controlled_fragment


def _controlled(label: str, control: int, target: int, mode: str, phi: float | None = None) -> list:
    if mode == "abc":
        return controlled_fragment(abc_decompose(label, phi), control, target)
    if mode == "direct":
        if label == "Ry":
            gate = gates.ry(phi)
        elif label == "H":
            gate = gates.H
        else:
            gate = gates.observable(label)
        return [ControlledOp(gate, control, target)]
    raise ConfigurationError(f"controlled mode must be 'abc' or 'direct', got {mode!r}")


def bell_prep(d1: int, d2: int) -> list:
    return [
        GateOp(gates.X, d1),
        GateOp(gates.X, d2),
        GateOp(gates.H, d1),
        ControlledOp(gates.X, d1, d2),
    ]


def _check_observable(obs: str):
    if obs not in OBSERVABLES:
        raise ConfigurationError(f"unknown observable {obs!r}; expected one of {', '.join(OBSERVABLES)}")


def build_variant_i(obs: str) -> CircuitSpec:
    _check_observable(obs)
    ops = bell_prep(0, 1)
    bell_end = len(ops)
    for q, label in enumerate(obs):
        o = diagonalizer(label)
        if o is not gates.I:
            ops.append(GateOp(o, q))
    ops += [Measure(0, 0), Measure(1, 1)]
    return CircuitSpec(2, ops, {0: "data1", 1: "data2"}, f"I-{obs}", bell_end)


def build_variant_ii(obs: str, controlled: str = "abc") -> CircuitSpec:
    _check_observable(obs)
    ops = bell_prep(1, 2)
    bell_end = len(ops)
    ops.append(GateOp(gates.H, 0))
    ops += _controlled(obs[0], 0, 1, controlled)
    ops += _controlled(obs[1], 0, 2, controlled)
    ops += [GateOp(gates.H, 0), Measure(0, 0)]
    roles = {0: "ancilla1", 1: "data1", 2: "data2"}
    return CircuitSpec(3, ops, roles, f"II-{obs}", bell_end)


def _randomized_core(controlled: str, classical: bool) -> tuple[list, int]:
    ops = [GateOp(gates.H, 0), GateOp(gates.H, 3)]
    ops += bell_prep(1, 2)
    bell_end = len(ops)
    ops.append(GateOp(gates.ry(ALPHA), 2))
    if classical:
        ops += [
            Measure(0, 0),
            Measure(3, 3),
            ClassicalOp(gates.H, 0, 1),
            ClassicalOp(gates.ry(PHI), 3, 2),
        ]
    else:
        ops += _controlled("H", 0, 1, controlled)
        ops += _controlled("Ry", 3, 2, controlled, phi=PHI)
    return ops, bell_end


_III_ROLES = {0: "ancilla1", 1: "data1", 2: "data2", 3: "ancilla2"}


def build_variant_iii(kind: str = "quantum", controlled: str = "abc") -> CircuitSpec:
    if kind not in ("quantum", "classical"):
        raise ConfigurationError(f"variant III kind must be 'quantum' or 'classical', got {kind!r}")
    classical = kind == "classical"
    ops, bell_end = _randomized_core(controlled, classical)
    if classical:
        ops += [Measure(1, 1), Measure(2, 2)]
    else:
        ops += [Measure(q, q) for q in range(4)]
    return CircuitSpec(4, ops, dict(_III_ROLES), f"III_{kind}", bell_end)


def build_variant_iv(controlled: str = "abc") -> CircuitSpec:
    ops, bell_end = _randomized_core(controlled, classical=False)
    ops.append(GateOp(gates.H, 4))
    ops += _controlled("Q", 4, 1, controlled)
    ops += _controlled("Q", 4, 2, controlled)
    ops += [GateOp(gates.H, 4), Measure(0, 0), Measure(3, 1), Measure(4, 2)]
    roles = {**_III_ROLES, 4: "ancilla3"}
    return CircuitSpec(5, ops, roles, "IV", bell_end)


def build(variant: str, obs: str | None = None, controlled: str = "abc") -> CircuitSpec:
    if variant == "I":
        return build_variant_i(obs)
    if variant == "II":
        return build_variant_ii(obs, controlled)
    if variant == "III_quantum":
        return build_variant_iii("quantum", controlled)
    if variant == "III_classical":
        return build_variant_iii("classical", controlled)
    if variant == "IV":
        return build_variant_iv(controlled)
    raise ConfigurationError(f"unknown variant {variant!r}; expected one of {', '.join(VARIANTS)}")


def theoretical_expectations() -> dict[str, float]:
    h = gates.SQRT1_2
    return {"QS": h, "RS": h, "RT": h, "QT": -h}


def chsh(values: dict[str, float]) -> float:
    return values["QS"] + values["RS"] + values["RT"] - values["QT"]


# --- exact evaluation -------------------------------------------------------


def op_unitary(op, n: int) -> np.ndarray:
    """Full 2**n unitary of a gate or controlled-gate op."""
    dim = 1 << n
    if isinstance(op, GateOp):
        return apply_matrix(np.eye(dim, dtype=complex), op.gate.matrix, [op.target], n).T
    if isinstance(op, ControlledOp):
        u = controlled_matrix(op.gate.matrix)
        return apply_matrix(np.eye(dim, dtype=complex), u, [op.control, op.target], n).T
    raise TypeError(f"{type(op).__name__} has no unitary")


def fragment_unitary(ops, n: int) -> np.ndarray:
    u = np.eye(1 << n, dtype=complex)
    for op in ops:
        u = op_unitary(op, n) @ u
    return u


def final_state(spec: CircuitSpec, initial: StateVector | None = None) -> StateVector:
    """State just before measurement; measurements are skipped (deferred)."""
    psi = (initial or new_zero_state(spec.n_qubits)).amps[None, :]
    n = spec.n_qubits
    for op in spec.ops:
        if isinstance(op, GateOp):
            psi = apply_matrix(psi, op.gate.matrix, [op.target], n)
        elif isinstance(op, ControlledOp):
            psi = apply_matrix(psi, controlled_matrix(op.gate.matrix), [op.control, op.target], n)
        elif isinstance(op, Measure):
            continue
        else:
            raise ValidationError(f"final_state cannot evaluate {type(op).__name__}")
    return StateVector(n, psi[0])


_DEPOL_PAULIS = (PAULIS["X"], PAULIS["Y"], PAULIS["Z"])


def _conj(rho: np.ndarray, u: np.ndarray, qubits, n: int) -> np.ndarray:
    """U rho U^dagger for U acting on ``qubits``."""
    left = apply_matrix(rho.T, u, qubits, n).T
    return apply_matrix(left.conj(), u, qubits, n).conj()


def _depolarize(rho, q, n, rate):
    mixed = sum(_conj(rho, p, [q], n) for p in _DEPOL_PAULIS)
    return (1 - rate) * rho + (rate / 3) * mixed


def exact_distribution(spec: CircuitSpec, depolarizing: float = 0.0, tol: float = 1e-15) -> dict[str, float]:
    """Exact probability of every classical bitstring.

    Evolves a density matrix, branching on each mid-circuit measurement so
    classically controlled gates see the recorded bit.  ``depolarizing`` adds
    the per-operation Pauli error model (averaged) after every executed gate.
    """
    n = spec.n_qubits
    m = spec.n_cbits
    rho = np.zeros((1 << n, 1 << n), dtype=complex)
    rho[0, 0] = 1.0
    branches = [((None,) * m, rho)]
    for op in spec.ops:
        nxt = []
        for bits, rho in branches:
            if isinstance(op, Measure):
                for b in (0, 1):
                    proj = np.diag([1.0 - b, float(b)]).astype(complex)
                    part = _conj(rho, proj, [op.qubit], n)
                    if np.trace(part).real > tol:
                        nb = list(bits)
                        nb[op.cbit] = b
                        nxt.append((tuple(nb), part))
                continue
            if isinstance(op, ClassicalOp) and bits[op.cbit] != 1:
                nxt.append((bits, rho))
                continue
            if isinstance(op, GateOp | ClassicalOp):
                rho = _conj(rho, op.gate.matrix, [op.target], n)
            elif isinstance(op, ControlledOp):
                rho = _conj(rho, controlled_matrix(op.gate.matrix), [op.control, op.target], n)
            elif isinstance(op, ChannelOp):
                rho = sum(_conj(rho, e, list(op.qubits), n) for e in op.channel.operators)
            if depolarizing and not isinstance(op, ChannelOp):
                for q in op.qubits:
                    rho = _depolarize(rho, q, n, depolarizing)
            nxt.append((bits, rho))
        branches = nxt
    dist: dict[str, float] = {}
    for bits, rho in branches:
        key = "".join("0" if b is None else str(b) for b in bits)
        dist[key] = dist.get(key, 0.0) + float(np.trace(rho).real)
    return dict(sorted(dist.items()))


# --- text dump --------------------------------------------------------------

FIXED_GATES = {
    "i": gates.I,
    "x": gates.X,
    "y": gates.Y,
    "z": gates.Z,
    "h": gates.H,
    # CHSH observables; q and r coincide with z and x
    "q": gates.observable("Q"),
    "r": gates.observable("R"),
    "s": gates.observable("S"),
    "t": gates.observable("T"),
}
PARAM_GATES = {"ry": gates.ry, "rz": gates.rz, "p": gates.phase}


def _gate_text(gate: Gate) -> tuple[str, str]:
    token = gate.name.lower()
    if token in PARAM_GATES:
        return token, " " + repr(gate.params[0])
    if token in FIXED_GATES:
        return token, ""
    raise ValidationError(f"gate {gate.name!r} has no text form")


def dump(spec: CircuitSpec) -> str:
    lines = [f"qubits {spec.n_qubits}"]
    for op in spec.ops:
        if isinstance(op, GateOp):
            tok, arg = _gate_text(op.gate)
            lines.append(f"{tok} q{op.target}{arg}")
        elif isinstance(op, ControlledOp):
            tok, arg = _gate_text(op.gate)
            tok = "cnot" if tok == "x" else "c" + tok
            lines.append(f"{tok} q{op.control} q{op.target}{arg}")
        elif isinstance(op, Measure):
            lines.append(f"measure q{op.qubit} -> c{op.cbit}")
        elif isinstance(op, ClassicalOp):
            tok, arg = _gate_text(op.gate)
            lines.append(f"c-{tok} c{op.cbit} q{op.target}{arg}")
        else:
            raise ValidationError(f"{type(op).__name__} cannot be dumped")
    return "\n".join(lines) + "\n"


_REG = re.compile(r"([qc])(\d+)$")


def _index(token: str, kind: str, lineno: int) -> int:
    m = _REG.match(token)
    if not m or m.group(1) != kind:
        raise ParseError(f"expected {kind}<index>, got {token!r}", lineno)
    return int(m.group(2))


def _make_gate(token: str, args: list[str], lineno: int) -> Gate:
    if token in FIXED_GATES:
        if args:
            raise ParseError(f"gate {token!r} takes no parameter", lineno)
        return FIXED_GATES[token]
    if token in PARAM_GATES:
        if len(args) != 1:
            raise ParseError(f"gate {token!r} takes exactly one parameter", lineno)
        try:
            return PARAM_GATES[token](float(args[0]))
        except ValueError:
            raise ParseError(f"bad angle {args[0]!r}", lineno) from None
    raise ParseError(f"unknown gate {token!r}", lineno)


def parse(text: str, name: str = "") -> CircuitSpec:
    """Inverse of :func:`dump`.  ``#`` starts a comment; the ``qubits`` header is optional."""
    n_qubits = None
    ops = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        head = words[0].lower()
        if head == "qubits":
            if len(words) != 2 or not words[1].isdigit():
                raise ParseError("header must be 'qubits <n>'", lineno)
            n_qubits = int(words[1])
        elif head == "measure":
            if len(words) != 4 or words[2] != "->":
                raise ParseError("expected 'measure q<i> -> c<j>'", lineno)
            ops.append(Measure(_index(words[1], "q", lineno), _index(words[3], "c", lineno)))
        elif head.startswith("c-"):
            if len(words) < 3:
                raise ParseError("expected 'c-<gate> c<j> q<i> [angle]'", lineno)
            gate = _make_gate(head[2:], words[3:], lineno)
            ops.append(ClassicalOp(gate, _index(words[1], "c", lineno), _index(words[2], "q", lineno)))
        elif head == "cnot" or (head.startswith("c") and head[1:] in FIXED_GATES | PARAM_GATES):
            if len(words) < 3:
                raise ParseError(f"expected '{head} q<control> q<target> [angle]'", lineno)
            gate = gates.X if head == "cnot" else _make_gate(head[1:], words[3:], lineno)
            if head == "cnot" and len(words) > 3:
                raise ParseError("cnot takes no parameter", lineno)
            ops.append(ControlledOp(gate, _index(words[1], "q", lineno), _index(words[2], "q", lineno)))
        else:
            if len(words) < 2:
                raise ParseError(f"expected '{head} q<i> [angle]'", lineno)
            ops.append(GateOp(_make_gate(head, words[2:], lineno), _index(words[1], "q", lineno)))
    if n_qubits is None:
        n_qubits = 1 + max((q for op in ops for q in op.qubits), default=0)
    try:
        return CircuitSpec(n_qubits, tuple(ops), name=name)
    except ValidationError as exc:
        raise ParseError(str(exc)) from None
