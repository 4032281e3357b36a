"""Feasibility of circuits on directed qubit coupling maps.

Map file format: the first non-comment line is the qubit count, then one
directed CNOT edge ``control target`` per line.  ``#`` starts a comment.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .circuits import CircuitSpec, ControlledOp
from .errors import ConfigurationError, ParseError

BUILTIN_MAPS = ("qx2", "line5", "vigo", "melbourne")


@dataclass(frozen=True)
class CouplingMap:
    name: str
    n_qubits: int
    edges: frozenset

    def __post_init__(self):
        object.__setattr__(self, "edges", frozenset(self.edges))
        for a, b in self.edges:
            if a == b:
                raise ConfigurationError(f"self-loop on qubit {a}")
            if not (0 <= a < self.n_qubits and 0 <= b < self.n_qubits):
                raise ConfigurationError(f"edge ({a}, {b}) outside 0..{self.n_qubits - 1}")

    def allows(self, control: int, target: int, flip: bool) -> bool:
        return (control, target) in self.edges or (flip and (target, control) in self.edges)

    def with_edges(self, extra) -> CouplingMap:
        return CouplingMap(self.name, self.n_qubits, self.edges | set(extra))


@dataclass
class FeasibilityReport:
    feasible: bool
    violations: list = field(default_factory=list)  # (op index, (physical control, physical target))
    assignment: dict | None = None  # wire -> physical qubit, only when feasible
    best_assignment: dict | None = None


def parse_coupling_map(text: str, name: str = "custom") -> CouplingMap:
    n = None
    edges = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        try:
            nums = [int(w) for w in words]
        except ValueError:
            raise ParseError(f"expected integers, got {line!r}", lineno) from None
        if n is None:
            if len(nums) != 1 or nums[0] < 1:
                raise ParseError("first line must be a positive qubit count", lineno)
            n = nums[0]
            continue
        if len(nums) != 2:
            raise ParseError("edge lines need exactly two qubit indices", lineno)
        a, b = nums
        if a == b:
            raise ParseError(f"self-loop on qubit {a}", lineno)
        if not (0 <= a < n and 0 <= b < n):
            raise ParseError(f"edge ({a}, {b}) outside 0..{n - 1}", lineno)
        edges.add((a, b))
    if n is None:
        raise ParseError("empty coupling map")
    return CouplingMap(name, n, frozenset(edges))


def load_coupling_map(source: str | Path) -> CouplingMap:
    """Load a builtin map by name (see ``BUILTIN_MAPS``) or a map file by path."""
    if str(source) in BUILTIN_MAPS:
        text = resources.files("bellsim").joinpath(f"data/{source}.map").read_text()
        return parse_coupling_map(text, str(source))
    path = Path(source)
    return parse_coupling_map(path.read_text(), path.stem)


def check_feasibility(circuit: CircuitSpec, cmap: CouplingMap, allow_direction_flip: bool = True) -> FeasibilityReport:
    """Exhaustive search over injective wire -> qubit assignments.

    Branch and bound on the number of blocked two-qubit ops; stops at the
    first assignment with none.  Classically controlled gates are local and
    impose no constraint.
    """
    n = circuit.n_qubits
    if n > cmap.n_qubits:
        raise ConfigurationError(f"circuit needs {n} qubits, map {cmap.name} has {cmap.n_qubits}")
    needs = [(i, op.control, op.target) for i, op in enumerate(circuit.ops) if isinstance(op, ControlledOp)]

    degree = [0] * n
    for _, c, t in needs:
        degree[c] += 1
        degree[t] += 1
    order = sorted(range(n), key=lambda w: -degree[w])
    rank = {w: k for k, w in enumerate(order)}
    # constraints checked once both ends are placed: at the later-placed wire
    due = [[] for _ in range(n)]
    for i, c, t in needs:
        due[max(rank[c], rank[t])].append((i, c, t))

    best = {"cost": len(needs) + 1, "assign": None}
    assign: dict[int, int] = {}
    used = [False] * cmap.n_qubits

    def search(depth: int, cost: int):
        if cost >= best["cost"]:
            return
        if depth == n:
            best["cost"], best["assign"] = cost, dict(assign)
            return
        w = order[depth]
        for p in range(cmap.n_qubits):
            if used[p]:
                continue
            assign[w] = p
            extra = sum(
                1 for _, c, t in due[depth] if not cmap.allows(assign[c], assign[t], allow_direction_flip)
            )
            used[p] = True
            search(depth + 1, cost + extra)
            used[p] = False
            del assign[w]
            if best["cost"] == 0:
                return

    search(0, 0)
    a = best["assign"]
    violations = [
        (i, (a[c], a[t])) for i, c, t in needs if not cmap.allows(a[c], a[t], allow_direction_flip)
    ]
    feasible = not violations
    return FeasibilityReport(feasible, violations, dict(sorted(a.items())) if feasible else None, dict(sorted(a.items())))
