"""Seeded Monte Carlo shot sampling with optional per-operation depolarizing noise.

Shots are simulated as trajectories in fixed-size blocks.  Block ``b`` of
stream ``s`` draws from ``PCG64(SeedSequence(seed, spawn_key=(s, b)))`` so
the outcome of every shot depends only on ``(seed, stream, shot index)`` and
never on how blocks are spread over workers.
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .channels import PAULIS
from .circuits import ChannelOp, CircuitSpec, ClassicalOp, ControlledOp, GateOp, Measure
from .errors import ConfigurationError, NumericalDegeneracyError
from .gates import controlled_matrix
from .statevector import DEGENERATE_BRANCH, apply_matrix, measure_rows

BLOCK = 1024
MAX_ERROR_RATE = 0.1

_ERRORS = (PAULIS["X"], PAULIS["Y"], PAULIS["Z"])


def block_rng(seed: int, stream: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream, block))))


def _subset(psi, rows, u, qubits, n):
    if rows.any():
        psi[rows] = apply_matrix(psi[rows], u, qubits, n)


def _kraus_step(psi, op: ChannelOp, n, uniforms):
    branches = [apply_matrix(psi, e, list(op.qubits), n) for e in op.channel.operators]
    weights = np.stack([np.sum(np.abs(b) ** 2, axis=1) for b in branches], axis=1)
    cdf = np.cumsum(weights, axis=1)
    choice = np.minimum((uniforms[:, None] >= cdf).sum(axis=1), len(branches) - 1)
    rows = np.arange(psi.shape[0])
    w = weights[rows, choice]
    if np.any(w < DEGENERATE_BRANCH):
        raise NumericalDegeneracyError("sampled a Kraus branch with vanishing weight")
    chosen = np.stack(branches, axis=0)[choice, rows]
    return chosen / np.sqrt(w)[:, None]


class ShotSampler:
    """Trajectory sampler for one circuit.

    After every executed gate, each qubit the gate touched independently
    suffers a Pauli error with probability ``error_rate``; the Pauli is drawn
    uniformly from X, Y, Z.  With ``error_rate == 0`` no noise draws are made,
    so outcomes coincide with the noiseless sampler for the same generator.
    """

    def __init__(self, spec: CircuitSpec, error_rate: float = 0.0):
        if not 0.0 <= error_rate <= MAX_ERROR_RATE:
            raise ConfigurationError(f"error rate must lie in [0, {MAX_ERROR_RATE}], got {error_rate}")
        if spec.n_cbits == 0:
            raise ConfigurationError("circuit measures nothing")
        self.spec = spec
        self.error_rate = float(error_rate)

    def sample(self, shots: int, rng: np.random.Generator) -> np.ndarray:
        """Classical registers of ``shots`` trajectories, shape ``(shots, n_cbits)``."""
        spec = self.spec
        n = spec.n_qubits
        psi = np.zeros((shots, 1 << n), dtype=complex)
        psi[:, 0] = 1.0
        cbits = np.zeros((shots, spec.n_cbits), dtype=np.int8)
        everyone = np.ones(shots, dtype=bool)
        for op in spec.ops:
            touched = everyone
            if isinstance(op, GateOp):
                psi = apply_matrix(psi, op.gate.matrix, [op.target], n)
            elif isinstance(op, ControlledOp):
                psi = apply_matrix(psi, controlled_matrix(op.gate.matrix), [op.control, op.target], n)
            elif isinstance(op, ClassicalOp):
                touched = cbits[:, op.cbit] == 1
                _subset(psi, touched, op.gate.matrix, [op.target], n)
            elif isinstance(op, Measure):
                outcomes, _, psi = measure_rows(psi, op.qubit, n, rng.random(shots))
                cbits[:, op.cbit] = outcomes
                continue
            elif isinstance(op, ChannelOp):
                psi = _kraus_step(psi, op, n, rng.random(shots))
                continue
            if self.error_rate > 0.0:
                for q in op.qubits:
                    hit = (rng.random(shots) < self.error_rate) & touched
                    which = rng.integers(0, 3, shots)
                    for k, pauli in enumerate(_ERRORS):
                        _subset(psi, hit & (which == k), pauli, [q], n)
        return cbits

    def counts(self, shots: int, rng: np.random.Generator) -> Counter:
        return bitstring_counts(self.sample(shots, rng))


def bitstring_counts(cbits: np.ndarray) -> Counter:
    rows, freq = np.unique(cbits, axis=0, return_counts=True)
    return Counter({"".join(map(str, r)): int(f) for r, f in zip(rows, freq)})


def per_op_depolarizing_shotmodel(circuit: CircuitSpec, error_rate: float, rng: np.random.Generator):
    """Return ``sample(shots) -> Counter`` drawing noisy trajectories from ``rng``."""
    sampler = ShotSampler(circuit, error_rate)
    return lambda shots: sampler.counts(shots, rng)


def sample_counts(
    spec: CircuitSpec,
    shots: int,
    seed: int,
    stream: int = 0,
    error_rate: float = 0.0,
    workers: int = 1,
) -> dict[str, int]:
    """Deterministic counts for ``shots`` trajectories; independent of ``workers``."""
    if shots < 1:
        raise ConfigurationError("shots must be positive")
    sampler = ShotSampler(spec, error_rate)
    sizes = [min(BLOCK, shots - start) for start in range(0, shots, BLOCK)]

    def run(block):
        return sampler.counts(sizes[block], block_rng(seed, stream, block))

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(b) for b in range(len(sizes))]
    total = Counter()
    for part in parts:
        total.update(part)
    return dict(sorted(total.items()))
