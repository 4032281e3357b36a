"""Shot campaigns, outcome decoding and CHSH estimates."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from math import sqrt

from . import circuits
from .channels import make_channel
from .circuits import OBSERVABLES, RANDOMIZED, SELECTION, ChannelOp, CircuitSpec
from .errors import ConfigurationError, InsufficientDataError, ValidationError
from .sampler import MAX_ERROR_RATE, sample_counts

_WIDTH = {"I": 2, "II": 1, "III_quantum": 4, "III_classical": 4, "IV": 3}


@dataclass(frozen=True)
class NoiseConfig:
    """Either per-operation depolarizing noise or one Kraus channel after Bell preparation."""

    depolarizing: float = 0.0
    channel: str | None = None
    channel_params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 <= self.depolarizing <= MAX_ERROR_RATE:
            raise ConfigurationError(f"depolarizing rate must lie in [0, {MAX_ERROR_RATE}]")
        if self.channel is not None:
            make_channel(self.channel, self.channel_params)

    def to_dict(self) -> dict:
        return {"depolarizing": self.depolarizing, "channel": self.channel, "channel_params": dict(self.channel_params)}

    @classmethod
    def from_dict(cls, d: dict | None) -> NoiseConfig:
        d = d or {}
        return cls(d.get("depolarizing", 0.0), d.get("channel"), dict(d.get("channel_params") or {}))


@dataclass
class ShotBatch:
    variant: str
    observable: str | None
    counts: dict[str, int]
    total: int
    seed: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.total:
            raise ValidationError("counts do not sum to total")


@dataclass
class Estimate:
    estimate: float
    stddev: float
    n: int
    selection_fraction: float | None = None


def decode_outcome(variant: str, bits: str, observable: str | None = None) -> tuple[str, int]:
    """Map a shot's classical register to ``(observable, +1 | -1)``; bit 0 means +1."""
    if variant not in _WIDTH:
        raise ConfigurationError(f"unknown variant {variant!r}")
    if len(bits) != _WIDTH[variant]:
        raise ValidationError(f"variant {variant} expects {_WIDTH[variant]} bits, got {bits!r}")
    b = [int(c) for c in bits]
    if variant == "I":
        return observable, (-1) ** (b[0] + b[1])
    if variant == "II":
        return observable, 1 if b[0] == 0 else -1
    if variant == "IV":
        return SELECTION[b[0], b[1]], (-1) ** b[2]
    return SELECTION[b[0], b[3]], (-1) ** (b[1] + b[2])


def estimate_pm(n_plus: int, n_minus: int) -> Estimate:
    """Mean of +-1 outcomes with sigma = sqrt((1 - mean**2) / (N - 1))."""
    n = n_plus + n_minus
    if n < 2:
        raise InsufficientDataError(f"need at least 2 outcomes, got {n}")
    mean = (n_plus - n_minus) / n
    return Estimate(mean, sqrt(max(0.0, 1.0 - mean * mean) / (n - 1)), n)


def tally(batch: ShotBatch) -> dict[str, list[int]]:
    """Per-observable ``[n_plus, n_minus]`` from a batch."""
    out = {o: [0, 0] for o in OBSERVABLES}
    for bits, count in batch.counts.items():
        label, value = decode_outcome(batch.variant, bits, batch.observable)
        out[label][0 if value > 0 else 1] += count
    return out


def estimate(batch: ShotBatch, observable: str | None = None) -> Estimate:
    label = observable or batch.observable
    if label is None:
        raise ConfigurationError("randomized batches need an observable to estimate")
    n_plus, n_minus = tally(batch)[label]
    est = estimate_pm(n_plus, n_minus)
    if batch.variant in RANDOMIZED:
        est.selection_fraction = est.n / batch.total
    return est


def inject_channel(spec: CircuitSpec, noise: NoiseConfig) -> CircuitSpec:
    """Insert the configured channel on the first data qubit (both for D) after Bell preparation."""
    if noise.channel is None:
        return spec
    ch = make_channel(noise.channel, noise.channel_params)
    d1, d2 = spec.data_qubits()
    op = ChannelOp(ch, (d1, d2) if ch.n_qubits == 2 else (d1,))
    ops = list(spec.ops)
    ops.insert(spec.bell_end, op)
    return spec.with_ops(ops)


@dataclass
class ExperimentResult:
    variant: str
    seed: int
    shots: int
    noise: dict
    controlled: str
    per_observable: dict[str, Estimate]
    chsh: float
    chsh_stddev: float
    counts: dict[str, dict[str, int]]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["per_observable"] = {k: asdict(v) for k, v in self.per_observable.items()}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> ExperimentResult:
        d = dict(d)
        d["per_observable"] = {k: Estimate(**v) for k, v in d["per_observable"].items()}
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> ExperimentResult:
        return cls.from_dict(json.loads(text))

    def table(self) -> str:
        lines = [f"variant {self.variant}  seed {self.seed}  shots {self.shots}"]
        lines.append(f"{'obs':<6}{'estimate':>10}{'sigma':>9}{'n':>9}{'sel':>8}")
        for obs in ("QS", "QT", "RS", "RT"):
            e = self.per_observable[obs]
            sel = "" if e.selection_fraction is None else f"{e.selection_fraction:.4f}"
            lines.append(f"{obs:<6}{e.estimate:>10.4f}{e.stddev:>9.4f}{e.n:>9d}{sel:>8}")
        lines.append(f"{'CHSH':<6}{self.chsh:>10.4f}{self.chsh_stddev:>9.4f}")
        return "\n".join(lines)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        header = ["variant"]
        row = [self.variant]
        for obs in ("QS", "QT", "RS", "RT"):
            header += [obs, f"{obs}_sigma"]
            row += [repr(self.per_observable[obs].estimate), repr(self.per_observable[obs].stddev)]
        w.writerow(header + ["CHSH", "CHSH_sigma"])
        w.writerow(row + [repr(self.chsh), repr(self.chsh_stddev)])
        return buf.getvalue()


def run_experiment(
    variant: str,
    shots: int,
    seed: int,
    noise: NoiseConfig | None = None,
    workers: int = 1,
    controlled: str = "abc",
) -> ExperimentResult:
    """Run a seeded campaign.

    For variants I and II ``shots`` is per observable (one circuit each); for
    the randomized variants it is the total and the circuit picks the
    observable in every shot.
    """
    if variant not in _WIDTH:
        raise ConfigurationError(f"unknown variant {variant!r}; expected one of {', '.join(_WIDTH)}")
    if shots < 2:
        raise ConfigurationError("shots must be >= 2")
    noise = noise or NoiseConfig()
    batches = []
    if variant in RANDOMIZED:
        spec = inject_channel(circuits.build(variant, controlled=controlled), noise)
        counts = sample_counts(spec, shots, seed, 0, noise.depolarizing, workers)
        batches.append(ShotBatch(variant, None, counts, shots, seed))
    else:
        for stream, obs in enumerate(OBSERVABLES):
            spec = inject_channel(circuits.build(variant, obs, controlled), noise)
            counts = sample_counts(spec, shots, seed, stream, noise.depolarizing, workers)
            batches.append(ShotBatch(variant, obs, counts, shots, seed))

    per_obs = {}
    if variant in RANDOMIZED:
        for obs in OBSERVABLES:
            per_obs[obs] = estimate(batches[0], obs)
        counts_doc = {"all": batches[0].counts}
    else:
        for b in batches:
            per_obs[b.observable] = estimate(b)
        counts_doc = {b.observable: b.counts for b in batches}
    value = circuits.chsh({k: v.estimate for k, v in per_obs.items()})
    sd = sqrt(sum(v.stddev**2 for v in per_obs.values()))
    return ExperimentResult(variant, seed, shots, noise.to_dict(), controlled, per_obs, value, sd, counts_doc)
