"""Reproducible random-ensemble campaigns over the spectral-radius chain.

Every trial draws its pair from a Philox generator keyed by
``(seed, trial_index)``, so any single trial can be regenerated in isolation
and results never depend on scheduling or worker count.
"""
from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .inequalities import ChainReport, trace_chain, zhan_chain
from .matrix import Matrix, write_matrix
from .structure import StructureReport, analyze

__all__ = [
    "ConfigInvalid",
    "Distribution",
    "EnsembleConfig",
    "TrialRecord",
    "EnsembleSummary",
    "EnsembleResult",
    "generate_pair",
    "run_trial",
    "run_ensemble",
    "CSV_COLUMNS",
    "records_to_csv",
]

CSV_COLUMNS = (
    "trial", "n", "rho_had", "rho_mid", "rho_conv", "ratio",
    "first_ok", "second_ok", "certified", "period_a", "period_b",
)  # fmt: skip

_KINDS = ("Uniform01", "Sparse", "LogUniform")


class ConfigInvalid(ValueError):
    pass


@dataclass(frozen=True)
class Distribution:
    """Entry distribution: ``Uniform01``, ``Sparse(density)`` or ``LogUniform(lo, hi)``.

    ``Sparse`` draws uniform [0, 1) values and zeroes each one with
    probability ``1 - density``. ``LogUniform`` draws ``10**U(lo, hi)``.
    """

    kind: str = "Uniform01"
    density: float = 1.0
    log10_min: float = -6.0
    log10_max: float = 6.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ConfigInvalid(f"unknown distribution {self.kind!r}; expected one of {_KINDS}")
        if not 0.0 <= self.density <= 1.0:
            raise ConfigInvalid(f"density must lie in [0, 1], got {self.density!r}")
        if not self.log10_min <= self.log10_max:
            raise ConfigInvalid("log10_min must not exceed log10_max")

    @classmethod
    def uniform01(cls) -> "Distribution":
        return cls("Uniform01")

    @classmethod
    def sparse(cls, density: float) -> "Distribution":
        return cls("Sparse", density=density)

    @classmethod
    def log_uniform(cls, log10_min: float, log10_max: float) -> "Distribution":
        return cls("LogUniform", log10_min=log10_min, log10_max=log10_max)

    @classmethod
    def from_json(cls, obj) -> "Distribution":
        if isinstance(obj, str):
            return cls(obj)
        if not isinstance(obj, dict) or "kind" not in obj:
            raise ConfigInvalid(f"distribution must be a name or an object with 'kind', got {obj!r}")
        extra = set(obj) - {"kind", "density", "log10_min", "log10_max"}
        if extra:
            raise ConfigInvalid(f"unknown distribution fields {sorted(extra)}")
        try:
            return cls(**obj)
        except TypeError as exc:
            raise ConfigInvalid(str(exc)) from exc

    def to_json(self):
        if self.kind == "Uniform01":
            return {"kind": self.kind}
        if self.kind == "Sparse":
            return {"kind": self.kind, "density": self.density}
        return {"kind": self.kind, "log10_min": self.log10_min, "log10_max": self.log10_max}

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.kind == "Uniform01":
            return rng.random((n, n))
        if self.kind == "Sparse":
            values = rng.random((n, n))
            keep = rng.random((n, n)) < self.density
            return np.where(keep, values, 0.0)
        return 10.0 ** rng.uniform(self.log10_min, self.log10_max, (n, n))


@dataclass(frozen=True)
class EnsembleConfig:
    distribution: Distribution = field(default_factory=Distribution)
    n_min: int = 2
    n_max: int = 8
    trials: int = 100
    seed: int = 0
    k_values: tuple[int, ...] = (1, 2)
    tol: float = 1e-8
    threads: int = 1

    def __post_init__(self):
        if not isinstance(self.distribution, Distribution):
            raise ConfigInvalid("distribution must be a Distribution")
        if not 1 <= self.n_min <= self.n_max:
            raise ConfigInvalid(f"need 1 <= n_min <= n_max, got {self.n_min}, {self.n_max}")
        if self.trials < 0:
            raise ConfigInvalid(f"trials must be >= 0, got {self.trials}")
        if not 0 <= self.seed < 2**64:
            raise ConfigInvalid(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if any(k < 1 or 2 * k > 64 for k in self.k_values):
            raise ConfigInvalid(f"k_values must satisfy 1 <= 2k <= 64, got {self.k_values}")
        if not self.tol > 0:
            raise ConfigInvalid(f"tol must be positive, got {self.tol}")
        if self.threads < 1:
            raise ConfigInvalid(f"threads must be >= 1, got {self.threads}")

    @classmethod
    def from_json(cls, obj: Mapping) -> "EnsembleConfig":
        if not isinstance(obj, Mapping):
            raise ConfigInvalid("config must be a JSON object")
        known = {"distribution", "n_min", "n_max", "trials", "seed", "k_values", "tol", "threads"}
        extra = set(obj) - known
        if extra:
            raise ConfigInvalid(f"unknown config fields {sorted(extra)}")
        kw = dict(obj)
        if "distribution" in kw:
            kw["distribution"] = Distribution.from_json(kw["distribution"])
        for name in ("n_min", "n_max", "trials", "seed", "threads"):
            if name in kw and (not isinstance(kw[name], int) or isinstance(kw[name], bool)):
                raise ConfigInvalid(f"{name} must be an integer, got {kw[name]!r}")
        if "k_values" in kw:
            ks = kw["k_values"]
            if not isinstance(ks, list) or not all(isinstance(k, int) and not isinstance(k, bool) for k in ks):
                raise ConfigInvalid(f"k_values must be a list of integers, got {ks!r}")
            kw["k_values"] = tuple(ks)
        if "tol" in kw and not isinstance(kw["tol"], (int, float)):
            raise ConfigInvalid(f"tol must be a number, got {kw['tol']!r}")
        return cls(**kw)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "EnsembleConfig":
        try:
            obj = json.loads(Path(path).read_text())
        except (OSError, ValueError) as exc:
            raise ConfigInvalid(f"cannot read config {path}: {exc}") from exc
        return cls.from_json(obj)

    def to_json(self) -> dict:
        return {
            "distribution": self.distribution.to_json(),
            "n_min": self.n_min,
            "n_max": self.n_max,
            "trials": self.trials,
            "seed": self.seed,
            "k_values": list(self.k_values),
            "tol": self.tol,
            "threads": self.threads,
        }


@dataclass(frozen=True)
class TrialRecord:
    trial_index: int
    n: int
    rho_had: float
    rho_mid: float
    rho_conv: float
    ratio: float
    chain_ok: tuple[bool, bool]
    certified: bool
    trace_chain_ok: tuple[tuple[int, bool, bool], ...]  # (k, first, second)
    structure_a: StructureReport
    structure_b: StructureReport

    @property
    def violation(self) -> bool:
        return not all(self.chain_ok) or not all(f and s for _, f, s in self.trace_chain_ok)

    def csv_row(self) -> list[str]:
        return [
            str(self.trial_index),
            str(self.n),
            repr(self.rho_had),
            repr(self.rho_mid),
            repr(self.rho_conv),
            repr(self.ratio),
            _flag(self.chain_ok[0]),
            _flag(self.chain_ok[1]),
            _flag(self.certified),
            str(self.structure_a.period),
            str(self.structure_b.period),
        ]


def _flag(b: bool) -> str:
    return "true" if b else "false"


@dataclass(frozen=True)
class EnsembleSummary:
    trials: int
    violations: int
    uncertified: int
    min_ratio: Optional[float]
    argmin_trial: Optional[int]
    violating_trials: tuple[int, ...] = ()

    @property
    def exit_code(self) -> int:
        return 2 if self.violations else 0

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "violations": self.violations,
            "uncertified": self.uncertified,
            "min_ratio": self.min_ratio,
            "argmin_trial": self.argmin_trial,
            "violating_trials": list(self.violating_trials),
            "exit_code": self.exit_code,
        }


@dataclass(frozen=True)
class EnsembleResult:
    config: EnsembleConfig
    records: tuple[TrialRecord, ...]
    summary: EnsembleSummary

    @property
    def exit_code(self) -> int:
        return self.summary.exit_code


def _rng(seed: int, trial_index: int) -> np.random.Generator:
    # 128-bit Philox key: seed in the low word, trial index in the high word
    return np.random.Generator(np.random.Philox(key=int(seed) | (int(trial_index) << 64)))


def generate_pair(config: EnsembleConfig, trial_index: int) -> tuple[Matrix, Matrix]:
    """Deterministic random pair for ``trial_index``, reproducible in isolation."""
    if not 0 <= trial_index < config.trials:
        raise ConfigInvalid(f"trial_index {trial_index} out of range for {config.trials} trials")
    rng = _rng(config.seed, trial_index)
    n = int(rng.integers(config.n_min, config.n_max + 1))
    a = config.distribution.sample(rng, n)
    b = config.distribution.sample(rng, n)
    return Matrix(a), Matrix(b)


def run_trial(
    config: EnsembleConfig, trial_index: int, pair: Optional[tuple[Matrix, Matrix]] = None
) -> TrialRecord:
    a, b = pair if pair is not None else generate_pair(config, trial_index)
    chain: ChainReport = zhan_chain(a, b, config.tol)
    traces = []
    for k in config.k_values:
        tc = trace_chain(a, b, k)
        traces.append((k, tc.holds[0], tc.holds[1]))
    return TrialRecord(
        trial_index=trial_index,
        n=a.n,
        rho_had=chain.rho_had,
        rho_mid=chain.rho_mid,
        rho_conv=chain.rho_conv,
        ratio=chain.ratio,
        chain_ok=(chain.first_holds, chain.second_holds),
        certified=chain.certified,
        trace_chain_ok=tuple(traces),
        structure_a=analyze(a),
        structure_b=analyze(b),
    )


def _run_range(args) -> list[TrialRecord]:
    config, start, stop, overrides = args
    return [run_trial(config, i, overrides.get(i)) for i in range(start, stop)]


def _dump_violation(directory: Path, config: EnsembleConfig, record: TrialRecord, pair) -> None:
    a, b = pair if pair is not None else generate_pair(config, record.trial_index)
    directory.mkdir(parents=True, exist_ok=True)
    write_matrix(a, directory / f"violation_{record.trial_index}.a.mat")
    write_matrix(b, directory / f"violation_{record.trial_index}.b.mat")


def run_ensemble(
    config: EnsembleConfig,
    overrides: Optional[Mapping[int, tuple[Matrix, Matrix]]] = None,
    dump_dir: Optional[Union[str, Path]] = None,
    chunk_size: int = 64,
) -> EnsembleResult:
    """Run every trial of ``config`` and summarize.

    Parameters
    ----------
    config : EnsembleConfig
        ``config.threads > 1`` spreads fixed trial ranges over worker
        processes; records come back in trial order either way.
    overrides : mapping, optional
        Replace the generated pair for selected trial indices (test hook).
    dump_dir : path, optional
        Where to write ``violation_<trial>.{a,b}.mat`` for violating trials.
        Nothing is written when omitted.
    """
    overrides = dict(overrides or {})
    bad = [i for i in overrides if not 0 <= i < config.trials]
    if bad:
        raise ConfigInvalid(f"override trial indices out of range: {bad}")
    ranges = [
        (config, s, min(s + chunk_size, config.trials), {i: p for i, p in overrides.items() if s <= i < s + chunk_size})
        for s in range(0, config.trials, chunk_size)
    ]
    if config.threads > 1 and len(ranges) > 1:
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            chunks = list(pool.map(_run_range, ranges))
    else:
        chunks = [_run_range(r) for r in ranges]
    records = tuple(rec for chunk in chunks for rec in chunk)

    violating = tuple(r.trial_index for r in records if r.violation)
    if dump_dir is not None:
        for r in records:
            if r.violation:
                _dump_violation(Path(dump_dir), config, r, overrides.get(r.trial_index))
    if records:
        best = min(records, key=lambda r: (r.ratio, r.trial_index))
        min_ratio, argmin = best.ratio, best.trial_index
    else:
        min_ratio, argmin = None, None
    summary = EnsembleSummary(
        trials=len(records),
        violations=len(violating),
        uncertified=sum(not r.certified for r in records),
        min_ratio=min_ratio,
        argmin_trial=argmin,
        violating_trials=violating,
    )
    return EnsembleResult(config, records, summary)


def records_to_csv(records: Sequence[TrialRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow(r.csv_row())
    return buf.getvalue()
