"""
Fragmented vs. unfragmented shadow estimation over a grid of
(fragment count, total shots, observable size), on the clustered ansatz.
"""
from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from django.conf import settings

from .ansatz import gen_clustered_ansatz, random_pauli_observable
from .bounds import LOG_BASE
from .cutter import FragmentGraph, cut_circuit, partition_for_observable
from .errors import ShadowCutError
from .recombine import recombine_estimate
from .rng import derive_seed
from .shadows import collect_choi_shadow, unobserved_probability
from .simulator import exact_expectation

logger = logging.getLogger(__name__)

DEFAULT_TRIALS: int = getattr(settings, "SHADOWCUT_EXPERIMENT_TRIALS", 50)
EXPERIMENT_WORKERS: int = getattr(settings, "SHADOWCUT_EXPERIMENT_WORKERS",
                                  1)

CSV_COLUMNS = ("trial", "n_fragments", "shots", "obs_size", "estimate",
               "exact", "abs_error", "unobserved", "seed")
SHOT_SPLIT_RULE = "total budget split equally, remainder to lowest fragment id"


@dataclass(frozen=True)
class ExperimentConfig:
    clusters: int = 3
    cluster_size: int = 3
    fragment_counts: Tuple[int, ...] = (1, 2, 3)
    obs_sizes: Tuple[int, ...] = (1, 5, 9)
    shot_grid: Tuple[int, ...] = (100, 1000, 10000)
    trials: int = DEFAULT_TRIALS
    penalty_mode: bool = False
    base_seed: int = 0
    groups: int = 1

    def __post_init__(self):
        for name in ("fragment_counts", "obs_sizes", "shot_grid"):
            object.__setattr__(self, name,
                               tuple(sorted(set(getattr(self, name)))))
        self.validate()

    @property
    def width(self) -> int:
        return self.clusters * self.cluster_size

    def validate(self):
        if self.trials < 1:
            raise ShadowCutError("trials must be at least 1")
        if not self.fragment_counts or not self.obs_sizes or not self.shot_grid:
            raise ShadowCutError("experiment grid has an empty axis")
        bad = [s for s in self.obs_sizes if not 1 <= s <= self.width]
        if bad:
            raise ShadowCutError(
                f"observable sizes {bad} outside 1..{self.width}")
        bad = [f for f in self.fragment_counts
               if not 1 <= f <= self.clusters]
        if bad:
            raise ShadowCutError(
                f"fragment counts {bad} outside 1..{self.clusters}")
        bad = [s for s in self.shot_grid if s < 1]
        if bad:
            raise ShadowCutError(f"shot counts {bad} must be positive")
        if self.groups < 1:
            raise ShadowCutError("groups must be at least 1")

    @property
    def estimator(self) -> str:
        if self.groups == 1:
            return "mean"
        return f"median-of-means({self.groups})"


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    n_fragments: int
    shots: int
    obs_size: int
    estimate: float
    exact: float
    abs_error: float
    unobserved: bool
    seed: int

    @property
    def sort_key(self):
        return (self.trial, self.n_fragments, self.shots, self.obs_size)

    def as_row(self) -> List[str]:
        return [
            str(self.trial),
            str(self.n_fragments),
            str(self.shots),
            str(self.obs_size),
            repr(float(self.estimate)),
            repr(float(self.exact)),
            repr(float(self.abs_error)),
            "1" if self.unobserved else "0",
            str(self.seed),
        ]

    @classmethod
    def from_row(cls, row: Dict[str, str]) -> "TrialRecord":
        return cls(int(row["trial"]), int(row["n_fragments"]),
                   int(row["shots"]), int(row["obs_size"]),
                   float(row["estimate"]), float(row["exact"]),
                   float(row["abs_error"]),
                   row["unobserved"] in ("1", "True", "true"),
                   int(row["seed"]))


def split_shots(total: int, n_fragments: int) -> List[int]:
    """Equal split of a total budget; the remainder goes to fragment 0."""
    base, rest = divmod(int(total), int(n_fragments))
    return [base + (rest if i == 0 else 0) for i in range(n_fragments)]


def _collect(graph: FragmentGraph, shots: int, seed: int) -> dict:
    ensembles = {}
    for frag, n in zip(graph.fragments, split_shots(shots,
                                                     len(graph.fragments))):
        ensembles[frag.id], _ = collect_choi_shadow(
            frag, n, derive_seed(seed, frag.id))
    return ensembles


def run_trial(config: ExperimentConfig, trial: int) -> List[TrialRecord]:
    trial_seed = derive_seed(config.base_seed, trial)
    ansatz = gen_clustered_ansatz(config.clusters, config.cluster_size,
                                  derive_seed(trial_seed, 0))
    state = ansatz.circuit.statevector()
    observables = {
        s: random_pauli_observable(config.width, s,
                                   derive_seed(trial_seed, 1, s))
        for s in config.obs_sizes
    }
    exact = {s: exact_expectation(state, o) for s, o in observables.items()}

    records = []
    for n_frag in config.fragment_counts:
        graph = cut_circuit(ansatz.circuit,
                            ansatz.cut_lists[n_frag],
                            allow_cycles=True)
        for shots in config.shot_grid:
            # one acquisition per (fragment count, shots), reused by all sizes
            ensembles = _collect(graph, shots,
                                 derive_seed(trial_seed, 2, n_frag, shots))
            for size, obs in observables.items():
                partition = partition_for_observable(graph, obs.support)
                report = recombine_estimate(partition, ensembles, obs,
                                            groups=config.groups)
                err = abs(report.estimate - exact[size])
                if config.penalty_mode and report.unobserved:
                    err = 1.0
                records.append(
                    TrialRecord(trial, n_frag, shots, size, report.estimate,
                                exact[size], err, report.unobserved,
                                trial_seed))
    logger.debug("trial %d done: %d rows", trial, len(records))
    return records


def write_csv(path: Union[str, Path],
              records: Iterable[TrialRecord]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in sorted(records, key=lambda r: r.sort_key):
            writer.writerow(r.as_row())
    return path


def read_csv(path: Union[str, Path]) -> List[TrialRecord]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = set(CSV_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ShadowCutError(f"{path}: missing columns {sorted(missing)}")
        return [TrialRecord.from_row(row) for row in reader]


def experiment_metadata(config: ExperimentConfig, n_rows: int,
                        complete: bool = True) -> dict:
    return {
        "config": asdict(config),
        "columns": list(CSV_COLUMNS),
        "shot_split": SHOT_SPLIT_RULE,
        "estimator": config.estimator,
        "log_base": LOG_BASE,
        "penalty_mode": config.penalty_mode,
        "unobserved_rule": "any non-identity placement with zero matches",
        "rows": n_rows,
        "complete": complete,
    }


def meta_path(out: Union[str, Path]) -> Path:
    out = Path(out)
    return out.with_name(out.name + ".meta.json")


def _flush(out: Optional[Path], config: ExperimentConfig,
           records: List[TrialRecord], complete: bool):
    if out is None:
        return
    write_csv(out, records)
    meta_path(out).write_text(
        json.dumps(experiment_metadata(config, len(records), complete),
                   indent=2, sort_keys=True) + "\n",
        encoding="utf-8")
    logger.info("wrote %d rows to %s", len(records), out)


def run_experiment(config: ExperimentConfig,
                   out: Union[str, Path, None] = None,
                   workers: int = None) -> List[TrialRecord]:
    """
    Run every trial, merge rows in (trial, fragments, shots, size) order
    and write ``out`` plus its ``.meta.json`` sidecar. Rows of finished
    trials are flushed before a failure propagates.
    """
    out = Path(out) if out is not None else None
    workers = EXPERIMENT_WORKERS if workers is None else max(1, workers)
    logger.info("experiment: %d trials, %dx%d ansatz, %d workers",
                config.trials, config.clusters, config.cluster_size, workers)
    records: List[TrialRecord] = []
    try:
        if workers == 1:
            for t in range(config.trials):
                records.extend(run_trial(config, t))
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                for rows in pool.map(lambda t: run_trial(config, t),
                                     range(config.trials)):
                    records.extend(rows)
    except Exception:
        _flush(out, config, records, complete=False)
        raise
    records.sort(key=lambda r: r.sort_key)
    _flush(out, config, records, complete=True)
    return records


@dataclass
class UnobservedRow:
    shots: int
    obs_size: int
    trials: int
    unobserved: int
    empirical: float
    analytic: float = field(default=0.0)

    def to_json(self) -> dict:
        return asdict(self)


def unobserved_stats(records: Sequence[TrialRecord]) -> List[UnobservedRow]:
    """Empirical unobserved rate of |F| = 1 rows by (shots, obs_size)."""
    groups: Dict[Tuple[int, int], List[bool]] = {}
    for r in records:
        if r.n_fragments != 1:
            continue
        groups.setdefault((r.shots, r.obs_size), []).append(r.unobserved)
    rows = []
    for (shots, size), flags in sorted(groups.items()):
        hits = sum(flags)
        rows.append(
            UnobservedRow(shots, size, len(flags), hits, hits / len(flags),
                          unobserved_probability(size, shots)))
    return rows
