import logging
from dataclasses import asdict
from typing import Dict, List, Optional, Sequence

from django.db import transaction

from .models import ExperimentRun, TrialResult
from .quantum.bounds import quotes_for_partition
from .quantum.cutter import (CutSpec, FragmentGraph, cut_circuit,
                             partition_for_observable, reduce)
from .quantum.errors import SizeLimitError
from .quantum.experiments import (ExperimentConfig, TrialRecord,
                                  unobserved_stats)
from .quantum.oracle import exact_cut_identity_check, uncut_expectation
from .quantum.pauli import Observable
from .quantum.recombine import EstimateReport, recombine_estimate
from .quantum.rng import derive_seed
from .quantum.shadows import ShadowEnsemble, collect_choi_shadow
from .quantum.simulator import Circuit

logger = logging.getLogger(__name__)


def fragment_seed(seed: int, fragment_id: int) -> int:
    return derive_seed(seed, fragment_id)


def collect_fragment_shadows(graph: FragmentGraph, fragment_ids: Sequence[int],
                             shots: int,
                             seed: int) -> Dict[int, ShadowEnsemble]:
    """``shots`` Choi shots for each listed fragment, one seed per fragment."""
    ensembles = {}
    for fid in fragment_ids:
        ensembles[fid], _ = collect_choi_shadow(graph.fragment(fid), shots,
                                                fragment_seed(seed, fid))
    return ensembles


def estimate_observable(circuit: Circuit,
                        cuts: Sequence[CutSpec],
                        observable: Observable,
                        shots: int,
                        seed: int,
                        groups: int = 1,
                        with_exact: bool = True,
                        ensembles: Optional[Dict[int,
                                                 ShadowEnsemble]] = None
                        ) -> EstimateReport:
    """
    Cut, drop the Delta fragments, sample every surviving fragment ``shots``
    times (unless ``ensembles`` are given) and recombine.
    """
    graph = cut_circuit(circuit, cuts, allow_cycles=True)
    partition = partition_for_observable(graph, observable.support)
    sampled, pinned = reduce(graph, partition)
    if pinned:
        logger.debug("%d edges into dropped fragments carry the identity",
                     len(pinned))
    if ensembles is None:
        ensembles = collect_fragment_shadows(sampled, sampled.ids, shots,
                                             seed)
        manifest = {str(f): fragment_seed(seed, f) for f in sampled.ids}
    else:
        manifest = {
            str(f): ensembles[f].provenance.get("seed")
            for f in partition.active if f in ensembles
        }
    report = recombine_estimate(partition,
                                ensembles,
                                observable,
                                seed_manifest=manifest,
                                groups=groups)
    if with_exact:
        try:
            report.exact = uncut_expectation(circuit, observable)
        except SizeLimitError:
            logger.info("circuit too wide for an exact reference value")
    return report


def oracle_check(circuit: Circuit, cuts: Sequence[CutSpec],
                 observable: Observable) -> dict:
    check = exact_cut_identity_check(circuit, cuts, observable)
    return check._asdict()


def bounds_for_instance(circuit: Circuit,
                        cuts: Sequence[CutSpec],
                        observable: Observable,
                        epsilon: float,
                        delta: float,
                        o_norm: Optional[float] = None) -> List[dict]:
    graph = cut_circuit(circuit, cuts, allow_cycles=True)
    partition = partition_for_observable(graph, observable.support)
    if o_norm is None:
        o_norm = observable.norm_bound()
    quotes = quotes_for_partition(partition, epsilon, delta, o_norm,
                                  len(observable.support))
    return [q.to_json() for q in quotes]


@transaction.atomic
def save_experiment(config: ExperimentConfig,
                    records: Sequence[TrialRecord],
                    meta: dict = None,
                    csv_path: str = None,
                    user=None,
                    complete: bool = True) -> ExperimentRun:
    run = ExperimentRun.objects.create(clusters=config.clusters,
                                       cluster_size=config.cluster_size,
                                       trials=config.trials,
                                       base_seed=config.base_seed,
                                       penalty_mode=config.penalty_mode,
                                       estimator=config.estimator,
                                       config=asdict(config),
                                       meta=meta or {},
                                       csv_path=csv_path,
                                       complete=complete,
                                       created_by=user)
    TrialResult.objects.bulk_create([
        TrialResult(run=run,
                    trial=r.trial,
                    n_fragments=r.n_fragments,
                    shots=r.shots,
                    obs_size=r.obs_size,
                    estimate=r.estimate,
                    exact=r.exact,
                    abs_error=r.abs_error,
                    unobserved=r.unobserved,
                    seed=r.seed) for r in records
    ])
    logger.info("stored run %s with %d rows", run.pk, len(records))
    return run


def records_for_run(run: ExperimentRun) -> List[TrialRecord]:
    return [
        TrialRecord(t.trial, t.n_fragments, t.shots, t.obs_size, t.estimate,
                    t.exact, t.abs_error, t.unobserved, t.seed)
        for t in run.results.all()
    ]


def unobserved_stats_for_run(run: ExperimentRun) -> List[dict]:
    return [row.to_json() for row in unobserved_stats(records_for_run(run))]

