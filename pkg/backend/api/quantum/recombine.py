"""
Recombination of per-fragment Choi traces into tr(O rho).

For every Pauli term P of O and every assignment of {I,X,Y,Z} to the edges
among kappa and Gamma, each active fragment gets a Pauli string over its Choi
register (edge operator on the source q_out, its transpose on the target's
ancilla, P or identity on c_out). The products of per-fragment traces summed
over assignments give the expectation; with unit-trace Choi states no
per-edge prefactor is needed. Edges into Delta carry the identity.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Mapping, Tuple, Union

from .cutter import Edge, Partition
from .errors import EstimationError, PartitionError
from .pauli import AXES, Observable, PauliString, transpose_sign
from .shadows import (ChoiRegisterLayout, ShadowEnsemble, estimate,
                      estimate_mom)
from .simulator import (DensityMatrix, Statevector, density_expectation,
                        exact_expectation)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MAssignment:
    free_edges: Tuple[Edge, ...]
    axes: Tuple[str, ...]
    identity_edges: Tuple[Edge, ...] = ()

    def __post_init__(self):
        if len(self.axes) != len(self.free_edges):
            raise PartitionError(
                f"{len(self.axes)} operators for {len(self.free_edges)} edges")

    def operator(self, edge: Edge) -> str:
        for e, a in zip(self.free_edges, self.axes):
            if e == edge:
                return a
        return "I"

    @property
    def label(self) -> str:
        return "".join(self.axes)


@dataclass(frozen=True)
class FragmentObservablePlacement:
    fragment: int
    pauli: PauliString


def enumerate_assignments(partition: Partition) -> Iterator[MAssignment]:
    """All 4^|E_notDelta| assignments, lexicographic in I < X < Y < Z."""
    free = partition.e_not_delta
    for axes in itertools.product(AXES, repeat=len(free)):
        yield MAssignment(free, axes, partition.e_not_delta_to_delta)


def place_operators(partition: Partition, m: MAssignment,
                    pauli_term: PauliString
                    ) -> List[FragmentObservablePlacement]:
    graph = partition.graph
    owner = graph.output_owner()
    for q in pauli_term.support:
        f = owner.get(q)
        if f is None or f not in partition.kappa:
            raise PartitionError(
                f"term {pauli_term.to_text()} touches qubit {q + 1} outside "
                f"the observable's fragments")

    ops: Dict[int, Dict[int, str]] = {f: {} for f in partition.active}
    signs: Dict[int, float] = {f: 1.0 for f in partition.active}
    for edge, axis in zip(m.free_edges, m.axes):
        if axis == "I":
            continue
        src = graph.fragment(edge.src)
        ops[edge.src][len(src.q_in) + edge.src_slot] = axis
        ops[edge.dst][edge.dst_slot] = axis
        signs[edge.dst] *= transpose_sign(PauliString({0: axis}))

    placements = []
    for fid in partition.active:
        frag = graph.fragment(fid)
        if fid in partition.kappa:
            base = len(frag.q_in) + len(frag.q_out)
            for k, slot in enumerate(frag.c_out):
                axis = pauli_term.axis(slot.wire)
                if axis != "I":
                    ops[fid][base + k] = axis
        placements.append(
            FragmentObservablePlacement(fid, PauliString(ops[fid],
                                                         signs[fid])))
    return placements


@dataclass(frozen=True)
class PlacementDiagnostic:
    term: int
    assignment: str
    fragment: int
    weight: int
    n_matched: int


@dataclass
class EstimateReport:
    estimate: float
    terms: int
    m_assignments: int
    diagnostics: List[PlacementDiagnostic] = field(default_factory=list)
    seed_manifest: dict = field(default_factory=dict)
    exact: Union[float, None] = None

    @property
    def unobserved_count(self) -> int:
        return sum(1 for d in self.diagnostics
                   if d.weight and d.n_matched == 0)

    @property
    def unobserved(self) -> bool:
        return self.unobserved_count > 0

    def per_fragment(self) -> List[dict]:
        rows: Dict[int, dict] = {}
        for d in self.diagnostics:
            row = rows.setdefault(d.fragment, {
                "fragment": d.fragment,
                "placements": 0,
                "unobserved": 0,
                "min_matched": None,
            })
            row["placements"] += 1
            if d.weight:
                if d.n_matched == 0:
                    row["unobserved"] += 1
                if row["min_matched"] is None or d.n_matched < row[
                        "min_matched"]:
                    row["min_matched"] = d.n_matched
        return [rows[k] for k in sorted(rows)]

    def to_json(self) -> dict:
        out = {
            "estimate": self.estimate,
            "terms": self.terms,
            "m_assignments": self.m_assignments,
            "unobserved_count": self.unobserved_count,
            "per_fragment": self.per_fragment(),
            "seed_manifest": self.seed_manifest,
        }
        if self.exact is not None:
            out["exact"] = self.exact
            out["abs_error"] = abs(self.estimate - self.exact)
        return out


def _as_observable(observable) -> Observable:
    if isinstance(observable, PauliString):
        return Observable.from_pauli(observable)
    return observable


def _contract(partition: Partition, observable: Observable,
              trace: Callable[[int, PauliString], float],
              on_placement=None) -> Tuple[float, int]:
    """
    Sum over terms and assignments of products of ``trace(fid, pauli)``.
    Traces are memoized per (fragment, pattern); coefficients carry signs.
    """
    cache: Dict[Tuple[int, tuple], float] = {}
    total = 0.0
    n_assignments = 0
    for t_idx, term in enumerate(observable.terms):
        unit = term.with_coeff(1.0)
        term_sum = 0.0
        n_assignments = 0
        for m in enumerate_assignments(partition):
            n_assignments += 1
            product = 1.0
            for pl in place_operators(partition, m, unit):
                key = (pl.fragment, pl.pauli.pattern)
                if key not in cache:
                    cache[key] = trace(pl.fragment,
                                       pl.pauli.with_coeff(1.0))
                if on_placement is not None:
                    on_placement(t_idx, m, pl)
                product *= pl.pauli.coeff * cache[key]
                if product == 0.0 and on_placement is None:
                    break
            term_sum += product
        total += term.coeff * term_sum
    return total, n_assignments


def _check_active(partition: Partition, table: Mapping, what: str):
    missing = [f for f in partition.active if f not in table]
    if missing:
        raise EstimationError(f"no {what} for fragments {missing}")


def recombine_estimate(partition: Partition,
                       ensembles: Mapping[int, ShadowEnsemble],
                       observable: Union[Observable, PauliString],
                       seed_manifest: dict = None,
                       groups: int = 1) -> EstimateReport:
    observable = _as_observable(observable)
    _check_active(partition, ensembles, "shadow ensemble")
    for fid in partition.active:
        size = ChoiRegisterLayout.for_fragment(
            partition.graph.fragment(fid)).size
        if ensembles[fid].register_size != size:
            raise EstimationError(
                f"fragment {fid} ensemble has register "
                f"{ensembles[fid].register_size}, layout needs {size}")

    matched: Dict[Tuple[int, tuple], int] = {}
    diagnostics: List[PlacementDiagnostic] = []

    def trace(fid, pauli):
        est = estimate(ensembles[fid], pauli)
        matched[(fid, pauli.pattern)] = est.n_matched
        if groups > 1 and not pauli.is_identity():
            return estimate_mom(ensembles[fid], pauli, groups)
        return est.value

    def record(t_idx, m, pl):
        diagnostics.append(
            PlacementDiagnostic(t_idx, m.label, pl.fragment, pl.pauli.weight,
                                matched[(pl.fragment, pl.pauli.pattern)]))

    value, n_assign = _contract(partition, observable, trace, record)
    report = EstimateReport(value, len(observable), n_assign, diagnostics,
                            dict(seed_manifest or {}))
    logger.debug("recombined %d terms over %d assignments: %.6f",
                 report.terms, n_assign, value)
    return report


ChoiLike = Union[DensityMatrix, Statevector]


def recombine_exact(partition: Partition, choi_matrices: Mapping[int,
                                                                 ChoiLike],
                    observable: Union[Observable, PauliString]) -> float:
    """
    Same contraction with exact traces. Pure Choi statevectors are accepted
    for fragments beyond the density-matrix limit.
    """
    observable = _as_observable(observable)
    _check_active(partition, choi_matrices, "Choi matrix")
    for fid in partition.active:
        size = partition.graph.fragment(fid).deg
        if choi_matrices[fid].n_qubits != size:
            raise EstimationError(
                f"fragment {fid} Choi object has {choi_matrices[fid].n_qubits}"
                f" qubits, layout needs {size}")

    def trace(fid, pauli):
        choi = choi_matrices[fid]
        if isinstance(choi, Statevector):
            return exact_expectation(choi, pauli)
        return density_expectation(choi, pauli)

    value, _ = _contract(partition, observable, trace)
    return value
