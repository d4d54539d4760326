"""
Brute-force ground truth for the cutting and recombination conventions.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import product
from typing import Dict, NamedTuple, Sequence, Tuple, Union

import numpy as np
from django.conf import settings

from .cutter import (CutSpec, Fragment, Partition, cut_circuit,
                     partition_for_observable)
from .errors import CircuitError
from .pauli import PAULI_MATRICES, Observable, PauliString, transpose_sign
from .recombine import ChoiLike, recombine_exact
from .shadows import choi_statevector
from .simulator import (DENSITY_MAX_QUBITS, Circuit, DensityMatrix,
                        Statevector, apply_gate, exact_expectation)

logger = logging.getLogger(__name__)

ORACLE_WORKERS: int = getattr(settings, "SHADOWCUT_ORACLE_WORKERS", 1)


def exact_choi(fragment: Fragment) -> DensityMatrix:
    """Unit-trace Choi matrix in the [ancillas | q_out | c_out] order."""
    return choi_statevector(fragment).density_matrix()


def exact_choi_object(fragment: Fragment) -> ChoiLike:
    """Density matrix when it fits, otherwise the pure Choi statevector."""
    if fragment.deg <= DENSITY_MAX_QUBITS:
        return exact_choi(fragment)
    return choi_statevector(fragment)


def exact_chois(partition: Partition,
                workers: int = None) -> Dict[int, ChoiLike]:
    fragments = [partition.graph.fragment(f) for f in partition.active]
    workers = ORACLE_WORKERS if workers is None else workers
    if workers > 1 and len(fragments) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chois = list(pool.map(exact_choi_object, fragments))
    else:
        chois = [exact_choi_object(f) for f in fragments]
    return {f.id: c for f, c in zip(fragments, chois)}


@dataclass(frozen=True)
class EigenExpansion:
    axis: str
    pairs: Tuple[Tuple[float, np.ndarray], ...]

    @property
    def vectors(self) -> Tuple[np.ndarray, ...]:
        """Unit eigenvectors behind the rank-1 projectors."""
        out = []
        for _, proj in self.pairs:
            w, v = np.linalg.eigh(proj)
            out.append(v[:, np.argmax(w)])
        return tuple(out)

    def reconstruct(self) -> np.ndarray:
        return sum(lam * proj for lam, proj in self.pairs)


def eigen_expand(m: str) -> EigenExpansion:
    m = m.upper()
    if m not in PAULI_MATRICES:
        raise CircuitError(f"unknown Pauli axis {m!r}")
    if m == "I":
        pairs = ((1.0, np.diag([1, 0]).astype(complex)),
                 (1.0, np.diag([0, 1]).astype(complex)))
    else:
        w, v = np.linalg.eigh(PAULI_MATRICES[m])
        pairs = tuple((float(round(w[i])), np.outer(v[:, i], v[:, i].conj()))
                      for i in np.argsort(-w))
    return EigenExpansion(m, pairs)


def prepare_measure_trace(fragment: Fragment, inputs: Sequence[str],
                          output: PauliString) -> float:
    """
    tr((M^T (x) N) Lambda) rebuilt by preparing eigenstates of M on the
    quantum inputs, running the fragment and weighting by eigenvalue / 2.

    ``inputs`` holds one axis per q_in slot; ``output`` acts on the
    [q_out | c_out] register.
    """
    if len(inputs) != len(fragment.q_in):
        raise CircuitError(
            f"{len(inputs)} input operators for {len(fragment.q_in)} inputs")
    n = fragment.subcircuit.n_qubits
    out_order = [s.local for s in fragment.q_out] + [
        s.local for s in fragment.c_out
    ]
    n_on_wires = output.relabeled(dict(enumerate(out_order)))
    expansions = [eigen_expand(a) for a in inputs]
    total = 0.0
    for choice in product(*(range(2) for _ in expansions)):
        weight = 1.0
        state = Statevector.zero(n)
        for exp, k, slot in zip(expansions, choice, fragment.q_in):
            lam, _ = exp.pairs[k]
            weight *= lam / 2
            vec = exp.vectors[k]
            # |0> -> |vec> on that input wire
            prep = np.column_stack([vec, [-vec[1].conj(), vec[0].conj()]])
            state = apply_gate(state, prep, [slot.local])
        for gate in fragment.subcircuit.gates:
            state = apply_gate(state, gate.matrix, gate.qubits)
        total += weight * exact_expectation(state, n_on_wires)
    return float(total)


def choi_placement(fragment: Fragment, inputs: Sequence[str],
                   output: PauliString) -> PauliString:
    """The Choi-register string matching ``prepare_measure_trace``."""
    qi = len(fragment.q_in)
    ops = {i: a for i, a in enumerate(inputs)}
    ops.update({qi + q: a for q, a in output.items()})
    sign = 1.0
    for a in inputs:
        sign *= transpose_sign(PauliString({0: a}))
    return PauliString(ops, sign * output.coeff)


class CutIdentityCheck(NamedTuple):
    uncut: float
    recombined: float
    delta: float


def uncut_expectation(circuit: Circuit,
                      observable: Union[Observable, PauliString]) -> float:
    return exact_expectation(circuit.statevector(), observable)


def exact_cut_identity_check(circuit: Circuit, cuts: Sequence[CutSpec],
                             observable: Union[Observable, PauliString],
                             allow_cycles: bool = True) -> CutIdentityCheck:
    if isinstance(observable, PauliString):
        observable = Observable.from_pauli(observable)
    uncut = uncut_expectation(circuit, observable)
    graph = cut_circuit(circuit, cuts, allow_cycles=allow_cycles)
    partition = partition_for_observable(graph, observable.support)
    recombined = recombine_exact(partition, exact_chois(partition),
                                 observable)
    delta = abs(uncut - recombined)
    logger.debug("cut identity: uncut=%.12f recombined=%.12f delta=%.3g",
                 uncut, recombined, delta)
    return CutIdentityCheck(uncut, recombined, delta)
