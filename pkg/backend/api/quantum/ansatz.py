"""
Clustered Haar ansatz, random Pauli observables and random cut instances.

Gate order of the clustered ansatz: one Haar block per cluster, one 2-qubit
Haar connector between the last wire of cluster c and the first wire of
cluster c+1, then a second Haar block per cluster. Cutting connector c puts
two cuts on the first wire of cluster c+1, around the connector, so the
connector joins the upper cluster's fragment.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Tuple

from .cutter import CutSpec, cut_circuit
from .errors import CutError, ShadowCutError
from .pauli import AXES, PauliString
from .rng import SeedLike, make_rng
from .simulator import HAAR_MAX_QUBITS, Circuit, Gate

logger = logging.getLogger(__name__)

MAX_INSTANCE_ATTEMPTS = 200


@dataclass(frozen=True)
class ClusteredAnsatz:
    circuit: Circuit
    clusters: int
    cluster_size: int
    cut_lists: Dict[int, Tuple[CutSpec, ...]]

    @property
    def fragment_counts(self) -> List[int]:
        return sorted(self.cut_lists)


def _gate_seed(rng) -> int:
    return int(rng.integers(0, 2**63 - 1))


def gen_clustered_ansatz(clusters: int, cluster_size: int,
                         seed: SeedLike) -> ClusteredAnsatz:
    if clusters < 1:
        raise ShadowCutError("need at least one cluster")
    if not 2 <= cluster_size <= HAAR_MAX_QUBITS:
        raise ShadowCutError(
            f"cluster size must be 2..{HAAR_MAX_QUBITS}, got {cluster_size}")
    rng = make_rng(seed)
    blocks = [list(range(c * cluster_size, (c + 1) * cluster_size))
              for c in range(clusters)]

    gates = [Gate.haar(b, _gate_seed(rng)) for b in blocks]
    for c in range(clusters - 1):
        gates.append(
            Gate.haar([blocks[c][-1], blocks[c + 1][0]], _gate_seed(rng)))
    gates.extend(Gate.haar(b, _gate_seed(rng)) for b in blocks)
    circuit = Circuit(clusters * cluster_size, tuple(gates))

    connector_cuts = []
    for c in range(clusters - 1):
        wire = blocks[c + 1][0]
        connector = clusters + c
        connector_cuts.append(
            (CutSpec(wire, c + 1), CutSpec(wire, connector)))
    cut_lists = {
        t: tuple(cut for pair in connector_cuts[:t - 1] for cut in pair)
        for t in range(1, clusters + 1)
    }
    logger.debug("clustered ansatz %dx%d with %d gates", clusters,
                 cluster_size, len(gates))
    return ClusteredAnsatz(circuit, clusters, cluster_size, cut_lists)


def random_pauli_observable(width: int, size: int,
                            seed: SeedLike) -> PauliString:
    if not 0 <= size <= width:
        raise ShadowCutError(f"observable size {size} outside 0..{width}")
    rng = make_rng(seed)
    support = sorted(int(q) for q in rng.choice(width, size=size,
                                                 replace=False))
    axes = rng.integers(1, 4, size=size)
    return PauliString({q: AXES[a] for q, a in zip(support, axes)})


def random_circuit(n_qubits: int, n_gates: int, seed: SeedLike) -> Circuit:
    """Random 2-qubit Haar gates on random wire pairs."""
    if n_qubits < 2:
        raise ShadowCutError("random circuits need two or more wires")
    rng = make_rng(seed)
    gates = []
    for _ in range(n_gates):
        pair = sorted(int(q) for q in rng.choice(n_qubits, 2, replace=False))
        gates.append(Gate.haar(pair, _gate_seed(rng)))
    return Circuit(n_qubits, tuple(gates))


def random_cut_instance(n_qubits: int, n_gates: int, n_cuts: int,
                        seed: SeedLike) -> Tuple[Circuit, List[CutSpec]]:
    """
    A random circuit with ``n_cuts`` valid cuts (cycles allowed, no
    self-loops). Deterministic given ``seed``.
    """
    rng = make_rng(seed)
    for _ in range(MAX_INSTANCE_ATTEMPTS):
        circuit = random_circuit(n_qubits, n_gates, rng)
        candidates = []
        for w in range(n_qubits):
            ordinals = circuit.wire_gates(w)
            candidates.extend(CutSpec(w, g) for g in ordinals[:-1])
        if len(candidates) < n_cuts:
            continue
        picks = rng.choice(len(candidates), size=n_cuts, replace=False)
        cuts = sorted(candidates[int(i)] for i in picks)
        try:
            cut_circuit(circuit, cuts, allow_cycles=True)
        except CutError:
            continue
        return circuit, cuts
    raise CutError(f"no valid instance with {n_cuts} cuts after "
                   f"{MAX_INSTANCE_ATTEMPTS} attempts")
