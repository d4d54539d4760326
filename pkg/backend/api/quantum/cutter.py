"""
Circuit cutting: (circuit, cut locations) -> fragment multigraph, and the
kappa/Gamma/Delta partition of that graph for a given observable.

A cut severs a wire between two of its gates. Each wire is thereby split into
segments; a segment starts at the circuit input |0> or at a quantum input
and ends at a quantum output or at a circuit output. Fragments are the
connected components of gates glued along segments, and a fragment's
register is the list of its segments ordered by (wire, segment).
"""
from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import (Dict, FrozenSet, Iterable, List, Mapping, Sequence,
                    Tuple)

import networkx as nx

from .errors import CutError, PartitionError
from .simulator import Circuit

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class CutSpec:
    """Sever ``wire`` right after gate ordinal ``after_gate`` (both 0-based)."""
    wire: int
    after_gate: int

    @classmethod
    def from_json(cls, data: Mapping) -> "CutSpec":
        return cls(int(data["wire"]) - 1, int(data["after_gate"]) - 1)

    def to_json(self) -> dict:
        return {"wire": self.wire + 1, "after_gate": self.after_gate + 1}


@dataclass(frozen=True)
class Slot:
    """A fragment-local register wire and the circuit wire segment it carries."""
    local: int
    wire: int
    segment: int


@dataclass(frozen=True)
class Fragment:
    id: int
    subcircuit: Circuit
    gate_ordinals: Tuple[int, ...]
    q_in: Tuple[Slot, ...]
    q_out: Tuple[Slot, ...]
    c_out: Tuple[Slot, ...]
    segments: Tuple[Tuple[int, int], ...] = field(repr=False, default=())

    @property
    def deg(self) -> int:
        return len(self.q_in) + len(self.q_out) + len(self.c_out)

    @property
    def qdeg(self) -> int:
        return len(self.q_in) + len(self.q_out)

    @property
    def output_wires(self) -> Tuple[int, ...]:
        return tuple(s.wire for s in self.c_out)


@dataclass(frozen=True)
class Edge:
    src: int
    src_slot: int  # index into src.q_out
    dst: int
    dst_slot: int  # index into dst.q_in
    wire: int

    def key(self) -> Tuple[int, int]:
        return (self.src, self.src_slot)


@dataclass(frozen=True)
class FragmentGraph:
    fragments: Tuple[Fragment, ...]
    edges: Tuple[Edge, ...]
    n_qubits: int
    acyclic: bool = True
    cuts: Tuple[CutSpec, ...] = ()

    def fragment(self, fid: int) -> Fragment:
        for f in self.fragments:
            if f.id == fid:
                return f
        raise KeyError(fid)

    @property
    def ids(self) -> Tuple[int, ...]:
        return tuple(f.id for f in self.fragments)

    def output_owner(self) -> Dict[int, int]:
        """Circuit wire -> id of the fragment holding its circuit output."""
        return {s.wire: f.id for f in self.fragments for s in f.c_out}

    def to_networkx(self) -> nx.MultiDiGraph:
        return _fragment_multigraph(self.ids, self.edges)


def _fragment_multigraph(fragment_ids: Iterable[int],
                         edges: Iterable[Edge]) -> nx.MultiDiGraph:
    """Fragments as nodes, one keyed edge per cut wire."""
    g = nx.MultiDiGraph()
    g.add_nodes_from(fragment_ids)
    for e in edges:
        g.add_edge(e.src, e.dst, key=e.key(), wire=e.wire)
    return g


@dataclass(frozen=True)
class Partition:
    graph: FragmentGraph
    support: Tuple[int, ...]
    kappa: FrozenSet[int]
    gamma: FrozenSet[int]
    delta: FrozenSet[int]
    e_delta: Tuple[Edge, ...]
    e_not_delta: Tuple[Edge, ...]
    e_not_delta_to_delta: Tuple[Edge, ...]

    @property
    def active(self) -> Tuple[int, ...]:
        """kappa and Gamma in fragment-id order."""
        return tuple(sorted(self.kappa | self.gamma))


def _segment_gates(circuit: Circuit, cuts: Sequence[CutSpec]
                   ) -> Dict[int, List[List[int]]]:
    """wire -> list of segments, each a list of gate ordinals."""
    by_wire = defaultdict(list)
    seen = set()
    for c in cuts:
        if not 0 <= c.wire < circuit.n_qubits:
            raise CutError(f"cut on wire {c.wire + 1} outside the circuit")
        if c in seen:
            raise CutError(f"duplicate cut on wire {c.wire + 1} after gate "
                           f"{c.after_gate + 1}")
        seen.add(c)
        by_wire[c.wire].append(c.after_gate)

    segments = {}
    for w in range(circuit.n_qubits):
        ordinals = circuit.wire_gates(w)
        splits = []
        for g in sorted(by_wire.get(w, ())):
            before = sum(1 for o in ordinals if o <= g)
            if before == 0 or before == len(ordinals):
                raise CutError(
                    f"cut on wire {w + 1} after gate {g + 1} separates "
                    f"nothing")
            if splits and splits[-1] == before:
                raise CutError(
                    f"duplicate cut on wire {w + 1}: no gate between cuts")
            splits.append(before)
        bounds = [0] + splits + [len(ordinals)]
        segments[w] = [
            ordinals[bounds[k]:bounds[k + 1]] for k in range(len(bounds) - 1)
        ]
    return segments


def _gate_components(n_gates: int,
                     segments: Mapping[int, List[List[int]]]
                     ) -> Dict[int, int]:
    """
    gate ordinal -> fragment id. Gates are chained along their segments;
    components are numbered by their smallest gate ordinal.
    """
    chain = nx.DiGraph()
    chain.add_nodes_from(range(n_gates))
    for segs in segments.values():
        for seg in segs:
            nx.add_path(chain, seg)
    components = sorted(nx.weakly_connected_components(chain), key=min)
    return {g: fid for fid, comp in enumerate(components) for g in comp}


def cut_circuit(circuit: Circuit,
                cuts: Sequence[CutSpec],
                allow_cycles: bool = False) -> FragmentGraph:
    segments = _segment_gates(circuit, cuts)
    gate_frag = _gate_components(len(circuit.gates), segments)

    # idle wires become their own fragments after the gate components
    seg_owner: Dict[Tuple[int, int], int] = {}
    next_id = len(set(gate_frag.values()))
    for w in range(circuit.n_qubits):
        for k, seg in enumerate(segments[w]):
            if seg:
                seg_owner[(w, k)] = gate_frag[seg[0]]
            else:
                seg_owner[(w, k)] = next_id
                next_id += 1

    frag_segments: Dict[int, List[Tuple[int, int]]] = defaultdict(list)
    for key in sorted(seg_owner):
        frag_segments[seg_owner[key]].append(key)
    gate_segment = {}
    for w, segs in segments.items():
        for k, seg in enumerate(segs):
            for g in seg:
                gate_segment[(g, w)] = k

    fragments = []
    for fid in range(next_id):
        segs = frag_segments[fid]
        local = {key: i for i, key in enumerate(segs)}
        ordinals = tuple(g for g in range(len(circuit.gates))
                         if gate_frag[g] == fid)
        gates = []
        for g in ordinals:
            gate = circuit.gates[g]
            gates.append(
                gate.on([local[(w, gate_segment[(g, w)])]
                         for w in gate.qubits]))
        q_in, q_out, c_out = [], [], []
        for (w, k), i in local.items():
            slot = Slot(i, w, k)
            if k > 0:
                q_in.append(slot)
            if k < len(segments[w]) - 1:
                q_out.append(slot)
            else:
                c_out.append(slot)
        fragments.append(
            Fragment(id=fid,
                     subcircuit=Circuit(len(segs), tuple(gates)),
                     gate_ordinals=ordinals,
                     q_in=tuple(q_in),
                     q_out=tuple(q_out),
                     c_out=tuple(c_out),
                     segments=tuple(segs)))

    edges = []
    for w in range(circuit.n_qubits):
        for k in range(len(segments[w]) - 1):
            src, dst = seg_owner[(w, k)], seg_owner[(w, k + 1)]
            if src == dst:
                raise CutError(
                    f"cut on wire {w + 1} joins fragment {src} to itself; "
                    f"self-loops are not supported")
            src_slot = next(i for i, s in enumerate(fragments[src].q_out)
                            if (s.wire, s.segment) == (w, k))
            dst_slot = next(i for i, s in enumerate(fragments[dst].q_in)
                            if (s.wire, s.segment) == (w, k + 1))
            edges.append(Edge(src, src_slot, dst, dst_slot, w))

    multigraph = _fragment_multigraph(range(len(fragments)), edges)
    cyclic = not nx.is_directed_acyclic_graph(multigraph)
    if cyclic and not allow_cycles:
        loop = [u for u, *_ in nx.find_cycle(multigraph)]
        raise CutError("cuts produce a cyclic fragment graph through "
                       "fragments " + " -> ".join(map(str, loop + loop[:1])))

    graph = FragmentGraph(tuple(fragments), tuple(edges), circuit.n_qubits,
                          acyclic=not cyclic, cuts=tuple(sorted(cuts)))
    check_stitching(graph, circuit)
    logger.debug("cut %d-qubit circuit into %d fragments with %d edges",
                 circuit.n_qubits, len(fragments), len(edges))
    return graph


def check_stitching(graph: FragmentGraph, circuit: Circuit):
    """
    Replay every fragment back onto circuit wires and compare with the
    original gate sequence.
    """
    replay = {}
    for f in graph.fragments:
        for g, gate in zip(f.gate_ordinals, f.subcircuit.gates):
            if g in replay:
                raise CutError(f"gate {g + 1} assigned twice")
            wires = tuple(f.segments[q][0] for q in gate.qubits)
            replay[g] = (wires, gate)
    if sorted(replay) != list(range(len(circuit.gates))):
        raise CutError("fragments do not cover every gate")
    for g, (wires, gate) in replay.items():
        if wires != circuit.gates[g].qubits:
            raise CutError(f"gate {g + 1} replays onto wires {wires}")
    for e in graph.edges:
        src = graph.fragment(e.src).q_out[e.src_slot]
        dst = graph.fragment(e.dst).q_in[e.dst_slot]
        if not (src.wire == dst.wire == e.wire
                and dst.segment == src.segment + 1):
            raise CutError(f"edge on wire {e.wire + 1} is not contiguous")


def partition_for_observable(graph: FragmentGraph,
                             observable_support: Iterable[int]) -> Partition:
    support = tuple(sorted(set(int(q) for q in observable_support)))
    owner = graph.output_owner()
    missing = [q for q in support if q not in owner]
    if missing:
        raise PartitionError(
            f"qubits {[q + 1 for q in missing]} are not circuit outputs")
    kappa = frozenset(owner[q] for q in support)

    multigraph = graph.to_networkx()
    ancestors = set().union(*(nx.ancestors(multigraph, f) for f in kappa))
    gamma = frozenset(ancestors - kappa)
    delta = frozenset(set(graph.ids) - kappa - gamma)

    e_delta, e_not_delta, e_to_delta = [], [], []
    for e in graph.edges:
        if e.src in delta and e.dst in delta:
            e_delta.append(e)
        elif e.src not in delta and e.dst not in delta:
            e_not_delta.append(e)
        elif e.dst in delta:
            e_to_delta.append(e)
        else:
            raise PartitionError(
                f"edge from Delta fragment {e.src} into fragment {e.dst}")
    return Partition(graph, support, kappa, gamma, delta, tuple(e_delta),
                     tuple(e_not_delta), tuple(e_to_delta))


def reduce(graph: FragmentGraph,
           partition: Partition) -> Tuple[FragmentGraph, List[Edge]]:
    """
    Drop the Delta fragments. Returns the surviving graph (fragment ids are
    kept) and the edges whose q_out end is pinned to the identity.
    """
    if partition.graph is not graph:
        raise PartitionError("partition was built for another graph")
    if not partition.delta:
        return graph, []
    keep = tuple(f for f in graph.fragments if f.id not in partition.delta)
    reduced = FragmentGraph(keep, partition.e_not_delta, graph.n_qubits,
                            acyclic=graph.acyclic, cuts=graph.cuts)
    return reduced, list(partition.e_not_delta_to_delta)


# -- JSON ------------------------------------------------------------------


def _slots_json(slots: Sequence[Slot]) -> list:
    return [{"local": s.local + 1, "wire": s.wire + 1,
             "segment": s.segment} for s in slots]


def graph_to_json(graph: FragmentGraph) -> dict:
    return {
        "n_qubits": graph.n_qubits,
        "acyclic": graph.acyclic,
        "cuts": [c.to_json() for c in graph.cuts],
        "fragments": [{
            "id": f.id,
            "gates": [g + 1 for g in f.gate_ordinals],
            "n_wires": f.subcircuit.n_qubits,
            "q_in": _slots_json(f.q_in),
            "q_out": _slots_json(f.q_out),
            "c_out": _slots_json(f.c_out),
            "deg": f.deg,
            "qdeg": f.qdeg,
        } for f in graph.fragments],
        "edges": [{
            "src": e.src,
            "src_slot": e.src_slot,
            "dst": e.dst,
            "dst_slot": e.dst_slot,
            "wire": e.wire + 1,
        } for e in graph.edges],
    }


def graph_from_json(data: Mapping, circuit: Circuit) -> FragmentGraph:
    """Rebuild an exported graph from its circuit and compare the tables."""
    cuts = [CutSpec.from_json(c) for c in data.get("cuts", ())]
    graph = cut_circuit(circuit, cuts, allow_cycles=True)
    if graph_to_json(graph) != dict(data):
        raise CutError("fragment graph does not match its circuit and cuts")
    return graph
