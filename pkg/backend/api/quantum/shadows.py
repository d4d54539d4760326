"""
Classical shadows of circuits and of fragment Choi states.

An ensemble stores, per shot, the random basis of every register qubit
(axis codes 1..3 for X, Y, Z) and the +/-1 outcomes. Estimation uses the
matched average: average the outcome product over shots whose bases agree
with the target Pauli on its support, and return 0 when no shot matched.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, NamedTuple, Optional, Tuple, Union

import numpy as np

from .cutter import Fragment
from .errors import EstimationError, ShadowCutError
from .pauli import AXES, AXIS_CODES, PauliString
from .rng import SeedLike, make_rng
from .simulator import (Circuit, Gate, Statevector, apply_gate,
                        sample_random_bases)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChoiRegisterLayout:
    """Register order [ancilla per q_in | q_out | c_out]."""
    ancilla_slots: Tuple[int, ...]
    q_out_slots: Tuple[int, ...]
    c_out_slots: Tuple[int, ...]
    c_out_wires: Tuple[int, ...] = ()

    def __post_init__(self):
        slots = self.ancilla_slots + self.q_out_slots + self.c_out_slots
        if sorted(slots) != list(range(len(slots))):
            raise ShadowCutError("layout slots must be disjoint and cover "
                                 "the register")

    @classmethod
    def for_fragment(cls, fragment: Fragment) -> "ChoiRegisterLayout":
        qi, qo, co = (len(fragment.q_in), len(fragment.q_out),
                      len(fragment.c_out))
        return cls(tuple(range(qi)), tuple(range(qi, qi + qo)),
                   tuple(range(qi + qo, qi + qo + co)),
                   fragment.output_wires)

    @property
    def size(self) -> int:
        return (len(self.ancilla_slots) + len(self.q_out_slots) +
                len(self.c_out_slots))

    def to_json(self) -> dict:
        return {
            "ancilla": list(self.ancilla_slots),
            "q_out": list(self.q_out_slots),
            "c_out": list(self.c_out_slots),
            "c_out_wires": [w + 1 for w in self.c_out_wires],
        }

    @classmethod
    def from_json(cls, data) -> "ChoiRegisterLayout":
        return cls(tuple(data["ancilla"]), tuple(data["q_out"]),
                   tuple(data["c_out"]),
                   tuple(w - 1 for w in data.get("c_out_wires", ())))


@dataclass(frozen=True, eq=False)
class ShadowEnsemble:
    register_size: int
    bases: np.ndarray = field(repr=False)
    outcomes: np.ndarray = field(repr=False)
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        bases = np.asarray(self.bases, dtype=np.int8).reshape(
            -1, self.register_size)
        outcomes = np.asarray(self.outcomes, dtype=np.int8).reshape(
            -1, self.register_size)
        if bases.shape != outcomes.shape:
            raise ShadowCutError(
                f"{bases.shape[0]} bases for {outcomes.shape[0]} outcomes")
        if bases.size and (bases.min() < 1 or bases.max() > 3):
            raise ShadowCutError("bases must be X, Y or Z")
        if outcomes.size and not np.all(np.abs(outcomes) == 1):
            raise ShadowCutError("outcomes must be +1 or -1")
        bases.flags.writeable = False
        outcomes.flags.writeable = False
        object.__setattr__(self, "bases", bases)
        object.__setattr__(self, "outcomes", outcomes)

    def __len__(self):
        return self.bases.shape[0]

    @property
    def samples(self) -> Iterator[Tuple[str, Tuple[int, ...]]]:
        for b, m in zip(self.bases, self.outcomes):
            yield "".join(AXES[c] for c in b), tuple(int(x) for x in m)

    @classmethod
    def from_samples(cls, samples, provenance=None) -> "ShadowEnsemble":
        samples = list(samples)
        if not samples:
            raise ShadowCutError("cannot infer register size from no samples")
        n = len(samples[0][0])
        bases = [[AXIS_CODES[a] for a in b] for b, _ in samples]
        outcomes = [list(m) for _, m in samples]
        if any(len(b) != n for b in bases) or any(
                len(m) != n for m in outcomes):
            raise ShadowCutError("samples have mixed register sizes")
        return cls(n, np.array(bases), np.array(outcomes), provenance or {})


class Estimate(NamedTuple):
    value: float
    n_matched: int


def _provenance_seed(seed: SeedLike) -> Optional[int]:
    return int(seed) if isinstance(seed, (int, np.integer)) else None


def collect_state_shadow(circuit: Circuit, shots: int,
                         seed: SeedLike) -> ShadowEnsemble:
    shots = int(shots)
    if shots < 0:
        raise ShadowCutError("shots must be non-negative")
    provenance = {"source": "circuit", "circuit": circuit.digest(),
                  "seed": _provenance_seed(seed)}
    if shots == 0:
        empty = np.empty((0, circuit.n_qubits), dtype=np.int8)
        return ShadowEnsemble(circuit.n_qubits, empty, empty, provenance)
    bases, outcomes = sample_random_bases(circuit.statevector(), shots,
                                          make_rng(seed))
    return ShadowEnsemble(circuit.n_qubits, bases, outcomes, provenance)


def choi_statevector(fragment: Fragment) -> Statevector:
    """
    Pure Choi state of a fragment, one ancilla per quantum input, in the
    layout order [ancillas | q_out | c_out].
    """
    qi = len(fragment.q_in)
    n_wires = fragment.subcircuit.n_qubits
    state = Statevector.zero(qi + n_wires)
    h = Gate.named("h", [0]).matrix
    cnot = Gate.named("cnot", [0, 1]).matrix
    for a, slot in enumerate(fragment.q_in):
        state = apply_gate(state, h, [a])
        state = apply_gate(state, cnot, [a, qi + slot.local])
    for gate in fragment.subcircuit.gates:
        state = apply_gate(state, gate.matrix, [qi + q for q in gate.qubits])
    order = (list(range(qi)) + [qi + s.local for s in fragment.q_out] +
             [qi + s.local for s in fragment.c_out])
    return Statevector(np.transpose(state.tensor(), order).reshape(-1))


def collect_choi_shadow(fragment: Fragment, shots: int, seed: SeedLike
                        ) -> Tuple[ShadowEnsemble, ChoiRegisterLayout]:
    shots = int(shots)
    if shots < 0:
        raise ShadowCutError("shots must be non-negative")
    layout = ChoiRegisterLayout.for_fragment(fragment)
    provenance = {"source": "fragment", "fragment": fragment.id,
                  "circuit": fragment.subcircuit.digest(),
                  "seed": _provenance_seed(seed)}
    if shots == 0:
        empty = np.empty((0, layout.size), dtype=np.int8)
        return ShadowEnsemble(layout.size, empty, empty, provenance), layout
    state = choi_statevector(fragment)
    bases, outcomes = sample_random_bases(state, shots, make_rng(seed))
    logger.debug("fragment %d: %d Choi shots on %d qubits", fragment.id,
                 shots, layout.size)
    return ShadowEnsemble(layout.size, bases, outcomes, provenance), layout


def _matched_products(ensemble: ShadowEnsemble,
                      p: PauliString) -> np.ndarray:
    support = list(p.support)
    if support and support[-1] >= ensemble.register_size:
        raise EstimationError(
            f"Pauli on qubit {support[-1] + 1} outside a register of "
            f"{ensemble.register_size}")
    codes = np.array([AXIS_CODES[a] for _, a in p.items()], dtype=np.int8)
    mask = np.all(ensemble.bases[:, support] == codes, axis=1)
    return np.prod(ensemble.outcomes[mask][:, support], axis=1,
                   dtype=np.int64)


def estimate(ensemble: ShadowEnsemble, p: PauliString) -> Estimate:
    if p.is_identity():
        return Estimate(p.coeff, len(ensemble))
    products = _matched_products(ensemble, p)
    if products.size == 0:
        return Estimate(0.0, 0)
    return Estimate(p.coeff * float(products.mean()), int(products.size))


def estimate_mom(ensemble: ShadowEnsemble, p: PauliString,
                 groups: int) -> float:
    """Median over contiguous groups of the matched-average estimate."""
    groups = int(groups)
    if groups < 1:
        raise EstimationError("groups must be at least 1")
    if groups > len(ensemble):
        raise EstimationError(
            f"{groups} groups for {len(ensemble)} samples")
    if groups == 1:
        return estimate(ensemble, p).value
    means = []
    for idx in np.array_split(np.arange(len(ensemble)), groups):
        part = ShadowEnsemble(ensemble.register_size, ensemble.bases[idx],
                              ensemble.outcomes[idx])
        means.append(estimate(part, p).value)
    return float(np.median(means))


def unobserved_probability(weight: int, shots: int) -> float:
    """Chance that uniform Pauli bases never match a weight-w string."""
    if weight < 1:
        raise ShadowCutError("weight must be at least 1")
    if shots < 0:
        raise ShadowCutError("shots must be non-negative")
    return float((1 - 3.0**(-weight))**shots)


# -- shadow files ------------------------------------------------------------


def write_shadow_file(path: Union[str, Path], ensemble: ShadowEnsemble,
                      layout: Optional[ChoiRegisterLayout] = None) -> Path:
    """JSON lines: one header record, then {"b": "XZY", "m": [1, -1, 1]}."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = {
        "register_size": ensemble.register_size,
        "shots": len(ensemble),
        "provenance": ensemble.provenance,
        "layout": layout.to_json() if layout else None,
    }
    with path.open("w", encoding="utf-8") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for b, m in ensemble.samples:
            fh.write(json.dumps({"b": b, "m": list(m)}) + "\n")
    logger.info("wrote %d shadow records to %s", len(ensemble), path)
    return path


def read_shadow_file(path: Union[str, Path]
                     ) -> Tuple[ShadowEnsemble, Optional[ChoiRegisterLayout]]:
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        try:
            header = json.loads(fh.readline())
            records = [json.loads(line) for line in fh if line.strip()]
        except json.JSONDecodeError as exc:
            raise ShadowCutError(f"{path}: not a shadow file ({exc})") from exc
    n = int(header["register_size"])
    try:
        bases = np.array([[AXIS_CODES[a] for a in r["b"]] for r in records],
                         dtype=np.int8).reshape(-1, n)
        outcomes = np.array([r["m"] for r in records],
                            dtype=np.int8).reshape(-1, n)
    except (KeyError, ValueError) as exc:
        raise ShadowCutError(f"{path}: malformed record ({exc})") from exc
    layout = header.get("layout")
    return (ShadowEnsemble(n, bases, outcomes, header.get("provenance", {})),
            ChoiRegisterLayout.from_json(layout) if layout else None)
