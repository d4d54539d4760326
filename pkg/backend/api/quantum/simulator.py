"""
Dense statevector and density-matrix simulation for desk-scale circuits.

Wire 0 is the most significant qubit: amplitudes reshape to ``(2,) * n``
with axis ``q`` belonging to wire ``q``. Measurement outcomes are encoded as
+1 for |0> and -1 for |1>.
"""
from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Sequence, Tuple, Union

import numpy as np
from django.conf import settings

from .errors import CircuitError, SizeLimitError
from .pauli import AXIS_CODES, Observable, PauliString, PAULI_MATRICES
from .rng import SeedLike, make_rng

logger = logging.getLogger(__name__)

STATEVECTOR_MAX_QUBITS: int = getattr(settings,
                                      "SHADOWCUT_STATEVECTOR_MAX_QUBITS", 14)
DENSITY_MAX_QUBITS: int = getattr(settings, "SHADOWCUT_DENSITY_MAX_QUBITS",
                                  8)
SHOT_BATCH: int = getattr(settings, "SHADOWCUT_SHOT_BATCH", 2048)

UNITARY_ATOL = 1e-10
HAAR_MAX_QUBITS = 4

_SQ2 = 1 / np.sqrt(2)

NAMED_GATES: Dict[str, np.ndarray] = {
    "i": np.eye(2, dtype=complex),
    "x": PAULI_MATRICES["X"],
    "y": PAULI_MATRICES["Y"],
    "z": PAULI_MATRICES["Z"],
    "h": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "s": np.diag([1, 1j]).astype(complex),
    "sdg": np.diag([1, -1j]).astype(complex),
    "t": np.diag([1, np.exp(1j * np.pi / 4)]).astype(complex),
    "cnot": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
        dtype=complex),
    "cz": np.diag([1, 1, 1, -1]).astype(complex),
    "swap": np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]],
        dtype=complex),
}
NAMED_GATES["cx"] = NAMED_GATES["cnot"]

# rotation taking the axis eigenbasis to the computational basis
BASIS_ROTATIONS = np.stack([
    np.eye(2, dtype=complex),  # I (never sampled)
    NAMED_GATES["h"],  # X
    NAMED_GATES["h"] @ NAMED_GATES["sdg"],  # Y
    np.eye(2, dtype=complex),  # Z
])


def is_unitary(matrix: np.ndarray, atol: float = UNITARY_ATOL) -> bool:
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(
        np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) <= atol)


def haar_random_unitary(n_qubits: int, seed: SeedLike) -> np.ndarray:
    """Haar-distributed unitary via complex Ginibre + QR with phase fix."""
    if not 1 <= n_qubits <= HAAR_MAX_QUBITS:
        raise SizeLimitError(
            f"Haar gates support 1..{HAAR_MAX_QUBITS} qubits, got {n_qubits}")
    rng = make_rng(seed)
    dim = 2**n_qubits
    z = (rng.normal(size=(dim, dim)) +
         1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


@dataclass(frozen=True, eq=False)
class Gate:
    qubits: Tuple[int, ...]
    matrix: np.ndarray = field(repr=False)
    kind: str = "matrix"
    name: Optional[str] = None
    seed: Optional[int] = None

    def __post_init__(self):
        qubits = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qubits)
        if len(set(qubits)) != len(qubits):
            raise CircuitError(f"duplicate wires in gate: {qubits}")
        m = np.array(self.matrix, dtype=complex)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        if m.shape != (2**len(qubits), 2**len(qubits)):
            raise CircuitError(
                f"gate of shape {m.shape} cannot act on {len(qubits)} wires")
        if not is_unitary(m):
            raise CircuitError(f"gate on {qubits} is not unitary")

    @classmethod
    def named(cls, name: str, qubits: Sequence[int]) -> "Gate":
        key = name.lower()
        if key not in NAMED_GATES:
            raise CircuitError(f"unknown gate name: {name!r}")
        return cls(tuple(qubits), NAMED_GATES[key], kind="named", name=key)

    @classmethod
    def haar(cls, qubits: Sequence[int], seed: int) -> "Gate":
        return cls(tuple(qubits),
                   haar_random_unitary(len(qubits), seed),
                   kind="haar",
                   seed=int(seed))

    def on(self, qubits: Sequence[int]) -> "Gate":
        """Same operation relabelled onto other wires."""
        return Gate(tuple(qubits), self.matrix, self.kind, self.name,
                    self.seed)


@dataclass(frozen=True, eq=False)
class Circuit:
    n_qubits: int
    gates: Tuple[Gate, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.n_qubits < 1:
            raise CircuitError("a circuit needs at least one wire")
        for i, g in enumerate(self.gates):
            if any(q < 0 or q >= self.n_qubits for q in g.qubits):
                raise CircuitError(
                    f"gate {i} touches wires {g.qubits} outside "
                    f"0..{self.n_qubits - 1}")

    def wire_gates(self, wire: int) -> list:
        return [i for i, g in enumerate(self.gates) if wire in g.qubits]

    def statevector(self) -> "Statevector":
        state = Statevector.zero(self.n_qubits)
        for g in self.gates:
            state = apply_gate(state, g.matrix, g.qubits)
        return state

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(str(self.n_qubits).encode())
        for g in self.gates:
            h.update(repr(g.qubits).encode())
            h.update(np.ascontiguousarray(g.matrix).tobytes())
        return h.hexdigest()[:16]


def _check_statevector_size(n: int):
    if n > STATEVECTOR_MAX_QUBITS:
        raise SizeLimitError(
            f"{n} qubits exceeds the statevector limit of "
            f"{STATEVECTOR_MAX_QUBITS}")


class Statevector:
    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, amplitudes: Iterable[complex], normalize_atol=1e-10):
        amps = np.array(amplitudes, dtype=complex).reshape(-1)
        dim = amps.size
        if dim == 0 or dim & (dim - 1):
            raise CircuitError(
                f"statevector length must be a power of two, got {dim}")
        n = dim.bit_length() - 1
        _check_statevector_size(n)
        norm = np.linalg.norm(amps)
        if abs(norm - 1) > normalize_atol:
            raise CircuitError(f"statevector norm is {norm}, expected 1")
        amps.flags.writeable = False
        self.n_qubits = n
        self.amplitudes = amps

    @classmethod
    def zero(cls, n_qubits: int) -> "Statevector":
        _check_statevector_size(n_qubits)
        amps = np.zeros(2**n_qubits, dtype=complex)
        amps[0] = 1
        return cls(amps)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2, ) * self.n_qubits)

    def density_matrix(self) -> "DensityMatrix":
        a = self.amplitudes
        return DensityMatrix(np.outer(a, a.conj()))

    def __repr__(self):
        return f"Statevector(n_qubits={self.n_qubits})"


class DensityMatrix:
    __slots__ = ("n_qubits", "matrix")

    def __init__(self, matrix: np.ndarray, trace: float = 1.0,
                 atol: float = 1e-10):
        m = np.array(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise CircuitError(f"density matrix must be square, got {m.shape}")
        dim = m.shape[0]
        if dim & (dim - 1):
            raise CircuitError(f"dimension {dim} is not a power of two")
        n = dim.bit_length() - 1
        if n > DENSITY_MAX_QUBITS:
            raise SizeLimitError(
                f"{n} qubits exceeds the density-matrix limit of "
                f"{DENSITY_MAX_QUBITS}")
        if np.max(np.abs(m - m.conj().T)) > atol:
            raise CircuitError("density matrix is not Hermitian")
        if abs(np.trace(m).real - trace) > atol:
            raise CircuitError(
                f"density matrix trace {np.trace(m).real} != {trace}")
        m.flags.writeable = False
        self.n_qubits = n
        self.matrix = m

    def __repr__(self):
        return f"DensityMatrix(n_qubits={self.n_qubits})"


def _apply_to_axes(tensor: np.ndarray, matrix: np.ndarray,
                   axes: Sequence[int]) -> np.ndarray:
    """Contract ``matrix`` (2^k x 2^k) into the given tensor axes."""
    k = len(axes)
    u = np.asarray(matrix).reshape((2, ) * (2 * k))
    out = np.tensordot(u, tensor, axes=(list(range(k, 2 * k)), list(axes)))
    return np.moveaxis(out, list(range(k)), list(axes))


def apply_gate(state: Statevector, gate: np.ndarray,
               wires: Sequence[int]) -> Statevector:
    wires = [int(w) for w in wires]
    if len(set(wires)) != len(wires):
        raise CircuitError(f"duplicate wires: {wires}")
    if any(w < 0 or w >= state.n_qubits for w in wires):
        raise CircuitError(
            f"wires {wires} outside register of {state.n_qubits}")
    gate = np.asarray(gate, dtype=complex)
    if gate.shape != (2**len(wires), 2**len(wires)):
        raise CircuitError(
            f"gate of shape {gate.shape} does not match {len(wires)} wires")
    out = _apply_to_axes(state.tensor(), gate, wires)
    return Statevector(out.reshape(-1))


def _pauli_image(tensor: np.ndarray, p: PauliString) -> np.ndarray:
    out = tensor
    for q, axis in p.items():
        out = _apply_to_axes(out, PAULI_MATRICES[axis], [q])
    return out


def _as_terms(observable: Union[PauliString, Observable]):
    if isinstance(observable, PauliString):
        return (observable, )
    return observable.terms


def _check_support(observable, n_qubits: int):
    for term in _as_terms(observable):
        if term.support and max(term.support) >= n_qubits:
            raise CircuitError(
                f"observable touches qubit {max(term.support)} outside "
                f"register of {n_qubits}")


def exact_expectation(state: Statevector,
                      observable: Union[PauliString, Observable]) -> float:
    _check_support(observable, state.n_qubits)
    psi = state.tensor()
    total = 0.0
    for term in _as_terms(observable):
        image = _pauli_image(psi, term)
        total += term.coeff * np.vdot(psi, image).real
    return float(total)


def density_expectation(rho: DensityMatrix,
                        observable: Union[PauliString, Observable]) -> float:
    """tr(O rho) for a dense density matrix."""
    _check_support(observable, rho.n_qubits)
    n = rho.n_qubits
    tensor = rho.matrix.reshape((2, ) * n + (2**n, ))
    total = 0.0
    for term in _as_terms(observable):
        image = _pauli_image(tensor, term).reshape(2**n, 2**n)
        total += term.coeff * np.trace(image).real
    return float(total)


def _parse_bases(bases: Union[str, Sequence[str]]) -> np.ndarray:
    try:
        codes = [AXIS_CODES[b] for b in bases]
    except KeyError as exc:
        raise CircuitError(f"basis letters must be X, Y or Z: {exc}") from None
    if 0 in codes:
        raise CircuitError("identity is not a measurement basis")
    return np.array(codes, dtype=np.int8)


def _bits_to_outcomes(indices: np.ndarray, n: int) -> np.ndarray:
    shifts = np.arange(n - 1, -1, -1)
    bits = (indices[:, None] >> shifts[None, :]) & 1
    return (1 - 2 * bits).astype(np.int8)


def _draw(probs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One index per row of ``probs`` (rows are distributions)."""
    cdf = np.cumsum(probs, axis=-1)
    cdf /= cdf[..., -1:]
    u = rng.random(cdf.shape[:-1])
    idx = (cdf < u[..., None]).sum(axis=-1)
    return np.minimum(idx, cdf.shape[-1] - 1)


def sample_in_bases(state: Statevector, bases: Union[str, Sequence[str]],
                    shots: int, seed: SeedLike) -> np.ndarray:
    """``shots`` outcomes (rows of +/-1) measuring every qubit in ``bases``."""
    codes = _parse_bases(bases)
    n = state.n_qubits
    if codes.size != n:
        raise CircuitError(
            f"basis string of length {codes.size} for {n} qubits")
    rng = make_rng(seed)
    psi = state.tensor()
    for q, c in enumerate(codes):
        psi = _apply_to_axes(psi, BASIS_ROTATIONS[c], [q])
    probs = np.abs(psi.reshape(-1))**2
    idx = rng.choice(probs.size, size=int(shots), p=probs / probs.sum())
    return _bits_to_outcomes(idx, n)


def sample_random_bases(state: Statevector, shots: int,
                        seed: SeedLike) -> Tuple[np.ndarray, np.ndarray]:
    """
    Per shot, draw every qubit's basis uniformly from {X,Y,Z}, rotate and
    sample the computational basis.

    Returns ``(bases, outcomes)``, both int8 arrays of shape (shots, n):
    bases hold axis codes 1..3, outcomes hold +/-1.
    """
    rng = make_rng(seed)
    n = state.n_qubits
    shots = int(shots)
    bases = rng.integers(1, 4, size=(shots, n), dtype=np.int8)
    outcomes = np.empty((shots, n), dtype=np.int8)
    psi = state.tensor()
    batch = max(1, min(SHOT_BATCH, (1 << 21) >> n))
    for start in range(0, shots, batch):
        block = bases[start:start + batch]
        b = block.shape[0]
        t = np.broadcast_to(psi, (b, ) + psi.shape)
        for q in range(n):
            rot = BASIS_ROTATIONS[block[:, q]]  # (b, 2, 2)
            t = np.moveaxis(t, q + 1, -1)
            t = np.einsum("bij,b...j->b...i", rot, t)
            t = np.moveaxis(t, -1, q + 1)
        probs = np.abs(t.reshape(b, -1))**2
        outcomes[start:start + b] = _bits_to_outcomes(_draw(probs, rng), n)
    logger.debug("sampled %d shots on %d qubits", shots, n)
    return bases, outcomes
