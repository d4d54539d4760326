"""
Sparse Pauli strings and observables.

A ``PauliString`` stores only its non-identity factors (qubit -> axis), so
weight and basis matching cost O(weight). Qubits are 0-based internally; the
text and JSON forms are 1-based ("0.5*X1 Z2").
"""
from __future__ import annotations

import itertools
import re
from functools import reduce
from typing import Dict, Iterable, Mapping, Sequence, Tuple, Union

import numpy as np
from django.conf import settings

from .errors import CircuitError, ShadowCutError, SizeLimitError

PAULI_EXPAND_MAX_QUBITS: int = getattr(settings,
                                       "SHADOWCUT_PAULI_EXPAND_MAX_QUBITS", 4)

AXES = "IXYZ"
AXIS_CODES: Dict[str, int] = {a: i for i, a in enumerate(AXES)}

PAULI_MATRICES: Dict[str, np.ndarray] = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_TOKEN_RE = re.compile(r"^([XYZI])(\d+)$")
# merged terms at or below this magnitude are dropped
ZERO_COEFF = 1e-15
_COEFF_RE = re.compile(r"^\s*([-+]?[0-9.eE+-]+)\s*\*\s*(.*)$")


class PauliString:
    """Tensor product of single-qubit Paulis with a real coefficient."""

    __slots__ = ("_ops", "coeff")

    def __init__(self, ops: Mapping[int, str] = None, coeff: float = 1.0):
        clean = {}
        for q, a in (ops or {}).items():
            q = int(q)
            a = str(a).upper()
            if a not in AXIS_CODES:
                raise ShadowCutError(f"unknown Pauli axis {a!r}")
            if q < 0:
                raise ShadowCutError(f"negative qubit index {q}")
            if a != "I":
                clean[q] = a
        self._ops: Tuple[Tuple[int, str], ...] = tuple(sorted(clean.items()))
        self.coeff = float(coeff)

    # -- views ---------------------------------------------------------------
    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(q for q, _ in self._ops)

    @property
    def pattern(self) -> Tuple[Tuple[int, str], ...]:
        """Support and axes without the coefficient."""
        return self._ops

    def items(self):
        return iter(self._ops)

    def as_dict(self) -> Dict[int, str]:
        return dict(self._ops)

    def axis(self, qubit: int) -> str:
        return dict(self._ops).get(qubit, "I")

    @property
    def weight(self) -> int:
        return len(self._ops)

    def is_identity(self) -> bool:
        return not self._ops

    # -- transforms ----------------------------------------------------------
    def with_coeff(self, coeff: float) -> "PauliString":
        return PauliString(dict(self._ops), coeff)

    def restricted(self, qubits: Iterable[int]) -> "PauliString":
        keep = set(qubits)
        return PauliString({q: a for q, a in self._ops if q in keep}, 1.0)

    def relabeled(self, mapping: Mapping[int, int]) -> "PauliString":
        return PauliString({mapping[q]: a for q, a in self._ops}, self.coeff)

    def to_matrix(self, n_qubits: int) -> np.ndarray:
        ops = self.as_dict()
        if ops and max(ops) >= n_qubits:
            raise CircuitError(
                f"Pauli string on qubit {max(ops)} wider than {n_qubits}")
        factors = [PAULI_MATRICES[ops.get(q, "I")] for q in range(n_qubits)]
        return self.coeff * reduce(np.kron, factors, np.eye(1, dtype=complex))

    # -- text ----------------------------------------------------------------
    @classmethod
    def parse(cls, text: str) -> "PauliString":
        text = (text or "").strip()
        coeff = 1.0
        m = _COEFF_RE.match(text)
        if m:
            coeff = float(m.group(1))
            text = m.group(2)
        ops = {}
        for token in text.split():
            if token.upper() == "I":
                continue
            tm = _TOKEN_RE.match(token.upper())
            if not tm:
                raise ShadowCutError(f"bad Pauli token {token!r}")
            q = int(tm.group(2)) - 1
            if q < 0:
                raise ShadowCutError("qubit indices in text are 1-based")
            if q in ops:
                raise ShadowCutError(f"qubit {q + 1} appears twice")
            ops[q] = tm.group(1)
        return cls(ops, coeff)

    def to_text(self) -> str:
        body = " ".join(f"{a}{q + 1}" for q, a in self._ops) or "I"
        return body if self.coeff == 1.0 else f"{self.coeff!r}*{body}"

    def __eq__(self, other):
        return (isinstance(other, PauliString) and self._ops == other._ops
                and self.coeff == other.coeff)

    def __hash__(self):
        return hash((self._ops, self.coeff))

    def __repr__(self):
        return f"PauliString({self.to_text()!r})"


class Observable:
    """Real linear combination of Pauli strings with merged patterns."""

    __slots__ = ("terms", )

    def __init__(self, terms: Iterable[PauliString]):
        merged: Dict[tuple, float] = {}
        for t in terms:
            merged[t.pattern] = merged.get(t.pattern, 0.0) + t.coeff
        self.terms: Tuple[PauliString, ...] = tuple(
            PauliString(dict(p), c) for p, c in merged.items()
            if abs(c) > ZERO_COEFF)

    @classmethod
    def from_pauli(cls, p: PauliString) -> "Observable":
        return cls([p])

    @classmethod
    def parse(cls, text: str) -> "Observable":
        parts = [s for s in re.split(r"\s+\+\s+", (text or "").strip()) if s]
        if not parts:
            raise ShadowCutError("empty observable")
        return cls(PauliString.parse(s) for s in parts)

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(sorted({q for t in self.terms for q in t.support}))

    def norm_bound(self) -> float:
        """Upper bound on the operator norm: sum of |alpha_P|."""
        return float(sum(abs(t.coeff) for t in self.terms))

    def to_text(self) -> str:
        return " + ".join(t.to_text() for t in self.terms)

    def to_matrix(self, n_qubits: int) -> np.ndarray:
        dim = 2**n_qubits
        out = np.zeros((dim, dim), dtype=complex)
        for t in self.terms:
            out += t.to_matrix(n_qubits)
        return out

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __repr__(self):
        return f"Observable({self.to_text()!r})"


def weight(p: PauliString) -> int:
    return p.weight


def transpose_sign(p: PauliString) -> float:
    """(-1)^(number of Y factors): X^T = X, Z^T = Z, Y^T = -Y."""
    n_y = sum(1 for _, a in p.items() if a == "Y")
    return -1.0 if n_y % 2 else 1.0


def matches(p: PauliString, basis: Union[str, Sequence]) -> bool:
    """True iff ``basis`` measures every qubit of ``p`` in p's own axis."""
    for q, a in p.items():
        if q >= len(basis):
            return False
        b = basis[q]
        if not isinstance(b, str):
            b = AXES[int(b)]
        if b != a:
            return False
    return True


def pauli_expand(op: np.ndarray, qubits: int, atol: float = 1e-10
                 ) -> Observable:
    """alpha_P = tr(P op) / 2^q over all 4^q Pauli strings."""
    if qubits > PAULI_EXPAND_MAX_QUBITS:
        raise SizeLimitError(
            f"Pauli expansion limited to {PAULI_EXPAND_MAX_QUBITS} qubits")
    op = np.asarray(op, dtype=complex)
    dim = 2**qubits
    if op.shape != (dim, dim):
        raise CircuitError(f"operator shape {op.shape} is not {dim}x{dim}")
    terms = []
    for letters in itertools.product(AXES, repeat=qubits):
        p = PauliString(dict(enumerate(letters)))
        alpha = np.trace(p.to_matrix(qubits) @ op) / dim
        if abs(alpha.imag) > atol:
            raise ShadowCutError(
                f"operator is not Hermitian: coefficient of {p.to_text()} "
                f"has imaginary part {alpha.imag:.3g}")
        if abs(alpha.real) > 1e-14:
            terms.append(p.with_coeff(alpha.real))
    return Observable(terms)
