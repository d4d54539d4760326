"""
Sample-complexity quotes for fragmented shadow tomography and Monte Carlo
checks of how per-fragment errors propagate through products and sums.

Logarithms are natural. Quotes are advisory numbers; nothing enforces them
as minimum shot counts.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .cutter import Fragment, FragmentGraph, Partition
from .errors import PartitionError, ShadowCutError
from .rng import SeedLike, make_rng

LOG_BASE = "e"
MIN_MONTE_CARLO_TRIALS = 10_000


@dataclass(frozen=True)
class ComplexityQuote:
    fragment: int
    k: float
    k_proof: float
    n: float
    total_shots: float
    epsilon: float
    delta: float
    n_fragments: int
    n_edges: int
    k_size: int
    n_kappa_gamma: int
    deg: int
    qdeg: int
    o_norm: float

    def to_json(self) -> dict:
        out = asdict(self)
        out["log_base"] = LOG_BASE
        return out


def _check_unit_interval(name: str, value: float):
    if not 0 < value < 1:
        raise ShadowCutError(f"{name} must lie in (0, 1), got {value}")


def quote(*, qdeg: int, deg: int, n_fragments: int, n_edges: int,
          k_size: int, n_kappa_gamma: int, epsilon: float, delta: float,
          o_norm: float, fragment: int = -1) -> ComplexityQuote:
    """
    K = 2^(qdeg+1) ln(2|F|/delta) groups of
    N = 34 (|E| + |K|) (|kappa| + |Gamma|) / eps^2 * 4^deg * |O|^2 shots.
    The proof-form K = 2 ln(2|F| 4^qdeg / delta) is reported alongside.
    """
    _check_unit_interval("epsilon", epsilon)
    _check_unit_interval("delta", delta)
    if o_norm <= 0:
        raise ShadowCutError("observable norm must be positive")
    k = 2**(qdeg + 1) * math.log(2 * n_fragments / delta)
    k_proof = 2 * math.log(2 * n_fragments * 4**qdeg / delta)
    n = (34 * (n_edges + k_size) * n_kappa_gamma / epsilon**2 * 4**deg *
         o_norm**2)
    return ComplexityQuote(fragment, k, k_proof, n, n * k, epsilon, delta,
                           n_fragments, n_edges, k_size, n_kappa_gamma, deg,
                           qdeg, o_norm)


def theorem2_quote(graph: FragmentGraph, partition: Partition,
                   fragment: Fragment, epsilon: float, delta: float,
                   o_norm: float, k_size: int) -> ComplexityQuote:
    if fragment.id not in partition.kappa | partition.gamma:
        raise PartitionError(
            f"fragment {fragment.id} is not upstream of the observable")
    return quote(qdeg=fragment.qdeg,
                 deg=fragment.deg,
                 n_fragments=len(graph.fragments),
                 n_edges=len(graph.edges),
                 k_size=k_size,
                 n_kappa_gamma=len(partition.kappa) + len(partition.gamma),
                 epsilon=epsilon,
                 delta=delta,
                 o_norm=o_norm,
                 fragment=fragment.id)


def quotes_for_partition(partition: Partition, epsilon: float, delta: float,
                         o_norm: float, k_size: int) -> list:
    graph = partition.graph
    return [
        theorem2_quote(graph, partition, graph.fragment(f), epsilon, delta,
                       o_norm, k_size) for f in partition.active
    ]


def lemma2_product_std(values: Sequence[float], epsilon: float,
                       exact: bool = False) -> float:
    """
    Standard deviation of prod(a_i + e_i) with independent e_i of std eps.
    Leading order is sqrt(n) eps; ``exact`` gives
    sqrt(prod(eps^2 + a_i^2) - prod(a_i^2)).
    """
    a = np.asarray(values, dtype=float)
    if not exact:
        return float(math.sqrt(a.size) * epsilon)
    return float(
        math.sqrt(np.prod(epsilon**2 + a**2) - np.prod(a**2)))


def lemma2_monte_carlo(n: int,
                       epsilon: float,
                       trials: int,
                       seed: SeedLike,
                       branch: str = "product") -> float:
    """Empirical std of the product (or sum) of n perturbed unit values."""
    if trials < MIN_MONTE_CARLO_TRIALS:
        raise ShadowCutError(
            f"at least {MIN_MONTE_CARLO_TRIALS} trials are needed")
    rng = make_rng(seed)
    noise = rng.normal(0.0, epsilon, size=(int(trials), int(n)))
    if branch == "product":
        samples = np.prod(1.0 + noise, axis=1) - 1.0
    elif branch == "sum":
        samples = noise.sum(axis=1)
    else:
        raise ShadowCutError(f"unknown branch {branch!r}")
    return float(samples.std(ddof=1))
