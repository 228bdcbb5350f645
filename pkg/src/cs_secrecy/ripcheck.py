"""Structural audits of a measurement matrix: isometry constants, spark,
and projection uniqueness over finite message sets."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, islice
from math import comb, inf

import numpy as np

from .codec import SparseMessage
from .errors import BudgetError, DimensionError, DomainError
from .keymatrix import MeasurementMatrix

ENUMERATION_BUDGET = 10_000_000
RANK_TOL = 1e-10
COLLISION_TOL = 1e-9
_CHUNK = 4096


@dataclass(frozen=True)
class RipReport:
    """Isometry constant of one order, with the support that attains it."""

    k: int
    epsilon_k: float
    satisfied: bool
    supports_checked: int
    extremal_support: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "epsilon_k": self.epsilon_k,
            "satisfied": self.satisfied,
            "supports_checked": self.supports_checked,
            "extremal_support": list(self.extremal_support),
        }


@dataclass(frozen=True)
class SparkReport:
    """Smallest dependent column count; witness is a minimal dependent set."""

    spark: int
    witness: tuple[int, ...] | None

    def to_dict(self) -> dict:
        return {
            "spark": self.spark,
            "witness": None if self.witness is None else list(self.witness),
        }


@dataclass(frozen=True)
class ProjectionReport:
    injective: bool
    min_pairwise_distance: float
    colliding_pair: tuple[int, int] | None

    def to_dict(self) -> dict:
        return {
            "injective": self.injective,
            "min_pairwise_distance": self.min_pairwise_distance,
            "colliding_pair": None if self.colliding_pair is None else list(self.colliding_pair),
        }


def _support_chunks(n: int, size: int, chunk: int = _CHUNK):
    """Lexicographic size-`size` supports as index arrays of at most `chunk` rows."""
    it = combinations(range(n), size)
    while True:
        block = list(islice(it, chunk))
        if not block:
            return
        yield np.array(block, dtype=np.intp)


def _stacked_singular_values(entries: np.ndarray, idx: np.ndarray) -> np.ndarray:
    sub = np.moveaxis(entries[:, idx], 1, 0)  # (batch, m, size)
    return np.linalg.svd(sub, compute_uv=False)


def rip_constant(a: MeasurementMatrix, k: int, budget: int = ENUMERATION_BUDGET) -> RipReport:
    """Exact order-k isometry constant by full support enumeration.

    For every size-k column subset S the extreme singular values of A_S give
    the tightest band (1 - eps) ||x|| <= ||A_S x|| <= (1 + eps) ||x|| over
    vectors supported on S; epsilon_k is the worst such band constant
    (non-squared convention), and the reported extremal support is the
    lexicographically smallest one attaining it.
    """
    if not 1 <= k <= a.m:
        raise DomainError(f"order must satisfy 1 <= k <= m={a.m}, got {k}")
    total = comb(a.n, k)
    if total > budget:
        raise BudgetError(f"order {k} needs {total} subsets, budget is {budget}")

    best_eps = -inf
    best_support: tuple[int, ...] = ()
    for idx in _support_chunks(a.n, k):
        sv = _stacked_singular_values(a.entries, idx)
        eps = np.maximum(1.0 - sv[:, -1], sv[:, 0] - 1.0)
        pos = int(np.argmax(eps))
        if eps[pos] > best_eps:
            best_eps = float(eps[pos])
            best_support = tuple(int(v) for v in idx[pos])
    return RipReport(
        k=k,
        epsilon_k=best_eps,
        satisfied=best_eps < 1.0,
        supports_checked=total,
        extremal_support=best_support,
    )


def _dependent_hits(entries: np.ndarray, idx: np.ndarray, size: int) -> np.ndarray:
    sv = _stacked_singular_values(entries, idx)
    ranks = (sv > RANK_TOL * sv[:, :1]).sum(axis=1)
    return np.flatnonzero(ranks < size)


def spark(a: MeasurementMatrix, budget: int = ENUMERATION_BUDGET) -> SparkReport:
    """Smallest number of linearly dependent columns (sentinel n+1 if none).

    Subset sizes are scanned in increasing order, so the witness is minimal:
    every proper subset of it is independent.  In the compressive regime
    (n > m) any m+1 columns are dependent, so the scan never goes further.
    """
    limit = min(a.m + 1, a.n)
    examined = 0
    for size in range(1, limit + 1):
        for idx in _support_chunks(a.n, size):
            examined += len(idx)
            if examined > budget:
                raise BudgetError(f"spark enumeration exceeded the budget of {budget}")
            hits = _dependent_hits(a.entries, idx, size)
            if hits.size:
                witness = tuple(int(v) for v in idx[hits[0]])
                return SparkReport(spark=size, witness=witness)
    return SparkReport(spark=a.n + 1, witness=None)


def spark_exceeds(a: MeasurementMatrix, order: int, budget: int = ENUMERATION_BUDGET) -> bool:
    """Decide spark(A) > order by enumerating only size-`order` subsets.

    A dependent set of any smaller size extends to a dependent set of size
    `order`, so full rank of every size-`order` submatrix is equivalent to
    spark > order.  This is the cheap check behind the "spark > 2k" premise.
    """
    if order < 1:
        raise DomainError(f"order must be at least 1, got {order}")
    if order > a.n or order > a.m:
        return False
    if comb(a.n, order) > budget:
        raise BudgetError(f"order {order} needs {comb(a.n, order)} subsets, budget is {budget}")
    for idx in _support_chunks(a.n, order):
        if _dependent_hits(a.entries, idx, order).size:
            return False
    return True


def unique_projection_check(
    a: MeasurementMatrix,
    messages: list[SparseMessage],
    collision_tol: float = COLLISION_TOL,
) -> ProjectionReport:
    """Injectivity of x -> Ax over a finite message list.

    Pairs of identical messages are excluded; the report carries the
    smallest ciphertext distance over pairs of distinct messages and the
    first colliding pair in scan order, if any.
    """
    for msg in messages:
        if msg.n != a.n:
            raise DimensionError(f"message dimension {msg.n} does not match matrix n={a.n}")
    if len(messages) < 2:
        return ProjectionReport(True, inf, None)

    xs = np.stack([msg.entries for msg in messages])
    ys = xs @ a.entries.T
    min_dist = inf
    colliding: tuple[int, int] | None = None
    for i in range(len(messages) - 1):
        dist = np.linalg.norm(ys[i + 1:] - ys[i], axis=1)
        identical = np.all(xs[i + 1:] == xs[i], axis=1)
        dist = np.where(identical, inf, dist)
        j = int(np.argmin(dist))
        if dist[j] < min_dist:
            min_dist = float(dist[j])
        if colliding is None:
            bad = np.flatnonzero(dist <= collision_tol)
            if bad.size:
                colliding = (i, i + 1 + int(bad[0]))
    return ProjectionReport(
        injective=min_dist > collision_tol,
        min_pairwise_distance=min_dist,
        colliding_pair=colliding,
    )
