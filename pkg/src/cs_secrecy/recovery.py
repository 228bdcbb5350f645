"""Sparse recovery solvers: exhaustive search, basis pursuit, and OMP.

All three are deterministic functions of their inputs; every tie is broken
toward the lowest index so results reproduce across platforms.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np
import scipy.linalg

from .codec import Ciphertext
from .errors import BudgetError, DimensionError, DomainError, SolverError
from .keymatrix import MeasurementMatrix, _readonly

FEAS_TOL = 1e-8
SUPPORT_EPS = 1e-8
ENUMERATION_BUDGET = 10_000_000
_PIVOT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class RecoveryResult:
    """Solver output: the full coefficient vector plus bookkeeping.

    `support` holds the indices whose recovered magnitude exceeds
    SUPPORT_EPS; `residual_l2` is recomputed from the stored coefficients at
    construction time so it always matches them.
    """

    coefficients: np.ndarray
    support: tuple[int, ...]
    residual_l2: float
    status: str  # unique | solved | ambiguous | failed
    solver: str

    def to_dict(self) -> dict:
        return {
            "solver": self.solver,
            "status": self.status,
            "support": list(self.support),
            "residual_l2": self.residual_l2,
            "coefficients": [float(v) for v in self.coefficients],
        }


def _make_result(entries: np.ndarray, y_vec: np.ndarray, coefficients: np.ndarray, status: str, solver: str) -> RecoveryResult:
    residual = float(np.linalg.norm(y_vec - entries @ coefficients))
    support = tuple(int(i) for i in np.flatnonzero(np.abs(coefficients) > SUPPORT_EPS))
    return RecoveryResult(
        coefficients=_readonly(coefficients, 1),
        support=support,
        residual_l2=residual,
        status=status,
        solver=solver,
    )


def _back_substitute(r: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    n = r.shape[1]
    x = np.zeros(n)
    for i in range(n - 1, -1, -1):
        x[i] = (rhs[i] - r[i, i + 1:] @ x[i + 1:]) / r[i, i]
    return x


def _qr_solve(cols: np.ndarray, y_vec: np.ndarray) -> np.ndarray:
    """Least squares on a column subset via Householder QR.

    The full-rank fast path uses a plain reduced QR; near-singular subsets
    fall back to column-pivoted Householder QR with a rank cut, which keeps
    the residual minimal without ever forming normal equations.
    """
    if cols.shape[1] == 0:
        return np.zeros(0)
    q, r = np.linalg.qr(cols)
    diag = np.abs(np.diagonal(r))
    tol = max(cols.shape) * np.finfo(float).eps * diag.max()
    if diag.min() > tol:
        return _back_substitute(r, q.T @ y_vec)
    q, r, piv = scipy.linalg.qr(cols, mode="economic", pivoting=True)
    diag = np.abs(np.diagonal(r))
    lead = diag[0] if diag.size else 0.0
    rank = int(np.sum(diag > max(cols.shape) * np.finfo(float).eps * lead))
    x = np.zeros(cols.shape[1])
    if rank:
        x[piv[:rank]] = _back_substitute(r[:rank, :rank], (q.T @ y_vec)[:rank])
    return x


def l0_exhaustive(
    a: MeasurementMatrix,
    y: Ciphertext,
    k_max: int,
    feas_tol: float = FEAS_TOL,
    budget: int = ENUMERATION_BUDGET,
) -> RecoveryResult:
    """Exhaustive minimum-support recovery.

    Scans sparsity levels 0, 1, ..., k_max; at each level solves least
    squares on every size-k column subset in lexicographic order and stops
    at the first level where some subset reaches residual
    <= feas_tol * (1 + ||y||).  Status is "unique" when exactly one subset
    at that level is feasible and "ambiguous" when several are; the
    coefficients always come from the lexicographically smallest feasible
    subset.
    """
    if a.m != y.m:
        raise DimensionError(f"matrix is {a.m}x{a.n} but ciphertext has length {y.m}")
    if not 0 <= k_max <= a.m:
        raise DomainError(f"k_max must satisfy 0 <= k_max <= m={a.m}, got {k_max}")
    if comb(a.n, k_max) > budget:
        raise BudgetError(f"level k={k_max} holds {comb(a.n, k_max)} supports, budget is {budget}")

    entries = a.entries
    y_vec = y.entries
    threshold = feas_tol * (1.0 + float(np.linalg.norm(y_vec)))
    examined = 0
    for k in range(k_max + 1):
        feasible = 0
        best: np.ndarray | None = None
        for support in combinations(range(a.n), k):
            examined += 1
            if examined > budget:
                raise BudgetError(f"support enumeration exceeded the budget of {budget}")
            if k == 0:
                residual = float(np.linalg.norm(y_vec))
                coef_s = np.zeros(0)
            else:
                sub = entries[:, support]
                coef_s = _qr_solve(sub, y_vec)
                residual = float(np.linalg.norm(y_vec - sub @ coef_s))
            if residual <= threshold:
                feasible += 1
                if best is None:
                    best = np.zeros(a.n)
                    best[list(support)] = coef_s
        if feasible:
            status = "unique" if feasible == 1 else "ambiguous"
            return _make_result(entries, y_vec, best, status, "l0")
    return _make_result(entries, y_vec, np.zeros(a.n), "failed", "l0")


def omp(
    a: MeasurementMatrix,
    y: Ciphertext,
    k: int,
    tol: float = FEAS_TOL,
) -> RecoveryResult:
    """Orthogonal Matching Pursuit.

    Greedy support growth: each iteration picks the column with the largest
    normalized correlation against the residual (ties to the lowest index),
    refits least squares on the accumulated support, and stops early once
    the residual drops below tol * (1 + ||y||).  Re-selecting a column
    already in the support is numerically degenerate and reports failure.
    """
    if a.m != y.m:
        raise DimensionError(f"matrix is {a.m}x{a.n} but ciphertext has length {y.m}")
    if not 1 <= k <= a.m:
        raise DomainError(f"sparsity must satisfy 1 <= k <= m={a.m}, got {k}")

    entries = a.entries
    y_vec = y.entries
    threshold = tol * (1.0 + float(np.linalg.norm(y_vec)))
    col_norms = np.linalg.norm(entries, axis=0)
    safe_norms = np.where(col_norms > 0.0, col_norms, 1.0)

    support: list[int] = []
    coef = np.zeros(a.n)
    residual_vec = y_vec.copy()
    for _ in range(k):
        if float(np.linalg.norm(residual_vec)) <= threshold:
            break
        scores = np.abs(entries.T @ residual_vec) / safe_norms
        scores[col_norms == 0.0] = 0.0
        pick = int(np.argmax(scores))
        if pick in support:
            return _make_result(entries, y_vec, coef, "failed", "omp")
        support.append(pick)
        coef_s = _qr_solve(entries[:, support], y_vec)
        coef = np.zeros(a.n)
        coef[support] = coef_s
        residual_vec = y_vec - entries[:, support] @ coef_s
    status = "solved" if float(np.linalg.norm(residual_vec)) <= threshold else "failed"
    return _make_result(entries, y_vec, coef, status, "omp")


def bp(
    a: MeasurementMatrix,
    y: Ciphertext,
    feas_tol: float = FEAS_TOL,
    max_iter: int | None = None,
) -> RecoveryResult:
    """Basis pursuit: the minimum-l1 solution of A alpha = y.

    The program min sum(t) s.t. -t <= alpha <= t, A alpha = y is solved in
    the equivalent split form alpha = p - q with p, q >= 0 by a two-phase
    dense simplex using Bland's anti-cycling rule.  Status is "solved" when
    phase 1 certifies feasibility; inconsistent right-hand sides report
    "failed"; exceeding the iteration cap raises SolverError.
    """
    if a.m != y.m:
        raise DimensionError(f"matrix is {a.m}x{a.n} but ciphertext has length {y.m}")
    if a.m > a.n:
        raise DomainError(f"basis pursuit expects an underdetermined system, got m={a.m} > n={a.n}")
    if np.linalg.matrix_rank(a.entries) < a.m:
        warnings.warn("measurement matrix is rank-deficient; basis pursuit may report infeasible", stacklevel=2)

    m, n = a.m, a.n
    y_vec = y.entries
    if max_iter is None:
        max_iter = 50 * (m + n)

    cols = np.hstack([a.entries, -a.entries])
    rhs = y_vec.copy()
    flip = rhs < 0.0
    cols[flip] *= -1.0
    rhs[flip] *= -1.0

    feas_threshold = feas_tol * (1.0 + float(np.linalg.norm(y_vec)))
    solution, phase1_obj = _two_phase_simplex(cols, rhs, np.ones(2 * n), max_iter, feas_threshold)
    if solution is None:
        return _make_result(a.entries, y_vec, np.zeros(n), "failed", "bp")
    alpha = solution[:n] - solution[n:]
    return _make_result(a.entries, y_vec, alpha, "solved", "bp")


def _pivot(tab: np.ndarray, basis: list[int], row: int, col: int) -> None:
    tab[row] /= tab[row, col]
    colvals = tab[:, col].copy()
    colvals[row] = 0.0
    tab -= np.outer(colvals, tab[row])
    tab[:, col] = 0.0
    tab[row, col] = 1.0
    basis[row] = col


def _bland_minimize(tab: np.ndarray, basis: list[int], ncols: int, iter_budget: int) -> int:
    """Minimize the objective row in place; returns pivots used."""
    nrows = tab.shape[0] - 1
    used = 0
    while True:
        eligible = np.flatnonzero(tab[-1, :ncols] < -_PIVOT_TOL)
        if eligible.size == 0:
            return used
        col = int(eligible[0])  # Bland: lowest eligible index enters
        pivot_col = tab[:nrows, col]
        rows = np.flatnonzero(pivot_col > _PIVOT_TOL)
        if rows.size == 0:
            raise SolverError("linear program is unbounded")
        ratios = tab[rows, -1] / pivot_col[rows]
        tied = rows[ratios <= ratios.min() + 1e-12]
        row = int(tied[np.argmin([basis[i] for i in tied])])  # Bland: lowest basic index leaves
        used += 1
        if used > iter_budget:
            raise SolverError(f"simplex exceeded the iteration cap of {iter_budget}")
        _pivot(tab, basis, row, col)


def _two_phase_simplex(
    cols: np.ndarray,
    rhs: np.ndarray,
    cost: np.ndarray,
    max_iter: int,
    feas_threshold: float,
) -> tuple[np.ndarray | None, float]:
    """Solve min cost.x s.t. cols x = rhs, x >= 0 (rhs >= 0 assumed).

    Returns (solution, phase-1 objective); the solution is None when the
    constraints are infeasible at the given threshold.
    """
    m, nvar = cols.shape
    tab = np.zeros((m + 1, nvar + m + 1))
    tab[:m, :nvar] = cols
    tab[:m, nvar:nvar + m] = np.eye(m)
    tab[:m, -1] = rhs
    basis = list(range(nvar, nvar + m))
    # phase 1: minimize the artificial sum; with the artificial basis the
    # reduced costs on real columns start at minus their column sums
    tab[-1, :nvar] = -cols.sum(axis=0)
    tab[-1, -1] = -rhs.sum()
    used = _bland_minimize(tab, basis, nvar + m, max_iter)
    phase1_obj = float(-tab[-1, -1])
    if phase1_obj > feas_threshold:
        return None, phase1_obj

    # drive zero-level artificials out of the basis; drop redundant rows
    keep = []
    for i in range(m):
        if basis[i] < nvar:
            keep.append(i)
            continue
        pivots = np.flatnonzero(np.abs(tab[i, :nvar]) > _PIVOT_TOL)
        if pivots.size:
            _pivot(tab, basis, i, int(pivots[0]))
            keep.append(i)
    if len(keep) < m:
        tab = np.vstack([tab[keep], tab[-1:]])
        basis = [basis[i] for i in keep]
        m = len(keep)

    # phase 2 over the real columns only
    tab = np.hstack([tab[:, :nvar], tab[:, -1:]])
    tab[-1, :nvar] = cost
    tab[-1, -1] = 0.0
    for i in range(m):
        tab[-1] -= cost[basis[i]] * tab[i]
    _bland_minimize(tab, basis, nvar, max_iter - used)

    x = np.zeros(nvar)
    for i in range(m):
        x[basis[i]] = tab[i, -1]
    return x, phase1_obj
