"""LP relaxation of the set covering model and the fractional cover it yields.

The solver is a dense two-phase tableau simplex with deterministic pivoting.
The default entering rule is steepest edge over the most negative reduced
costs. Ratio-test ties are broken lexicographically on the rows of B^-1,
which rules out cycling. Dantzig entry and pure Bland's rule are available
too; both need far more pivots on the highly degenerate covering LPs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg.blas import dger

from .evaluate import FIXED_CHARGE, Weights

TOL = 1e-9
PRICING_CANDIDATES = 200
IN_COVER_TOL = 1e-9
RULES = ("steepest", "dantzig", "bland")


class LPError(RuntimeError):
    pass


class InfeasibleError(LPError):
    pass


class UnboundedError(LPError):
    pass


class IterationLimitError(LPError):
    pass


@dataclass
class LPResult:
    x: np.ndarray
    objective: float
    iterations: int


def _pivot(T, row, col):
    prow = T[row] / T[row, col]
    colv = T[:, col].copy()
    # in-place rank-1 update through the Fortran-ordered view of T
    out = dger(-1.0, prow, colv, a=T.T, overwrite_a=1)
    if not np.shares_memory(out, T):
        T[...] = out.T
    T[row] = prow


def _entering(T, m, neg, z, rule):
    if rule == "bland":
        return int(neg[0])
    if rule == "dantzig":
        return int(neg[np.argmin(z[neg])])
    if neg.size > PRICING_CANDIDATES:
        neg = neg[np.argsort(z[neg], kind="stable")[:PRICING_CANDIDATES]]
    cols = T[:m, neg]
    norms = 1.0 + np.einsum("ij,ij->j", cols, cols)
    return int(neg[np.argmin(z[neg] / np.sqrt(norms))])


def _leaving(T, ties, colv, basis, lex_cols):
    """Lexicographic minimum over the rows of B^-1 (held in ``lex_cols``)."""
    for c in lex_cols:
        if ties.size == 1:
            break
        vals = T[ties, c] / colv[ties]
        lo = vals.min()
        ties = ties[vals <= lo + TOL * max(1.0, abs(lo))]
    return int(min(ties, key=lambda r: basis[r]))


def _run(T, basis, ncols, max_iter, it0=0, rule="steepest", lex_cols=()):
    """Primal simplex on tableau ``T``; the last row holds reduced costs.

    Only the first ``ncols`` columns may enter.  ``rule="bland"`` enters the
    lowest-index improving column and leaves by lowest basis index.  The
    other rules pick the entering column by most negative reduced cost
    (``"dantzig"``) or by reduced cost over column norm among the
    ``PRICING_CANDIDATES`` most negative (``"steepest"``), and break ratio
    ties lexicographically over ``lex_cols``, the columns that started as
    the identity basis. Returns the iteration count.
    """
    m = T.shape[0] - 1
    it = it0
    while True:
        z = T[-1, :ncols]
        neg = np.nonzero(z < -TOL)[0]
        if neg.size == 0:
            return it
        col = _entering(T, m, neg, z, rule)
        if it >= max_iter:
            raise IterationLimitError(
                f"simplex iteration cap {max_iter} hit (rows={m}, cols={ncols}, "
                f"objective={-T[-1, -1]:.6g})"
            )
        colv = T[:m, col]
        pos = np.nonzero(colv > TOL)[0]
        if pos.size == 0:
            raise UnboundedError(f"LP unbounded along column {col}")
        ratios = T[pos, -1] / colv[pos]
        best = ratios.min()
        ties = pos[ratios <= best + TOL * max(1.0, abs(best))]
        if rule == "bland":
            row = int(min(ties, key=lambda r: basis[r]))
        else:
            row = _leaving(T, ties, colv, basis, lex_cols)
        _pivot(T, row, col)
        basis[row] = col
        it += 1


def two_phase_simplex(c, A, senses, b, max_iter: int | None = None, rule: str = "steepest") -> LPResult:
    """Minimise ``c @ x`` subject to ``A x (senses) b`` and ``x >= 0``.

    ``senses`` holds one of ``'<='``, ``'>='`` or ``'='`` per row; ``rule``
    is the pivot rule, one of ``RULES``.
    """
    if rule not in RULES:
        raise ValueError(f"unknown pivot rule {rule!r}")
    c = np.asarray(c, dtype=float)
    A = np.array(A, dtype=float, copy=True)
    b = np.array(b, dtype=float, copy=True)
    senses = list(senses)
    m, n = A.shape
    if max_iter is None:
        max_iter = 200 * (m + n) + 1000

    for i in range(m):
        if b[i] < 0:
            A[i] *= -1
            b[i] *= -1
            senses[i] = {"<=": ">=", ">=": "<=", "=": "="}[senses[i]]

    n_slack = sum(s in ("<=", ">=") for s in senses)
    n_art = sum(s in (">=", "=") for s in senses)
    art0 = n + n_slack
    width = art0 + n_art
    T = np.zeros((m + 1, width + 1))
    T[:m, :n] = A
    T[:m, -1] = b
    basis = [0] * m
    si, ai = n, art0
    for i, s in enumerate(senses):
        if s == "<=":
            T[i, si] = 1.0
            basis[i] = si
            si += 1
        else:
            if s == ">=":
                T[i, si] = -1.0
                si += 1
            T[i, ai] = 1.0
            basis[i] = ai
            ai += 1

    lex_cols = list(basis)  # identity at the start, so these columns carry B^-1

    # phase 1: minimise the sum of artificials
    art_rows = [i for i in range(m) if basis[i] >= art0]
    T[-1, :] = 0.0
    T[-1, art0:width] = 1.0
    for i in art_rows:
        T[-1] -= T[i]
    it = _run(T, basis, width, max_iter, 0, rule, lex_cols)
    if -T[-1, -1] > 1e-7:
        raise InfeasibleError(f"LP infeasible (phase 1 residual {-T[-1, -1]:.3g})")

    # drive zero-level artificials out of the basis, dropping redundant rows
    keep = []
    for i in range(m):
        if basis[i] >= art0:
            cand = np.nonzero(np.abs(T[i, :art0]) > TOL)[0]
            if cand.size == 0:
                continue
            _pivot(T, i, int(cand[0]))
            basis[i] = int(cand[0])
        keep.append(i)
    # artificial columns stay (they may not enter) because they hold B^-1
    T = np.ascontiguousarray(np.vstack([T[keep], np.zeros((1, width + 1))]))
    basis = [basis[i] for i in keep]

    # phase 2
    cost = np.zeros(width)
    cost[:n] = c
    T[-1, :width] = cost
    for i, bv in enumerate(basis):
        if cost[bv] != 0.0:
            T[-1] -= cost[bv] * T[i]
    it = _run(T, basis, art0, max_iter, it, rule, lex_cols)

    x = np.zeros(width)
    for i, bv in enumerate(basis):
        x[bv] = T[i, -1]
    x = x[:n]
    x[np.abs(x) < TOL] = 0.0
    return LPResult(x=x, objective=float(c @ x), iterations=it)


@dataclass
class FractionalCover:
    """LP values per shift plus the cover's max (``a``) and min (``b``) value."""

    values: np.ndarray
    in_cover: np.ndarray
    a: float
    b: float
    objective: float
    iterations: int = 0

    def dump(self) -> str:
        return "".join(
            f"{j} {v:.9f} {int(f)}\n" for j, (v, f) in enumerate(zip(self.values, self.in_cover))
        )


def fractional_cover(pool, fixed_charge: int = FIXED_CHARGE, max_iter: int | None = None,
                     rule: str = "steepest") -> FractionalCover:
    """Solve the covering LP over ``pool`` with costs ``cost + fixed_charge``.

    Upper bounds x <= 1 are redundant whenever a column's cost is positive
    (lowering such an x to 1 keeps every row feasible and saves cost), so
    explicit bound rows are added only for columns with non-positive cost.
    """
    n, m = len(pool), pool.n_pieces_total
    if any(len(c) == 0 for c in pool.coverage_lists):
        raise InfeasibleError("some piece has an empty coverage list")
    c = pool.cost + fixed_charge
    cover = (pool.incidence.T > 0).astype(float).toarray()
    bounded = np.nonzero(c <= 0)[0]
    A = cover
    senses = [">="] * m
    rhs = [1.0] * m
    if bounded.size:
        ub = np.zeros((bounded.size, n))
        ub[np.arange(bounded.size), bounded] = 1.0
        A = np.vstack([cover, ub])
        senses += ["<="] * bounded.size
        rhs += [1.0] * bounded.size
    res = two_phase_simplex(c, A, senses, rhs, max_iter=max_iter, rule=rule)
    x = np.clip(res.x, 0.0, 1.0)
    in_cover = x > IN_COVER_TOL
    vals = x[in_cover]
    return FractionalCover(
        values=x,
        in_cover=in_cover,
        a=float(vals.max()),
        b=float(vals.min()),
        objective=float(c @ x),
        iterations=res.iterations,
    )


def disable_fractional_criterion(weights: Weights) -> Weights:
    """Zero the LP weight and rescale the other four to sum to one."""
    w = weights.as_tuple()
    if w[4] == 0.0:
        return weights
    rest = sum(w[:4])
    if rest <= 0.0:
        raise ValueError("cannot disable the LP criterion: all other weights are zero")
    return Weights(*(x / rest for x in w[:4]), 0.0)
