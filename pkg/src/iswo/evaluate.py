"""Fuzzy shift evaluation and the schedule objective.

A shift's fitness is the product of a structural coefficient (a weighted sum
of five fuzzy memberships) and an over-cover penalty (the share of its work
time not covered by any other shift).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

FIXED_CHARGE = 2000
LN_001 = math.log(0.01)


@dataclass(frozen=True)
class Weights:
    w1: float = 0.20
    w2: float = 0.10
    w3: float = 0.10
    w4: float = 0.20
    w5: float = 0.40

    def __post_init__(self):
        ws = self.as_tuple()
        if any(not math.isfinite(w) or w < 0 for w in ws):
            raise ValueError(f"weights must be finite and non-negative, got {ws}")
        if abs(sum(ws) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got sum {sum(ws)!r}")

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.w1, self.w2, self.w3, self.w4, self.w5)

    def __iter__(self):
        return iter(self.as_tuple())


def membership_s_curve(x, a, b):
    """Quadratic S-curve rising from 0 at ``b`` (minimum) to 1 at ``a`` (maximum).

    ``x`` is clamped into [b, a]; a degenerate range (a == b) gives 1.
    Works elementwise on arrays.
    """
    x = np.asarray(x, dtype=float)
    if a == b:
        out = np.ones_like(x)
        return float(out) if out.ndim == 0 else out
    if a < b:
        raise ValueError(f"S-curve needs a >= b, got a={a}, b={b}")
    span = a - b
    x = np.clip(x, b, a)
    mid = 0.5 * (a + b)
    low = 2.0 * ((x - b) / span) ** 2
    high = 1.0 - 2.0 * ((x - a) / span) ** 2
    out = np.where(x < mid, low, high)
    return float(out) if out.ndim == 0 else out


_SPELL_MEMBERSHIP = {1: 0.0, 2: 1.0, 3: 0.5, 4: 0.0}


def membership_spells(n_spells: int) -> float:
    try:
        return _SPELL_MEMBERSHIP[int(n_spells)]
    except KeyError:
        raise ValueError(f"spell count must be 1..4, got {n_spells}") from None


def membership_spells_array(n_spells) -> np.ndarray:
    n = np.asarray(n_spells)
    if n.size and (n.min() < 1 or n.max() > 4):
        raise ValueError("spell counts must be 1..4")
    table = np.array([0.0, 0.0, 1.0, 0.5, 0.0])
    return table[n]


def membership_fractional(x5, a: float, b: float, in_cover):
    """Gaussian membership of an LP value: 1 at the cover maximum ``a``, 0.01 at
    the cover minimum ``b``, and 0 for shifts outside the fractional cover."""
    x5 = np.asarray(x5, dtype=float)
    in_cover = np.asarray(in_cover, dtype=bool)
    if a == b:
        out = np.where(in_cover, 1.0, 0.0)
    else:
        out = np.where(in_cover, np.exp(LN_001 / (a - b) ** 2 * (x5 - a) ** 2), 0.0)
    return float(out) if out.ndim == 0 else out


def aggregate(memberships, weights: Weights) -> float:
    total = 0.0
    for w, mu in zip(weights, memberships):
        total += w * mu
    return total


def memberships(shift, bounds, frac=None, shift_id: int | None = None) -> tuple:
    """The five criterion memberships of one shift.

    ``frac`` is a fractional cover; without it (or without ``shift_id``) the
    LP criterion scores 0.
    """
    mu1 = membership_s_curve(shift.work_time, bounds.a1, bounds.b1)
    mu2 = membership_s_curve(shift.ratio, bounds.a2, bounds.b2)
    mu3 = membership_s_curve(shift.n_pieces, bounds.a3, bounds.b3)
    mu4 = membership_spells(shift.n_spells)
    if frac is None or shift_id is None:
        mu5 = 0.0
    else:
        mu5 = membership_fractional(frac.values[shift_id], frac.a, frac.b, frac.in_cover[shift_id])
    return (mu1, mu2, mu3, mu4, mu5)


def structural_coefficient(shift, bounds, weights: Weights, frac=None, shift_id=None) -> float:
    return aggregate(memberships(shift, bounds, frac, shift_id), weights)


def structural_coefficients(pool, weights: Weights, frac=None) -> np.ndarray:
    """Structural coefficient of every shift in ``pool`` as one array."""
    b = pool.bounds
    w1, w2, w3, w4, w5 = weights
    f1 = (w1 * membership_s_curve(pool.work_time, b.a1, b.b1)
          + w2 * membership_s_curve(pool.ratio, b.a2, b.b2)
          + w3 * membership_s_curve(pool.n_pieces, b.a3, b.b3)
          + w4 * membership_spells_array(pool.n_spells))
    if frac is not None and w5 != 0:
        f1 = f1 + w5 * membership_fractional(frac.values, frac.a, frac.b, frac.in_cover)
    return np.asarray(f1, dtype=float)


@dataclass
class CoverageContext:
    """How many schedule shifts cover each piece."""

    cover_count: np.ndarray

    @classmethod
    def empty(cls, n_pieces: int) -> "CoverageContext":
        return cls(np.zeros(n_pieces, dtype=np.int64))

    @classmethod
    def from_shifts(cls, n_pieces: int, shifts) -> "CoverageContext":
        ctx = cls.empty(n_pieces)
        for s in shifts:
            ctx.add(s.pieces)
        return ctx

    def add(self, pieces) -> None:
        self.cover_count[list(pieces)] += 1

    def remove(self, pieces) -> None:
        self.cover_count[list(pieces)] -= 1

    def copy(self) -> "CoverageContext":
        return CoverageContext(self.cover_count.copy())


def over_cover_penalty(shift, ctx: CoverageContext, piece_work, includes_self: bool = True) -> float:
    """Share of the shift's work time on pieces no other shift covers.

    ``includes_self`` says whether ``ctx`` already counts this shift.
    """
    own = 1 if includes_self else 0
    total = 0.0
    alone = 0.0
    for k in shift.pieces:
        beta = float(piece_work[k])
        total += beta
        if ctx.cover_count[k] - own == 0:
            alone += beta
    return alone / total


def fitness(f1: float, f2: float) -> float:
    return f1 * f2


def shift_fitness(shift, bounds, weights, frac, ctx, piece_work, shift_id=None, includes_self=True) -> float:
    return fitness(
        structural_coefficient(shift, bounds, weights, frac, shift_id),
        over_cover_penalty(shift, ctx, piece_work, includes_self),
    )


def objective(costs: Iterable, fixed_charge: int = FIXED_CHARGE):
    """Weighted-sum schedule cost: every shift pays its cost plus a fixed charge.

    Accepts shift costs or objects with a ``cost`` attribute.
    """
    total = 0
    for c in costs:
        total += getattr(c, "cost", c) + fixed_charge
    return total
