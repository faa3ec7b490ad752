"""Exact minimum-cost cover for tiny pools, used as ground truth in tests."""

from __future__ import annotations

from dataclasses import dataclass, field

from .evaluate import FIXED_CHARGE

MAX_PIECES = 24
MAX_SHIFTS = 24


class OracleTooLargeError(ValueError):
    pass


@dataclass
class OracleResult:
    optimal_objective: int
    optimal_shift_ids: list[int] = field(default_factory=list)
    nodes_explored: int = 0


def exact_min_cover(pool, fixed_charge: int = FIXED_CHARGE,
                    max_pieces: int = MAX_PIECES, max_shifts: int = MAX_SHIFTS) -> OracleResult:
    """Branch and bound over covering subsets.

    Branches on the lowest-index uncovered piece, trying its covering shifts
    in ascending (cost, id) order, and prunes any node whose cost plus the
    cheapest way to cover that piece cannot beat the incumbent.
    """
    m, n = pool.n_pieces_total, len(pool)
    if m > max_pieces or n > max_shifts:
        raise OracleTooLargeError(
            f"too large for oracle: {m} pieces, {n} shifts (caps {max_pieces}, {max_shifts})"
        )
    empty = [k for k, c in enumerate(pool.coverage_lists) if len(c) == 0]
    if empty:
        raise ValueError(f"uncoverable piece(s): {empty}")

    price = [int(pool.cost[j]) + fixed_charge for j in range(n)]
    masks = [sum(1 << k for k in s.pieces) for s in pool.shifts]
    options = [
        sorted((int(j) for j in pool.coverage_lists[k]), key=lambda j: (price[j], j))
        for k in range(m)
    ]
    full = (1 << m) - 1
    best_cost = sum(price) + 1
    best_set: list[int] = []
    nodes = 0
    chosen: list[int] = []

    def search(covered: int, cost: int):
        nonlocal best_cost, best_set, nodes
        nodes += 1
        if covered == full:
            if cost < best_cost:
                best_cost, best_set = cost, sorted(chosen)
            return
        free = ~covered & full
        k = (free & -free).bit_length() - 1
        for j in options[k]:
            if cost + price[j] >= best_cost:
                break
            chosen.append(j)
            search(covered | masks[j], cost + price[j])
            chosen.pop()

    search(0, 0)
    return OracleResult(best_cost, best_set, nodes)
