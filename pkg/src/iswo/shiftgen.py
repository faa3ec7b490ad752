"""Enumeration of every legal candidate shift for an instance."""

from __future__ import annotations

import bisect
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .model import Block, Instance, Rules, Shift, Spell, make_shift

DEFAULT_POOL_CAP = 1_000_000


class PoolError(ValueError):
    pass


class UncoverablePieceError(PoolError):
    def __init__(self, piece_ids):
        self.piece_ids = list(piece_ids)
        super().__init__(f"uncoverable piece(s): {self.piece_ids}")


class PoolSizeError(PoolError):
    def __init__(self, cap):
        self.cap = cap
        super().__init__(f"pool size limit exceeded ({cap} shifts)")


@dataclass(frozen=True)
class CriterionBounds:
    """Max (a) and min (b) of work time, ratio and piece count over a pool."""

    a1: float
    b1: float
    a2: float
    b2: float
    a3: float
    b3: float


class CandidatePool:
    """Candidate shifts with coverage lists and column-wise numeric views.

    ``incidence`` is a CSR matrix of shape (n_shifts, n_pieces) holding each
    covered piece's work time, so ``incidence @ mask`` sums the work time of
    the masked pieces per shift.

    The hot loops use a padded copy instead: ``piece_index[j]`` lists shift
    j's pieces, padded with the sentinel ``n_pieces``, and ``piece_weight``
    holds the matching work times (0 on padding). See :meth:`masked_work`.
    """

    def __init__(self, instance: Instance, shifts: list[Shift]):
        self.instance = instance
        self.shifts = list(shifts)
        n, m = len(self.shifts), instance.n_pieces
        self.piece_work = np.array([p.work_time for p in instance.pieces], dtype=float)

        rows, cols = [], []
        for j, s in enumerate(self.shifts):
            rows.extend([j] * len(s.pieces))
            cols.extend(s.pieces)
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        self.incidence = sparse.csr_matrix(
            (self.piece_work[cols], (rows, cols)), shape=(n, m)
        )

        by_piece = self.incidence.tocsc()
        self.coverage_lists = [
            np.sort(by_piece.indices[by_piece.indptr[k]:by_piece.indptr[k + 1]]).astype(np.int64)
            for k in range(m)
        ]

        width = max((len(sh.pieces) for sh in self.shifts), default=0)
        self.piece_index = np.full((n, width), m, dtype=np.int64)
        for j, sh in enumerate(self.shifts):
            self.piece_index[j, :len(sh.pieces)] = sh.pieces
        self.piece_weight = np.append(self.piece_work, 0.0)[self.piece_index]
        self.piece_arrays = [np.asarray(sh.pieces, dtype=np.int64) for sh in self.shifts]

        self.cost = np.array([s.cost for s in self.shifts], dtype=float)
        self.work_time = np.array([s.work_time for s in self.shifts], dtype=float)
        self.ratio = np.array([s.ratio for s in self.shifts], dtype=float)
        self.n_pieces = np.array([s.n_pieces for s in self.shifts], dtype=float)
        self.n_spells = np.array([s.n_spells for s in self.shifts], dtype=np.int64)
        self.bounds = _bounds(self) if n else None

    def __len__(self) -> int:
        return len(self.shifts)

    @property
    def n_pieces_total(self) -> int:
        return self.instance.n_pieces

    def uncovered_pieces(self) -> list[int]:
        return [k for k, c in enumerate(self.coverage_lists) if len(c) == 0]

    def masked_work(self, ids, mask) -> np.ndarray:
        """Work time each shift in ``ids`` spends on pieces where ``mask`` is true."""
        ext = np.append(mask, False)
        return (self.piece_weight[ids] * ext[self.piece_index[ids]]).sum(axis=1)

    def dump(self) -> str:
        return "".join(
            f"{j} {s.cost} {s.spell_string()}\n" for j, s in enumerate(self.shifts)
        )


def _bounds(pool: CandidatePool) -> CriterionBounds:
    return CriterionBounds(
        a1=float(pool.work_time.max()), b1=float(pool.work_time.min()),
        a2=float(pool.ratio.max()), b2=float(pool.ratio.min()),
        a3=float(pool.n_pieces.max()), b3=float(pool.n_pieces.min()),
    )


def enumerate_spells(block: Block, rules: Rules) -> list[Spell]:
    """All contiguous piece ranges on ``block`` no longer than the max work time."""
    times = block.times
    out = []
    for i in range(len(times) - 1):
        for j in range(i, len(times) - 1):
            if times[j + 1] - times[i] > rules.max_work_time:
                break
            out.append(Spell(block.id, i, j))
    return out


def enumerate_shifts(instance: Instance, max_pool: int = DEFAULT_POOL_CAP) -> CandidatePool:
    """Build the pool of all legal shifts by depth-first chaining of spells.

    Spells are chained in time order: the next spell must start at least
    ``min_break_between_spells`` after the previous one ends, and two spells
    of one block may not meet at the same RO.  Output order is the DFS order
    over spells sorted by (start, end, block position, first piece), so it is
    reproducible.
    """
    rules = instance.rules
    block_pos = {b.id: i for i, b in enumerate(instance.blocks)}

    spells = []
    for block in instance.blocks:
        times = block.times
        for sp in enumerate_spells(block, rules):
            spells.append((times[sp.first_piece], times[sp.last_piece + 1], block_pos[sp.block_id], sp))
    spells.sort(key=lambda t: (t[0], t[1], t[2], t[3].first_piece))
    starts = [t[0] for t in spells]

    head = rules.signon_allowance + rules.signoff_allowance
    out: list[Shift] = []

    def extend(chain, first_start, work):
        last = spells[chain[-1]]
        spread = last[1] - first_start + head
        if (rules.min_work_time <= work
                and rules.min_ratio * spread <= 100 * work <= rules.max_ratio * spread):
            if len(out) >= max_pool:
                raise PoolSizeError(max_pool)
            out.append(make_shift(instance, [spells[i][3] for i in chain]))
        if len(chain) >= rules.max_spells:
            return
        lo = bisect.bisect_left(starts, last[1] + rules.min_break_between_spells)
        for i in range(lo, len(spells)):
            start, end, bpos, sp = spells[i]
            if end - first_start + head > rules.max_spreadover:
                if start - first_start + head > rules.max_spreadover:
                    break
                continue
            w = work + (end - start)
            if w > rules.max_work_time:
                continue
            prev = last[3]
            if bpos == last[2] and sp.first_piece == prev.last_piece + 1:
                continue
            chain.append(i)
            extend(chain, first_start, w)
            chain.pop()

    for i, (start, end, _, _) in enumerate(spells):
        if end - start + head > rules.max_spreadover:
            continue
        extend([i], start, end - start)

    pool = CandidatePool(instance, out)
    missing = pool.uncovered_pieces()
    if missing:
        raise UncoverablePieceError(missing)
    return pool
