"""Squeaky wheel search over driver schedules.

``solve_iswo`` runs the Analysis, Selection, Mutation, Prioritization and
Construction loop on one schedule; ``solve_swo`` is the classic
construct/analyze/prioritize baseline that rebuilds from scratch each round.
All randomness comes from a single ``numpy.random.Generator`` over PCG64
seeded from ``Params.seed``.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .evaluate import FIXED_CHARGE, CoverageContext, Weights, structural_coefficients
from .lp import FractionalCover, disable_fractional_criterion, fractional_cover
from .shiftgen import CandidatePool, enumerate_shifts

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Params:
    weights: Weights = field(default_factory=Weights)
    p: float = 0.3
    p_m: float = 0.05
    k: int = 2
    fixed_charge: int = FIXED_CHARGE
    stagnation_limit: int = 1000
    max_iterations: int | None = None
    seed: int = 0
    use_lp: bool = True
    redundancy_pass: bool = True

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if not 0.0 <= self.p_m <= 1.0:
            raise ValueError(f"p_m must lie in [0, 1], got {self.p_m}")
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.stagnation_limit < 1:
            raise ValueError("stagnation_limit must be at least 1")
        if self.max_iterations is not None and self.max_iterations < 0:
            raise ValueError("max_iterations must be non-negative")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["weights"] = list(self.weights.as_tuple())
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Params":
        d = dict(d)
        if "weights" in d:
            d["weights"] = Weights(*d["weights"])
        return cls(**d)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


class Schedule:
    """A set of pool shifts with an always-consistent coverage count.

    ``free_work[j]`` is the work time pool shift j has on pieces nobody in
    the schedule covers yet. It is kept up to date on every add and remove,
    so construction can score candidates without touching their pieces.
    """

    def __init__(self, pool: CandidatePool, fixed_charge: int = FIXED_CHARGE, shift_ids=()):
        self.pool = pool
        self.fixed_charge = fixed_charge
        self.shift_ids: list[int] = []
        self.ctx = CoverageContext.empty(pool.n_pieces_total)
        self.free_work = pool.work_time.copy()
        self.objective = 0
        for j in shift_ids:
            self.add(j)

    def add(self, j: int) -> None:
        j = int(j)
        if j in self.shift_ids:
            raise ValueError(f"shift {j} already scheduled")
        self.shift_ids.append(j)
        self.shift_ids.sort()
        pool, cc = self.pool, self.ctx.cover_count
        pieces = pool.piece_arrays[j]
        for k in pieces[cc[pieces] == 0]:
            self.free_work[pool.coverage_lists[k]] -= pool.piece_work[k]
        cc[pieces] += 1
        self.objective += pool.shifts[j].cost + self.fixed_charge

    def remove(self, j: int) -> None:
        j = int(j)
        self.shift_ids.remove(j)
        pool, cc = self.pool, self.ctx.cover_count
        pieces = pool.piece_arrays[j]
        cc[pieces] -= 1
        for k in pieces[cc[pieces] == 0]:
            self.free_work[pool.coverage_lists[k]] += pool.piece_work[k]
        self.objective -= pool.shifts[j].cost + self.fixed_charge

    def copy(self) -> "Schedule":
        other = Schedule.__new__(Schedule)
        other.pool = self.pool
        other.fixed_charge = self.fixed_charge
        other.shift_ids = list(self.shift_ids)
        other.ctx = self.ctx.copy()
        other.free_work = self.free_work.copy()
        other.objective = self.objective
        return other

    def __len__(self) -> int:
        return len(self.shift_ids)

    @property
    def shifts(self):
        return [self.pool.shifts[j] for j in self.shift_ids]

    def is_complete(self) -> bool:
        return bool(np.all(self.ctx.cover_count >= 1))

    def uncovered(self) -> list[int]:
        return np.nonzero(self.ctx.cover_count == 0)[0].tolist()

    def recount(self) -> np.ndarray:
        return CoverageContext.from_shifts(self.pool.n_pieces_total, self.shifts).cover_count


class Evaluator:
    """Fitness of schedule members and of construction candidates.

    The structural coefficient is fixed per shift, so it is computed once for
    the whole pool; only the over-cover penalty depends on the schedule.
    """

    def __init__(self, pool: CandidatePool, weights: Weights, frac: FractionalCover | None = None):
        self.pool = pool
        self.weights = weights
        self.frac = frac
        self.f1 = structural_coefficients(pool, weights, frac)

    def analyze(self, schedule: Schedule) -> dict[int, float]:
        if not schedule.shift_ids:
            return {}
        ids = np.asarray(schedule.shift_ids)
        alone = schedule.ctx.cover_count == 1
        f2 = self.pool.masked_work(ids, alone) / self.pool.work_time[ids]
        F = self.f1[ids] * f2
        return {int(j): float(v) for j, v in zip(ids, F)}

    def candidates(self, piece: int, schedule: Schedule) -> tuple[np.ndarray, np.ndarray]:
        """Shifts able to cover ``piece`` and their fitness if added to ``schedule`` now."""
        ids = self.pool.coverage_lists[piece]
        return ids, self.f1[ids] * (schedule.free_work[ids] / self.pool.work_time[ids])


def analyze(schedule: Schedule, ev: Evaluator) -> dict[int, float]:
    return ev.analyze(schedule)


def select(schedule: Schedule, fitness_map: dict[int, float], p: float, rng):
    """Keep shift j iff F(j) > p_s - p, with one uniform p_s per call.

    Mutates ``schedule`` into the retained partial schedule and returns
    ``(retained_ids, removed_ids, p_s)``.
    """
    p_s = float(rng.random())
    threshold = p_s - p
    removed = [j for j in schedule.shift_ids if not fitness_map[j] > threshold]
    for j in removed:
        schedule.remove(j)
    return list(schedule.shift_ids), removed, p_s


def mutate(schedule: Schedule, p_m: float, rng):
    """Drop each remaining shift independently with probability ``p_m``."""
    ids = list(schedule.shift_ids)
    if not ids:
        return schedule, []
    draws = rng.random(len(ids))
    removed = [j for j, u in zip(ids, draws) if u < p_m]
    for j in removed:
        schedule.remove(j)
    return schedule, removed


def prioritize(removed, fitness_map: dict[int, float], pool: CandidatePool,
               cover_count=None) -> list[int]:
    """Order removed shifts by ascending fitness and unroll them into pieces.

    Pieces appear once, in first-seen order; pieces still covered according
    to ``cover_count`` (the partial schedule) are left out.
    """
    order = sorted(removed, key=lambda j: (fitness_map[j], j))
    seen = set()
    seq = []
    for j in order:
        for k in pool.shifts[j].pieces:
            if k in seen:
                continue
            seen.add(k)
            if cover_count is not None and cover_count[k] > 0:
                continue
            seq.append(k)
    return seq


def top_k(F: np.ndarray, k: int) -> np.ndarray:
    """Positions of the ``k`` largest values, ties to the lower position.

    Same order as ``np.lexsort((ids, -F))[:k]`` for ascending ``ids``, but
    linear in ``len(F)`` for the small k used in construction.
    """
    if k >= F.size or k > 8:
        return np.argsort(-F, kind="stable")[:k]
    F = F.copy()
    out = np.empty(k, dtype=np.int64)
    for i in range(k):
        out[i] = F.argmax()
        F[out[i]] = -np.inf
    return out


def construct(schedule: Schedule, sequence, ev: Evaluator, k: int, rng) -> Schedule:
    """Greedy repair: for each still-uncovered piece in ``sequence`` add one of
    the ``k`` fittest shifts from its coverage list, chosen uniformly."""
    cc = schedule.ctx.cover_count
    for piece in sequence:
        if cc[piece] > 0:
            continue
        ids, F = ev.candidates(piece, schedule)
        if ids.size == 0:
            raise ValueError(f"piece {piece} has an empty coverage list")
        order = top_k(F, k)
        if order.size == 1:
            pick = ids[order[0]]
        else:
            pick = ids[order[int(rng.integers(order.size))]]
        schedule.add(pick)
    return schedule


def remove_redundant(schedule: Schedule, ev: Evaluator) -> Schedule:
    """Drop shifts whose pieces are all covered elsewhere, lowest fitness first.

    Every redundant shift has zero over-cover penalty and thus zero fitness,
    so ties go to the costliest shift, then the lowest id.
    """
    pool = schedule.pool
    while schedule.shift_ids:
        ids = np.asarray(schedule.shift_ids)
        needed = pool.masked_work(ids, schedule.ctx.cover_count == 1)
        spare = ids[needed == 0]
        if spare.size == 0:
            break
        F = ev.analyze(schedule)
        j = min(spare.tolist(), key=lambda s: (F[s], -pool.cost[s], s))
        schedule.remove(j)
    return schedule


def initial_greedy(pool: CandidatePool, ev: Evaluator, params: Params, rng) -> Schedule:
    sched = Schedule(pool, params.fixed_charge)
    construct(sched, range(pool.n_pieces_total), ev, params.k, rng)
    return remove_redundant(sched, ev)


@dataclass
class IterationTrace:
    iteration: int
    p_s: float | None
    removed_select: int
    removed_mutate: int
    objective: int
    best_objective: int


@dataclass
class SolveResult:
    best: Schedule
    trace: list[IterationTrace]
    initial_objective: int
    params: Params
    frac: FractionalCover | None = None

    @property
    def iterations(self) -> int:
        return len(self.trace)


def prepare(instance, params: Params, pool: CandidatePool | None = None,
            frac: FractionalCover | None = None):
    """Build (or reuse) the pool and fractional cover and the evaluator."""
    if pool is None:
        pool = enumerate_shifts(instance)
    weights = params.weights
    if not params.use_lp:
        weights = disable_fractional_criterion(weights)
        frac = None
    elif weights.w5 == 0.0:
        frac = None
    elif frac is None:
        frac = fractional_cover(pool, params.fixed_charge)
    return pool, frac, Evaluator(pool, weights, frac)


def _stop(it: int, stale: int, params: Params) -> bool:
    if stale >= params.stagnation_limit:
        return True
    return params.max_iterations is not None and it >= params.max_iterations


def solve_greedy(instance, params: Params, *, pool=None, frac=None) -> SolveResult:
    pool, frac, ev = prepare(instance, params, pool, frac)
    rng = make_rng(params.seed)
    sched = initial_greedy(pool, ev, params, rng)
    return SolveResult(sched, [], sched.objective, params, frac)


def solve_iswo(instance, params: Params, *, pool=None, frac=None) -> SolveResult:
    pool, frac, ev = prepare(instance, params, pool, frac)
    rng = make_rng(params.seed)
    current = initial_greedy(pool, ev, params, rng)
    best = current.copy()
    initial = current.objective
    trace = []
    it = stale = 0
    while not _stop(it, stale, params):
        it += 1
        fit = ev.analyze(current)
        _, sel_removed, p_s = select(current, fit, params.p, rng)
        _, mut_removed = mutate(current, params.p_m, rng)
        seq = prioritize(sel_removed + mut_removed, fit, pool, current.ctx.cover_count)
        construct(current, seq, ev, params.k, rng)
        if params.redundancy_pass:
            remove_redundant(current, ev)
        if current.objective < best.objective:
            best = current.copy()
            stale = 0
        else:
            stale += 1
        trace.append(IterationTrace(it, p_s, len(sel_removed), len(mut_removed),
                                    current.objective, best.objective))
    log.debug("iswo: %d iterations, best %d (initial %d)", it, best.objective, initial)
    return SolveResult(best, trace, initial, params, frac)


def solve_swo(instance, params: Params, *, pool=None, frac=None) -> SolveResult:
    """Classic SWO: per-piece priorities drive a from-scratch rebuild each round.

    After each build, every piece's priority grows by ``1 - F`` of its
    weakest covering shift, so badly served pieces move up the queue.
    """
    pool, frac, ev = prepare(instance, params, pool, frac)
    rng = make_rng(params.seed)
    m = pool.n_pieces_total
    best = initial_greedy(pool, ev, params, rng)
    initial = best.objective
    priority = np.arange(m, 0, -1, dtype=float)
    ids = np.arange(m)
    trace = []
    it = stale = 0
    while not _stop(it, stale, params):
        it += 1
        seq = np.lexsort((ids, -priority))
        sched = construct(Schedule(pool, params.fixed_charge), seq, ev, params.k, rng)
        if params.redundancy_pass:
            remove_redundant(sched, ev)
        fit = ev.analyze(sched)
        worst = np.ones(m)
        for j, F in fit.items():
            pieces = list(pool.shifts[j].pieces)
            worst[pieces] = np.minimum(worst[pieces], F)
        priority += 1.0 - worst
        if sched.objective < best.objective:
            best = sched.copy()
            stale = 0
        else:
            stale += 1
        trace.append(IterationTrace(it, None, 0, 0, sched.objective, best.objective))
    return SolveResult(best, trace, initial, params, frac)


SOLVERS = {"iswo": solve_iswo, "swo": solve_swo, "greedy": solve_greedy}


def solve(instance, algo: str, params: Params, **kw) -> SolveResult:
    try:
        fn = SOLVERS[algo]
    except KeyError:
        raise ValueError(f"unknown algorithm {algo!r}; pick one of {sorted(SOLVERS)}") from None
    return fn(instance, params, **kw)


def with_seed(params: Params, seed: int) -> Params:
    return replace(params, seed=seed)
