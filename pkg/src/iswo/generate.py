"""Seeded random instances for tests, demos and benchmarks."""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from .model import Block, Instance, ReliefOpportunity, Rules
from .oracle import MAX_PIECES
from .shiftgen import PoolError, enumerate_shifts

DAY_SPAN = (240, 1500)

MEDIUM_RULES = Rules(
    min_work_time=240, max_work_time=480, min_ratio=75, max_ratio=100, max_spells=4,
    max_spreadover=570, min_break_between_spells=45,
)
TINY_RULES = Rules(
    min_work_time=150, max_work_time=330, min_ratio=60, max_ratio=100, max_spells=3,
    max_spreadover=480, min_break_between_spells=20,
)


def random_instance(n_blocks: int, ros_per_block=(6, 10), span=DAY_SPAN, seed: int = 0,
                    rules: Rules | None = None, gap=(60, 130), name: str | None = None) -> Instance:
    """Blocks with ``ros_per_block`` ROs each, consecutive ROs ``gap`` minutes apart.

    Each block starts at a random minute such that it ends inside ``span``.
    """
    rules = rules or MEDIUM_RULES
    lo, hi = ros_per_block
    if n_blocks < 1 or lo < 2 or hi < lo:
        raise ValueError("need n_blocks >= 1 and 2 <= min ROs <= max ROs")
    if gap[0] < 1 or gap[1] < gap[0]:
        raise ValueError("need 1 <= min gap <= max gap")
    if (hi - 1) * gap[1] > span[1] - span[0]:
        raise ValueError("span too short for the longest possible block")
    rng = np.random.Generator(np.random.PCG64(seed))
    blocks = []
    for b in range(n_blocks):
        n_ros = int(rng.integers(lo, hi + 1))
        gaps = rng.integers(gap[0], gap[1] + 1, size=n_ros - 1)
        length = int(gaps.sum())
        start = int(rng.integers(span[0], span[1] - length + 1))
        times = start + np.concatenate([[0], np.cumsum(gaps)])
        ros = tuple(ReliefOpportunity(int(t), f"L{int(rng.integers(4))}") for t in times)
        blocks.append(Block(f"b{b:02d}", ros))
    return Instance(name or f"rand-{n_blocks}x{lo}-{hi}-s{seed}", tuple(blocks), rules)


def tiny_instance(seed: int, max_pieces: int = 12, max_shifts: int = 18, attempts: int = 1000) -> Instance:
    """A 2-block instance with 3-4 ROs per block whose pool fits the oracle caps.

    Candidates are drawn from a deterministic sub-seed sequence until one is
    coverable and small enough.
    """
    for attempt in range(attempts):
        inst = random_instance(
            2, (3, 4), span=(360, 960), seed=seed * 100_003 + attempt,
            rules=TINY_RULES, gap=(40, 110), name=f"tiny-{seed:03d}",
        )
        try:
            pool = enumerate_shifts(inst, max_pool=max_shifts + 1)
        except PoolError:
            continue
        if len(pool) <= max_shifts and inst.n_pieces <= min(max_pieces, MAX_PIECES):
            return inst
    raise RuntimeError(f"no tiny instance found for seed {seed}")


def medium_instance(seed: int) -> Instance:
    """20 blocks with 6-10 ROs each."""
    return random_instance(20, (6, 10), seed=seed, rules=MEDIUM_RULES, name=f"medium-{seed:02d}")


def with_rules(instance: Instance, **changes) -> Instance:
    return Instance(instance.name, instance.blocks, replace(instance.rules, **changes))
