"""Improved squeaky wheel optimisation (ISWO) for bus and rail driver scheduling.

The pieces, from the bottom up:

``model``
    Instances (blocks of vehicle work split at relief opportunities), rules,
    spells and shifts, plus the JSON instance format.
``shiftgen``
    Enumeration of every legal candidate shift and per-piece coverage lists.
``evaluate``
    Fuzzy shift fitness (structural coefficient times over-cover penalty)
    and the weighted-sum schedule objective.
``lp``
    Dense two-phase simplex for the covering LP relaxation, which supplies
    the fractional-cover criterion.
``engine``
    The ISWO loop, the classic SWO baseline and a greedy constructor.
``oracle``
    Exact branch and bound for tiny pools.
"""

from .engine import Params, Schedule, SolveResult, solve, solve_greedy, solve_iswo, solve_swo
from .evaluate import Weights, objective
from .generate import medium_instance, random_instance, tiny_instance
from .lp import FractionalCover, fractional_cover
from .model import Block, Instance, ReliefOpportunity, Rules, Shift, Spell, load_instance, save_instance
from .oracle import exact_min_cover
from .shiftgen import CandidatePool, enumerate_shifts

__version__ = "0.1.0"

__all__ = [
    "Block", "CandidatePool", "FractionalCover", "Instance", "Params", "ReliefOpportunity",
    "Rules", "Schedule", "Shift", "SolveResult", "Spell", "Weights", "enumerate_shifts",
    "exact_min_cover", "fractional_cover", "load_instance", "medium_instance", "objective",
    "random_instance", "save_instance", "solve", "solve_greedy", "solve_iswo", "solve_swo",
    "tiny_instance",
]
