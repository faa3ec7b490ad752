"""
Checking ISWO against exact optima
==================================

On tiny instances the branch-and-bound oracle finds the true optimum, so we
can count how often ISWO reaches it.
"""

# %%
from iswo.engine import Params, solve_iswo
from iswo.generate import tiny_instance
from iswo.oracle import exact_min_cover
from iswo.shiftgen import enumerate_shifts

hits = cells = 0
for s in range(10):
    inst = tiny_instance(s)
    pool = enumerate_shifts(inst)
    opt = exact_min_cover(pool).optimal_objective
    got = [solve_iswo(inst, Params(seed=k, stagnation_limit=200), pool=pool).best.objective
           for k in range(3)]
    hits += sum(g == opt for g in got)
    cells += len(got)
    print(f"{inst.name}: optimum {opt}, ISWO {got}")

print(f"optimum reached in {hits}/{cells} runs")
