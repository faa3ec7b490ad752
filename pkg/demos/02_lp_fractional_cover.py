"""
LP relaxation of the covering problem
=====================================

The in-repo two-phase simplex solves min sum (cost + 2000) x subject to
every piece being covered at least once, with 0 <= x <= 1. Its optimum is
a lower bound on any integer schedule.
"""

# %%
from iswo.generate import tiny_instance
from iswo.lp import fractional_cover
from iswo.oracle import exact_min_cover
from iswo.shiftgen import enumerate_shifts

inst = tiny_instance(7)
pool = enumerate_shifts(inst)
print(f"{inst.name}: {inst.n_pieces} pieces, {len(pool)} legal shifts")
print(pool.dump())

# %%
fc = fractional_cover(pool)
print(f"LP objective {fc.objective:.2f} after {fc.iterations} pivots")
print(f"fractional cover: {fc.in_cover.nonzero()[0].tolist()}  (a={fc.a:.3f}, b={fc.b:.3f})")

# %%
# The exact oracle confirms the bound.
opt = exact_min_cover(pool)
print(f"oracle optimum {opt.optimal_objective} with shifts {opt.optimal_shift_ids}")
assert fc.objective <= opt.optimal_objective + 1e-6
