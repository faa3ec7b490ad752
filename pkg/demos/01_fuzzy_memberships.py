"""
Fuzzy evaluation of a single shift
==================================

Each candidate shift gets five memberships in [0, 1]. The weighted sum is
its structural coefficient f1.
"""

# %%
import numpy as np

from iswo.evaluate import Weights, aggregate, membership_fractional, membership_s_curve, membership_spells

# The S-curve rises from 0 at the pool minimum b to 1 at the pool maximum a.
b, a = 240.0, 480.0
for x in np.linspace(b, a, 7):
    print(f"work {x:5.0f} min -> {membership_s_curve(x, a, b):.3f}")

# %%
# Spell counts use a fixed table. Two spells is the preferred shape.
for n in range(1, 5):
    print(f"{n} spell(s) -> {membership_spells(n)}")

# %%
# The LP criterion is Gaussian: 1 at the largest fractional value in the
# cover, 0.01 at the smallest, and exactly 0 for shifts outside it.
x5 = np.array([0.9, 0.5, 0.1, 0.0])
in_cover = np.array([True, True, True, False])
print(membership_fractional(x5, 0.9, 0.1, in_cover))

# %%
# Combine with the default weights (0.2, 0.1, 0.1, 0.2, 0.4).
w = Weights()
mu = (membership_s_curve(420, a, b), 0.8, 0.6, membership_spells(2), 0.7)
print("f1 =", round(aggregate(mu, w), 4))
