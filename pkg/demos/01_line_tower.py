# A cover tower on a window of the integers
#
# We cut the window {-256, ..., 256} out of the integer line and build a
# 2-colored cover tower on it.  Everything is exact: distances are integers
# and no float ever enters a comparison.

import warnings

from coarsetrees.covers import interval_cover, procure_cover, verify_colored_cover
from coarsetrees.errors import WindowExhausted
from coarsetrees.metric import gen_grid, lebesgue_number
from coarsetrees.tower import build_tower, verify_tower

X = gen_grid(1, 256, "l1")
print(X, "diameter", X.diameter)

# ## A periodic seed
#
# Intervals of 24 points repeating every 32, the two colors shifted by half a
# period.  Same-color intervals are 9 apart, so each family is 8-disjoint.

seed = interval_cover(X, period=32, length=24, offset=-12)
rep = verify_colored_cover(seed)
print("seed: d =", seed.d, "mesh =", rep.mesh, "Lebesgue =", rep.lebesgue, "ok =", rep.ok)

# The Lebesgue number is only 5.  Any point lies within 5 of the end of every
# interval containing it, so no seed of this shape has every point 8-deep.

with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always", WindowExhausted)
    tower = build_tower(X, colors=2, L=3, seed_cover=seed)
for w in caught:
    print("warning:", w.message)

for k, lv in enumerate(tower.levels):
    sizes = [len(f) for f in lv.cover.families]
    print(f"level {k}: d = {lv.d}, mesh = {lv.m}, sets per color = {sizes}")

# Level 1 uses d_1 = 4 * m_0 = 92 and ends up as the whole window in one
# color.  Level 2 would need d_2 = 8 * 512, far past the window.

report = verify_tower(tower)
by_cond = {c: len(report.by_condition(c)) for c in ("1", "2", "3'", "4")}
print("violations by condition:", by_cond)
print("first:", report.violations[0].detail if report.violations else None)

# ## A seed that is deep everywhere
#
# procure_cover starts from the greedy clustering and inflates every cluster
# until the Lebesgue number clears the separation.

seed2, attempts = procure_cover(X, d=8, block=24, lebesgue_floor=8, max_colors=2)
print("attempts:", attempts)
print("Lebesgue (unbounded):", lebesgue_number(seed2.elements(), bounded=False))

with warnings.catch_warnings():
    warnings.simplefilter("ignore", WindowExhausted)
    tower2 = build_tower(X, colors=2, L=3, seed_cover=seed2)
print("scales:", [lv.d for lv in tower2.levels], "meshes:", [lv.m for lv in tower2.levels])
print("violations:", len(verify_tower(tower2).violations))
