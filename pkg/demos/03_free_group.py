# The same pipeline on a ball in the free group of rank 2
#
# Words of length at most 6 in a, b and their inverses A, B.  The Cayley
# graph is a tree, so the word metric is already a tree metric, and the
# interesting question is how the colored trees see it.

import warnings

from coarsetrees.covers import greedy_colored_cover, verify_colored_cover
from coarsetrees.embed import Embedding, deep_point_count, distortion_report
from coarsetrees.errors import WindowExhausted
from coarsetrees.metric import gen_free_group_ball
from coarsetrees.tower import build_tower
from coarsetrees.trees import build_tree

X = gen_free_group_ball(2, 6)
print(X, "diameter", X.diameter)
print("d(ab, aB) =", X.dist("ab", "aB"), " d(ab, ba) =", X.dist("ab", "ba"))

# The greedy seed clusters points into pieces of diameter at most 3 and
# colors the pieces so that same-color pieces are more than 3 apart.

seed = greedy_colored_cover(X, d=3, block=3)
print("colors:", seed.colors, "report:", verify_colored_cover(seed))

with warnings.catch_warnings():
    warnings.simplefilter("ignore", WindowExhausted)
    tower = build_tower(X, seed.colors, 3, seed)
print("scales:", [lv.d for lv in tower.levels], "meshes:", [lv.m for lv in tower.levels])

trees = [build_tree(tower, c) for c in range(tower.colors)]
print("tree sizes:", [t.size for t in trees])

emb = Embedding(tower, trees)
print("deep (point, color) cases:", deep_point_count(emb))

rep = distortion_report(X, emb, tower)
print("pairs:", rep.pairs_scanned)
print("shortness violations:", [s["violations"] for s in rep.shortness])
print("product over", emb.colors, "* dist:", rep.lipschitz["violations"])

# Clusters of diameter 3 hold no point deeper than 3, so the level-0 bound
# has nothing to act on here.  The divergence check says so rather than
# passing silently.
for dv in rep.divergence:
    print("level", dv["level"], dv["status"], "rho1 =", dv["rho1"])
