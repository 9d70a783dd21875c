# From a tower to trees, and from trees to an embedding
#
# Each color of the tower becomes a tree of intervals.  A set of level k is
# the interval [0, 2^k]; its 0-end is glued into the smallest set above it.
# Points of the space then land on these trees through short anchor maps.

import warnings

from coarsetrees.covers import interval_cover
from coarsetrees.embed import Embedding, distortion_report
from coarsetrees.errors import WindowExhausted
from coarsetrees.metric import gen_grid
from coarsetrees.tower import build_tower
from coarsetrees.trees import TreePoint, build_tree, tree_colored_cover, tree_distance

X = gen_grid(1, 256, "l1")
with warnings.catch_warnings():
    warnings.simplefilter("ignore", WindowExhausted)
    tower = build_tower(X, 2, 3, interval_cover(X, 32, 24, offset=-12))

trees = [build_tree(tower, c) for c in range(tower.colors)]
for t in trees:
    glued = sorted({a for _, a in t.parent.values()})
    print(f"color {t.color}: {t.size} nodes, root {t.root}, virtual root {t.virtual_root}, glue points {glued}")

# Distances are path lengths.  Two leaves glued into the same root:

t = trees[1]
leaves = [v for v in t.parent if not t.nodes[t.parent[v][0]].virtual][:2]
p, q = TreePoint(leaves[0], 1), TreePoint(leaves[1], 1)
print("leaf to leaf:", tree_distance(t, p, q), "attach points", [t.parent[v] for v in leaves])

# ## The trees have linear type
#
# Height bands of width d give two d-disjoint families with mesh below 4d.

for d in (1, 2, 4):
    cover = tree_colored_cover(t, d)
    print(f"d = {d}: {len(cover.elements())} elements, mesh bound {cover.mesh_bound}")

# ## The embedding
#
# Every point goes to the lowest set of each color that contains it.  The
# report scans all 131,328 pairs.

emb = Embedding(tower, trees)
for x in (0, 5, 11, 12, 100):
    print(x, emb.point(x).coordinates)

rep = distortion_report(X, emb, tower)
print("per-color shortness violations:", [s["violations"] for s in rep.shortness])
print("product over 2*dist:", rep.lipschitz["violations"])
for dv in rep.divergence:
    print("level", dv["level"], "rho1 at", dv["t"], "=", dv["rho1"], "bound", dv["bound"], dv["status"])

# The lower envelope, first rows of the tabular report:
print("\n".join(rep.to_csv().splitlines()[:6]))
print("...")
print("\n".join(rep.to_csv().splitlines()[20:30]))
