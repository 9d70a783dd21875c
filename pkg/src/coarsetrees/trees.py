"""Per-color trees built from a cover tower.

Every set ``U`` of one color at level ``k`` becomes an interval ``[0, 2**k]``.
Its 0-end is glued to the integer point ``a_U`` of the interval of the
smallest same-color set strictly above it.  Offsets therefore grow away from
the root: a point ``(U, t)`` sits at height ``h0(U) + t`` where ``h0(U)`` is
the height of U's gluing end.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field

import numpy as np

from .covers import ColoredCover
from .errors import ChainViolationError, FormatError
from .metric import FiniteMetricSpace, Subset, rational
from .tower import CoverTower


@dataclass(frozen=True)
class Node:
    id: int
    level: int
    color: int
    index: int
    set: Subset | None = field(repr=False, compare=False)
    virtual: bool = False

    @property
    def length(self) -> int:
        return 0 if self.virtual else 2**self.level


@dataclass(frozen=True)
class TreePoint:
    node: int
    offset: object

    def __post_init__(self):
        object.__setattr__(self, "offset", rational(self.offset))


def color_nodes(tower: CoverTower, color: int) -> list[Node]:
    nodes = []
    for k, lv in enumerate(tower.levels):
        for j, U in enumerate(lv.cover.families[color]):
            nodes.append(Node(len(nodes), k, color, j, U))
    return nodes


def _above(U: Node, W: Node) -> bool:
    """W is a proper ancestor candidate of U: contains it and is not the same node."""
    if W.id == U.id or W.virtual:
        return False
    if not U.set.issubset(W.set):
        return False
    return len(W.set) > len(U.set) or W.level > U.level


def psi(tower: CoverTower, color: int, U: Node, nodes: list[Node] | None = None) -> Node | None:
    """Smallest same-color set above U under inclusion (equal sets: the higher level)."""
    if nodes is None:
        nodes = color_nodes(tower, color)
    cands = [W for W in nodes if _above(U, W)]
    if not cands:
        return None
    cands.sort(key=lambda W: (len(W.set), W.level))
    for a, b in zip(cands, cands[1:]):
        if not a.set.issubset(b.set):
            raise ChainViolationError(
                f"sets {a.id} (level {a.level}) and {b.id} (level {b.level}) both contain {U.id} but are incomparable",
                witnesses=(U.id, a.id, b.id),
            )
    return cands[0]


def attach_point(tower: CoverTower, color: int, V: Node, nodes: list[Node] | None = None) -> int:
    """Integer point of the parent interval where V's 0-end is glued."""
    U = psi(tower, color, V, nodes)
    if U is None:
        raise ValueError(f"node {V.id} has no parent")
    return _attach(tower, U, V)


def _attach(tower: CoverTower, U: Node, V: Node) -> int:
    k = U.level
    top = 2**k
    comp = ~U.set.mask
    if not comp.any():
        return top
    D = tower.space.D
    s = rational(D[np.ix_(V.set.idx, np.flatnonzero(comp))].min(axis=1).max())
    return min(top, (s * top) // tower.levels[k].d)


class ScaleTree:
    """Tree of intervals for one color, with exact path distances."""

    def __init__(self, color: int, nodes: list[Node], parent: dict, root: int, virtual_root: bool):
        self.color = color
        self.nodes = list(nodes)
        self.parent = dict(parent)
        self.root = root
        self.virtual_root = virtual_root
        self.children: dict[int, list[int]] = {v.id: [] for v in self.nodes}
        for child, (par, _) in sorted(self.parent.items()):
            self.children[par].append(child)
        self._prepare()

    @property
    def size(self) -> int:
        return len(self.nodes)

    def node(self, i: int) -> Node:
        return self.nodes[i]

    def _prepare(self):
        N = len(self.nodes)
        order = []
        stack = [self.root]
        seen = set()
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            order.append(v)
            stack.extend(reversed(self.children[v]))
        self._reachable = seen
        h0 = np.zeros(N, dtype=np.int64)
        for v in order:
            if v in self.parent:
                p, a = self.parent[v]
                h0[v] = h0[p] + a
        self.h0 = h0
        # ancestor chains: [(node, offset on node of the branch)], starting at v with None
        self._chains = {}
        for v in order:
            chain = [(v, None)]
            cur = v
            while cur in self.parent:
                p, a = self.parent[cur]
                chain.append((p, a))
                cur = p
            self._chains[v] = chain
        lca = np.full((N, N), -1, dtype=np.int64)
        boff = np.full((N, N), -1, dtype=np.int64)
        for v in order:
            for c, a in self._chains[v][1:]:
                boff[c, v] = a
        for v in order:
            anc_v = {c: pos for pos, (c, _) in enumerate(self._chains[v])}
            for w in order:
                for c, _ in self._chains[w]:
                    if c in anc_v:
                        lca[v, w] = c
                        break
        self.lca = lca
        self.boff = boff

    def height(self, p: TreePoint):
        return self.h0[p.node] + p.offset

    def chain(self, p: TreePoint):
        """Path from p to the root as ``[(node, offset), ...]``."""
        return [(p.node, p.offset)] + self._chains[p.node][1:]

    def distances_from(self, node: int, offset, nodes: np.ndarray, offsets: np.ndarray) -> np.ndarray:
        """Vectorized tree distance from ``(node, offset)`` to many points."""
        C = self.lca[node, nodes]
        a1 = self.boff[C, node]
        a1 = np.where(a1 < 0, offset, a1) if offsets.dtype != object else _obj_where(a1 < 0, offset, a1)
        a2 = self.boff[C, nodes]
        a2 = np.where(a2 < 0, offsets, a2) if offsets.dtype != object else _obj_where(a2 < 0, offsets, a2)
        meet = self.h0[C] + np.minimum(a1, a2)
        return (self.h0[node] + offset) + (self.h0[nodes] + offsets) - 2 * meet

    def structure_issues(self) -> list[str]:
        """Acyclicity, connectivity, nesting and level monotonicity problems (empty when sound)."""
        issues = []
        for v in self.nodes:
            seen = set()
            cur = v.id
            while cur in self.parent:
                if cur in seen:
                    issues.append(f"cycle through node {cur}")
                    break
                seen.add(cur)
                cur = self.parent[cur][0]
            if v.id not in self._reachable:
                issues.append(f"node {v.id} unreachable from the root")
        for child, (par, a) in self.parent.items():
            c, p = self.nodes[child], self.nodes[par]
            if not (0 <= a <= p.length):
                issues.append(f"attach point {a} of node {child} outside [0, {p.length}]")
            if p.virtual:
                continue
            if not c.set.issubset(p.set):
                issues.append(f"node {child} is not inside its parent {par}")
            if not c.level < p.level:
                issues.append(f"node {child} at level {c.level} has parent at level {p.level}")
        roots = [v.id for v in self.nodes if v.id not in self.parent]
        if roots != [self.root]:
            issues.append(f"parentless nodes {roots}, expected only the root {self.root}")
        return issues

    def zero_chains(self, min_length: int = 2) -> list[list[int]]:
        """Maximal chains V1 -> V2 -> ... of real nodes all glued at point 0."""
        zero = {v: p for v, (p, a) in self.parent.items() if a == 0 and not self.nodes[p].virtual}
        heads = set(zero) - set(zero.values())
        chains = []
        for v in sorted(heads):
            chain = [v]
            while chain[-1] in zero:
                chain.append(zero[chain[-1]])
            if len(chain) - 1 >= min_length:
                chains.append(chain)
        return chains

    def discrete_points(self) -> list[TreePoint]:
        """Integer-offset points, with each child's 0-end identified with its gluing point."""
        out = []
        for v in self.nodes:
            start = 0 if v.id == self.root else 1
            out.extend(TreePoint(v.id, t) for t in range(start, v.length + 1))
        return out

    def canonical(self, p: TreePoint) -> TreePoint:
        while p.offset == 0 and p.node in self.parent:
            par, a = self.parent[p.node]
            p = TreePoint(par, a)
        return p

    def to_dict(self) -> dict:
        return {
            "format_version": 1,
            "kind": "tree",
            "color": self.color,
            "root": self.root,
            "virtual_root": self.virtual_root,
            "nodes": [
                {
                    "id": v.id,
                    "level": v.level,
                    "color": v.color,
                    "set_ref": None if v.virtual else [v.level, v.color, v.index],
                    "parent": self.parent[v.id][0] if v.id in self.parent else None,
                    "attach": self.parent[v.id][1] if v.id in self.parent else None,
                }
                for v in self.nodes
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict, tower: CoverTower) -> "ScaleTree":
        try:
            nodes, parent = [], {}
            for rec in doc["nodes"]:
                ref = rec["set_ref"]
                if ref is None:
                    nodes.append(Node(rec["id"], rec["level"], rec["color"], -1, None, virtual=True))
                else:
                    k, c, j = ref
                    nodes.append(Node(rec["id"], k, c, j, tower.family(k, c)[j]))
                if rec["parent"] is not None:
                    parent[rec["id"]] = (rec["parent"], rec["attach"])
            return cls(doc["color"], nodes, parent, doc["root"], doc["virtual_root"])
        except (KeyError, IndexError, TypeError) as exc:
            raise FormatError(f"malformed tree document: {exc}") from exc


def _obj_where(cond, a, b):
    out = np.empty(np.broadcast(cond, a, b).shape, dtype=object)
    out[...] = np.where(cond, np.asarray(a, dtype=object), np.asarray(b, dtype=object))
    return out


def build_tree(tower: CoverTower, color: int) -> ScaleTree:
    nodes = color_nodes(tower, color)
    parent = {}
    for V in nodes:
        U = psi(tower, color, V, nodes)
        if U is not None:
            parent[V.id] = (U.id, _attach(tower, U, V))
    roots = [v.id for v in nodes if v.id not in parent]
    if len(roots) == 1:
        return ScaleTree(color, nodes, parent, roots[0], False)
    top = tower.depth - 1
    vroot = Node(len(nodes), top + 1, color, -1, None, virtual=True)
    for r in roots:
        parent[r] = (vroot.id, 0)
    return ScaleTree(color, nodes + [vroot], parent, vroot.id, True)


def tree_distance(tree: ScaleTree, p: TreePoint, q: TreePoint):
    """Exact path length between two located points of the tree."""
    cp = tree.chain(p)
    cq = {node: off for node, off in tree.chain(q)}
    for node, off_p in cp:
        if node in cq:
            meet = tree.h0[node] + min(off_p, cq[node])
            return rational(tree.height(p) + tree.height(q) - 2 * meet)
    raise ValueError("points lie in different components")


def tree_space(tree: ScaleTree) -> tuple[FiniteMetricSpace, list[TreePoint]]:
    """Discretized tree as a finite metric space with ids ``(node, offset)``."""
    pts = tree.discrete_points()
    nodes = np.array([p.node for p in pts], dtype=np.int64)
    offs = np.array([p.offset for p in pts], dtype=np.int64)
    D = np.stack([tree.distances_from(p.node, p.offset, nodes, offs) for p in pts])
    ids = [(p.node, p.offset) for p in pts]
    root = tree.canonical(TreePoint(tree.root, 0))
    return FiniteMetricSpace(ids, D, base_point=(root.node, root.offset), max_points=None), pts


def tree_colored_cover(tree: ScaleTree, d, space: FiniteMetricSpace | None = None) -> ColoredCover:
    """Two-family cover of the discretized tree with separation ``d`` and mesh at most ``4d``.

    Points are sorted into height bands ``[j d, (j+1) d)``; inside a band two
    points share an element when their ancestors at height ``j d - ceil(d/2)``
    coincide.  Bands of equal parity form one family.
    """
    d = rational(d)
    if d <= 0:
        raise ValueError("d must be positive")
    if space is None:
        space, pts = tree_space(tree)
    else:
        pts = [TreePoint(*p) for p in space.points]
    s = math.ceil(d / 2)
    groups: dict = {}
    for i, p in enumerate(pts):
        h = tree.height(p)
        j = int(h // d)
        cut = j * d - s
        if cut <= 0:
            key = (j, None)
        else:
            for node, off in tree.chain(p):
                if tree.h0[node] <= cut:
                    anc = tree.canonical(TreePoint(node, cut - tree.h0[node]))
                    key = (j, (anc.node, anc.offset))
                    break
        groups.setdefault(key, []).append(i)
    families = [[], []]
    for key in sorted(groups, key=lambda k: (k[0], groups[k][0])):
        families[key[0] % 2].append(Subset.from_indices(space, groups[key]))
    return ColoredCover(families, d, 4 * d, space)


def random_tree_points(tree: ScaleTree, rng, count: int) -> list[TreePoint]:
    """Points on random real intervals at random half-integer offsets."""
    real = [v for v in tree.nodes if not v.virtual] or tree.nodes
    out = []
    for _ in range(count):
        v = real[rng.randrange(len(real))]
        out.append(TreePoint(v.id, Fraction(rng.randint(0, 2 * v.length), 2)))
    return out


def four_point_gap(tree: ScaleTree, x, y, z, w):
    """Difference between the two largest of the three pair sums (0 for a tree metric)."""
    d = lambda p, q: tree_distance(tree, p, q)  # noqa: E731
    sums = sorted([d(x, y) + d(z, w), d(x, z) + d(y, w), d(x, w) + d(y, z)])
    return sums[2] - sums[1]
