"""Projections of a space into its per-color trees and the distortion certificate.

For a set ``U`` of level ``k`` the anchor map sends the inner ``d_k``-core of
``U`` to ``2**k``, the unit boundary of ``U`` to 0 and the unit boundary of
each child ``V`` to its gluing point ``a_V``.  It is extended to all of ``U``
by ``x -> clamp(min_y (xi(y) + d(x, y)), 0, 2**k)``.  A point is projected
into the interval of the lowest-level set of that color containing it.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import NoCoveringSetError
from .metric import (
    INF,
    FiniteMetricSpace,
    complement_depths,
    discrete_boundary,
    fmt_rational,
    neighborhood,
    parse_rational,
    rational,
    _id_to_json,
)
from .tower import CoverTower
from .trees import Node, ScaleTree, TreePoint, color_nodes, tree_distance

_PRECEDENCE = {"inner": 2, "child": 1, "outer": 0}


def select_node(tower: CoverTower, color: int, x, tree: ScaleTree | None = None) -> Node:
    """Lowest-level set of ``color`` containing ``x``."""
    nodes = tree.nodes if tree is not None else color_nodes(tower, color)
    i = tower.space.index(x)
    best = None
    for v in nodes:
        if v.virtual or not v.set.mask[i]:
            continue
        if best is None or v.level < best.level:
            best = v
    if best is None:
        raise NoCoveringSetError(f"no set of color {color} contains {x!r}")
    return best


@dataclass
class AnchorFunction:
    node: Node
    length: int
    points: np.ndarray
    values: np.ndarray
    kinds: list
    conflicts: list = field(default_factory=list)

    @property
    def anchors(self) -> dict:
        pts = self.node.set.space.points
        return {pts[i]: rational(v) for i, v in zip(self.points, self.values)}

    def shortness_violations(self, space: FiniteMetricSpace) -> list:
        """Anchor pairs with |xi(y) - xi(z)| > d(y, z), as (y, z, gap, distance)."""
        out = []
        vals = sorted(set(rational(v) for v in self.values))
        groups = {v: self.points[self.values == v] for v in vals}
        D = space.D
        for a_pos, va in enumerate(vals):
            for vb in vals[a_pos + 1 :]:
                block = D[np.ix_(groups[va], groups[vb])]
                bad = np.argwhere(block < abs(vb - va))
                for r, c in bad:
                    y, z = groups[va][r], groups[vb][c]
                    out.append((space.points[y], space.points[z], abs(vb - va), rational(block[r, c])))
        return out


def build_anchors(tower: CoverTower, tree: ScaleTree, U: Node) -> AnchorFunction:
    space = tower.space
    k = U.level
    top = 2**k
    best_kind = np.full(space.n, -1, dtype=np.int64)
    value = np.zeros(space.n, dtype=object)
    source = np.full(space.n, -1, dtype=np.int64)
    conflicts = []

    def offer(mask, v, kind, src):
        rank = _PRECEDENCE[kind]
        tie = mask & (best_kind == rank) & (value != v)
        for i in np.flatnonzero(tie):
            conflicts.append((space.points[i], int(source[i]), src, value[i], v))
        win = mask & (best_kind < rank)
        best_kind[win], source[win] = rank, src
        value[win] = v

    offer(discrete_boundary(U.set).mask, 0, "outer", -1)
    for child in tree.children[U.id]:
        _, a = tree.parent[child]
        offer(discrete_boundary(tree.nodes[child].set).mask, a, "child", child)
    offer(neighborhood(U.set, -tower.levels[k].d).mask, top, "inner", -1)

    pts = np.flatnonzero(best_kind >= 0)
    names = {v: k for k, v in _PRECEDENCE.items()}
    vals = _vector(value[pts])
    return AnchorFunction(U, top, pts, vals, [names[int(r)] for r in best_kind[pts]], conflicts)


def _vector(values) -> np.ndarray:
    values = [rational(v) for v in values]
    if all(isinstance(v, int) for v in values):
        return np.array(values, dtype=np.int64)
    out = np.empty(len(values), dtype=object)
    out[:] = values
    return out


def extend(f: AnchorFunction, indices: np.ndarray, space: FiniteMetricSpace) -> np.ndarray:
    """Vectorized short extension at point indices."""
    indices = np.asarray(indices, dtype=np.int64)
    if f.points.size == 0:
        return np.full(indices.size, f.length, dtype=np.int64)
    block = space.D[np.ix_(indices, f.points)]
    if block.dtype != object and f.values.dtype != object:
        block = block.astype(np.int64)
    raw = (block + f.values[None, :]).min(axis=1)
    return np.minimum(np.maximum(raw, 0), f.length)


def short_extension(f: AnchorFunction, x):
    space = f.node.set.space
    return rational(extend(f, [space.index(x)], space)[0])


@dataclass(frozen=True)
class ProductPoint:
    coordinates: tuple


def product_distance(trees, a: ProductPoint, b: ProductPoint):
    return sum(tree_distance(t, p, q) for t, p, q in zip(trees, a.coordinates, b.coordinates))


class Embedding:
    """Diagonal map of every point of the window into the product of color trees."""

    def __init__(self, tower: CoverTower, trees: list[ScaleTree]):
        self.tower = tower
        self.trees = list(trees)
        space = tower.space
        self.space = space
        self.nodes = []
        self.offsets = []
        self.fallback = []
        self.anchors: list[dict] = []
        for tree in self.trees:
            node_of = np.full(space.n, -1, dtype=np.int64)
            for v in sorted((v for v in tree.nodes if not v.virtual), key=lambda v: (v.level, v.id)):
                free = v.set.mask & (node_of < 0)
                node_of[free] = v.id
            fallback = node_of < 0
            node_of[fallback] = tree.root
            offs = np.zeros(space.n, dtype=object)
            anchors = {}
            for v in tree.nodes:
                if v.virtual:
                    continue
                f = build_anchors(tower, tree, v)
                anchors[v.id] = f
                sel = np.flatnonzero(node_of == v.id)
                if sel.size:
                    offs[sel] = extend(f, sel, space)
            self.nodes.append(node_of)
            self.offsets.append(_vector(offs))
            self.fallback.append(fallback)
            self.anchors.append(anchors)

    @property
    def colors(self) -> int:
        return len(self.trees)

    def point(self, x) -> ProductPoint:
        i = self.space.index(x)
        return ProductPoint(tuple(TreePoint(int(n[i]), o[i]) for n, o in zip(self.nodes, self.offsets)))

    def __call__(self, x) -> ProductPoint:
        return self.point(x)

    def color_row(self, c: int, i: int, js: np.ndarray) -> np.ndarray:
        tree = self.trees[c]
        return tree.distances_from(int(self.nodes[c][i]), self.offsets[c][i], self.nodes[c][js], self.offsets[c][js])

    def to_dict(self) -> dict:
        return {
            "format_version": 1,
            "kind": "embedding",
            "colors": self.colors,
            "points": [
                {
                    "point": _id_to_json(p),
                    "coords": [[int(self.nodes[c][i]), fmt_rational(self.offsets[c][i])] for c in range(self.colors)],
                }
                for i, p in enumerate(self.space.points)
            ],
            "fallback": [[_id_to_json(self.space.points[i]) for i in np.flatnonzero(fb)] for fb in self.fallback],
        }

    def matches(self, doc: dict) -> list:
        """Points whose serialized coordinates differ from this embedding."""
        bad = []
        for i, rec in enumerate(doc["points"]):
            coords = [[int(self.nodes[c][i]), self.offsets[c][i]] for c in range(self.colors)]
            stored = [[n, parse_rational(o)] for n, o in rec["coords"]]
            if coords != stored:
                bad.append(rec["point"])
        return bad


def project(tower: CoverTower, trees, color: int, x) -> TreePoint:
    tree = trees[color]
    try:
        v = select_node(tower, color, x, tree)
    except NoCoveringSetError:
        return TreePoint(tree.root, 0)
    f = build_anchors(tower, tree, v)
    return TreePoint(v.id, short_extension(f, x))


def embed_space(tower: CoverTower, trees) -> Embedding:
    return Embedding(tower, trees)


# ---------------------------------------------------------------------------
# certificates


def deep_point_violations(emb: Embedding) -> list:
    """Points d_k-deep in their selected level-k set whose offset is not exactly 2**k."""
    out = []
    space = emb.space
    for c, tree in enumerate(emb.trees):
        for v in tree.nodes:
            if v.virtual:
                continue
            sel = emb.nodes[c] == v.id
            depths = complement_depths(v.set)
            dk = emb.tower.levels[v.level].d
            if depths is None:
                deep = v.set.idx
            else:
                deep = v.set.idx[depths > dk]
            for i in deep[sel[deep]]:
                if emb.offsets[c][i] != 2**v.level:
                    out.append((c, space.points[i], v.id, rational(emb.offsets[c][i]), 2**v.level))
    return out


def deep_point_count(emb: Embedding) -> int:
    total = 0
    for c, tree in enumerate(emb.trees):
        for v in tree.nodes:
            if v.virtual:
                continue
            depths = complement_depths(v.set)
            dk = emb.tower.levels[v.level].d
            deep = v.set.idx if depths is None else v.set.idx[depths > dk]
            total += int(np.count_nonzero(emb.nodes[c][deep] == v.id))
    return total


def extension_violations(emb: Embedding) -> list:
    """Pairs x, x' in one set U with |ext(x) - ext(x')| > d(x, x')."""
    out = []
    space = emb.space
    for c, tree in enumerate(emb.trees):
        for v in tree.nodes:
            if v.virtual:
                continue
            f = emb.anchors[c][v.id]
            vals = extend(f, v.set.idx, space)
            idx = v.set.idx
            for r in range(idx.size):
                gap = np.abs(vals[r + 1 :] - vals[r])
                bad = np.flatnonzero(gap > space.D[idx[r], idx[r + 1 :]])
                for b in bad:
                    out.append((c, v.id, space.points[idx[r]], space.points[idx[r + 1 + b]]))
    return out


def anchor_violations(emb: Embedding) -> list:
    out = []
    for c, anchors in enumerate(emb.anchors):
        for nid, f in anchors.items():
            for y, z, gap, dist in f.shortness_violations(emb.space):
                out.append({"color": c, "node": nid, "pair": (y, z), "gap": gap, "distance": dist})
    return out


@dataclass
class DistortionReport:
    buckets: list
    rho1: list
    rho2: list
    pair_counts: list
    rho1_regularized: list
    shortness: list
    lipschitz: dict
    deep_pairs: list
    divergence: list
    frontier_excluded: dict
    pairs_scanned: int
    interior_pairs: int
    fallbacks: list

    @property
    def interior_ok(self) -> bool:
        return (
            all(s["interior_violations"] == 0 for s in self.shortness)
            and self.lipschitz["interior_violations"] == 0
            and all(dp["interior_failures"] == 0 for dp in self.deep_pairs)
            and all(dv["status"] != "fail" for dv in self.divergence)
        )

    @property
    def all_pairs_ok(self) -> bool:
        return (
            all(s["violations"] == 0 for s in self.shortness)
            and self.lipschitz["violations"] == 0
            and all(dp["failures"] == 0 for dp in self.deep_pairs)
            and all(dv["status"] != "fail" for dv in self.divergence)
        )

    def rho1_at(self, t):
        """Regularized lower envelope: min product distance over pairs at distance >= t."""
        for b, v in zip(self.buckets, self.rho1_regularized):
            if b >= t:
                return v
        return INF

    def to_dict(self) -> dict:
        def fr(v):
            return fmt_rational(v)

        return {
            "format_version": 1,
            "kind": "report",
            "pairs_scanned": self.pairs_scanned,
            "interior_pairs": self.interior_pairs,
            "all_pairs_ok": self.all_pairs_ok,
            "interior_ok": self.interior_ok,
            "envelope": [
                {"distance": fr(b), "rho1": fr(r1), "rho2": fr(r2), "pairs": n, "rho1_regularized": fr(rr)}
                for b, r1, r2, n, rr in zip(self.buckets, self.rho1, self.rho2, self.pair_counts, self.rho1_regularized)
            ],
            "shortness": [_jsonable(s) for s in self.shortness],
            "lipschitz": _jsonable(self.lipschitz),
            "deep_pairs": [_jsonable(d) for d in self.deep_pairs],
            "divergence": [_jsonable(d) for d in self.divergence],
            "frontier_excluded": _jsonable(self.frontier_excluded),
            "fallbacks": [_jsonable(f) for f in self.fallbacks],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["distance", "rho1", "rho2", "pairs"])
        for b, r1, r2, n in zip(self.buckets, self.rho1, self.rho2, self.pair_counts):
            w.writerow([fmt_rational(b), fmt_rational(r1), fmt_rational(r2), n])
        return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, str)) or obj is None:
        return obj
    if isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        return int(obj)
    try:
        return fmt_rational(obj)
    except (TypeError, ValueError):
        return str(obj)


def interior_mask(space: FiniteMetricSpace, tower: CoverTower) -> np.ndarray:
    """Points whose window margin exceeds the mesh of the top realized level."""
    thresh = tower.levels[-1].m
    return np.array([m > thresh for m in space.window_margin], dtype=bool)


def distortion_report(space: FiniteMetricSpace, emb: Embedding, tower: CoverTower, *, max_listed: int = 20) -> DistortionReport:
    """Exhaustive scan of all pairs of the window.

    Every pair is checked; each finding is also classified as interior (both
    points have margin above the top mesh) or frontier.
    """
    n = space.n
    D = space.D
    colors = emb.colors
    inner = interior_mask(space, tower)
    iu = np.triu_indices(n, 1)
    buckets = np.unique(D[iu])
    del iu
    nb = buckets.size
    exact_int = all(o.dtype != object for o in emb.offsets) and D.dtype != object
    if exact_int:
        big = np.iinfo(np.int64).max
        rho1 = np.full(nb, big, dtype=np.int64)
        rho2 = np.full(nb, -1, dtype=np.int64)
    else:
        rho1 = np.full(nb, None, dtype=object)
        rho2 = np.full(nb, None, dtype=object)
    counts = np.zeros(nb, dtype=np.int64)

    short = [
        {"color": c, "violations": 0, "interior_violations": 0, "worst_margin": None, "worst_pair": None, "listed": []}
        for c in range(colors)
    ]
    lip = {"factor": colors, "violations": 0, "interior_violations": 0, "listed": []}

    levels = []
    for k, lv in enumerate(tower.levels):
        deep = np.zeros(n, dtype=bool)
        for fam in lv.cover.families:
            for U in fam:
                depths = complement_depths(U)
                if depths is None:
                    deep[U.idx] = True
                else:
                    deep[U.idx[depths > lv.d]] = True
        levels.append(
            {
                "level": k,
                "m": lv.m,
                "d": lv.d,
                "bound": 2**k,
                "deep": deep,
                "checked": 0,
                "interior_checked": 0,
                "failures": 0,
                "interior_failures": 0,
                "min_attained": None,
                "tightest_pair": None,
                "listed": [],
            }
        )

    pts = space.points
    for i in range(n - 1):
        js = np.arange(i + 1, n)
        drow = D[i, js]
        if drow.dtype != object:
            drow = drow.astype(np.int64)
        pin = inner[i] & inner[js]
        total = None
        for c in range(colors):
            t = emb.color_row(c, i, js)
            total = t if total is None else total + t
            margin = t - drow
            bad = margin > 0
            nbad = int(np.count_nonzero(bad))
            s = short[c]
            if nbad:
                s["violations"] += nbad
                s["interior_violations"] += int(np.count_nonzero(bad & pin))
                for b in np.flatnonzero(bad)[: max(0, max_listed - len(s["listed"]))]:
                    s["listed"].append((pts[i], pts[js[b]], rational(margin[b]), bool(pin[b])))
            w = int(np.argmax(margin)) if margin.dtype != object else max(range(margin.size), key=lambda q: margin[q])
            if s["worst_margin"] is None or margin[w] > s["worst_margin"]:
                s["worst_margin"] = rational(margin[w])
                s["worst_pair"] = (pts[i], pts[js[w]])
        lbad = total > colors * drow
        nl = int(np.count_nonzero(lbad))
        if nl:
            lip["violations"] += nl
            lip["interior_violations"] += int(np.count_nonzero(lbad & pin))
            for b in np.flatnonzero(lbad)[: max(0, max_listed - len(lip["listed"]))]:
                lip["listed"].append((pts[i], pts[js[b]], rational(total[b]), rational(drow[b])))

        pos = np.searchsorted(buckets, drow)
        np.minimum.at(rho1, pos, total)
        np.maximum.at(rho2, pos, total)
        counts += np.bincount(pos, minlength=nb)

        for lv in levels:
            cond = (drow > lv["m"]) & (lv["deep"][i] | lv["deep"][js])
            if not cond.any():
                continue
            sel = np.flatnonzero(cond)
            got = total[sel]
            lv["checked"] += sel.size
            lv["interior_checked"] += int(np.count_nonzero(pin[sel]))
            low = int(np.argmin(got)) if got.dtype != object else min(range(got.size), key=lambda q: got[q])
            if lv["min_attained"] is None or got[low] < lv["min_attained"]:
                lv["min_attained"] = rational(got[low])
                lv["tightest_pair"] = (pts[i], pts[js[sel[low]]])
            fail = got < lv["bound"]
            if fail.any():
                lv["failures"] += int(np.count_nonzero(fail))
                lv["interior_failures"] += int(np.count_nonzero(fail & pin[sel]))
                for b in np.flatnonzero(fail)[: max(0, max_listed - len(lv["listed"]))]:
                    lv["listed"].append((pts[i], pts[js[sel[b]]], rational(got[b])))

    rho1_l = [rational(v) for v in rho1]
    rho2_l = [rational(v) for v in rho2]
    reg = list(rho1_l)
    for b in range(nb - 2, -1, -1):
        reg[b] = min(reg[b], reg[b + 1])

    report_levels = []
    divergence = []
    for lv in levels:
        lv.pop("deep")
        report_levels.append(lv)
    rep = DistortionReport(
        [rational(b) for b in buckets],
        rho1_l,
        rho2_l,
        [int(c) for c in counts],
        reg,
        short,
        lip,
        report_levels,
        divergence,
        {},
        n * (n - 1) // 2,
        int(np.count_nonzero(inner)) * (int(np.count_nonzero(inner)) - 1) // 2,
        [],
    )
    for lv in report_levels:
        t = lv["m"] + 1
        value = rep.rho1_at(t)
        if lv["checked"] == 0:
            status = "vacuous"
        else:
            status = "pass" if value >= lv["bound"] else "fail"
        divergence.append({"level": lv["level"], "t": t, "rho1": value, "bound": lv["bound"], "status": status})
    frontier_pts = [pts[i] for i in np.flatnonzero(~inner)]
    rep.frontier_excluded = {
        "threshold": tower.levels[-1].m,
        "frontier_points": len(frontier_pts),
        "frontier_pairs": rep.pairs_scanned - rep.interior_pairs,
        "points": frontier_pts[:max_listed],
    }
    rep.fallbacks = [
        {"color": c, "count": int(np.count_nonzero(fb)), "points": [pts[i] for i in np.flatnonzero(fb)[:max_listed]]}
        for c, fb in enumerate(emb.fallback)
    ]
    return rep
