"""Colored covers: d-disjoint families of bounded sets that jointly cover a space."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import FormatError, NotACoverError, ScaleMismatchError
from .metric import (
    FiniteMetricSpace,
    Subset,
    closest_pair,
    distances_to,
    fmt_rational,
    lebesgue_number,
    mesh,
    neighborhood,
    parse_rational,
    product_space,
    rational,
    _id_from_json,
    _id_to_json,
)


@dataclass(frozen=True)
class ColoredCover:
    """Families indexed by color; each family should be ``d``-disjoint (strictly)."""

    families: tuple
    d: object
    mesh_bound: object
    space: FiniteMetricSpace = field(repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "families", tuple(tuple(f) for f in self.families))
        object.__setattr__(self, "d", rational(self.d))
        object.__setattr__(self, "mesh_bound", rational(self.mesh_bound))

    @property
    def colors(self) -> int:
        return len(self.families)

    def elements(self):
        return [U for fam in self.families for U in fam]

    def to_dict(self) -> dict:
        return {
            "format_version": 1,
            "kind": "cover",
            "d": fmt_rational(self.d),
            "mesh_bound": fmt_rational(self.mesh_bound),
            "families": [[[_id_to_json(p) for p in U.ids()] for U in fam] for fam in self.families],
        }

    @classmethod
    def from_dict(cls, doc: dict, space: FiniteMetricSpace) -> "ColoredCover":
        try:
            families = [[space.subset(_id_from_json(p) for p in U) for U in fam] for fam in doc["families"]]
            return cls(families, parse_rational(doc["d"]), parse_rational(doc["mesh_bound"]), space)
        except KeyError as exc:
            raise FormatError(f"malformed cover document: {exc}") from exc


@dataclass
class CoverReport:
    covers: bool
    d_disjoint: list
    mesh_ok: bool
    mesh: object
    lebesgue: object
    witness: dict | None = None

    @property
    def ok(self) -> bool:
        return self.covers and all(self.d_disjoint) and self.mesh_ok


def family_violation(family, d):
    """First pair of elements in ``family`` at distance <= d, as (i, j, x, y, dist), else None."""
    family = list(family)
    if len(family) < 2:
        return None
    space = family[0].space
    label = np.full(space.n, -1, dtype=np.int64)
    for j, U in enumerate(family):
        label[U.mask & (label < 0)] = j
        if np.any(label[U.idx] != j):
            # overlapping elements of one family are at distance 0
            other = int(label[U.idx][label[U.idx] != j][0])
            x, y, dist = closest_pair(family[other], U)
            return other, j, x, y, dist
    for i, U in enumerate(family):
        near = distances_to(U) <= d
        hits = np.unique(label[near & (label >= 0)])
        hits = hits[hits > i]
        if hits.size:
            j = int(hits[0])
            x, y, dist = closest_pair(U, family[j])
            return i, j, x, y, dist
    return None


def verify_colored_cover(c: ColoredCover) -> CoverReport:
    space = c.space
    elements = c.elements()
    covered = np.zeros(space.n, dtype=bool)
    for U in elements:
        covered |= U.mask
    witness = None
    covers = bool(covered.all())
    if not covers:
        witness = {"check": "covers", "point": space.points[int(np.flatnonzero(~covered)[0])]}
    disjoint = []
    for color, fam in enumerate(c.families):
        bad = family_violation(fam, c.d)
        disjoint.append(bad is None)
        if bad is not None and witness is None:
            i, j, x, y, dist = bad
            witness = {"check": "d_disjoint", "color": color, "elements": (i, j), "pair": (x, y), "distance": dist}
    nonempty = [U for U in elements if U]
    m = mesh(nonempty) if nonempty else 0
    mesh_ok = m <= c.mesh_bound and len(nonempty) == len(elements)
    if not mesh_ok and witness is None:
        witness = {"check": "mesh", "mesh": m, "bound": c.mesh_bound}
    leb = lebesgue_number(elements) if covers else None
    return CoverReport(covers, disjoint, mesh_ok, m, leb, witness)


def _clusters(space: FiniteMetricSpace, block) -> list[np.ndarray]:
    D = space.D
    unassigned = np.ones(space.n, dtype=bool)
    clusters = []
    for seed in range(space.n):
        if not unassigned[seed]:
            continue
        members = [seed]
        unassigned[seed] = False
        far = np.array(D[seed])
        cand = np.flatnonzero(unassigned & (D[seed] <= block))
        # breadth-first: nearest to the seed first, index order on ties
        order = cand[np.argsort(D[seed, cand], kind="stable")]
        for p in order:
            if far[p] <= block:
                members.append(int(p))
                unassigned[p] = False
                far = np.maximum(far, D[p])
        clusters.append(np.array(sorted(members), dtype=np.int64))
    return clusters


def greedy_colored_cover(space: FiniteMetricSpace, d, block) -> ColoredCover:
    """Partition into clusters of diameter <= block, then color the conflict graph.

    Two clusters conflict when their distance is <= d.  Clusters are colored
    greedily in order of decreasing conflict degree, ties broken by smallest
    member.  The color count is a witness, not a lower bound.
    """
    d, block = rational(d), rational(block)
    if d <= 0 or block < d:
        raise ValueError("greedy_colored_cover needs d > 0 and block >= d")
    clusters = _clusters(space, block)
    label = np.empty(space.n, dtype=np.int64)
    for j, idx in enumerate(clusters):
        label[idx] = j
    D = space.D
    conflicts = []
    for j, idx in enumerate(clusters):
        near = (D[idx].min(axis=0) if len(idx) > 1 else D[idx[0]]) <= d
        nb = set(np.unique(label[near]).tolist())
        nb.discard(j)
        conflicts.append(nb)
    order = sorted(range(len(clusters)), key=lambda j: (-len(conflicts[j]), int(clusters[j][0])))
    color = {}
    for j in order:
        used = {color[k] for k in conflicts[j] if k in color}
        c = 0
        while c in used:
            c += 1
        color[j] = c
    ncolors = max(color.values()) + 1
    families = [[] for _ in range(ncolors)]
    for j in sorted(range(len(clusters)), key=lambda j: int(clusters[j][0])):
        families[color[j]].append(Subset.from_indices(space, clusters[j]))
    m = mesh([U for fam in families for U in fam])
    return ColoredCover(families, d, m, space)


def inflate(cover: ColoredCover, radius) -> ColoredCover:
    """Replace every element by its closed ``radius``-neighborhood."""
    families = [[neighborhood(U, radius) for U in fam] for fam in cover.families]
    m = mesh([U for fam in families for U in fam])
    return ColoredCover(families, cover.d, m, cover.space)


def procure_cover(space: FiniteMetricSpace, d, block, lebesgue_floor, max_colors=None):
    """Greedy cover at separation ``d`` whose Lebesgue number exceeds ``lebesgue_floor``.

    Elements are inflated by ``lebesgue_floor`` when the raw cover falls
    short; if inflation breaks d-disjointness (or more than ``max_colors``
    colors appear) the block is doubled and the attempt repeated.  Once the
    block exceeds the diameter the single cluster is the whole space, so the
    loop always ends.  Returns ``(cover, attempts)`` where ``attempts`` logs
    every try.
    """
    d, block, floor = rational(d), rational(block), rational(lebesgue_floor)
    attempts = []
    while True:
        raw = greedy_colored_cover(space, d, block)
        candidate = raw
        leb = lebesgue_number(raw.elements(), bounded=False)
        inflated = False
        if leb <= floor:
            candidate = inflate(raw, floor)
            leb = lebesgue_number(candidate.elements(), bounded=False)
            inflated = True
        ok_disjoint = all(family_violation(f, d) is None for f in candidate.families)
        ok_colors = max_colors is None or candidate.colors <= max_colors
        accepted = ok_disjoint and ok_colors and leb > floor
        attempts.append(
            {
                "block": fmt_rational(block),
                "colors": candidate.colors,
                "inflated": inflated,
                "lebesgue": fmt_rational(leb),
                "accepted": accepted,
            }
        )
        if accepted:
            return candidate, attempts
        if block > 2 * space.diameter:
            raise NotACoverError("no admissible cover found even with a single cluster")
        block = block * 2


def interval_cover(space: FiniteMetricSpace, period: int, length: int, offset: int = 0, colors: int = 2):
    """Periodic interval cover of an integer line window.

    Color ``c`` holds the intervals ``[offset + c*period/colors + j*period,
    ... + length - 1]`` intersected with the window.
    """
    if period % colors:
        raise ValueError("period must be divisible by the number of colors")
    pts = np.array(space.points)
    lo, hi = int(pts.min()), int(pts.max())
    families = []
    for c in range(colors):
        start0 = offset + c * period // colors
        fam = []
        j = (lo - start0 - length) // period
        while start0 + j * period <= hi:
            a = start0 + j * period
            b = a + length - 1
            mask = (pts >= a) & (pts <= b)
            if mask.any():
                fam.append(Subset(space, mask))
            j += 1
        families.append(fam)
    gap = period - length + 1
    m = mesh([U for f in families for U in f])
    return ColoredCover(families, gap - 1, m, space)


def product_cover(a: ColoredCover, b: ColoredCover, space: FiniteMetricSpace | None = None) -> ColoredCover:
    """Color-pair product cover on the l1 product; color ``i * b.colors + j`` holds ``U x V``."""
    if a.d != b.d:
        raise ScaleMismatchError(f"separation scales differ: {a.d} != {b.d}")
    if space is None:
        space = product_space(a.space, b.space)
    families = []
    for fa in a.families:
        for fb in b.families:
            fam = []
            for U in fa:
                for V in fb:
                    mask = (U.mask[:, None] & V.mask[None, :]).reshape(-1)
                    if mask.size != space.n:
                        raise ValueError("product space does not match the factor spaces")
                    fam.append(Subset(space, mask))
            families.append(fam)
    return ColoredCover(families, a.d, a.mesh_bound + b.mesh_bound, space)
