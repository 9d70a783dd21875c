"""Inductive tower of colored covers with geometrically growing scales.

Level ``l + 1`` is built at scale ``d_{l+1} = 2**(l+2) * m_l`` from a raw
cover with Lebesgue number above ``2 d_{l+1}``: elements without a
``2 d_{l+1}``-deep core are pruned, families are re-enumerated so that the
color ``(l+1) mod r`` holds a set deep around the base point, and each set is
carved away from the closed 4-neighborhoods of earlier same-color sets it
does not contain.  :func:`verify_tower` re-checks the four level conditions
independently of the construction.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .covers import ColoredCover, family_violation, procure_cover, verify_colored_cover
from .errors import FormatError, SeedInvalidError, WindowExhausted
from .metric import (
    INF,
    FiniteMetricSpace,
    Subset,
    closest_pair,
    distances_to,
    fmt_rational,
    lebesgue_number,
    mesh,
    neighborhood,
    parse_rational,
    rational,
    _cover_depths,
    _id_from_json,
    _id_to_json,
)

CARVE_RADIUS = 4


@dataclass(frozen=True)
class Level:
    cover: ColoredCover
    d: object
    m: object


@dataclass
class CoverTower:
    levels: tuple
    colors: int
    base_point: object
    space: FiniteMetricSpace = field(repr=False)
    provenance: list = field(default_factory=list, repr=False)
    truncated: bool = False
    exhausted_scale: object = None
    requested_levels: int = 0

    @property
    def depth(self) -> int:
        return len(self.levels)

    def family(self, level: int, color: int):
        return self.levels[level].cover.families[color]

    def to_dict(self) -> dict:
        return {
            "format_version": 1,
            "kind": "tower",
            "space": self.space.to_dict(),
            "colors": self.colors,
            "base_point": _id_to_json(self.base_point),
            "requested_levels": self.requested_levels,
            "truncated": self.truncated,
            "exhausted_scale": None if self.exhausted_scale is None else fmt_rational(self.exhausted_scale),
            "levels": [
                {"d": fmt_rational(lv.d), "m": fmt_rational(lv.m), "cover": lv.cover.to_dict()}
                for lv in self.levels
            ],
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, doc: dict, space: FiniteMetricSpace | None = None) -> "CoverTower":
        if space is None:
            space = FiniteMetricSpace.from_dict(doc["space"])
        try:
            levels = tuple(
                Level(ColoredCover.from_dict(lv["cover"], space), parse_rational(lv["d"]), parse_rational(lv["m"]))
                for lv in doc["levels"]
            )
            exhausted = doc.get("exhausted_scale")
            return cls(
                levels,
                int(doc["colors"]),
                _id_from_json(doc["base_point"]),
                space,
                list(doc.get("provenance", [])),
                bool(doc.get("truncated", False)),
                None if exhausted is None else parse_rational(exhausted),
                int(doc.get("requested_levels", len(levels))),
            )
        except KeyError as exc:
            raise FormatError(f"malformed tower document: {exc}") from exc


def carve(U: Subset, color: int, earlier) -> Subset:
    """U minus the closed 4-neighborhoods of the earlier ``color`` sets not contained in U."""
    removed = np.zeros(U.space.n, dtype=bool)
    for V in earlier:
        if not V.issubset(U):
            removed |= neighborhood(V, CARVE_RADIUS).mask
    return Subset(U.space, U.mask & ~removed)


def _base_depth(U: Subset, base: int):
    if not U.mask[base]:
        return None
    comp = ~U.mask
    if not comp.any():
        return INF
    return rational(U.space.D[base, comp].min())


def _enumerate(families, colors: int, target: int, base: int):
    """Cyclically rotate ``families`` so the one deepest around the base lands on ``target``."""
    families = [list(f) for f in families] + [[] for _ in range(colors - len(families))]
    best, best_depth = 0, None
    for c, fam in enumerate(families):
        for U in fam:
            depth = _base_depth(U, base)
            if depth is not None and (best_depth is None or depth > best_depth):
                best, best_depth = c, depth
    shift = (target - best) % colors
    rotated = [None] * colors
    for c in range(colors):
        rotated[(c + shift) % colors] = families[c]
    return rotated, shift, best_depth


def build_tower(space: FiniteMetricSpace, colors: int, L: int, seed_cover: ColoredCover, *, block_factor=8) -> CoverTower:
    if L < 1 or colors < 1:
        raise ValueError("build_tower needs L >= 1 and colors >= 1")
    seed_report = verify_colored_cover(seed_cover)
    if not seed_report.ok:
        raise SeedInvalidError(f"seed cover fails verification: {seed_report.witness}")
    if not seed_cover.d > 2:
        raise SeedInvalidError(f"seed separation {seed_cover.d} must exceed 2")
    if seed_cover.colors > colors:
        raise SeedInvalidError(f"seed uses {seed_cover.colors} colors, tower allows {colors}")
    base = space.base
    provenance = []

    fams, shift, depth = _enumerate(seed_cover.families, colors, 0, base)
    m0 = mesh([U for f in fams for U in f])
    levels = [Level(ColoredCover(fams, seed_cover.d, m0, space), seed_cover.d, m0)]
    provenance.append(
        {
            "event": "seed",
            "level": 0,
            "d": fmt_rational(seed_cover.d),
            "m": fmt_rational(m0),
            "rotation": shift,
            "base_depth": fmt_rational(depth) if depth is not None else None,
        }
    )
    truncated, exhausted = False, None

    for l in range(L - 1):
        d_next = 2 ** (l + 2) * levels[l].m
        if d_next > space.diameter or d_next <= 0:
            truncated, exhausted = True, d_next
            provenance.append(
                {"event": "window_exhausted", "level": l + 1, "d": fmt_rational(d_next), "diameter": fmt_rational(space.diameter)}
            )
            warnings.warn(
                f"level {l + 1} needs scale {d_next} beyond the window diameter {space.diameter}",
                WindowExhausted,
                stacklevel=2,
            )
            break
        raw, attempts = procure_cover(space, d_next, block_factor * d_next, 2 * d_next, max_colors=colors)
        provenance.append({"event": "procure", "level": l + 1, "d": fmt_rational(d_next), "attempts": attempts})

        pruned = []
        for c, fam in enumerate(raw.families):
            keep = []
            for j, U in enumerate(fam):
                if neighborhood(U, -2 * d_next):
                    keep.append(U)
                else:
                    provenance.append({"event": "prune", "level": l + 1, "raw_color": c, "element": j, "size": len(U)})
            pruned.append(keep)

        fams, shift, depth = _enumerate(pruned, colors, (l + 1) % colors, base)
        provenance.append(
            {
                "event": "enumerate",
                "level": l + 1,
                "rotation": shift,
                "target_color": (l + 1) % colors,
                "base_depth": fmt_rational(depth) if depth is not None else None,
            }
        )

        carved_fams = []
        for i, fam in enumerate(fams):
            earlier = [V for lv in levels for V in lv.cover.families[i]]
            out = []
            for j, U in enumerate(fam):
                W = carve(U, i, earlier)
                lost = len(U) - len(W)
                if lost:
                    provenance.append({"event": "carve", "level": l + 1, "color": i, "element": j, "removed": lost})
                if W:
                    out.append(W)
                else:
                    provenance.append({"event": "carve_emptied", "level": l + 1, "color": i, "element": j})
            carved_fams.append(out)
        elements = [U for f in carved_fams for U in f]
        m = mesh(elements) if elements else 0
        levels.append(Level(ColoredCover(carved_fams, d_next, m, space), d_next, m))

    return CoverTower(tuple(levels), colors, space.base_point, space, provenance, truncated, exhausted, L)


# ---------------------------------------------------------------------------
# verification


@dataclass
class Violation:
    condition: str
    level: int
    color: int | None
    detail: str
    witness: tuple = ()
    frontier: bool = False

    def to_dict(self):
        return {
            "condition": self.condition,
            "level": self.level,
            "color": self.color,
            "detail": self.detail,
            "witness": [_id_to_json(p) for p in self.witness],
            "frontier": self.frontier,
        }


@dataclass
class TowerReport:
    levels: int
    scales: list
    meshes: list
    lebesgue: list
    frontier_threshold: object
    violations: list = field(default_factory=list)
    truncated: bool = False

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def interior_violations(self):
        return [v for v in self.violations if not v.frontier]

    @property
    def frontier_violations(self):
        return [v for v in self.violations if v.frontier]

    def by_condition(self, name: str):
        return [v for v in self.violations if v.condition == name]

    def to_dict(self):
        return {
            "levels": self.levels,
            "scales": [fmt_rational(s) for s in self.scales],
            "meshes": [fmt_rational(s) for s in self.meshes],
            "lebesgue": [None if s is None else fmt_rational(s) for s in self.lebesgue],
            "frontier_threshold": fmt_rational(self.frontier_threshold),
            "truncated": self.truncated,
            "violations": [v.to_dict() for v in self.violations],
        }


def frontier_threshold(t: CoverTower):
    """Margin a point needs to count as interior: the mesh of the top realized level."""
    return t.levels[-1].m


def verify_tower(t: CoverTower) -> TowerReport:
    space = t.space
    pts = space.points
    margins = space.window_margin
    thresh = frontier_threshold(t)
    violations: list[Violation] = []

    def add(condition, level, color, detail, witness):
        frontier = any(margins[space.index(p)] <= thresh for p in witness)
        violations.append(Violation(condition, level, color, detail, tuple(witness), frontier))

    lebs = []
    for k, lv in enumerate(t.levels):
        cover = lv.cover
        if cover.d != lv.d:
            add("cover", k, None, f"cover separation {cover.d} differs from level scale {lv.d}", ())
        for c, fam in enumerate(cover.families):
            bad = family_violation(fam, lv.d)
            if bad is not None:
                i, j, x, y, dist = bad
                add("cover", k, c, f"elements {i},{j} at distance {dist} <= {lv.d}", (x, y))
        elements = cover.elements()
        m = mesh(elements) if elements else 0
        if m != lv.m:
            add("cover", k, None, f"recorded mesh {lv.m} differs from exact mesh {m}", ())

        # (1) Lebesgue number and nonempty inner cores
        _, covered, best, whole = _cover_depths(elements) if elements else (space, np.zeros(space.n, bool), None, False)
        if not covered.all():
            for i in np.flatnonzero(~covered):
                add("1", k, None, "point not covered", (pts[i],))
            lebs.append(None)
        else:
            leb = lebesgue_number(elements)
            lebs.append(leb)
            if not whole:
                for i in np.flatnonzero(best <= lv.d):
                    add("1", k, None, f"deepest containing set has depth {best[i]} <= {lv.d}", (pts[i],))
        for c, fam in enumerate(cover.families):
            for j, U in enumerate(fam):
                if not neighborhood(U, -lv.d):
                    add("1", k, c, f"element {j} has an empty inner {lv.d}-core", tuple(U.ids()[:1]))

        # (2) scale growth
        if k >= 1:
            prev = t.levels[k - 1].m
            if not lv.d > 2**k * prev:
                add("2", k, None, f"d_{k}={lv.d} is not above 2^{k}*m_{k-1}={2**k * prev}", ())

        # (3)' the set of color k mod r at level k holds the (k div r)-ball around the base deeply
        radius, color = divmod(k, t.colors)
        ball = space.ball(t.base_point, radius)
        if not any(ball.issubset(neighborhood(U, -lv.d)) for U in cover.families[color]):
            add("3'", k, color, f"no set of color {color} has an inner {lv.d}-core containing B_{radius}(x0)", (t.base_point,))

    # (4) same color across levels: U not inside V forces d(U, V) >= 4
    for c in range(t.colors):
        for l in range(1, t.depth):
            for V in t.family(l, c):
                dv = distances_to(V)
                for k in range(l):
                    for j, U in enumerate(t.family(k, c)):
                        if U.issubset(V):
                            continue
                        if dv[U.idx].min() < CARVE_RADIUS:
                            x, y, dist = closest_pair(U, V)
                            add("4", l, c, f"level-{k} element {j} not inside a level-{l} set at distance {dist} < 4", (x, y))

    return TowerReport(
        t.depth,
        [lv.d for lv in t.levels],
        [lv.m for lv in t.levels],
        lebs,
        thresh,
        violations,
        t.truncated,
    )
