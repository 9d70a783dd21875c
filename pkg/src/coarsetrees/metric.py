"""Exact finite metric spaces and set-level metric operators.

Distances are exact rationals: Python ``int`` or ``fractions.Fraction``.
Integer-valued spaces keep their distance matrix as a numpy integer array
(exact, and fast enough for exhaustive pair scans); anything else is held as
an object array of ``Fraction``.  No floating point enters a predicate.

Conventions used throughout:

* outer neighborhoods are closed, ``N_r(A) = {x : d(x, A) <= r}``;
* inner cores are strict, ``N_{-r}(A) = {x in A : d(x, X \\ A) > r}``;
* distinct points are at distance at least 1 (inputs are rescaled on ingest).
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import cached_property
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

from .errors import EmptySetError, FormatError, NotACoverError, SizeLimitError

DEFAULT_MAX_POINTS = 10_000


class _Infinity:
    """Sentinel for +infinity.  Compares above every rational, equals only itself."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("coarsetrees.INF")

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __mul__(self, other):
        if other is self or other > 0:
            return self
        raise ValueError("INF may only be scaled by a positive number")

    __rmul__ = __mul__

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def rational(value):
    """Normalize a number to ``int`` or ``Fraction``; rejects NaN and infinities."""
    if value is INF:
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not distances")
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, float) and not math.isfinite(value):
        raise ValueError(f"not a finite rational: {value!r}")
    f = Fraction(value)
    return f.numerator if f.denominator == 1 else f


def fmt_rational(value) -> str:
    if value is INF:
        return "inf"
    value = rational(value)
    if isinstance(value, int):
        return str(value)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text):
    if isinstance(text, (int, np.integer)) and not isinstance(text, bool):
        return int(text)
    if not isinstance(text, str):
        raise FormatError(f"rational must be serialized as a string, got {text!r}")
    if text == "inf":
        return INF
    try:
        return rational(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad rational {text!r}") from exc


def _exact_matrix(dist) -> np.ndarray:
    arr = np.asarray(dist)
    if arr.dtype.kind in "iu":
        return arr.astype(np.int64)
    if arr.dtype.kind == "b":
        raise TypeError("boolean distance matrix")
    out = np.empty(arr.shape, dtype=object)
    flat_in = arr.reshape(-1)
    flat_out = out.reshape(-1)
    for i, v in enumerate(flat_in):
        flat_out[i] = rational(v)
    if all(isinstance(v, int) for v in flat_out):
        return out.astype(np.int64)
    return out


def _compact(D: np.ndarray) -> np.ndarray:
    if D.dtype == object or D.size == 0:
        return D
    if D.max() < 2**20:
        return D.astype(np.int32)
    return D


class FiniteMetricSpace:
    """A finite point set with an exact distance matrix and a base point.

    ``points`` are hashable identifiers; internally points are addressed by
    their position in ``points``.  ``window_margin[i]`` is the distance from
    point ``i`` to the frontier of the window this space was cut from (0 when
    unknown).  If the smallest nonzero distance is below 1 the whole matrix
    is rescaled by its reciprocal; the factor is kept in ``scale``.
    """

    def __init__(
        self,
        points: Sequence[Hashable],
        dist,
        base_point=None,
        window_margin=None,
        descriptor: dict | None = None,
        *,
        max_points: int | None = DEFAULT_MAX_POINTS,
    ):
        points = list(points)
        n = len(points)
        if n == 0:
            raise EmptySetError("a metric space needs at least one point")
        if max_points is not None and n > max_points:
            raise SizeLimitError(f"{n} points exceeds the cap of {max_points}")
        self._index = {p: i for i, p in enumerate(points)}
        if len(self._index) != n:
            raise ValueError("point identifiers must be unique")
        D = _exact_matrix(dist)
        if D.shape != (n, n):
            raise ValueError(f"distance matrix has shape {D.shape}, expected {(n, n)}")
        if any(D[i, i] != 0 for i in range(n)):
            raise ValueError("distance matrix must have a zero diagonal")
        if not np.all(D == D.T):
            raise ValueError("distance matrix must be symmetric")
        if n > 1:
            off = D[~np.eye(n, dtype=bool)]
            low = min(off) if D.dtype == object else off.min()
            if low <= 0:
                raise ValueError("distinct points must be at positive distance")
        else:
            low = 1
        self.scale = 1
        if low < 1:
            self.scale = Fraction(1) / Fraction(low)
            D = _exact_matrix(D.astype(object) * self.scale)
        self._D = _compact(D)
        self._D.setflags(write=False)
        self.points = tuple(points)
        self.base_point = points[0] if base_point is None else base_point
        if self.base_point not in self._index:
            raise ValueError(f"base point {self.base_point!r} is not a point of the space")
        if window_margin is None:
            window_margin = [0] * n
        if len(window_margin) != n:
            raise ValueError("window_margin must have one entry per point")
        self.window_margin = tuple(rational(m) * self.scale for m in window_margin)
        self.descriptor = descriptor

    # basic access -------------------------------------------------------

    def __len__(self):
        return len(self.points)

    def __repr__(self):
        kind = self.descriptor["kind"] if self.descriptor else "matrix"
        return f"FiniteMetricSpace({kind}, n={len(self)}, base={self.base_point!r})"

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def D(self) -> np.ndarray:
        return self._D

    @property
    def exact_integers(self) -> bool:
        return self._D.dtype != object

    def index(self, point) -> int:
        try:
            return self._index[point]
        except KeyError:
            raise KeyError(f"{point!r} is not a point of this space") from None

    @property
    def base(self) -> int:
        return self._index[self.base_point]

    def dist(self, x, y):
        return rational(self._D[self.index(x), self.index(y)])

    @cached_property
    def diameter(self):
        return rational(self._D.max())

    @cached_property
    def margins(self) -> np.ndarray:
        return _vector(self.window_margin)

    def subset(self, ids: Iterable[Hashable]) -> "Subset":
        return Subset.from_ids(self, ids)

    def full(self) -> "Subset":
        return Subset(self, np.ones(self.n, dtype=bool))

    def empty(self) -> "Subset":
        return Subset(self, np.zeros(self.n, dtype=bool))

    def ball(self, x, r) -> "Subset":
        """Closed ball of radius ``r`` around point ``x``."""
        return Subset(self, self._D[self.index(x)] <= r)

    def check_triangle(self):
        """Return the first ``(i, j, k)`` index triple with d(i,j) > d(i,k)+d(k,j), else None."""
        D = self._D
        for k in range(self.n):
            bad = D > D[:, k, None] + D[None, k, :]
            if bad.any():
                i, j = np.argwhere(bad)[0]
                return (self.points[i], self.points[j], self.points[k])
        return None

    @classmethod
    def from_function(cls, points, metric: Callable, **kwargs) -> "FiniteMetricSpace":
        points = list(points)
        n = len(points)
        D = np.empty((n, n), dtype=object)
        for i in range(n):
            for j in range(n):
                D[i, j] = rational(metric(points[i], points[j]))
        return cls(points, D, **kwargs)

    # serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        doc = {
            "format_version": 1,
            "kind": "space",
            "points": [_id_to_json(p) for p in self.points],
            "base_point": _id_to_json(self.base_point),
            "window_margin": [fmt_rational(m) for m in self.window_margin],
        }
        if self.descriptor is not None:
            doc["metric"] = {"kind": "generator", "data": dict(self.descriptor)}
        else:
            rows = [[fmt_rational(self._D[i, j]) for j in range(i)] for i in range(self.n)]
            doc["metric"] = {"kind": "matrix", "data": rows}
        return doc

    @classmethod
    def from_dict(cls, doc: dict, *, max_points: int | None = DEFAULT_MAX_POINTS) -> "FiniteMetricSpace":
        try:
            metric = doc["metric"]
            if metric["kind"] == "generator":
                space = from_descriptor(metric["data"], max_points=max_points)
                if [_id_to_json(p) for p in space.points] != doc["points"]:
                    raise FormatError("generator descriptor does not reproduce the listed points")
                return space
            if metric["kind"] != "matrix":
                raise FormatError(f"unknown metric kind {metric['kind']!r}")
            points = [_id_from_json(p) for p in doc["points"]]
            n = len(points)
            rows = metric["data"]
            if len(rows) != n:
                raise FormatError("matrix has the wrong number of rows")
            D = np.zeros((n, n), dtype=object)
            for i, row in enumerate(rows):
                if len(row) != i:
                    raise FormatError(f"row {i} of the lower triangle has length {len(row)}")
                for j, v in enumerate(row):
                    D[i, j] = D[j, i] = parse_rational(v)
            return cls(
                points,
                D,
                base_point=_id_from_json(doc["base_point"]),
                window_margin=[parse_rational(m) for m in doc["window_margin"]],
                max_points=max_points,
            )
        except (KeyError, TypeError) as exc:
            raise FormatError(f"malformed space document: {exc}") from exc


def _id_to_json(p):
    if isinstance(p, tuple):
        return [_id_to_json(q) for q in p]
    return p


def _id_from_json(p):
    if isinstance(p, list):
        return tuple(_id_from_json(q) for q in p)
    return p


def _vector(values) -> np.ndarray:
    values = [rational(v) for v in values]
    if all(isinstance(v, int) for v in values):
        return np.array(values, dtype=np.int64)
    out = np.empty(len(values), dtype=object)
    out[:] = values
    return out


class Subset:
    """A subset of a :class:`FiniteMetricSpace`, stored as a boolean mask."""

    __slots__ = ("space", "mask", "idx", "_hash")

    def __init__(self, space: FiniteMetricSpace, mask):
        mask = np.array(mask, dtype=bool)
        if mask.shape != (space.n,):
            raise ValueError("mask length must equal the number of points")
        mask.setflags(write=False)
        self.space = space
        self.mask = mask
        self.idx = np.flatnonzero(mask)
        self.idx.setflags(write=False)
        self._hash = None

    @classmethod
    def from_ids(cls, space, ids):
        mask = np.zeros(space.n, dtype=bool)
        for p in ids:
            mask[space.index(p)] = True
        return cls(space, mask)

    @classmethod
    def from_indices(cls, space, indices):
        mask = np.zeros(space.n, dtype=bool)
        mask[np.asarray(indices, dtype=np.int64)] = True
        return cls(space, mask)

    @property
    def members(self) -> frozenset:
        return frozenset(self.space.points[i] for i in self.idx)

    def ids(self) -> list:
        return [self.space.points[i] for i in self.idx]

    def __len__(self):
        return len(self.idx)

    def __bool__(self):
        return len(self.idx) > 0

    def __iter__(self):
        return iter(self.ids())

    def __contains__(self, point):
        i = self.space._index.get(point)
        return i is not None and bool(self.mask[i])

    def __eq__(self, other):
        if not isinstance(other, Subset):
            return NotImplemented
        return self.space is other.space and np.array_equal(self.mask, other.mask)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((id(self.space), self.mask.tobytes()))
        return self._hash

    def __repr__(self):
        ids = self.ids()
        shown = ", ".join(repr(p) for p in ids[:6])
        more = f", ... ({len(ids)} points)" if len(ids) > 6 else ""
        return f"Subset({{{shown}{more}}})"

    def _same(self, other):
        if other.space is not self.space:
            raise ValueError("subsets live in different spaces")

    def issubset(self, other: "Subset") -> bool:
        self._same(other)
        return bool(np.all(other.mask[self.idx]))

    def __le__(self, other):
        return self.issubset(other)

    def __lt__(self, other):
        return self.issubset(other) and len(self) < len(other)

    def __or__(self, other):
        self._same(other)
        return Subset(self.space, self.mask | other.mask)

    def __and__(self, other):
        self._same(other)
        return Subset(self.space, self.mask & other.mask)

    def __sub__(self, other):
        self._same(other)
        return Subset(self.space, self.mask & ~other.mask)

    def complement(self) -> "Subset":
        return Subset(self.space, ~self.mask)

    @property
    def diameter(self):
        if not self:
            raise EmptySetError("diameter of the empty set")
        D = self.space.D
        return rational(D[np.ix_(self.idx, self.idx)].max())


# ---------------------------------------------------------------------------
# point/set distances


def distances_to(A: Subset) -> np.ndarray | None:
    """Vector of d(x, A) over all points of the space; ``None`` when A is empty."""
    if not A:
        return None
    D = A.space.D
    if len(A) == 1:
        return np.array(D[:, A.idx[0]])
    return D[:, A.idx].min(axis=1)


def complement_depths(U: Subset) -> np.ndarray | None:
    """d(x, X \\ U) for each x in U (ordered as ``U.idx``); ``None`` if U is the whole space."""
    comp = np.flatnonzero(~U.mask)
    if comp.size == 0:
        return None
    if U.idx.size == 0:
        return np.zeros(0, dtype=np.int64)
    return U.space.D[np.ix_(U.idx, comp)].min(axis=1)


def dist_point_set(x, A: Subset, *, allow_empty: bool = False):
    if not A:
        if allow_empty:
            return INF
        raise EmptySetError("distance to the empty set")
    i = A.space.index(x)
    return rational(A.space.D[i, A.idx].min())


def set_set_distance(A: Subset, B: Subset):
    if not A or not B:
        raise EmptySetError("set distance with an empty set")
    A._same(B)
    return rational(A.space.D[np.ix_(A.idx, B.idx)].min())


def closest_pair(A: Subset, B: Subset):
    """Return ``(a, b, distance)`` for a closest pair, smallest indices first."""
    A._same(B)
    block = A.space.D[np.ix_(A.idx, B.idx)]
    flat = int(np.argmin(block)) if block.dtype != object else min(
        range(block.size), key=lambda t: block.reshape(-1)[t]
    )
    i, j = divmod(flat, block.shape[1])
    pts = A.space.points
    return pts[A.idx[i]], pts[B.idx[j]], rational(block[i, j])


def neighborhood(A: Subset, r) -> Subset:
    """Signed neighborhood: closed r-neighborhood for r >= 0, strict inner core for r < 0."""
    r = rational(r)
    space = A.space
    if r >= 0:
        dv = distances_to(A)
        if dv is None:
            return space.empty()
        return Subset(space, dv <= r)
    depths = complement_depths(A)
    if depths is None:
        return A
    mask = np.zeros(space.n, dtype=bool)
    mask[A.idx[depths > -r]] = True
    return Subset(space, mask)


def inner_core(A: Subset, r) -> Subset:
    return neighborhood(A, -rational(r)) if rational(r) > 0 else A


def discrete_boundary(A: Subset) -> Subset:
    """Unit-scale boundary: points within distance 1 of the other side."""
    space = A.space
    comp = A.complement()
    if not A or not comp:
        return space.empty()
    outside = comp.mask & (distances_to(A) <= 1)
    # a complement point within 1 of x in A is itself an outside boundary point
    near = distances_to(Subset(space, outside))
    inside = A.mask & (near <= 1) if near is not None else np.zeros(space.n, dtype=bool)
    return Subset(space, inside | outside)


def _cover_depths(cover: Sequence[Subset]):
    """Per point, the best depth d(x, X \\ U) over elements U containing x."""
    cover = list(cover)
    if not cover:
        raise NotACoverError("empty cover")
    space = cover[0].space
    covered = np.zeros(space.n, dtype=bool)
    best = np.zeros(space.n, dtype=object)
    whole = False
    for U in cover:
        U._same(cover[0])
        covered |= U.mask
        depths = complement_depths(U)
        if depths is None:
            whole = True
            continue
        best[U.idx] = np.maximum(best[U.idx], depths)
    return space, covered, best, whole


def lebesgue_number(cover: Sequence[Subset], *, bounded: bool = True):
    """Exact Lebesgue number ``min_x max_{U ∋ x} d(x, X \\ U)``.

    A cover containing the whole space has Lebesgue number +infinity; with
    ``bounded`` (the default) the window-bounded value ``diameter(X)`` is
    reported instead, otherwise ``INF``.
    """
    space, covered, best, whole = _cover_depths(cover)
    if not covered.all():
        missing = space.points[int(np.flatnonzero(~covered)[0])]
        raise NotACoverError(f"point {missing!r} is not covered")
    if whole:
        return space.diameter if bounded else INF
    return rational(min(best))


def lebesgue_witness(cover: Sequence[Subset]):
    """Return ``(point, depth)`` where the Lebesgue minimum is attained (None if whole-space cover)."""
    space, covered, best, whole = _cover_depths(cover)
    if not covered.all():
        raise NotACoverError("not a cover")
    if whole:
        return None
    i = min(range(space.n), key=lambda t: best[t])
    return space.points[i], rational(best[i])


def mesh(cover: Sequence[Subset]):
    cover = list(cover)
    if not cover:
        return 0
    for U in cover:
        if not U:
            raise EmptySetError("mesh of a cover with an empty element")
    return max(U.diameter for U in cover)


def capacity(space: FiniteMetricSpace, r, eps) -> int:
    """Largest greedy eps-separated subset (pairwise distance >= eps) of any closed r-ball."""
    r, eps = rational(r), rational(eps)
    if r <= 0 or eps <= 0:
        raise ValueError("capacity needs r > 0 and eps > 0")
    D = space.D
    best = 0
    for x in range(space.n):
        ball = np.flatnonzero(D[x] <= r)
        blocked = np.zeros(ball.size, dtype=bool)
        count = 0
        for pos, p in enumerate(ball):
            if blocked[pos]:
                continue
            count += 1
            blocked |= D[p, ball] < eps
        best = max(best, count)
    return best


# ---------------------------------------------------------------------------
# generators


def line_window(lo: int, hi: int, base_point: int | None = None, *, max_points=DEFAULT_MAX_POINTS):
    """Integer points ``lo..hi`` with |x - y|; margins measured to the nearer end."""
    if hi < lo:
        raise ValueError("empty window")
    if max_points is not None and hi - lo + 1 > max_points:
        raise SizeLimitError(f"{hi - lo + 1} points exceeds the cap of {max_points}")
    xs = np.arange(lo, hi + 1, dtype=np.int64)
    D = np.abs(xs[:, None] - xs[None, :])
    if base_point is None:
        base_point = 0 if lo <= 0 <= hi else lo
    margins = [min(x - lo, hi - x) for x in range(lo, hi + 1)]
    return FiniteMetricSpace(
        list(range(lo, hi + 1)),
        D,
        base_point=base_point,
        window_margin=margins,
        descriptor={"kind": "line", "lo": lo, "hi": hi, "base_point": base_point},
        max_points=max_points,
    )


def gen_grid(n: int, extent: int, metric: str = "l1", *, max_points=DEFAULT_MAX_POINTS):
    """Lattice window ``{-extent..extent}^n`` under the l1 or l-infinity metric."""
    if n < 1 or extent < 1:
        raise ValueError("gen_grid needs n >= 1 and extent >= 1")
    if metric not in ("l1", "linf"):
        raise ValueError(f"unknown metric {metric!r}")
    count = (2 * extent + 1) ** n
    if max_points is not None and count > max_points:
        raise SizeLimitError(f"{count} points exceeds the cap of {max_points}")
    axis = np.arange(-extent, extent + 1, dtype=np.int64)
    coords = np.stack(np.meshgrid(*([axis] * n), indexing="ij"), axis=-1).reshape(-1, n)
    diff = np.abs(coords[:, None, :] - coords[None, :, :])
    D = diff.sum(axis=2) if metric == "l1" else diff.max(axis=2)
    if n == 1:
        points = [int(c[0]) for c in coords]
        base = 0
    else:
        points = [tuple(int(v) for v in c) for c in coords]
        base = (0,) * n
    margins = (extent - np.abs(coords).max(axis=1)).tolist()
    return FiniteMetricSpace(
        points,
        D,
        base_point=base,
        window_margin=margins,
        descriptor={"kind": "grid", "n": n, "extent": extent, "metric": metric},
        max_points=max_points,
    )


_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def _inverse(letter: str) -> str:
    return letter.lower() if letter.isupper() else letter.upper()


def gen_free_group_ball(rank: int, radius: int, *, max_points=DEFAULT_MAX_POINTS):
    """Ball of reduced words in the free group with the word metric.

    Generators are ``a, b, c, ...`` with inverses ``A, B, C, ...``; the
    identity is the empty string.  The Cayley graph is a tree, so the word
    distance is ``|u| + |v| - 2 * |common prefix|``.
    """
    if rank < 1 or rank > len(_LETTERS):
        raise ValueError("rank must be between 1 and 26")
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    count = 1 + sum(2 * rank * (2 * rank - 1) ** (j - 1) for j in range(1, radius + 1))
    if max_points is not None and count > max_points:
        raise SizeLimitError(f"{count} points exceeds the cap of {max_points}")
    alphabet = [c for g in _LETTERS[:rank] for c in (g, g.upper())]
    words = [""]
    parent = [-1]
    frontier = [0]
    for _ in range(radius):
        nxt = []
        for w in frontier:
            word = words[w]
            for c in alphabet:
                if word and word[-1] == _inverse(c):
                    continue
                words.append(word + c)
                parent.append(w)
                nxt.append(len(words) - 1)
        frontier = nxt
    n = len(words)
    depth = np.array([len(w) for w in words], dtype=np.int64)
    children: list[list[int]] = [[] for _ in range(n)]
    for v in range(1, n):
        children[parent[v]].append(v)
    # subtree index lists, then the common-prefix length matrix by overwriting
    # with deeper ancestors last
    subtree: list[np.ndarray] = [None] * n  # type: ignore[list-item]
    for v in range(n - 1, -1, -1):
        parts = [np.array([v], dtype=np.int64)] + [subtree[c] for c in children[v]]
        subtree[v] = np.concatenate(parts)
    common = np.zeros((n, n), dtype=np.int32)
    for v in range(n):
        if depth[v] == 0:
            continue
        s = subtree[v]
        common[np.ix_(s, s)] = depth[v]
    D = depth[:, None].astype(np.int32) + depth[None, :].astype(np.int32) - 2 * common
    del common
    return FiniteMetricSpace(
        words,
        D,
        base_point="",
        window_margin=[radius - len(w) for w in words],
        descriptor={"kind": "free_group", "rank": rank, "radius": radius},
        max_points=max_points,
    )


def product_space(X: FiniteMetricSpace, Y: FiniteMetricSpace, *, max_points=DEFAULT_MAX_POINTS):
    """l1 product ``X x Y``; points are pairs ``(x, y)``, margins are the smaller factor margin."""
    n = X.n * Y.n
    if max_points is not None and n > max_points:
        raise SizeLimitError(f"{n} points exceeds the cap of {max_points}")
    DX = X.D.astype(object) if X.D.dtype == object or Y.D.dtype == object else X.D.astype(np.int64)
    DY = Y.D.astype(DX.dtype)
    D = (DX[:, None, :, None] + DY[None, :, None, :]).reshape(n, n)
    points = [(x, y) for x in X.points for y in Y.points]
    margins = [min(mx, my) for mx in X.window_margin for my in Y.window_margin]
    descriptor = None
    if X.descriptor is not None and Y.descriptor is not None:
        descriptor = {"kind": "product", "factors": [dict(X.descriptor), dict(Y.descriptor)]}
    return FiniteMetricSpace(
        points,
        D,
        base_point=(X.base_point, Y.base_point),
        window_margin=margins,
        descriptor=descriptor,
        max_points=max_points,
    )


def from_descriptor(desc: dict, *, max_points=DEFAULT_MAX_POINTS) -> FiniteMetricSpace:
    kind = desc.get("kind")
    if kind == "grid":
        return gen_grid(desc["n"], desc["extent"], desc["metric"], max_points=max_points)
    if kind == "free_group":
        return gen_free_group_ball(desc["rank"], desc["radius"], max_points=max_points)
    if kind == "line":
        return line_window(desc["lo"], desc["hi"], desc.get("base_point"), max_points=max_points)
    if kind == "product":
        a, b = (from_descriptor(f, max_points=max_points) for f in desc["factors"])
        return product_space(a, b, max_points=max_points)
    raise FormatError(f"unknown generator kind {kind!r}")
