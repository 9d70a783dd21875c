import random
import warnings
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as O
from conftest import random_space
from coarsetrees.covers import greedy_colored_cover, verify_colored_cover
from coarsetrees.errors import WindowExhausted
from coarsetrees.metric import (
    fmt_rational,
    lebesgue_number,
    mesh,
    neighborhood,
    parse_rational,
    set_set_distance,
)
from coarsetrees.tower import build_tower
from coarsetrees.trees import build_tree, four_point_gap, random_tree_points, tree_distance

seeds = st.integers(min_value=0, max_value=2**32 - 1)
sizes = st.integers(min_value=3, max_value=30)


@given(st.fractions(max_denominator=1000))
def test_rational_text_round_trip(q):
    assert parse_rational(fmt_rational(q)) == q


@settings(max_examples=40, deadline=None)
@given(seeds, sizes, st.booleans())
def test_inner_core_is_complement_of_outer_neighborhood(seed, n, fractional):
    rng = random.Random(seed)
    X = random_space(rng, n, fractional)
    A = X.subset(rng.sample(list(X.points), rng.randint(1, n - 1)))
    for r in [Fraction(1, 2), 1, 2, 5]:
        inner = neighborhood(A, -r)
        outer_of_comp = neighborhood(A.complement(), r)
        assert inner == A - outer_of_comp
        assert neighborhood(A, r).issubset(neighborhood(A, r + 1))
        assert inner.issubset(A)


@settings(max_examples=40, deadline=None)
@given(seeds, sizes)
def test_set_distance_symmetry_and_oracle(seed, n):
    rng = random.Random(seed)
    X = random_space(rng, n)
    ids = list(X.points)
    A = set(rng.sample(ids, rng.randint(1, n)))
    B = set(rng.sample(ids, rng.randint(1, n)))
    a, b = X.subset(A), X.subset(B)
    assert set_set_distance(a, b) == set_set_distance(b, a) == O.set_set(X, A, B)


@settings(max_examples=30, deadline=None)
@given(seeds, sizes, st.integers(1, 4), st.integers(0, 4))
def test_greedy_cover_verifies_and_matches_oracles(seed, n, d, extra):
    rng = random.Random(seed)
    X = random_space(rng, n)
    c = greedy_colored_cover(X, d, d + extra)
    rep = verify_colored_cover(c)
    assert rep.ok
    members = [U.members for U in c.elements()]
    assert rep.mesh == mesh(c.elements()) == O.mesh(X, members) <= d + extra
    assert lebesgue_number(c.elements()) == O.lebesgue(X, members)


@settings(max_examples=15, deadline=None)
@given(seeds, st.integers(8, 40))
def test_trees_of_random_towers_are_trees(seed, n):
    rng = random.Random(seed)
    X = random_space(rng, n)
    seed_cover = greedy_colored_cover(X, 3, 3 + rng.randint(0, 3))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WindowExhausted)
        t = build_tower(X, seed_cover.colors, 3, seed_cover)
    for c in range(t.colors):
        tree = build_tree(t, c)
        assert tree.structure_issues() == []
        for _ in range(20):
            p, q, r, s = random_tree_points(tree, rng, 4)
            assert four_point_gap(tree, p, q, r, s) == 0
            assert tree_distance(tree, p, q) == tree_distance(tree, q, p)
            assert tree_distance(tree, p, r) <= tree_distance(tree, p, q) + tree_distance(tree, q, r)
