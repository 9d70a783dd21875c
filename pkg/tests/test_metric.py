import random
from fractions import Fraction

import numpy as np
import pytest

import oracles as O
from conftest import random_space
from coarsetrees.errors import EmptySetError, FormatError, NotACoverError, SizeLimitError
from coarsetrees.metric import (
    INF,
    FiniteMetricSpace,
    capacity,
    discrete_boundary,
    dist_point_set,
    fmt_rational,
    from_descriptor,
    gen_free_group_ball,
    gen_grid,
    inner_core,
    lebesgue_number,
    lebesgue_witness,
    line_window,
    mesh,
    neighborhood,
    parse_rational,
    product_space,
    set_set_distance,
)


def ivl(space, lo, hi):
    return space.subset(x for x in range(lo, hi + 1) if x in space._index)


@pytest.fixture
def w20():
    return line_window(0, 20)


@pytest.fixture
def w63():
    return line_window(0, 63)


def test_rational_format_round_trip():
    for v in [0, 7, Fraction(3, 4), Fraction(-5, 2), INF]:
        assert parse_rational(fmt_rational(v)) == v
    assert fmt_rational(Fraction(6, 3)) == "2"
    with pytest.raises(FormatError):
        parse_rational("x/2")
    with pytest.raises(FormatError):
        parse_rational(1.5)


def test_infinity_orders_above_everything():
    assert INF > 10**9 and INF >= INF and not INF < 3
    assert INF + 1 is INF and 2 * INF is INF


def test_dist_point_set(w20):
    A = ivl(w20, 10, 20)
    assert dist_point_set(12, A) == 0
    assert dist_point_set(5, A) == 5
    one = line_window(3, 3)
    assert dist_point_set(3, one.subset([3])) == 0
    with pytest.raises(EmptySetError):
        dist_point_set(5, w20.empty())
    assert dist_point_set(5, w20.empty(), allow_empty=True) is INF


def test_set_set_distance(w20):
    assert set_set_distance(ivl(w20, 0, 3), ivl(w20, 10, 12)) == 7
    assert set_set_distance(ivl(w20, 4, 9), ivl(w20, 4, 9)) == 0
    assert set_set_distance(w20.subset([0]), w20.subset([1])) == 1
    with pytest.raises(EmptySetError):
        set_set_distance(w20.empty(), ivl(w20, 0, 1))


def test_neighborhood_examples(w20):
    A = ivl(w20, 5, 10)
    assert neighborhood(A, 0) == A
    assert neighborhood(A, 2).members == set(range(3, 13))
    # the strict inner core keeps points more than 2 away from {0..4} and {11..20}
    assert neighborhood(A, -2).members == O.neighborhood(w20, set(range(5, 11)), -2) == {7, 8}
    assert inner_core(A, 2) == neighborhood(A, -2)
    assert neighborhood(w20.full(), -5) == w20.full()


def test_discrete_boundary_examples(w20):
    assert discrete_boundary(w20.full()) == w20.empty()
    assert discrete_boundary(ivl(w20, 5, 10)).members == {4, 5, 10, 11}
    sparse = FiniteMetricSpace(["a", "b", "c"], [[0, 2, 4], [2, 0, 2], [4, 2, 0]])
    # every gap is 2, so nothing is within unit distance of the other side
    assert not discrete_boundary(sparse.subset(["a"]))
    assert O.boundary(sparse, {"a"}) == set()


def test_lebesgue_examples(w63):
    assert lebesgue_number([w63.full()]) == 63
    assert lebesgue_number([w63.full()], bounded=False) is INF
    assert lebesgue_witness([w63.full()]) is None
    cover = [ivl(w63, a, b) for a, b in [(-4, 19), (12, 35), (28, 51), (44, 67)]]
    oracle = O.lebesgue(w63, [U.members for U in cover])
    assert oracle == 5
    assert lebesgue_number(cover) == 5
    point, depth = lebesgue_witness(cover)
    assert depth == 5 and max(O.depth(w63, point, U.members) for U in cover if point in U) == 5
    assert lebesgue_number([ivl(w63, 0, 31), ivl(w63, 32, 63)]) == 1
    with pytest.raises(NotACoverError):
        lebesgue_number([ivl(w63, 0, 10)])


def test_mesh_examples(w63):
    assert mesh([w63.subset([x]) for x in range(64)]) == 0
    assert mesh([ivl(w63, 0, 15), ivl(w63, 32, 47)]) == 15
    assert mesh([w63.full()]) == 63
    with pytest.raises(EmptySetError):
        mesh([w63.empty()])


def test_capacity_examples():
    Z = line_window(-30, 30)
    assert capacity(Z, 5, 11) == 1
    assert capacity(Z, 5, 1) == 11
    assert capacity(Z, 5, 2) == 6


def test_grid_examples():
    g = gen_grid(1, 2)
    assert g.n == 5 and g.dist(-2, 2) == 4
    g2 = gen_grid(2, 1, "l1")
    assert g2.n == 9 and g2.dist((-1, -1), (1, 1)) == 4
    assert gen_grid(2, 1, "linf").dist((-1, -1), (1, 1)) == 2
    assert g2.window_margin[g2.index((0, 0))] == 1 and g2.window_margin[g2.index((1, 0))] == 0


def test_free_group_examples():
    f1 = gen_free_group_ball(1, 3)
    assert f1.n == 7 and f1.dist("aaa", "AAA") == 6
    f2 = gen_free_group_ball(2, 1)
    assert f2.n == 5
    gens = ["a", "A", "b", "B"]
    assert all(f2.dist(u, v) == 2 for u in gens for v in gens if u != v)
    assert gen_free_group_ball(2, 0).n == 1


def test_free_group_distance_matches_reduction():
    f = gen_free_group_ball(2, 4)
    inv = str.swapcase

    def reduce(word):
        out = []
        for c in word:
            if out and out[-1] == inv(c):
                out.pop()
            else:
                out.append(c)
        return "".join(out)

    rng = random.Random(5)
    for _ in range(300):
        u, v = rng.choice(f.points), rng.choice(f.points)
        assert f.dist(u, v) == len(reduce("".join(inv(c) for c in reversed(u)) + v))


def test_size_limit():
    with pytest.raises(SizeLimitError):
        gen_grid(2, 100)
    with pytest.raises(SizeLimitError):
        gen_free_group_ball(3, 8)
    with pytest.raises(SizeLimitError):
        line_window(0, 50, max_points=10)


def test_space_validation():
    with pytest.raises(ValueError):
        FiniteMetricSpace(["a", "b"], [[0, 1], [2, 0]])
    with pytest.raises(ValueError):
        FiniteMetricSpace(["a", "b"], [[0, 0], [0, 0]])
    with pytest.raises(EmptySetError):
        FiniteMetricSpace([], np.zeros((0, 0)))


def test_rescale_to_unit_discreteness():
    X = FiniteMetricSpace(["a", "b", "c"], [[0, Fraction(1, 3), 1], [Fraction(1, 3), 0, Fraction(2, 3)], [1, Fraction(2, 3), 0]])
    assert X.scale == 3
    assert X.dist("a", "c") == 3 and X.exact_integers


def test_triangle_check():
    good = random_space(random.Random(1), 12)
    assert good.check_triangle() is None
    bad = FiniteMetricSpace(["a", "b", "c"], [[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    assert bad.check_triangle() is not None


@pytest.mark.parametrize("space", [line_window(-3, 9, 2), gen_grid(2, 2, "linf"), gen_free_group_ball(2, 2)])
def test_serialization_round_trip(space):
    doc = space.to_dict()
    back = FiniteMetricSpace.from_dict(doc)
    assert back.points == space.points and np.array_equal(back.D, space.D)
    assert back.base_point == space.base_point and back.window_margin == space.window_margin
    assert from_descriptor(space.descriptor).points == space.points


def test_matrix_serialization_keeps_fractions():
    X = random_space(random.Random(3), 9, fractional=True)
    back = FiniteMetricSpace.from_dict(X.to_dict())
    assert all(back.dist(p, q) == X.dist(p, q) for p in X.points for q in X.points)


def test_product_space_is_l1():
    X, Y = line_window(0, 3), gen_free_group_ball(1, 1)
    P = product_space(X, Y)
    assert P.n == 12
    assert P.dist((0, "a"), (3, "A")) == 3 + 2
    assert P.window_margin[P.index((1, ""))] == 1 and P.window_margin[P.index((1, "a"))] == 0


def test_operators_against_oracle_on_random_spaces():
    rng = random.Random(11)
    for trial in range(12):
        X = random_space(rng, rng.randint(4, 25), fractional=trial % 3 == 0)
        ids = list(X.points)
        A = set(rng.sample(ids, rng.randint(1, len(ids) - 1)))
        S = X.subset(A)
        for r in [Fraction(1, 2), 1, 2, 3]:
            assert neighborhood(S, r).members == O.neighborhood(X, A, r)
            assert neighborhood(S, -r).members == O.neighborhood(X, A, -r)
        assert discrete_boundary(S).members == O.boundary(X, A)
        x = rng.choice(ids)
        assert dist_point_set(x, S) == O.dist_point_set(X, x, A)


@pytest.mark.parametrize(
    "space", [gen_grid(1, 30), gen_grid(2, 3, "l1"), gen_grid(2, 3, "linf"), gen_free_group_ball(2, 3), gen_free_group_ball(3, 2)]
)
def test_generators_satisfy_triangle_inequality(space):
    assert space.check_triangle() is None
