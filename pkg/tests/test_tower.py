import random
import warnings

import pytest

import oracles as O
from conftest import random_space
from coarsetrees.covers import ColoredCover, greedy_colored_cover, interval_cover, procure_cover
from coarsetrees.errors import SeedInvalidError, WindowExhausted
from coarsetrees.metric import gen_grid, line_window
from coarsetrees.tower import CoverTower, Level, build_tower, carve, verify_tower


def ivl(space, lo, hi):
    return space.subset(x for x in range(lo, hi + 1) if x in space._index)


@pytest.fixture(scope="module")
def sound_tower():
    X = gen_grid(1, 256)
    seed, _ = procure_cover(X, 8, 24, 8, max_colors=2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WindowExhausted)
        return build_tower(X, 2, 3, seed)


def test_single_level_is_the_seed():
    X = line_window(-64, 64)
    seed = interval_cover(X, 32, 24, offset=-12)
    t = build_tower(X, 2, 1, seed)
    assert t.depth == 1 and not t.truncated
    assert {U for U in t.levels[0].cover.elements()} == set(seed.elements())
    rep = verify_tower(t)
    assert not rep.by_condition("2") and not rep.by_condition("3'") and not rep.by_condition("4")


def test_scale_recursion_on_the_line(line_tower):
    assert [(lv.d, lv.m) for lv in line_tower.levels] == [(8, 23), (92, 512)]
    assert line_tower.levels[1].d == 2**2 * line_tower.levels[0].m
    # the next scale, 2**3 * 512, is beyond the window diameter
    assert line_tower.truncated and line_tower.exhausted_scale == 4096


def test_window_exhausted_is_a_warning():
    X = gen_grid(1, 256)
    with pytest.warns(WindowExhausted):
        build_tower(X, 2, 3, interval_cover(X, 32, 24, offset=-12))


def test_periodic_seed_misses_the_lebesgue_condition(line_tower):
    rep = verify_tower(line_tower)
    assert {v.condition for v in rep.violations} == {"1"}
    assert all(v.level == 0 for v in rep.violations)
    assert rep.lebesgue[0] == 5


def test_procured_seed_gives_a_sound_tower(sound_tower):
    rep = verify_tower(sound_tower)
    assert rep.ok, [v.to_dict() for v in rep.violations[:3]]
    assert [lv.d for lv in sound_tower.levels] == [8, 160]


def test_base_point_deep_in_rotated_color(sound_tower):
    # level 0 puts x0 deep in a color-0 set, level 1 in a color-1 set
    for k, lv in enumerate(sound_tower.levels):
        fam = lv.cover.families[k % 2]
        assert any(O.depth(sound_tower.space, 0, U.members) > lv.d for U in fam if 0 in U)


def test_tampered_element_fails_condition_one(sound_tower):
    X = sound_tower.space
    lv0 = sound_tower.levels[0]
    fams = [list(f) for f in lv0.cover.families]
    victim = fams[0][3]
    fams[0][3] = X.subset(victim.ids()[:5])
    from coarsetrees.metric import mesh

    m = mesh([U for f in fams for U in f])
    bad = CoverTower(
        (Level(ColoredCover(fams, lv0.d, m, X), lv0.d, m),) + sound_tower.levels[1:],
        2,
        0,
        X,
    )
    rep = verify_tower(bad)
    hits = [v for v in rep.by_condition("1") if v.level == 0 and v.color == 0]
    assert any("element 3 has an empty inner" in v.detail for v in hits)


def test_scale_growth_violation(sound_tower):
    lv1 = sound_tower.levels[1]
    low = Level(ColoredCover(lv1.cover.families, 40, lv1.m, lv1.cover.space), 40, lv1.m)
    t = CoverTower((sound_tower.levels[0], low), 2, 0, sound_tower.space)
    assert verify_tower(t).by_condition("2")


def test_condition_four_flags_near_misses():
    X = line_window(0, 60)
    lvl0 = ColoredCover([[ivl(X, 0, 9), ivl(X, 30, 39)], [ivl(X, 15, 24), ivl(X, 45, 60)]], 3, 15, X)
    # a level-1 set of color 0 that stops 3 short of the level-0 set {30..39}
    lvl1 = ColoredCover([[ivl(X, 0, 27)], [ivl(X, 15, 60)]], 3, 40, X)
    t = CoverTower((Level(lvl0, 3, 15), Level(lvl1, 3, 40)), 2, 0, X)
    four = verify_tower(t).by_condition("4")
    assert len(four) == 1 and four[0].witness == (30, 27)


def test_seed_validation():
    X = line_window(0, 63)
    with pytest.raises(SeedInvalidError):
        build_tower(X, 2, 2, interval_cover(X, 8, 6))  # separation 2 is not above 2
    with pytest.raises(SeedInvalidError):
        build_tower(X, 1, 2, interval_cover(X, 32, 24))
    broken = ColoredCover([[ivl(X, 0, 10)]], 3, 10, X)
    with pytest.raises(SeedInvalidError):
        build_tower(X, 2, 2, broken)


def test_carve_examples():
    X = line_window(-20, 120)
    U = ivl(X, 0, 100)
    assert carve(U, 0, []) == U
    assert carve(U, 0, [ivl(X, 10, 20), ivl(X, 50, 60)]) == U
    assert carve(U, 0, [ivl(X, -10, -5)]) == U
    assert carve(U, 0, [ivl(X, -10, 2)]).members == set(range(7, 101))


def test_carve_against_oracle():
    rng = random.Random(4)
    for _ in range(10):
        X = random_space(rng, rng.randint(6, 30))
        ids = list(X.points)
        U = set(rng.sample(ids, rng.randint(1, len(ids))))
        earlier = [set(rng.sample(ids, rng.randint(1, 4))) for _ in range(3)]
        got = carve(X.subset(U), 0, [X.subset(V) for V in earlier])
        assert got.members == O.carve(X, U, earlier)


def test_greedy_seed_tower_on_a_grid():
    X = gen_grid(2, 6, "linf")
    seed = greedy_colored_cover(X, 3, 3)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WindowExhausted)
        t = build_tower(X, seed.colors, 2, seed)
    assert t.depth >= 1
    rep = verify_tower(t)
    assert not rep.by_condition("2") and not rep.by_condition("4")


def test_tower_round_trip(sound_tower):
    doc = sound_tower.to_dict()
    back = CoverTower.from_dict(doc)
    assert back.to_dict() == doc
    assert verify_tower(back).ok


@pytest.mark.parametrize("which", ["sound", "periodic"])
def test_same_color_sets_through_a_point_form_a_chain(which, sound_tower, line_tower):
    t = sound_tower if which == "sound" else line_tower
    X = t.space
    for c in range(t.colors):
        sets = [U for lv in t.levels for U in lv.cover.families[c]]
        for x in X.points[::7]:
            holding = sorted((U for U in sets if x in U), key=len)
            assert all(a.issubset(b) for a, b in zip(holding, holding[1:]))
