import random
import sys
import warnings
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from coarsetrees.covers import interval_cover  # noqa: E402
from coarsetrees.errors import WindowExhausted  # noqa: E402
from coarsetrees.metric import FiniteMetricSpace, gen_grid  # noqa: E402
from coarsetrees.tower import build_tower  # noqa: E402


def random_space(rng: random.Random, n: int, fractional: bool = False) -> FiniteMetricSpace:
    """Shortest-path metric of a random connected weighted graph on ``n`` points."""
    W = np.full((n, n), np.inf)
    np.fill_diagonal(W, 0)
    for v in range(1, n):
        u = rng.randrange(v)
        W[u, v] = W[v, u] = rng.randint(1, 4)
    for _ in range(n):
        u, v = rng.randrange(n), rng.randrange(n)
        if u != v:
            w = rng.randint(1, 6)
            W[u, v] = W[v, u] = min(W[u, v], w)
    for k in range(n):
        W = np.minimum(W, W[:, k, None] + W[None, k, :])
    D = W.astype(np.int64)
    if fractional:
        D = np.vectorize(lambda v: Fraction(int(v), 2), otypes=[object])(D)
    margins = [rng.randint(0, 5) for _ in range(n)]
    return FiniteMetricSpace([f"p{i}" for i in range(n)], D, base_point="p0", window_margin=margins)


@pytest.fixture(scope="session")
def line256():
    return gen_grid(1, 256, "l1")


@pytest.fixture(scope="session")
def line_tower(line256):
    """The three-level request on the 513-point window with the periodic interval seed."""
    seed = interval_cover(line256, 32, 24, offset=-12)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WindowExhausted)
        return build_tower(line256, 2, 3, seed)


def pytest_terminal_summary(terminalreporter):
    results = getattr(sys.modules.get("test_acceptance"), "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
