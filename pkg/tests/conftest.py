import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from rbptools.metric_graph import MetricGraph

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_connected(n, extra, rng):
    """Random spanning tree plus ``extra`` chords: sparse enough that simple-path
    enumeration stays cheap."""
    edges = set()
    for v in range(1, n):
        u = rng.randrange(v)
        edges.add((u, v))
    tries = 0
    while len(edges) < n - 1 + extra and tries < 10 * (extra + 1):
        tries += 1
        u, v = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if u != v:
            edges.add((min(u, v), max(u, v)))
    return MetricGraph(n, sorted(edges))


def random_cover(g, k, rng):
    """``k`` connected pieces grown from random seeds, then stretched to cover."""
    n = g.n
    pieces = []
    for _ in range(k):
        seed = rng.randrange(n)
        piece = {seed}
        for _ in range(rng.randrange(1, max(2, n // k + 2))):
            frontier = sorted({int(w) for v in piece for w in g.neighbors(v)} - piece)
            if not frontier:
                break
            piece.add(rng.choice(frontier))
        pieces.append(piece)
    for v in range(n):
        if not any(v in p for p in pieces):
            pieces[rng.randrange(k)].add(v)
    return [frozenset(p) for p in pieces]


@st.composite
def small_graphs(draw, min_n=2, max_n=20, max_extra=5):
    n = draw(st.integers(min_n, max_n))
    extra = draw(st.integers(0, max_extra))
    seed = draw(st.integers(0, 2**31 - 1))
    return random_connected(n, extra, random.Random(seed))


@st.composite
def graphs_with_cover(draw, max_n=16, max_pieces=5):
    g = draw(small_graphs(min_n=3, max_n=max_n, max_extra=4))
    k = draw(st.integers(2, max_pieces))
    seed = draw(st.integers(0, 2**31 - 1))
    return g, random_cover(g, k, random.Random(seed))


@pytest.fixture
def rng():
    return random.Random(12345)
