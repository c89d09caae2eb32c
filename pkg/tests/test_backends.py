"""The compiled and pure-Python kernels must agree bit for bit."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from crowdlanes import kernels
from crowdlanes.embedding import LayoutConfig, embed_initial
from crowdlanes.proximity import graph_from_trace
from crowdlanes.rng import PortableRNG
from crowdlanes.scenarios import build_scenario
from crowdlanes.simulation import SimParams, run

pure = kernels.pure
comp = kernels.compiled
needs_ext = pytest.mark.skipif(comp is None, reason="compiled extension not built")

NAMES = ["sim_step", "permutation", "grid_pairs", "pair_scores", "dbscan", "fr_layout",
         "closest_point", "resolve_move", "csr_from_pairs"]


@pytest.fixture
def use_pure(monkeypatch):
    for name in NAMES:
        monkeypatch.setattr(kernels, name, getattr(pure, name))


def test_backend_name_matches_selection():
    assert kernels.BACKEND_NAME == ("compiled" if comp is not None else "python")


@needs_ext
def test_simulation_traces_identical(use_pure):
    scen = build_scenario("sinusoidal", amplitude=5, size=30)
    params = SimParams(density=0.3, seed=3, max_timesteps=80)
    slow = run(scen, params)
    for name in NAMES:
        setattr(kernels, name, getattr(comp, name))
    fast = run(scen, params)
    assert slow == fast


@needs_ext
def test_initial_embedding_agrees(use_pure):
    # force sums are accumulated in a different order, so the layouts agree to
    # rounding only; long warm-started runs are chaotic and may drift apart
    trace = run(build_scenario(size=20), SimParams(density=0.2, seed=1, max_timesteps=1))
    graph = graph_from_trace(trace, 6.0)
    config = LayoutConfig(initial_iterations=10)
    slow = embed_initial(*graph.edges[0], graph.nodes_at(0), PortableRNG(2), config).positions
    for name in NAMES:
        setattr(kernels, name, getattr(comp, name))
    fast = embed_initial(*graph.edges[0], graph.nodes_at(0), PortableRNG(2), config).positions
    np.testing.assert_allclose(slow, fast, rtol=0, atol=1e-8)


@needs_ext
def test_permutation_identical():
    for n in (0, 1, 2, 17, 500):
        a = PortableRNG(n).state_array()
        b = a.copy()
        assert np.array_equal(pure.permutation(a, n), comp.permutation(b, n))
        assert np.array_equal(a, b)


@needs_ext
@given(st.lists(st.tuples(st.integers(-30, 30), st.integers(-30, 30)), max_size=80),
       st.floats(0.5, 20))
def test_grid_pairs_identical(points, radius):
    pos = np.array(points, dtype=np.float64).reshape(-1, 2)
    for x, y in zip(pure.grid_pairs(pos, radius), comp.grid_pairs(pos, radius)):
        assert np.array_equal(x, y)


@needs_ext
@pytest.mark.parametrize("kind", [0, 1, 2])
def test_pair_scores_identical(kind):
    rng = np.random.default_rng(kind)
    window = np.cumsum(rng.integers(-1, 2, size=(11, 30, 2)), axis=0).astype(np.float64)
    iu, ju = np.triu_indices(30, k=1)
    a = pure.pair_scores(window, iu.astype(np.int64), ju.astype(np.int64), kind, 7.0)
    b = comp.pair_scores(window, iu.astype(np.int64), ju.astype(np.int64), kind, 7.0)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)


@needs_ext
@given(st.integers(0, 10**6), st.integers(1, 40), st.integers(1, 6), st.booleans())
def test_dbscan_identical(seed, m, min_pts, include_self):
    rng = np.random.default_rng(seed)
    mask = np.triu(rng.random((m, m)) < 0.15, k=1)
    pi, pj = np.nonzero(mask)
    indptr, indices = pure.csr_from_pairs(m, pi.astype(np.int64), pj.astype(np.int64))
    indptr2, indices2 = comp.csr_from_pairs(m, pi.astype(np.int64), pj.astype(np.int64))
    assert np.array_equal(indptr, indptr2) and np.array_equal(indices, indices2)
    order = pure.permutation(PortableRNG(seed).state_array(), m)
    la, ca = pure.dbscan(indptr, indices, min_pts, include_self, order)
    lb, cb = comp.dbscan(indptr, indices, min_pts, include_self, order)
    assert np.array_equal(la, lb) and np.array_equal(np.asarray(ca, bool), np.asarray(cb, bool))


@needs_ext
@pytest.mark.parametrize("cutoff", [0.0, 3.0])
def test_fr_layout_identical(cutoff):
    rng = np.random.default_rng(5)
    pos = rng.random((25, 2)) * 20
    ei = np.arange(24, dtype=np.int64)
    ej = ei + 1
    temps = np.linspace(2.0, 0.1, 15)
    a, b = pos.copy(), pos.copy()
    ra = pure.fr_layout(a, ei, ej, 4.0, temps, 1e-6, cutoff)
    rb = comp.fr_layout(b, ei, ej, 4.0, temps, 1e-6, cutoff)
    assert ra[0] == rb[0]
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-8)


@needs_ext
def test_closest_point_identical():
    pts = np.array([[0.0, 0.0], [10.0, 0.0], [10.0, 10.0], [0.0, 10.0]])
    cum = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(pts, axis=0).T))])
    rng = np.random.default_rng(0)
    for bx, by in rng.uniform(-5, 15, size=(200, 2)):
        a = pure.closest_point(pts.tolist(), cum.tolist(), bx, by)
        b = comp.closest_point(pts, cum, bx, by)
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)
