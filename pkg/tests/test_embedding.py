import numpy as np
import pytest
from scipy import stats

from crowdlanes.embedding import LayoutConfig, embed_graph, embed_initial, embed_step, with_overrides
from crowdlanes.proximity import TemporalProximityGraph
from crowdlanes.rng import PortableRNG

from .oracles import bfs_distances


def grid_graph(side):
    idx = np.arange(side * side).reshape(side, side)
    i = np.concatenate([idx[:, :-1].ravel(), idx[:-1, :].ravel()])
    j = np.concatenate([idx[:, 1:].ravel(), idx[1:, :].ravel()])
    return i, j


def test_ideal_length():
    assert LayoutConfig().ideal_length(37) == pytest.approx(10.0)
    assert LayoutConfig(c=2.0).ideal_length(5) == pytest.approx(20.0)


def test_single_node_stays_at_random_placement():
    state = embed_initial([], [], [7], PortableRNG(3))
    ref = PortableRNG(3)
    expected = [(ref.random() - 0.5) * 10, (ref.random() - 0.5) * 10]
    np.testing.assert_allclose(state.positions[0], expected)


@pytest.mark.parametrize("seed", range(5))
def test_two_nodes_settle_at_k(seed):
    state = embed_initial([0], [1], [0, 1], PortableRNG(seed))
    d = np.linalg.norm(state.positions[0] - state.positions[1])
    # f_a = d^2 / k and f_r = k^2 / d balance at d = k
    assert abs(d - state.k) / state.k < 0.05


def test_grid_layout_preserves_graph_distance():
    side = 20
    i, j = grid_graph(side)
    state = embed_initial(i, j, np.arange(side * side), PortableRNG(1))
    adj = {v: [] for v in range(side * side)}
    for a, b in zip(i.tolist(), j.tolist()):
        adj[a].append(b)
        adj[b].append(a)
    rng = np.random.default_rng(0)
    sample = rng.choice(side * side, size=40, replace=False)
    graph_d, emb_d = [], []
    for s in sample:
        dist = bfs_distances(adj, int(s))
        for t in sample:
            if t > s:
                graph_d.append(dist[int(t)])
                emb_d.append(np.linalg.norm(state.positions[s] - state.positions[t]))
    rho = stats.spearmanr(graph_d, emb_d).statistic
    assert rho > 0.8


def test_warm_start_fixed_point():
    i, j = grid_graph(4)
    nodes = np.arange(16)
    # a long cooling schedule ends with residual forces below the tolerance
    config = LayoutConfig(initial_iterations=20000)
    state = embed_initial(i, j, nodes, PortableRNG(2), config)
    nxt = embed_step(state, i, j, nodes, PortableRNG(2))
    moved = np.abs(nxt.positions - state.positions).max()
    assert moved < config.tolerance * state.k
    assert nxt.iterations == 0


def test_added_edge_pulls_nodes_together():
    i, j = grid_graph(5)
    nodes = np.arange(25)
    state = embed_initial(i, j, nodes, PortableRNG(4))
    before = np.linalg.norm(state.positions[0] - state.positions[24])
    nxt = embed_step(state, np.append(i, 0), np.append(j, 24), nodes, PortableRNG(4))
    after = np.linalg.norm(nxt.positions[0] - nxt.positions[24])
    assert after < before


def test_new_node_starts_at_neighbour_centroid():
    config = LayoutConfig(step_iterations=0)
    state = embed_initial([0, 1], [1, 2], [0, 1, 2], PortableRNG(0), config)
    nxt = embed_step(state, [0, 1, 2], [3, 3, 3], [0, 1, 2, 3], PortableRNG(0))
    np.testing.assert_allclose(nxt.positions[3], state.positions.mean(axis=0))
    np.testing.assert_allclose(nxt.positions[:3], state.positions)


def test_departed_nodes_are_dropped():
    state = embed_initial([0], [1], [0, 1, 2], PortableRNG(0))
    nxt = embed_step(state, [], [], [2], PortableRNG(0))
    assert nxt.nodes.tolist() == [2]


def test_coincident_nodes_separate():
    config = LayoutConfig(initial_iterations=50)
    state = embed_initial([], [], [0, 1], PortableRNG(0), config)
    state.positions[:] = 0.0
    nxt = embed_step(state, [], [], [0, 1], PortableRNG(0))
    assert np.all(np.isfinite(nxt.positions))
    assert nxt.positions[0, 0] < nxt.positions[1, 0]


def test_edge_outside_node_set_rejected():
    with pytest.raises(ValueError):
        embed_initial([0], [5], [0, 1], PortableRNG(0))
    with pytest.raises(ValueError):
        embed_initial([], [], [], PortableRNG(0))


def graph_over_time():
    edges = [(np.array([0, 1]), np.array([1, 2])), (np.array([0, 1, 2]), np.array([1, 2, 3])),
             (np.array([1]), np.array([3]))]
    active = np.array([[1, 1, 1, 0], [1, 1, 1, 1], [0, 1, 0, 1]], dtype=bool)
    return TemporalProximityGraph(np.arange(4), edges, active)


def test_embed_graph_shapes_and_determinism():
    g = graph_over_time()
    pos, active = embed_graph(g, seed=3)
    assert pos.shape == (3, 4, 2)
    assert np.array_equal(active, g.active)
    assert np.all(np.isnan(pos[~active]))
    assert np.all(np.isfinite(pos[active]))
    again, _ = embed_graph(g, seed=3)
    assert np.array_equal(pos, again, equal_nan=True)
    other, _ = embed_graph(g, seed=4)
    assert not np.array_equal(pos, other, equal_nan=True)


def test_repulsion_cutoff_keeps_grid_structure():
    side = 10
    i, j = grid_graph(side)
    state = embed_initial(i, j, np.arange(side * side), PortableRNG(0), LayoutConfig(repulsion_cutoff=3.0))
    xy = np.indices((side, side)).reshape(2, -1).T
    manhattan = np.abs(xy[:, None] - xy[None]).sum(axis=2)
    emb = np.linalg.norm(state.positions[:, None] - state.positions[None], axis=2)
    iu = np.triu_indices(side * side, k=1)
    assert stats.spearmanr(manhattan[iu], emb[iu]).statistic > 0.8


def test_with_overrides_ignores_none():
    cfg = with_overrides(LayoutConfig(), c=2.0, tolerance=None)
    assert cfg.c == 2.0 and cfg.tolerance == LayoutConfig().tolerance
