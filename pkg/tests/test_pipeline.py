import numpy as np
import pytest

from crowdlanes.clustering import DbscanParams, dbscan
from crowdlanes.evaluation import nmi
from crowdlanes.pipeline import DetectionConfig, coordinates, detect, iter_partitions, run_pipeline
from crowdlanes.scenarios import build_scenario
from crowdlanes.similarity import PositionHistory, SimilarityParams, score_matrix
from crowdlanes.simulation import SimParams, run

SMALL = SimParams(density=0.1, seed=2, max_timesteps=140)
SIM = SimilarityParams("C", 40, 40.0)


@pytest.fixture(scope="module")
def trace():
    return run(build_scenario(size=40), SMALL)


def test_detection_starts_at_window(trace):
    config = DetectionConfig(SIM, (6.0, 12.0), min_pts=5)
    result = detect(trace.positions.astype(float), trace.active, trace.lanes, config)
    assert result.timesteps[0] == 40
    assert result.timesteps == list(range(40, trace.n_timesteps))
    assert result.nmi.shape == (2, len(result.timesteps))
    assert 0 <= result.nmi.min() and result.nmi.max() <= 1
    assert result.mean(6.0) == pytest.approx(np.mean(result.nmi[0]))


def test_candidate_path_equals_dense_matrix(trace):
    # the grid-pruned pipeline must agree with a full score matrix
    config = DetectionConfig(SIM, (5.0, 9.0), min_pts=4, seed=7)
    pos = trace.positions.astype(float)
    history = PositionHistory(trace.n_nodes, SIM.window)
    checked = 0
    gen = iter_partitions(pos, trace.active, config)
    for t in range(trace.n_timesteps):
        history.push(pos[t], trace.active[t])
        if t < SIM.window or t % 25:
            continue
        while True:
            tt, nodes, parts = next(gen)
            if tt == t:
                break
        mat = score_matrix(history.window_array(nodes), SIM)
        for eps, part in parts.items():
            ref = dbscan(nodes, mat, DbscanParams(eps, 4, seed=7), timestep=t)
            assert np.array_equal(ref.labels, part.labels)
            checked += 1
    assert checked >= 4


def test_stride_subsamples(trace):
    config = DetectionConfig(SIM, (8.0,), min_pts=5, stride=10)
    result = detect(trace.positions.astype(float), trace.active, trace.lanes, config)
    assert result.timesteps == list(range(40, trace.n_timesteps, 10))


def test_rigid_motion_invariance(trace):
    config = DetectionConfig(SIM, (8.0,), min_pts=5, stride=20)
    pos = trace.positions.astype(float)
    c, s = np.cos(0.7), np.sin(0.7)
    moved = pos @ np.array([[c, s], [-s, c]]) + np.array([13.0, -4.0])
    a = detect(pos, trace.active, trace.lanes, config, keep_partitions=True)
    b = detect(moved, trace.active, trace.lanes, config, keep_partitions=True)
    # rotation changes rounding, so compare the scores rather than bit patterns
    np.testing.assert_allclose(a.nmi, b.nmi, atol=0.02)


def test_partitions_kept_and_scored(trace):
    config = DetectionConfig(SIM, (8.0,), min_pts=5, stride=30)
    result = detect(trace.positions.astype(float), trace.active, trace.lanes, config, keep_partitions=True)
    for t, part, score in zip(result.timesteps, result.partitions[8.0], result.nmi[0]):
        assert part.timestep == t
        assert nmi(part.labels, trace.lanes[part.nodes]) == score


def test_run_pipeline_raw_and_embedded():
    scen = build_scenario(size=20)
    params = SimParams(density=0.1, seed=1, max_timesteps=30)
    config = DetectionConfig(SimilarityParams("C", 10, 10.0), (5.0,), min_pts=3)
    trace, raw = run_pipeline(scen, params, config)
    _, emb = run_pipeline(scen, params, config, mode="embedded", radius=8.0)
    assert raw.timesteps == emb.timesteps == list(range(10, trace.n_timesteps))
    pos, active = coordinates(trace, "embedded", 8.0)
    assert np.array_equal(active, trace.active)


def test_bad_config():
    with pytest.raises(ValueError):
        DetectionConfig(epsilons=())
    with pytest.raises(ValueError):
        DetectionConfig(epsilons=(0.0,))
    with pytest.raises(ValueError):
        DetectionConfig(stride=0)
    with pytest.raises(ValueError):
        coordinates(None, "spectral")
