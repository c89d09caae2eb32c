import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from crowdlanes.similarity import (
    InsufficientHistory, PositionHistory, SimilarityParams, candidate_scores, score, score_a, score_b,
    score_c, score_matrix, velocity,
)


def history(tracks, window):
    """``tracks`` is (steps, n, 2); all nodes active throughout."""
    tracks = np.asarray(tracks, dtype=np.float64)
    h = PositionHistory(tracks.shape[1], window)
    for frame in tracks:
        h.push(frame, np.ones(tracks.shape[1], dtype=bool))
    return h


def linear(start, vel, steps):
    return np.array(start, float) + np.arange(steps)[:, None] * np.array(vel, float)


def test_velocity_stationary_and_constant():
    tracks = np.stack([linear((0, 0), (0, 0), 101), linear((3, 3), (0, 1), 101)], axis=1)
    h = history(tracks, 100)
    np.testing.assert_allclose(velocity(h, 0), [0, 0])
    np.testing.assert_allclose(velocity(h, 1), [0, 1])


def test_insufficient_history():
    h = history(np.zeros((5, 2, 2)), 10)
    with pytest.raises(InsufficientHistory):
        velocity(h, 0)
    with pytest.raises(InsufficientHistory):
        score_c(h, 0, 1, 10)
    assert not h.full().any()


def test_inactive_node_restarts_history():
    h = PositionHistory(2, 2)
    for t in range(3):
        h.push(np.zeros((2, 2)), np.array([True, t != 1]))
    assert list(h.full()) == [True, False]
    assert h.history_length(1) == 1


def test_score_a_examples():
    h = history(np.stack([linear((0, 0), (0, 0), 6), linear((3, 4), (0, 0), 6)], axis=1), 5)
    assert score_a(h, 0, 1) == pytest.approx(5)
    same = history(np.stack([linear((0, 0), (1, 0), 6)] * 2, axis=1), 5)
    assert score_a(same, 0, 1) == 0
    tracks = np.zeros((6, 2, 2))
    tracks[-1, 1] = (10, 0)
    assert score_a(history(tracks, 5), 0, 1) == pytest.approx(10)


def test_score_b_examples():
    h = history(np.stack([linear((0, 0), (0, 0), 11), linear((5, 0), (0, 0), 11)], axis=1), 10)
    assert score_b(h, 0, 1, 100) == pytest.approx(5)
    # co-located now, velocity difference (0, 0.1)
    a = linear((0, -1), (0, 0.1), 11)
    b = np.zeros((11, 2))
    h = history(np.stack([a, b], axis=1), 10)
    assert score_b(h, 0, 1, 100) == pytest.approx(10)
    assert score_b(h, 0, 1, 0) == pytest.approx(0)


def test_score_c_examples():
    h = history(np.stack([linear((0, 0), (1, 1), 11), linear((7, 0), (1, 1), 11)], axis=1), 10)
    assert score_c(h, 0, 1, 100) == pytest.approx(7)
    a = linear((0, 0), (0, 0), 11)
    b = linear((3, 4 - 3.0), (0, 0.3), 11)
    h = history(np.stack([a, b], axis=1), 10)
    assert np.hypot(*(h.position(1) - h.position(0))) == pytest.approx(5)
    assert score_c(h, 0, 1, 100) == pytest.approx(30)
    assert score_c(h, 1, 0, 100) == score_c(h, 0, 1, 100)


def random_history(seed, n=6, window=8):
    rng = np.random.default_rng(seed)
    tracks = np.cumsum(rng.integers(-1, 2, size=(window + 1, n, 2)), axis=0) + rng.integers(0, 20, (n, 2))
    return history(tracks, window), tracks


def rigid(tracks, angle, shift):
    c, s = np.cos(angle), np.sin(angle)
    return tracks @ np.array([[c, s], [-s, c]]) + np.asarray(shift)


@given(st.integers(0, 10**6), st.floats(0, 2 * np.pi), st.floats(-50, 50), st.floats(-50, 50),
       st.floats(0, 50))
def test_score_properties(seed, angle, sx, sy, horizon):
    h, tracks = random_history(seed)
    moved = history(rigid(tracks, angle, (sx, sy)), h.window)
    for fn in (score_a, lambda h, i, j: score_b(h, i, j, horizon), lambda h, i, j: score_c(h, i, j, horizon)):
        for i in range(3):
            assert fn(h, i, i) == pytest.approx(0, abs=1e-9)
            for j in range(3, 6):
                d = fn(h, i, j)
                assert d >= 0
                assert d == fn(h, j, i)
                assert fn(moved, i, j) == pytest.approx(d, rel=1e-9, abs=1e-9)
    for i, j in [(0, 1), (2, 5)]:
        assert score_b(h, i, j, 0) == pytest.approx(score_c(h, i, j, 0))


@given(st.integers(0, 10**6))
def test_score_a_monotone_in_window(seed):
    _, tracks = random_history(seed, window=10)
    short = history(tracks, 4)
    long = history(tracks, 10)
    for i, j in [(0, 1), (3, 4)]:
        assert score_a(long, i, j) >= score_a(short, i, j)


@pytest.mark.parametrize("kind", ["A", "B", "C"])
def test_matrix_and_candidates_match_scalar_scores(kind):
    h, _ = random_history(3, n=25, window=6)
    params = SimilarityParams(kind, 6, 12.0)
    mat = score_matrix(h.window_array(), params)
    for i in range(25):
        for j in range(25):
            assert mat[i, j] == pytest.approx(score(h, i, j, params) if i != j else 0.0, abs=1e-12)
    pi, pj, s = candidate_scores(h.window_array(), params, 9.0)
    expected = {(i, j) for i in range(25) for j in range(i + 1, 25) if mat[i, j] < 9.0}
    assert set(zip(pi.tolist(), pj.tolist())) == expected
    np.testing.assert_allclose(s, mat[pi, pj])


def test_params_validation():
    with pytest.raises(ValueError):
        SimilarityParams("D")
    with pytest.raises(ValueError):
        SimilarityParams(window=0)
    with pytest.raises(ValueError):
        SimilarityParams(horizon=-1)
