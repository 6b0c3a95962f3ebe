import numpy as np
import pytest

from app.config import EsnParams
from app.reservoir.encoding import (
    MomentAccumulator,
    fold_input_scaling,
    increment_transform,
)
from app.reservoir.esn import harvest_states, init_reservoir


def test_increment_transform_differences_velocities():
    """Tests that only the next-step velocities become increments."""
    x = np.array([0.3, 0.4, 1.0, -2.0, 0.31, 0.41, 1.5, -2.5])
    np.testing.assert_array_equal(
        increment_transform() @ x, [0.3, 0.4, 1.0, -2.0, 0.31, 0.41, 0.5, -0.5]
    )


def test_moments_match_numpy_and_merge():
    """Tests chunked moments against numpy and the unit std of a constant channel."""
    rng = np.random.default_rng(5)
    data = rng.normal([0.0, 3.0, 0.0], [1.0, 0.01, 0.0], size=(500, 3)).T
    whole = MomentAccumulator(3).add(data)
    merged = MomentAccumulator(3)
    for i in range(0, 500, 125):
        merged.merge(MomentAccumulator(3).add(data[:, i : i + 125]))

    assert whole.count == merged.count == 500
    np.testing.assert_allclose(whole.mean, data.mean(axis=1), atol=1e-12)
    np.testing.assert_allclose(whole.std[:2], data.std(axis=1)[:2], rtol=1e-6)
    assert whole.std[2] == 1.0
    np.testing.assert_allclose(merged.mean, whole.mean, atol=1e-12)
    np.testing.assert_allclose(merged.std, whole.std, rtol=1e-9)


def test_empty_moments_are_neutral():
    """Tests that no data means zero mean and unit scale."""
    acc = MomentAccumulator(4)
    np.testing.assert_array_equal(acc.mean, np.zeros(4))
    np.testing.assert_array_equal(acc.std, np.ones(4))
    with pytest.raises(ValueError):
        acc.add(np.zeros((3, 2)))


def test_folded_weights_see_the_encoded_input():
    """Tests that folded weights on raw inputs equal the original weights on encoded inputs."""
    weights = init_reservoir(EsnParams(n_r=30, seed=3))
    rng = np.random.default_rng(8)
    raw = rng.normal(size=(8, 200)) * [[0.4], [0.4], [1.0], [2.0], [0.4], [0.4], [1.0], [2.0]]
    transform = increment_transform()
    moments = MomentAccumulator(8).add(transform @ raw)
    mean, std = moments.mean, moments.std

    folded = fold_input_scaling(weights, transform, mean, std)
    encoded = (transform @ raw - mean[:, None]) / std[:, None]

    np.testing.assert_allclose(
        folded.w_in @ raw + folded.b[:, None],
        weights.w_in @ encoded + weights.b[:, None],
        atol=1e-12,
    )
    np.testing.assert_allclose(
        harvest_states(folded, 0.8, raw), harvest_states(weights, 0.8, encoded), atol=1e-12
    )
    np.testing.assert_array_equal(folded.w_r, weights.w_r)
    np.testing.assert_allclose(np.std(encoded, axis=1), 1.0)


def test_increment_encoding_needs_eight_inputs():
    """Tests that the increment encoding is tied to [y; y_next] inputs."""
    with pytest.raises(ValueError, match="dim_in"):
        EsnParams(dim_in=6)
    assert EsnParams(dim_in=6, input_encoding="raw").dim_in == 6
