import numpy as np
import pytest

from autodiff import Tensor
from autodiff.gradcheck import max_gradient_error
from encoder.models.model import EncoderParams
from encoder.service.encoder import encode, neighbour_indices
from scenes.models.model import PointCloud


def _cloud(rng, K=24):
    return PointCloud(points=np.column_stack([rng.normal(size=(K, 3)) * 3.0, rng.uniform(size=K)]))


def test_output_shape(rng):
    params = EncoderParams(channels=6, hidden=5, neighbors=4, rng=rng)
    assert encode(_cloud(rng), params).shape == (24, 6)


def test_permuting_points_permutes_features(rng):
    params = EncoderParams(channels=6, hidden=5, neighbors=4, rng=rng)
    pc = _cloud(rng)
    order = rng.permutation(pc.K)
    a = encode(pc, params).values
    b = encode(PointCloud(points=pc.points[order]), params).values
    assert np.allclose(a[order], b, atol=1e-10)


def test_identical_points_get_identical_features(rng):
    params = EncoderParams(channels=6, hidden=5, neighbors=3, rng=rng)
    points = _cloud(rng, 10).points
    points[7] = points[2]
    out = encode(PointCloud(points=points), params).values
    assert np.allclose(out[2], out[7])


def test_neighbourhood_starts_with_the_point_itself(rng):
    xyz = rng.normal(size=(15, 3))
    xyz[4] = xyz[9]
    idx = neighbour_indices(xyz, 3)
    assert idx.shape == (15, 4)
    assert np.array_equal(idx[:, 0], np.arange(15))
    assert 9 in idx[4] and 4 in idx[9]


def test_neighbour_count_is_clamped(rng):
    params = EncoderParams(channels=4, hidden=4, neighbors=16, rng=rng)
    assert encode(_cloud(rng, 5), params).shape == (5, 4)


@pytest.mark.parametrize("seed", range(50))
def test_gradient_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    params = EncoderParams(channels=4, hidden=5, neighbors=3, rng=rng)
    pc = _cloud(rng, 12)
    weights = Tensor(rng.normal(size=(12, 4)))
    error = max_gradient_error(lambda: (encode(pc, params) * weights).sum(), params.parameters())
    assert error < 1e-4
