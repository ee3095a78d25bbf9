import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qpzoom import Box, ImportanceParams, InvalidArgumentError, gaussian_value, score_grid


@pytest.fixture
def params():
    return ImportanceParams.from_prior(Box(40, 30, 25, 16), beta=64)


class TestGaussian:
    def test_sigma_from_prior(self, params):
        assert params.sigma_x == math.sqrt(64 * 25)
        assert params.sigma_y == math.sqrt(64 * 16)

    def test_peak(self, params):
        assert gaussian_value(params, 40, 30) == 1.0

    def test_one_sigma(self, params):
        assert gaussian_value(params, 40 + params.sigma_x, 30) == pytest.approx(0.6065306597126334, rel=1e-12)

    def test_one_sigma_both_axes(self, params):
        v = gaussian_value(params, 40 + params.sigma_x, 30 + params.sigma_y)
        assert v == pytest.approx(0.36787944117144233, rel=1e-12)

    def test_degenerate_prior(self):
        with pytest.raises(InvalidArgumentError):
            ImportanceParams.from_prior(Box(0, 0, 0, 5), beta=64)


class TestScoreGrid:
    def test_shape_and_bounds(self):
        S = score_grid(Box(100, 80, 30, 20), 200, 160, 12, 16, 64, 1e-2)
        assert S.scores.shape == (12, 16)
        assert np.all(S.scores >= 1e-2)
        assert np.all(S.scores <= 1 + 1e-2)

    def test_rotation_symmetry(self):
        S = score_grid(Box(250, 250, 100, 100), 500, 500, 16, 16, 64, 1e-2).scores
        np.testing.assert_allclose(S, np.rot90(S), rtol=0, atol=1e-15)
        np.testing.assert_allclose(S, S.T, rtol=0, atol=1e-15)

    def test_infinite_bandwidth_flattens(self):
        S = score_grid(Box(250, 250, 100, 100), 500, 500, 16, 16, 1e12, 1e-2).scores
        np.testing.assert_allclose(S, 1 + 1e-2, atol=1e-6)

    def test_center_to_corner_ratio(self):
        # two-point scalar evaluation done separately:
        # center patch (7.5 * 31.25 each axis) vs corner (0.5 * 31.25), sigma = 80
        S = score_grid(Box(250, 250, 100, 100), 500, 500, 16, 16, 64, 1e-2).scores
        assert S[7, 7] == pytest.approx(0.9725714588103238, rel=1e-12)
        assert S[0, 0] == pytest.approx(0.010187249454712072, rel=1e-12)
        assert S[7, 7] / S[0, 0] == pytest.approx(95.46948498060628, rel=1e-10)

    def test_patch_centers(self):
        r = Box(10, 10, 4, 4)
        S = score_grid(r, 40, 20, 2, 4, 2.0, 0.5).scores
        p = ImportanceParams.from_prior(r, 2.0, 0.5)
        for l in range(2):
            for k in range(4):
                assert S[l, k] == gaussian_value(p, (k + 0.5) * 10, (l + 0.5) * 10) + 0.5

    @settings(max_examples=50)
    @given(st.floats(-500, 500), st.floats(-500, 500))
    def test_translation_invariance(self, dx, dy):
        # shifting the prior and all patch centers together leaves the scores alone
        r = Box(120, 90, 40, 30)
        p0 = ImportanceParams.from_prior(r, 64)
        p1 = ImportanceParams.from_prior(r.shifted(dx, dy), 64)
        xs = (np.arange(10) + 0.5) * 24.0
        ys = (np.arange(8) + 0.5) * 22.5
        a = gaussian_value(p0, xs[None, :], ys[:, None])
        b = gaussian_value(p1, xs[None, :] + dx, ys[:, None] + dy)
        np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-300)

    def test_rejects_small_grid(self):
        with pytest.raises(InvalidArgumentError):
            score_grid(Box(5, 5, 2, 2), 10, 10, 1, 4, 64)

    def test_rejects_degenerate_prior(self):
        with pytest.raises(InvalidArgumentError):
            score_grid(Box(5, 5, 2, 0), 10, 10, 4, 4, 64)
