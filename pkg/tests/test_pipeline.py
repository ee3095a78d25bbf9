import math

import numpy as np
import pytest

import qpzoom.pipeline as pipeline
from qpzoom import (Box, DegenerateDeformationError, HyperParams, InvalidArgumentError,
                    SizeRecord, jitter_prior, make_search_patch, map_box_forward,
                    map_point_reverse, target_size_stats)
from qpzoom.pipeline import build_axis_map

from oracles import bilinear_pixel, kkt_oracle, piecewise_linear


def synthetic_frame(h=640, w=640):
    yy, xx = np.mgrid[0:h, 0:w].astype(float)
    r = 0.5 + 0.5 * np.sin(xx / 17.0) * np.cos(yy / 23.0)
    g = (xx + yy) / (w + h)
    b = ((xx // 32 + yy // 32) % 2) * 0.8 + 0.1
    return np.stack([r, g, b], axis=-1)


class TestMakeSearchPatch:
    def test_constant_frame(self):
        frame = np.full((480, 640, 3), 0.6)
        res = make_search_patch(frame, Box(320, 240, 60, 40))
        assert res.patch.shape == (256, 256, 3)
        assert np.all(res.patch == 0.6)
        assert not res.fallback
        # the centre of the crop is magnified beyond the uniform factor
        slopes = res.axis_map.x_map.slopes()
        uniform = res.crop_extent[0] / 256
        assert slopes[7] < uniform and slopes[8] < uniform

    def test_gamma_one_equals_uniform(self):
        frame = synthetic_frame(300, 400)
        hp = HyperParams(gamma=1.0)
        a = make_search_patch(frame, Box(150, 120, 50, 30), hp)
        b = make_search_patch(frame, Box(150, 120, 50, 30), hp, mode="uniform")
        np.testing.assert_array_equal(a.patch, b.patch)

    def test_composition_oracle(self):
        frame = synthetic_frame()
        prev = Box(300.3, 341.7, 64.0, 48.0)
        hp = HyperParams()
        res = make_search_patch(frame, prev, hp)

        # straight-line recomputation from the independent oracles
        W = math.sqrt(5 * 64.0 * 5 * 48.0)
        x0 = math.floor(prev.cx - W / 2 + 0.5)
        y0 = math.floor(prev.cy - W / 2 + 0.5)
        rcx, rcy = prev.cx - x0, prev.cy - y0
        sx, sy = math.sqrt(64 * 64.0), math.sqrt(64 * 48.0)
        S = [[math.exp(-0.5 * (((k + 0.5) * W / 16 - rcx) ** 2 / sx ** 2
                               + ((l + 0.5) * W / 16 - rcy) ** 2 / sy ** 2)) + 1e-2
              for k in range(16)] for l in range(16)]
        d_row, d_col = kkt_oracle(S, W, W, 1.5, 1.0)
        xs = np.concatenate([[0], np.cumsum(d_col)])
        ys = np.concatenate([[0], np.cumsum(d_row)])
        knots = [i * 256 / 16 for i in range(17)]

        assert res.crop_origin == (x0, y0)
        assert res.crop_extent[0] == pytest.approx(W, rel=1e-15)
        np.testing.assert_allclose(res.axis_map.x_map.knots_out, xs, rtol=1e-9, atol=1e-9)
        np.testing.assert_allclose(res.axis_map.y_map.knots_out, ys, rtol=1e-9, atol=1e-9)

        ceil_w = math.ceil(W)

        def crop_px(x, y):
            # bilinear on the padded crop, crop pixel (i, j) = frame pixel (x0 + i, y0 + j)
            x = min(max(x, 0.0), ceil_w - 1.0)
            y = min(max(y, 0.0), ceil_w - 1.0)
            fx, fy = x + x0, y + y0
            ix, iy = math.floor(fx), math.floor(fy)
            if 0 <= ix and ix + 1 < frame.shape[1] and 0 <= iy and iy + 1 < frame.shape[0]:
                return bilinear_pixel(frame, fx, fy)
            raise AssertionError("sample point near padding")

        rng = np.random.default_rng(3)
        for j, i in zip(rng.integers(0, 256, 300), rng.integers(0, 256, 300)):
            x = piecewise_linear(i + 0.5, knots, xs) - 0.5
            y = piecewise_linear(j + 0.5, knots, ys) - 0.5
            np.testing.assert_allclose(res.patch[j, i], crop_px(x, y), atol=1e-9)

    def test_fallback_on_degenerate_solution(self, monkeypatch):
        def boom(p):
            raise DegenerateDeformationError("row", 3, -1.0)
        monkeypatch.setattr(pipeline, "solve", boom)
        frame = synthetic_frame(200, 200)
        res = make_search_patch(frame, Box(100, 100, 30, 30))
        ref = make_search_patch(frame, Box(100, 100, 30, 30), mode="uniform")
        assert res.fallback
        np.testing.assert_array_equal(res.patch, ref.patch)

    def test_box_outside_frame(self):
        with pytest.raises(InvalidArgumentError):
            make_search_patch(np.zeros((50, 50)), Box(200, 200, 10, 10))

    def test_prior_near_frame_edge(self):
        frame = synthetic_frame(100, 120)
        res = make_search_patch(frame, Box(2, 3, 20, 20))
        assert res.patch.shape == (256, 256, 3)
        # padded region stays at the pad value
        assert np.all(res.patch[0, 0] == 0.0)

    def test_coverage_of_crop(self):
        res = make_search_patch(synthetic_frame(), Box(320, 320, 80, 80))
        W, H = res.crop_extent
        assert map_point_reverse(0, 0, res.axis_map) == (0.0, 0.0)
        assert map_point_reverse(256, 256, res.axis_map) == (W, H)

    def test_deterministic(self):
        frame = synthetic_frame(300, 300)
        a = make_search_patch(frame, Box(140, 160, 40, 60))
        b = make_search_patch(frame, Box(140, 160, 40, 60))
        np.testing.assert_array_equal(a.patch, b.patch)
        np.testing.assert_array_equal(a.axis_map.x_map.knots_out, b.axis_map.x_map.knots_out)
        assert a.crop_origin == b.crop_origin and a.prior_on_crop == b.prior_on_crop

    def test_grayscale(self):
        res = make_search_patch(synthetic_frame()[..., 0], Box(320, 320, 80, 80))
        assert res.patch.shape == (256, 256)


class TestJitter:
    def test_zero_jitter(self, rng):
        hp = HyperParams(jitter_small=0.0, jitter_large=0.0)
        assert jitter_prior(40.0, 30.0, hp, rng) == (40.0, 30.0)

    def test_pinned_seed(self):
        got = jitter_prior(40.0, 30.0, HyperParams(), np.random.default_rng(2024))
        assert got == pytest.approx((47.13762235009238, 33.64516412008904), rel=1e-12)

    def test_matches_independent_sampling(self):
        # same stream consumed by hand: one uniform for the mixture, two standard normals
        rng = np.random.default_rng(2024)
        j = 0.1 if rng.random() < 0.8 else 0.5
        z = rng.standard_normal(2) * j
        expected = (40.0 * math.exp(z[0]), 30.0 * math.exp(z[1]))
        got = jitter_prior(40.0, 30.0, HyperParams(), np.random.default_rng(2024))
        assert got == pytest.approx(expected, rel=1e-14)

    def test_mixture_variance(self):
        rng = np.random.default_rng(99)
        hp = HyperParams()
        logs = np.array([math.log(jitter_prior(1.0, 1.0, hp, rng)[0]) for _ in range(20000)])
        assert logs.var() == pytest.approx(0.058, rel=0.1)

    def test_bad_size(self, rng):
        with pytest.raises(InvalidArgumentError):
            jitter_prior(0.0, 1.0, HyperParams(), rng)


def centered_record(side, frame=1000.0):
    b = Box(frame / 2, frame / 2, side, side)
    return SizeRecord(b, b, frame, frame)


class TestTargetSizeStats:
    def test_single_uniform(self):
        rec = SizeRecord(Box(300, 200, 60, 40), Box(300, 200, 60, 40), 640, 480)
        st = target_size_stats([rec], HyperParams(), mode="uniform")
        W = math.sqrt(300 * 200)
        assert st.avg == pytest.approx(60 * 40 * (256 / W) ** 2, rel=1e-9)
        assert st.std == 0 and st.n == 1

    def test_gamma_one_equals_uniform(self):
        rec = SizeRecord(Box(300, 200, 60, 40), Box(310, 190, 50, 50), 640, 480)
        hp = HyperParams(gamma=1.0)
        a = target_size_stats([rec], hp, mode="zoom")
        b = target_size_stats([rec], hp, mode="uniform")
        assert a.avg == b.avg

    def test_magnifies_centered_targets(self):
        recs = [centered_record(s) for s in (20, 50, 80, 150)]
        z = target_size_stats(recs, HyperParams(), "zoom")
        u = target_size_stats(recs, HyperParams(), "uniform")
        assert np.all(z.areas > u.areas)

    def test_skips_invisible_targets(self):
        prior = Box(100, 100, 20, 20)
        visible = SizeRecord(Box(100, 100, 20, 20), prior, 640, 480)
        away = SizeRecord(Box(500, 400, 20, 20), prior, 640, 480)
        off_frame = SizeRecord(Box(-50, 100, 20, 20), Box(5, 100, 20, 20), 640, 480)
        st = target_size_stats([visible, away, off_frame], HyperParams(), "uniform")
        assert st.n == 1

    def test_empty(self):
        with pytest.raises(InvalidArgumentError, match="empty sequence"):
            target_size_stats([], HyperParams())

    def test_partially_visible_is_clipped(self):
        prior = Box(100, 100, 20, 20)   # crop covers [50, 150]
        rec = SizeRecord(Box(150, 100, 40, 20), prior, 640, 480)
        st = target_size_stats([rec], HyperParams(), "uniform")
        assert st.avg == pytest.approx(20 * 20 * (256 / 100) ** 2, rel=1e-9)


def test_rigid_weight_limits_aspect_change():
    # Aspect-ratio drift of the prior under the zoom map: negligible at lambda=1e6
    # and never worse than with no rigid term.
    hp = HyperParams()
    rng = np.random.default_rng(5)
    for _ in range(50):
        W = float(rng.uniform(200, 800))
        r = Box(W / 2, W / 2, W / 5 * math.exp(rng.normal(0, 0.5)), W / 5 * math.exp(rng.normal(0, 0.5)))

        def drift(lam):
            am, _ = build_axis_map(r, W, W, hp.with_(lam=lam))
            b = map_box_forward(r, am)
            return abs(math.log((b.w / b.h) / (r.w / r.h)))

        d0, dinf = drift(0.0), drift(1e6)
        assert dinf < d0 or d0 < 1e-12
        assert dinf < 1e-3
