import numpy as np
import pytest
from scipy import integrate

from starnoma.geometry import (
    OrderSpec,
    sample_disk,
    ordered_pathloss_density,
    ordered_pathloss_mean,
    ordered_pathloss_mean_series,
    outside_point_distance_density,
    outside_point_pathloss_mean,
    outside_point_pathloss_mean_quad,
    pair_distance_density,
    pair_pathloss_mean,
    pair_pathloss_mean_series,
    sample_layout,
)


class TestSampling:
    def test_counts_and_containment(self, cfg):
        layout = sample_layout(cfg, np.random.default_rng(0))
        assert layout.dl_center.shape == (cfg.K_cd, 2)
        assert layout.ul_center.shape == (cfg.K_cu, 2)
        assert layout.dl_edge.shape == (cfg.K_ed, 2)
        assert np.all(layout.bs_distances("dl_center") <= cfg.R)
        assert np.all(layout.surface_distances("dl_edge") <= cfg.R_r)
        assert np.all(layout.surface_distances("ul_edge") <= cfg.R_r)

    def test_same_seed_same_layout(self, cfg):
        a = sample_layout(cfg, np.random.default_rng(7))
        b = sample_layout(cfg, np.random.default_rng(7))
        assert np.array_equal(a.dl_center, b.dl_center)
        assert np.array_equal(a.ul_edge, b.ul_edge)

    def test_mean_radius(self, cfg):
        # E[r] = int r * 2r/R^2 dr = 2R/3, checked on 1e6 draws of the sampler
        rng = np.random.default_rng(3)
        r = np.linalg.norm(sample_disk(rng, 1_000_000, cfg.R), axis=-1)
        assert r.mean() == pytest.approx(2 * cfg.R / 3, rel=5e-3)


class TestOrderedDensity:
    def test_reduces_to_radial_law(self):
        spec = OrderSpec(1, 1, 2.0)
        r = np.linspace(0.0, 2.0, 9)
        assert ordered_pathloss_density(spec, r) == pytest.approx(2 * r / 4.0)

    @pytest.mark.parametrize("K", range(1, 7))
    def test_normalization(self, K):
        for k in range(1, K + 1):
            spec = OrderSpec(k, K, 30.0)
            total, _ = integrate.quad(lambda r: ordered_pathloss_density(spec, r), 0, 30.0)
            assert total == pytest.approx(1.0, abs=1e-9)

    def test_nonnegative(self):
        spec = OrderSpec(2, 5, 10.0)
        assert np.all(ordered_pathloss_density(spec, np.linspace(0, 10, 101)) >= 0)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            ordered_pathloss_density(OrderSpec(1, 2, 5.0), 6.0)

    def test_bad_order(self):
        with pytest.raises(ValueError):
            OrderSpec(3, 2, 5.0)


class TestOrderedMean:
    def test_zero_exponent(self):
        assert ordered_pathloss_mean(OrderSpec(2, 4, 17.0), 0.0) == 1.0

    def test_single_user_against_mc_oracle(self):
        # brute-force oracle: 1e7 radii draws in the unit disk
        value = ordered_pathloss_mean(OrderSpec(1, 1, 1.0), 2.7)
        rng = np.random.default_rng(12345)
        w = (1.0 + np.sqrt(rng.random(10_000_000))) ** (-2.7)
        se = w.std(ddof=1) / np.sqrt(w.size)
        assert abs(value - w.mean()) < 3 * se
        assert value == pytest.approx(0.2839958336, abs=1e-9)

    def test_ordered_against_mc_oracle(self):
        spec = OrderSpec(2, 6, 50.0)
        value = ordered_pathloss_mean(spec, 2.7)
        rng = np.random.default_rng(99)
        r = np.sort(50.0 * np.sqrt(rng.random((2_000_000, 6))), axis=1)[:, 1]
        w = (1.0 + r) ** (-2.7)
        se = w.std(ddof=1) / np.sqrt(w.size)
        assert abs(value - w.mean()) < 3 * se

    @pytest.mark.parametrize(
        "k,K,R", [(k, 6, 50.0) for k in range(1, 7)] + [(k, 3, 30.0) for k in range(1, 4)]
    )
    def test_every_baseline_order_against_mc(self, k, K, R):
        # the full set of order statistics the baseline deployment consumes
        value = ordered_pathloss_mean(OrderSpec(k, K, R), 2.7)
        rng = np.random.default_rng(1000 + 10 * K + k)
        r = np.sort(R * np.sqrt(rng.random((1_000_000, K))), axis=1)[:, k - 1]
        w = (1.0 + r) ** (-2.7)
        se = w.std(ddof=1) / np.sqrt(w.size)
        assert abs(value - w.mean()) < 3 * se

    def test_strictly_decreasing_in_order(self):
        K, R = 6, 50.0
        vals = [ordered_pathloss_mean(OrderSpec(k, K, R), 2.7) for k in range(1, K + 1)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    @pytest.mark.parametrize("k,K,R,m", [(1, 1, 0.8, 2.7), (1, 3, 0.9, 2.7), (2, 3, 0.5, 3.5), (3, 6, 0.95, 2.0)])
    def test_series_matches_quadrature_where_convergent(self, k, K, R, m):
        spec = OrderSpec(k, K, R)
        assert ordered_pathloss_mean_series(spec, m) == pytest.approx(
            ordered_pathloss_mean(spec, m), rel=1e-10
        )


class TestPairMean:
    def test_zero_exponent(self):
        assert pair_pathloss_mean(50.0, 0.0) == 1.0

    def test_density_normalizes(self):
        total, _ = integrate.quad(lambda d: pair_distance_density(d, 50.0), 0, 100.0, limit=200)
        assert total == pytest.approx(1.0, abs=1e-9)

    def test_against_mc_oracle(self):
        value = pair_pathloss_mean(50.0, 2.7)
        rng = np.random.default_rng(21)
        n = 10_000_000
        r1 = 50.0 * np.sqrt(rng.random(n))
        r2 = 50.0 * np.sqrt(rng.random(n))
        th = rng.uniform(0, 2 * np.pi, n)
        d = np.sqrt(r1**2 + r2**2 - 2 * r1 * r2 * np.cos(th))
        w = (1.0 + d) ** (-2.7)
        se = w.std(ddof=1) / np.sqrt(n)
        assert abs(value - w.mean()) < 3 * se

    @pytest.mark.parametrize("R,m", [(0.4, 2.7), (0.25, 3.5), (0.45, 2.2)])
    def test_series_matches_quadrature_where_convergent(self, R, m):
        assert pair_pathloss_mean_series(R, m) == pytest.approx(pair_pathloss_mean(R, m), rel=1e-9)


class TestOutsidePointMean:
    def test_zero_exponent(self):
        assert outside_point_pathloss_mean(50.0, 30.0, 0.0) == pytest.approx(1.0, abs=1e-12)

    def test_far_point_limit(self):
        # a remote disk looks like a point at the clearance distance
        r1 = 1e6
        value = outside_point_pathloss_mean(10.0, r1, 2.0)
        assert value == pytest.approx((1.0 + r1) ** (-2.0), rel=1e-2)

    def test_density_normalizes(self):
        total, _ = integrate.quad(
            lambda r: outside_point_distance_density(r, 50.0, 30.0), 30.0, 130.0, limit=300
        )
        assert total == pytest.approx(1.0, abs=1e-9)

    def test_against_mc_oracle(self):
        value = outside_point_pathloss_mean(50.0, 30.0, 2.7, C=32)
        rng = np.random.default_rng(17)
        n = 10_000_000
        r = 50.0 * np.sqrt(rng.random(n))
        th = rng.uniform(0, 2 * np.pi, n)
        # external point at distance 80 from the disk center
        d = np.sqrt((80.0 - r * np.cos(th)) ** 2 + (r * np.sin(th)) ** 2)
        w = (1.0 + d) ** (-2.7)
        se = w.std(ddof=1) / np.sqrt(n)
        assert abs(value - w.mean()) < 3 * se

    def test_quadrature_matches_adaptive_and_converges(self):
        # the arccos density has endpoint derivative singularities, so the
        # fixed rule converges polynomially; check agreement and convergence
        truth = outside_point_pathloss_mean_quad(50.0, 30.0, 2.7)
        errs = [
            abs(outside_point_pathloss_mean(50.0, 30.0, 2.7, C=C) - truth) / truth
            for C in (8, 32, 128)
        ]
        assert errs[0] > errs[1] > errs[2]
        assert errs[1] < 1e-4

    def test_invalid_clearance(self):
        with pytest.raises(ValueError):
            outside_point_pathloss_mean(50.0, 0.0, 2.7)


def test_order_sandwich_property():
    # nearest-user mean >= unordered pair-style mean >= farthest-user mean
    K, R, m = 4, 50.0, 2.7
    first = ordered_pathloss_mean(OrderSpec(1, K, R), m)
    last = ordered_pathloss_mean(OrderSpec(K, K, R), m)
    unordered = ordered_pathloss_mean(OrderSpec(1, 1, R), m)
    assert first >= unordered >= last
