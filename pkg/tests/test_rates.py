import dataclasses
import math

import numpy as np
import pytest

from starnoma.config import PowerAllocation
from starnoma.geometry import sample_layout
from starnoma.rates import (
    RateReport,
    build_rate_inputs,
    cluster_orders,
    conditional_terms,
    dl_rate_edge,
    dl_rate_mid,
    dl_rate_strong,
    expectation_terms,
    rate_report,
    ul_rate_edge,
    ul_rate_mid,
    ul_rate_strong,
    weighted_sum_rate,
)
from starnoma.design import aligned_state


def _inputs(cfg, power, state, cluster=1):
    return build_rate_inputs(cfg, power, state, cluster)


class TestTermBookkeeping:
    def test_orders_for_first_cluster(self, cfg):
        k = cluster_orders(cfg, 1)
        assert k == {"k_cd1": 1, "k_cd2": 4, "k_ed3": 3, "k_cu1": 1, "k_cu2": 4, "k_eu3": 1}

    def test_orders_for_last_cluster(self, cfg):
        k = cluster_orders(cfg, 3)
        assert k["k_cd2"] == 6 and k["k_ed3"] == 1 and k["k_eu3"] == 3

    def test_bad_cluster_rejected(self, cfg):
        with pytest.raises(ValueError):
            cluster_orders(cfg, 4)

    def test_terms_nonnegative_and_cached_products(self, cfg):
        t = expectation_terms(cfg)
        assert t.y2_u1d == pytest.approx(t.x1_u3u * t.q_center)
        assert t.y1_u3d == pytest.approx(t.x1_u3d * t.q_center)
        assert t.y2_u3d == pytest.approx(t.x1_u3d * t.x1_u3u)

    def test_conditional_terms_average_to_statistical(self, cfg):
        rng = np.random.default_rng(0)
        acc = None
        n = 4000
        for _ in range(n):
            t = conditional_terms(cfg, sample_layout(cfg, rng))
            vec = np.array([t.x1_u1d, t.x1_u2d, t.x1_u3d, t.x1_u3u, t.chi_u1u, t.chi_u2u])
            acc = vec if acc is None else acc + vec
        mean = acc / n
        t0 = expectation_terms(cfg)
        want = np.array([t0.x1_u1d, t0.x1_u2d, t0.x1_u3d, t0.x1_u3u, t0.chi_u1u, t0.chi_u2u])
        assert mean == pytest.approx(want, rel=0.15)


class TestDownlinkRates:
    def test_zero_coefficient_zero_rate(self, cfg, state):
        # alpha ordering requires a1 > 0, so probe the limit with a tiny value
        pw = PowerAllocation((1e-15, 0.3, 0.6), (cfg.p_um,) * 3)
        inputs = _inputs(cfg, pw, state)
        assert dl_rate_strong(inputs) == pytest.approx(0.0, abs=1e-12)

    def test_strong_user_sic_ceiling(self, cfg, state, power):
        a = power.alpha
        ceiling = math.log2(1 + a[0] / (cfg.xi_sic * (a[1] + a[2]))) / cfg.M_d
        for snr in (10, 30, 50, 80):
            inputs = _inputs(cfg.with_snr(snr), power, state)
            assert dl_rate_strong(inputs) <= ceiling + 1e-12

    def test_mid_user_reduces_to_single_user_form(self, cfg, state):
        quiet = dataclasses.replace(cfg, xi_sic=0.0)
        pw = PowerAllocation((1e-12, 0.3, 0.6), (1e-12, 1e-12, 1e-12))
        inputs = _inputs(quiet, pw, state)
        t = inputs.terms
        want = math.log2(1 + 0.3 * quiet.P_b * t.x1_u2d / quiet.sigma2) / quiet.M_d
        assert dl_rate_mid(inputs) == pytest.approx(want, rel=1e-6)

    def test_edge_user_interference_ceiling(self, cfg, state, power):
        a = power.alpha
        for snr in (20, 40, 60):
            inputs = _inputs(cfg.with_snr(snr), power, state)
            bound = math.log2(1 + a[2] / (a[0] + a[1])) / cfg.M_d
            assert dl_rate_edge(inputs) < bound

    def test_edge_rate_grows_with_elements_under_alignment(self, cfg, power):
        rates = []
        for n in (4, 16, 36, 64):
            c = dataclasses.replace(cfg, N=n)
            rates.append(dl_rate_edge(_inputs(c, power, aligned_state(c))))
        assert all(b > a for a, b in zip(rates, rates[1:]))


class TestUplinkRates:
    def test_zero_power_zero_rate(self, cfg, state):
        pw = PowerAllocation((0.1, 0.3, 0.6), (1e-30, cfg.p_um, cfg.p_um))
        assert ul_rate_strong(_inputs(cfg, pw, state)) == pytest.approx(0.0, abs=1e-9)

    def test_perfect_sic_edge_denominator(self, cfg, state, power):
        quiet = dataclasses.replace(cfg, xi_sic=0.0)
        inputs = _inputs(quiet, power, state)
        t, s = inputs.terms, inputs.surface
        edge_gain = s.omega_br_u3u * t.l_br * t.x1_u3u
        V = quiet.beta_si * quiet.P_b**quiet.lambda_si
        want = math.log2(
            1 + power.p_ul[2] * edge_gain / (quiet.P_b * t.l_br**2 * s.y3_raw + V + quiet.sigma2)
        ) / quiet.M_u
        assert ul_rate_edge(inputs) == pytest.approx(want, rel=1e-12)

    def test_high_self_interference_hurts_all_ul(self, cfg, state):
        for snr in (0, 10, 20, 30, 40, 50):
            base_cfg = cfg.with_snr(snr)
            loud_cfg = dataclasses.replace(base_cfg, beta_si=1.0, lambda_si=0.4)
            pw = PowerAllocation((0.1, 0.3, 0.6), (base_cfg.p_um,) * 3)
            for fn in (ul_rate_strong, ul_rate_mid, ul_rate_edge):
                assert fn(_inputs(loud_cfg, pw, state)) < fn(_inputs(base_cfg, pw, state))


class TestWiringOracles:
    """Rates reassembled from the primitive operations, bypassing the terms cache."""

    def test_dl_edge_assembly(self, cfg, state, power):
        from starnoma.channel import build_links, cascaded_power_mean
        from starnoma.geometry import (
            OrderSpec,
            ordered_pathloss_mean,
            outside_point_pathloss_mean,
        )

        links = build_links(cfg)
        x_e = ordered_pathloss_mean(OrderSpec(3, 3, cfg.R_r), cfg.m)   # farthest of 3
        x_eu = ordered_pathloss_mean(OrderSpec(1, 3, cfg.R_r), cfg.m)  # nearest of 3
        q = outside_point_pathloss_mean(cfg.R, cfg.r1, cfg.m)
        l_br = (1 + cfg.d_br) ** (-cfg.m)
        w_br = cascaded_power_mean(links["r,u3d"], state, "r", links["b,r"])
        w1 = cascaded_power_mean(links["r,u3d"], state, "r", links["r,u1u"])
        w2 = cascaded_power_mean(links["r,u3d"], state, "r", links["r,u2u"])
        w3 = cascaded_power_mean(links["r,u3d"], state, "r", links["r,u3u"])
        a, p = power.alpha, power.p_ul
        S = l_br * w_br * x_e
        b1 = p[0] * w1 + p[1] * w2
        num = a[2] * cfg.P_b * S
        den = (a[0] + a[1]) * cfg.P_b * S + b1 * x_e * q + p[2] * w3 * x_e * x_eu + cfg.sigma2
        hand = math.log2(1 + num / den) / cfg.M_d
        assert dl_rate_edge(_inputs(cfg, power, state)) == pytest.approx(hand, rel=1e-14)

    def test_ul_strong_assembly(self, cfg, state, power):
        from starnoma.channel import (
            build_links,
            cascaded_power_mean,
            self_reflection_power_mean,
        )
        from starnoma.geometry import OrderSpec, ordered_pathloss_mean

        links = build_links(cfg)
        chi1 = ordered_pathloss_mean(OrderSpec(1, 6, cfg.R), cfg.m)
        chi2 = ordered_pathloss_mean(OrderSpec(4, 6, cfg.R), cfg.m)
        x_eu = ordered_pathloss_mean(OrderSpec(1, 3, cfg.R_r), cfg.m)
        l_br = (1 + cfg.d_br) ** (-cfg.m)
        w_e = cascaded_power_mean(links["b,r"], state, "t", links["r,u3u"])
        bounce = self_reflection_power_mean(links["b,r"], state, "t")
        p = power.p_ul
        V = cfg.beta_si * cfg.P_b**cfg.lambda_si
        num = p[0] * chi1
        den = p[1] * chi2 + p[2] * w_e * l_br * x_eu + cfg.P_b * l_br**2 * bounce + V + cfg.sigma2
        hand = math.log2(1 + num / den) / cfg.M_u
        assert ul_rate_strong(_inputs(cfg, power, state)) == pytest.approx(hand, rel=1e-14)


class TestAggregation:
    def test_zero_weights(self, cfg, state, power):
        inputs = _inputs(cfg, power, state)
        weights = {r: 0.0 for r in ("DL1", "DL2", "DL3", "UL1", "UL2", "UL3")}
        assert weighted_sum_rate(inputs, weights) == 0.0

    def test_unit_weights_match_report_sums(self, cfg, state, power):
        inputs = _inputs(cfg, power, state)
        report = rate_report(cfg, power, state)
        assert weighted_sum_rate(inputs) == pytest.approx(report.dl_sum + report.ul_sum, rel=1e-12)

    def test_random_weights_match_recomputation(self, cfg, state, power):
        rng = np.random.default_rng(2)
        inputs = _inputs(cfg, power, state)
        report = rate_report(cfg, power, state)
        w = {r: float(rng.random()) for r in report.rates}
        want = sum(w[r] * report.rates[r] for r in report.rates)
        assert weighted_sum_rate(inputs, w) == pytest.approx(want, rel=1e-12)

    def test_negative_weight_rejected(self, cfg, state, power):
        with pytest.raises(ValueError):
            weighted_sum_rate(_inputs(cfg, power, state), {"DL1": -1.0})

    def test_rates_finite_and_nonnegative(self, cfg, state, power):
        for snr in (0, 20, 40):
            rep = rate_report(cfg.with_snr(snr), power, state)
            for v in rep.rates.values():
                assert np.isfinite(v) and v >= 0

    def test_report_requires_all_roles(self):
        with pytest.raises(ValueError):
            RateReport(rates={"DL1": 1.0}, method="analytic", cluster=1)

    def test_sic_error_monotonicity(self, cfg, state, power):
        # DL1, UL2, UL3 never gain from a worse SIC residual
        snr_cfg = cfg.with_snr(40)
        rates = []
        for xi in (0.0, 0.05, 0.1, 0.3):
            rep = rate_report(dataclasses.replace(snr_cfg, xi_sic=xi), power, state)
            rates.append((rep.rates["DL1"], rep.rates["UL2"], rep.rates["UL3"]))
        for i in range(3):
            seq = [r[i] for r in rates]
            assert all(a >= b - 1e-15 for a, b in zip(seq, seq[1:]))
