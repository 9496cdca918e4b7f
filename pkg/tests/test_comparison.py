import pytest

from starnoma.comparison import (
    PairAllocation,
    cluster_power_policy,
    pair_power_policy,
    pair_rate_sums,
    pair_slots,
    pair_structure,
    reference_edge_targets,
    simulate_pair_sums,
)
from starnoma.rates import rate_report


class TestPairStructure:
    def test_baseline_nine_users(self):
        pairs = pair_structure(6, 3)
        assert len(pairs) == 4
        assert pairs[0] == (("center", 1), ("edge", 3))
        assert pairs[2] == (("center", 3), ("edge", 1))
        assert pairs[3] == (("center", 4), ("center", 6))

    def test_even_count(self):
        pairs = pair_structure(6, 4)
        assert len(pairs) == 5
        assert pairs[4] == (("center", 5), ("center", 6))

    def test_odd_count_leaves_median_slot(self):
        pairs, leftover = pair_slots(6, 3)
        assert len(pairs) == 4
        assert leftover == ("center", 5)

    def test_even_count_has_no_leftover(self):
        _, leftover = pair_slots(6, 4)
        assert leftover is None


class TestPolicies:
    def test_cluster_policy_feasible(self, cfg, state):
        for snr in (0, 20, 40):
            point = cfg.with_snr(snr)
            alloc = cluster_power_policy(point, state)
            assert set(alloc) == {1, 2, 3}
            for pw in alloc.values():
                assert pw.alpha[0] < pw.alpha[1] < pw.alpha[2]
                assert sum(pw.alpha) <= 1 + 1e-12
                assert all(0 < p <= point.p_um for p in pw.p_ul)

    def test_cluster_policy_reproduces_reference_edge_rates(self, cfg, state):
        point = cfg.with_snr(30)
        dl_t, ul_t = reference_edge_targets(point, state)
        alloc = cluster_power_policy(point, state)
        for j, pw in alloc.items():
            rates = rate_report(point, pw, state, cluster=j).rates
            assert rates["DL3"] == pytest.approx(dl_t[j], rel=1e-6)
            assert rates["UL3"] == pytest.approx(ul_t[j], rel=1e-6)

    def test_pair_policy_feasible(self, cfg, state):
        for snr in (0, 20, 40):
            point = cfg.with_snr(snr)
            allocs = pair_power_policy(point, state)
            assert len(allocs) == 4
            for pa in allocs:
                assert 0 < pa.alpha[0] < pa.alpha[1]
                assert sum(pa.alpha) <= 1 + 1e-12
                assert all(0 < p <= point.p_um for p in pa.p)

    def test_explicit_scalar_targets_accepted(self, cfg, state):
        point = cfg.with_snr(20)
        alloc = cluster_power_policy(point, state, 1e-6, 1e-6)
        assert set(alloc) == {1, 2, 3}

    def test_pair_allocation_validation(self):
        with pytest.raises(ValueError):
            PairAllocation(alpha=(0.7, 0.3), p=(1.0, 1.0))
        with pytest.raises(ValueError):
            PairAllocation(alpha=(0.3, 0.7), p=(0.0, 1.0))


class TestPairRates:
    def test_analytic_sums_positive(self, cfg, state):
        point = cfg.with_snr(30)
        allocs = pair_power_policy(point, state)
        dl, ul = pair_rate_sums(point, allocs, state)
        assert dl > 0 and ul > 0

    def test_simulated_close_to_analytic_shape(self, cfg, state):
        # same order of magnitude; the ratio approximation is not exact
        point = cfg.with_snr(20)
        allocs = pair_power_policy(point, state)
        dl, ul = pair_rate_sums(point, allocs, state)
        sim = simulate_pair_sums(point, allocs, state, trials=20_000, seed=7)
        assert sim["dl_sum"] == pytest.approx(dl, rel=0.8)
        assert sim["ul_sum"] == pytest.approx(ul, rel=0.8)

    def test_simulation_deterministic(self, cfg, state):
        point = cfg.with_snr(20)
        allocs = pair_power_policy(point, state)
        a = simulate_pair_sums(point, allocs, state, trials=8_000, seed=3)
        b = simulate_pair_sums(point, allocs, state, trials=8_000, seed=3)
        assert a == b

    def test_wrong_allocation_count(self, cfg, state):
        with pytest.raises(ValueError):
            pair_rate_sums(cfg, [PairAllocation((0.3, 0.7), (1.0, 1.0))], state)
