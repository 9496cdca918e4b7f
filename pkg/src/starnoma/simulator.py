"""Monte-Carlo ground truth for the closed-form rate analysis.

Each trial drops fresh user positions, sorts and clusters them, draws every
fading realization, and evaluates the exact per-role SINRs; rates accumulate
as (1/M) * log2(1 + SINR).  Imperfect SIC enters exactly as in the closed
forms: a fraction xi of an already-decoded signal's power stays in the
denominator.  The residual self-interference is drawn per trial as a
CN(0, beta * P_b^lambda) scalar.

Trials are split into fixed-size blocks with seeds derived via SeedSequence
spawning, so a run is reproducible and block results could be computed in any
order; execution here is serial.

estimate_expectation() evaluates exactly the random quantity behind each
closed-form expectation term, which is what makes the term-level oracle
checks agree to within Monte-Carlo error (no log, no ratio approximation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import StarRisState, build_links, sample_rician
from .config import PowerAllocation, SystemConfig
from .geometry import sample_disk
from .rates import RateReport, ROLES, cluster_orders, expectation_terms, pathloss, si_variance, surface_terms

__all__ = [
    "SimPlan",
    "simulate",
    "simulate_clusters",
    "estimate_expectation",
    "analytic_expectation",
    "EXPECTATION_KEYS",
]

_DEFAULT_BLOCK = 1 << 14


@dataclass(frozen=True)
class SimPlan:
    """One simulation request: what to run and how to seed it."""

    cfg: SystemConfig
    power: PowerAllocation
    state: StarRisState
    trials: int = 200_000
    seed: int = 0
    cluster: int = 1
    freeze_layout: bool = False   # reuse the first drawn layout (channel-only averaging)
    block_size: int = _DEFAULT_BLOCK

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


def _draw_cn(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def _draw_rician_batch(link, rng, trials: int) -> np.ndarray:
    return sample_rician(link, rng, trials=trials)


class _Accumulator:
    """Streaming mean/stderr over per-trial values."""

    def __init__(self):
        self.n = 0
        self.s = 0.0
        self.s2 = 0.0

    def add(self, values: np.ndarray):
        self.n += values.size
        self.s += float(np.sum(values))
        self.s2 += float(np.sum(values * values))

    @property
    def mean(self) -> float:
        return self.s / self.n

    @property
    def stderr(self) -> float:
        if self.n < 2:
            return float("nan")
        var = max(self.s2 / self.n - self.mean**2, 0.0) * self.n / (self.n - 1)
        return math.sqrt(var / self.n)


def _block_seeds(seed: int, nblocks: int):
    return np.random.SeedSequence(seed).spawn(nblocks)


def _sorted_drop(rng, B, count, radius, center):
    """Points, anchor distances and the stable distance ordering for one group."""
    pts = sample_disk(rng, B * count, radius, center=center).reshape(B, count, 2)
    anchor = np.asarray(center, dtype=float)
    dist = np.linalg.norm(pts - anchor, axis=-1)
    order = np.argsort(dist, kind="stable", axis=-1)
    return pts, dist, order


def _gather(pts, dist, order, col):
    rows = np.arange(pts.shape[0])
    idx = order[:, col]
    return pts[rows, idx], dist[rows, idx]


def _cluster_sinrs(cfg, power, state, links, rng, B, drops, g_br, si_power, cluster):
    """Six per-trial SINRs of one cluster, given the shared drop and BS-surface draw."""
    k = cluster_orders(cfg, cluster)
    (dl_pts, dl_d, dl_o), (ul_pts, ul_d, ul_o), (ed_pts, ed_d, ed_o), (eu_pts, eu_d, eu_o) = drops
    a, p = power.alpha, power.p_ul
    m, P, s2, xi = cfg.m, cfg.P_b, cfg.sigma2, cfg.xi_sic
    sc = np.array([cfg.d_br, 0.0])

    pos_u1d, d_b_u1d = _gather(dl_pts, dl_d, dl_o, k["k_cd1"] - 1)
    pos_u2d, d_b_u2d = _gather(dl_pts, dl_d, dl_o, k["k_cd2"] - 1)
    pos_u1u, d_b_u1u = _gather(ul_pts, ul_d, ul_o, k["k_cu1"] - 1)
    pos_u2u, d_b_u2u = _gather(ul_pts, ul_d, ul_o, k["k_cu2"] - 1)
    _, d_r_u3d = _gather(ed_pts, ed_d, ed_o, cfg.K_ed - cluster)
    _, d_r_u3u = _gather(eu_pts, eu_d, eu_o, cluster - 1)

    d_r_u1d = np.linalg.norm(pos_u1d - sc, axis=-1)
    d_r_u2d = np.linalg.norm(pos_u2d - sc, axis=-1)
    d_r_u1u = np.linalg.norm(pos_u1u - sc, axis=-1)
    d_r_u2u = np.linalg.norm(pos_u2u - sc, axis=-1)

    # scalar Rayleigh channels: BS links, then the four cross links
    h2 = np.abs(_draw_cn(rng, (B, 8))) ** 2
    g_u1d = _draw_rician_batch(links["r,u1d"], rng, B)
    g_u2d = _draw_rician_batch(links["r,u2d"], rng, B)
    g_u3d = _draw_rician_batch(links["r,u3d"], rng, B)
    g_u1u = _draw_rician_batch(links["r,u1u"], rng, B)
    g_u2u = _draw_rician_batch(links["r,u2u"], rng, B)
    g_u3u = _draw_rician_batch(links["r,u3u"], rng, B)

    c_t = state.coefficients("t")
    c_r = state.coefficients("r")

    def casc2(go, c, gi):
        return np.abs(np.sum(go * c * gi, axis=-1)) ** 2

    l_br = pathloss(cfg.d_br, m)

    # downlink cluster roles
    A1 = pathloss(d_b_u1d, m) * h2[:, 0]
    B1 = p[0] * pathloss(np.linalg.norm(pos_u1d - pos_u1u, axis=-1), m) * h2[:, 2]
    C1 = p[1] * pathloss(np.linalg.norm(pos_u1d - pos_u2u, axis=-1), m) * h2[:, 3]
    D1 = p[2] * pathloss(d_r_u3u, m) * pathloss(d_r_u1d, m) * casc2(g_u1d, c_t, g_u3u)
    sinr_dl1 = a[0] * P * A1 / (xi * P * (a[1] + a[2]) * A1 + B1 + C1 + D1 + s2)

    A2 = pathloss(d_b_u2d, m) * h2[:, 1]
    B2 = p[0] * pathloss(np.linalg.norm(pos_u2d - pos_u1u, axis=-1), m) * h2[:, 4]
    C2 = p[1] * pathloss(np.linalg.norm(pos_u2d - pos_u2u, axis=-1), m) * h2[:, 5]
    D2 = p[2] * pathloss(d_r_u3u, m) * pathloss(d_r_u2d, m) * casc2(g_u2d, c_t, g_u3u)
    sinr_dl2 = a[1] * P * A2 / (P * A2 * (xi * a[2] + a[0]) + B2 + C2 + D2 + s2)

    S3 = l_br * pathloss(d_r_u3d, m) * casc2(g_u3d, c_r, g_br)
    B3 = p[0] * pathloss(d_r_u3d, m) * pathloss(d_r_u1u, m) * casc2(g_u3d, c_r, g_u1u)
    C3 = p[1] * pathloss(d_r_u3d, m) * pathloss(d_r_u2u, m) * casc2(g_u3d, c_r, g_u2u)
    D3 = p[2] * pathloss(d_r_u3d, m) * pathloss(d_r_u3u, m) * casc2(g_u3d, c_r, g_u3u)
    sinr_dl3 = a[2] * P * S3 / ((a[0] + a[1]) * P * S3 + B3 + C3 + D3 + s2)

    # uplink cluster roles, decoded at the BS in strong-first order
    Au = pathloss(d_b_u1u, m) * h2[:, 6]
    Bu = pathloss(d_b_u2u, m) * h2[:, 7]
    Cu = l_br * pathloss(d_r_u3u, m) * casc2(g_br, c_t, g_u3u)
    Du = l_br * l_br * np.abs(np.sum(np.abs(g_br) ** 2 * c_t, axis=-1)) ** 2
    floor = P * Du + si_power + s2
    sinr_ul1 = p[0] * Au / (p[1] * Bu + p[2] * Cu + floor)
    sinr_ul2 = p[1] * Bu / (xi * p[0] * Au + p[2] * Cu + floor)
    sinr_ul3 = p[2] * Cu / (xi * (p[0] * Au + p[1] * Bu) + floor)

    return {
        "DL1": sinr_dl1, "DL2": sinr_dl2, "DL3": sinr_dl3,
        "UL1": sinr_ul1, "UL2": sinr_ul2, "UL3": sinr_ul3,
    }


def simulate_clusters(
    cfg: SystemConfig,
    powers,
    state: StarRisState,
    trials: int,
    seed: int,
    clusters=None,
    freeze_layout: bool = False,
    block_size: int = _DEFAULT_BLOCK,
):
    """Simulate the requested clusters off one shared network realization per trial.

    powers may be a single PowerAllocation or a {cluster: PowerAllocation}
    map.  Returns ({cluster: RateReport}, totals) where totals carries the
    per-trial network sums over all simulated clusters.
    """
    if clusters is None:
        clusters = list(range(1, min(cfg.M_d, cfg.M_u) + 1))
    clusters = sorted(int(j) for j in clusters)
    if isinstance(powers, PowerAllocation):
        powers = {j: powers for j in clusters}
    links = build_links(cfg)
    V = si_variance(cfg)

    acc = {(j, role): _Accumulator() for j in clusters for role in ROLES}
    acc_dl, acc_ul = _Accumulator(), _Accumulator()

    nblocks = (trials + block_size - 1) // block_size
    seeds = _block_seeds(seed, nblocks)
    frozen = None
    done = 0
    for b in range(nblocks):
        B = min(block_size, trials - done)
        rng = np.random.default_rng(seeds[b])
        sc = (cfg.d_br, 0.0)
        if frozen is None:
            drops = (
                _sorted_drop(rng, B, cfg.K_cd, cfg.R, (0.0, 0.0)),
                _sorted_drop(rng, B, cfg.K_cu, cfg.R, (0.0, 0.0)),
                _sorted_drop(rng, B, cfg.K_ed, cfg.R_r, sc),
                _sorted_drop(rng, B, cfg.K_eu, cfg.R_r, sc),
            )
            if freeze_layout:
                frozen = tuple(
                    (np.repeat(p[:1], B, axis=0), np.repeat(d[:1], B, axis=0), np.repeat(o[:1], B, axis=0))
                    for p, d, o in drops
                )
                drops = frozen
        else:
            drops = tuple((p[:B], d[:B], o[:B]) for p, d, o in frozen)

        g_br = _draw_rician_batch(links["b,r"], rng, B)
        si_power = V * np.abs(_draw_cn(rng, B)) ** 2

        dl_tot = np.zeros(B)
        ul_tot = np.zeros(B)
        for j in clusters:
            sinrs = _cluster_sinrs(cfg, powers[j], state, links, rng, B, drops, g_br, si_power, j)
            for role, sinr in sinrs.items():
                M = cfg.M_d if role.startswith("DL") else cfg.M_u
                r = np.log2(1.0 + sinr) / M
                acc[(j, role)].add(r)
                if role.startswith("DL"):
                    dl_tot += r
                else:
                    ul_tot += r
        acc_dl.add(dl_tot)
        acc_ul.add(ul_tot)
        done += B

    reports = {
        j: RateReport(
            rates={role: acc[(j, role)].mean for role in ROLES},
            stderr={role: acc[(j, role)].stderr for role in ROLES},
            method="simulated",
            cluster=j,
            trials=trials,
            seed=seed,
        )
        for j in clusters
    }
    totals = {
        "dl_sum": acc_dl.mean, "dl_sum_stderr": acc_dl.stderr,
        "ul_sum": acc_ul.mean, "ul_sum_stderr": acc_ul.stderr,
    }
    return reports, totals


def simulate(plan: SimPlan) -> RateReport:
    """Monte-Carlo rate report for one cluster of the plan's config."""
    reports, _ = simulate_clusters(
        plan.cfg, plan.power, plan.state, plan.trials, plan.seed,
        clusters=[plan.cluster], freeze_layout=plan.freeze_layout,
        block_size=plan.block_size,
    )
    return reports[plan.cluster]


# -- term-level oracle ------------------------------------------------------

EXPECTATION_KEYS = (
    "x1_u1d", "x1_u2d", "x1_u3d", "x1_u3u", "chi_u1u", "chi_u2u",
    "y1", "q_center", "y2_u1d", "y1_u3d", "y2_u3d",
    "omega_u1d_u3u", "omega_u2d_u3u", "omega_u3d_br", "omega_u3d_u1u",
    "omega_u3d_u2u", "omega_u3d_u3u", "omega_br_u3u", "y3",
)

_ORDER_KEY = {
    "x1_u1d": ("k_cd1", "K_cd", "R"),
    "x1_u2d": ("k_cd2", "K_cd", "R"),
    "x1_u3d": ("k_ed3", "K_ed", "R_r"),
    "x1_u3u": ("k_eu3", "K_eu", "R_r"),
    "chi_u1u": ("k_cu1", "K_cu", "R"),
    "chi_u2u": ("k_cu2", "K_cu", "R"),
}

_OMEGA_KEY = {
    "omega_u1d_u3u": ("r,u1d", "t", "r,u3u"),
    "omega_u2d_u3u": ("r,u2d", "t", "r,u3u"),
    "omega_u3d_br": ("r,u3d", "r", "b,r"),
    "omega_u3d_u1u": ("r,u3d", "r", "r,u1u"),
    "omega_u3d_u2u": ("r,u3d", "r", "r,u2u"),
    "omega_u3d_u3u": ("r,u3d", "r", "r,u3u"),
    "omega_br_u3u": ("b,r", "t", "r,u3u"),
}


def _ordered_draw(rng, B, k, K, radius, m):
    r = np.sort(radius * np.sqrt(rng.random((B, K))), axis=1)[:, k - 1]
    return pathloss(r, m)


def _outside_draw(rng, B, cfg):
    pts = sample_disk(rng, B, cfg.R)
    d = np.linalg.norm(pts - np.array([cfg.d_br, 0.0]), axis=-1)
    return pathloss(d, cfg.m)


def estimate_expectation(
    key: str,
    cfg: SystemConfig,
    state: StarRisState,
    trials: int = 1_000_000,
    seed: int = 0,
    cluster: int = 1,
    block_size: int = 1 << 16,
):
    """Monte-Carlo estimate (mean, stderr) of one closed-form expectation term.

    Each key names exactly the random quantity whose mean the corresponding
    closed form claims, so agreement is exact up to Monte-Carlo error.
    """
    if key not in EXPECTATION_KEYS:
        raise KeyError(f"unknown expectation key {key!r}")
    k = cluster_orders(cfg, cluster)
    links = build_links(cfg)
    acc = _Accumulator()
    nblocks = (trials + block_size - 1) // block_size
    seeds = _block_seeds(seed, nblocks)
    done = 0
    for b in range(nblocks):
        B = min(block_size, trials - done)
        rng = np.random.default_rng(seeds[b])
        if key in _ORDER_KEY:
            kname, Kname, Rname = _ORDER_KEY[key]
            vals = _ordered_draw(rng, B, k[kname], getattr(cfg, Kname), getattr(cfg, Rname), cfg.m)
        elif key == "y1":
            p1 = sample_disk(rng, B, cfg.R)
            p2 = sample_disk(rng, B, cfg.R)
            vals = pathloss(np.linalg.norm(p1 - p2, axis=-1), cfg.m)
        elif key == "q_center":
            vals = _outside_draw(rng, B, cfg)
        elif key == "y2_u1d":
            vals = _ordered_draw(rng, B, k["k_eu3"], cfg.K_eu, cfg.R_r, cfg.m) * _outside_draw(rng, B, cfg)
        elif key == "y1_u3d":
            vals = _ordered_draw(rng, B, k["k_ed3"], cfg.K_ed, cfg.R_r, cfg.m) * _outside_draw(rng, B, cfg)
        elif key == "y2_u3d":
            vals = _ordered_draw(rng, B, k["k_ed3"], cfg.K_ed, cfg.R_r, cfg.m) * _ordered_draw(
                rng, B, k["k_eu3"], cfg.K_eu, cfg.R_r, cfg.m
            )
        elif key in _OMEGA_KEY:
            out_lbl, side, in_lbl = _OMEGA_KEY[key]
            go = _draw_rician_batch(links[out_lbl], rng, B)
            gi = _draw_rician_batch(links[in_lbl], rng, B)
            vals = np.abs(np.sum(go * state.coefficients(side) * gi, axis=-1)) ** 2
        elif key == "y3":
            g = _draw_rician_batch(links["b,r"], rng, B)
            vals = np.abs(np.sum(np.abs(g) ** 2 * state.coefficients("t"), axis=-1)) ** 2
        acc.add(np.asarray(vals, dtype=float))
        done += B
    return acc.mean, acc.stderr


def analytic_expectation(key: str, cfg: SystemConfig, state: StarRisState, cluster: int = 1) -> float:
    """Closed-form value matching estimate_expectation's key."""
    if key not in EXPECTATION_KEYS:
        raise KeyError(f"unknown expectation key {key!r}")
    t = expectation_terms(cfg, cluster)
    if key in _ORDER_KEY or key in ("y1", "q_center", "y2_u1d", "y1_u3d", "y2_u3d"):
        return getattr(t, key)
    s = surface_terms(cfg, state)
    if key == "y3":
        return s.y3_raw
    return getattr(s, key)
