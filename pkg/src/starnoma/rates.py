"""Closed-form ergodic rates of the six cluster roles.

Every rate has the shape (1/M) * log2(1 + S / D) where S and D are built from
expected path losses (geometry module) and expected cascaded channel powers
(channel module), i.e. the expectation is pushed through the log via the
usual ratio-of-means approximation.  Expectation terms split into two groups:

* position terms (x / y / chi families) depend only on the config and the
  cluster index, via disk order statistics and the two-point distance laws;
* surface terms (omega / y3 families) depend on the surface state through the
  element coefficients rho * exp(j*phi).

Both groups are computed once and cached in RateInputs, since the optimizer
re-evaluates the rates many times while only the surface terms move.

Role indices inside cluster j: the DL cluster pairs the j-th nearest users of
both center groups with the (K_ed+1-j)-th nearest (i.e. j-th farthest) edge
user; the UL cluster takes the j-th nearest user of every group.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import (
    StarRisState,
    build_links,
    _cascaded_power_mean_coeffs,
    _self_reflection_power_mean_coeffs,
)
from .config import PowerAllocation, SystemConfig
from .geometry import (
    OrderSpec,
    ordered_pathloss_mean,
    outside_point_pathloss_mean,
    pair_pathloss_mean,
)

__all__ = [
    "ExpectationTerms",
    "SurfaceTerms",
    "RateInputs",
    "RateReport",
    "cluster_orders",
    "expectation_terms",
    "surface_terms",
    "build_rate_inputs",
    "dl_rate_strong",
    "dl_rate_mid",
    "dl_rate_edge",
    "ul_rate_strong",
    "ul_rate_mid",
    "ul_rate_edge",
    "weighted_sum_rate",
    "rate_report",
    "si_variance",
]

ROLES = ("DL1", "DL2", "DL3", "UL1", "UL2", "UL3")

# surface faces of each cascaded path (out-link, in-link)
_OMEGA_PATHS = {
    "omega_u1d_u3u": ("r,u1d", "t", "r,u3u"),
    "omega_u2d_u3u": ("r,u2d", "t", "r,u3u"),
    "omega_u3d_br": ("r,u3d", "r", "b,r"),
    "omega_u3d_u1u": ("r,u3d", "r", "r,u1u"),
    "omega_u3d_u2u": ("r,u3d", "r", "r,u2u"),
    "omega_u3d_u3u": ("r,u3d", "r", "r,u3u"),
    "omega_br_u3u": ("b,r", "t", "r,u3u"),
}


def pathloss(d, m: float):
    """Distance-to-gain map (1+d)^-m shared by analysis and simulation."""
    return (1.0 + np.asarray(d, dtype=float)) ** (-m)


def si_variance(cfg: SystemConfig) -> float:
    """Residual self-interference variance beta * P_b^lambda."""
    return cfg.beta_si * cfg.P_b**cfg.lambda_si


def cluster_orders(cfg: SystemConfig, cluster: int) -> dict:
    """Order indices of the six roles inside cluster j (1-based)."""
    j = int(cluster)
    if not 1 <= j <= min(cfg.M_d, cfg.M_u):
        raise ValueError(f"cluster index {j} outside 1..{min(cfg.M_d, cfg.M_u)}")
    orders = {
        "k_cd1": j,
        "k_cd2": cfg.K_d1 + j,
        "k_ed3": cfg.K_ed + 1 - j,
        "k_cu1": j,
        "k_cu2": cfg.K_u1 + j,
        "k_eu3": j,
    }
    if orders["k_cd2"] > cfg.K_cd or orders["k_cu2"] > cfg.K_cu:
        raise ValueError("cluster index exceeds the group-2 population")
    if orders["k_ed3"] < 1 or orders["k_eu3"] > cfg.K_eu:
        raise ValueError("cluster index exceeds the edge population")
    return orders


@dataclass(frozen=True)
class ExpectationTerms:
    """Position-only expectation terms of one cluster (state independent)."""

    x1_u1d: float    # BS path loss of the DL strong user (order k_cd1 of K_cd)
    x1_u2d: float    # BS path loss of the DL mid user (order k_cd2 of K_cd)
    x1_u3d: float    # surface path loss of the DL edge user (order k_ed3 of K_ed)
    x1_u3u: float    # surface path loss of the UL edge user (order k_eu3 of K_eu)
    chi_u1u: float   # BS path loss of the UL strong user (order k_cu1 of K_cu)
    chi_u2u: float   # BS path loss of the UL mid user (order k_cu2 of K_cu)
    y1: float        # center-user pair distance law
    q_center: float  # surface-to-center-user outside-point law
    l_br: float      # BS-to-surface path loss (deterministic)
    cluster: int

    def __post_init__(self):
        for name in ("x1_u1d", "x1_u2d", "x1_u3d", "x1_u3u", "chi_u1u", "chi_u2u", "y1", "q_center", "l_br"):
            if getattr(self, name) < 0:
                raise ValueError(f"expectation term {name} must be nonnegative")

    # products the rate formulas consume directly
    @property
    def y2_u1d(self) -> float:
        return self.x1_u3u * self.q_center

    @property
    def y1_u3d(self) -> float:
        return self.x1_u3d * self.q_center

    @property
    def y2_u3d(self) -> float:
        return self.x1_u3d * self.x1_u3u


@dataclass(frozen=True)
class SurfaceTerms:
    """State-dependent mean cascaded powers (omega family) and the self bounce."""

    omega_u1d_u3u: float
    omega_u2d_u3u: float
    omega_u3d_br: float
    omega_u3d_u1u: float
    omega_u3d_u2u: float
    omega_u3d_u3u: float
    omega_br_u3u: float
    y3_raw: float    # E|g^H diag(c_t) g|^2 of the BS-surface link, before path loss

    def __post_init__(self):
        for name in self.__dataclass_fields__:
            if getattr(self, name) < -1e-12:
                raise ValueError(f"surface term {name} must be nonnegative")


def expectation_terms(cfg: SystemConfig, cluster: int = 1) -> ExpectationTerms:
    """Evaluate the position terms of cluster j by adaptive quadrature."""
    k = cluster_orders(cfg, cluster)
    return ExpectationTerms(
        x1_u1d=ordered_pathloss_mean(OrderSpec(k["k_cd1"], cfg.K_cd, cfg.R), cfg.m),
        x1_u2d=ordered_pathloss_mean(OrderSpec(k["k_cd2"], cfg.K_cd, cfg.R), cfg.m),
        x1_u3d=ordered_pathloss_mean(OrderSpec(k["k_ed3"], cfg.K_ed, cfg.R_r), cfg.m),
        x1_u3u=ordered_pathloss_mean(OrderSpec(k["k_eu3"], cfg.K_eu, cfg.R_r), cfg.m),
        chi_u1u=ordered_pathloss_mean(OrderSpec(k["k_cu1"], cfg.K_cu, cfg.R), cfg.m),
        chi_u2u=ordered_pathloss_mean(OrderSpec(k["k_cu2"], cfg.K_cu, cfg.R), cfg.m),
        y1=pair_pathloss_mean(cfg.R, cfg.m),
        q_center=outside_point_pathloss_mean(cfg.R, cfg.r1, cfg.m),
        l_br=float(pathloss(cfg.d_br, cfg.m)),
        cluster=int(cluster),
    )


def surface_terms(cfg: SystemConfig, state: StarRisState, links: dict | None = None) -> SurfaceTerms:
    """Evaluate the omega family and the self-bounce power for one state."""
    links = links or build_links(cfg)
    coeffs = {side: state.coefficients(side) for side in ("t", "r")}
    values = {
        name: _cascaded_power_mean_coeffs(coeffs[side], links[out], links[inp])
        for name, (out, side, inp) in _OMEGA_PATHS.items()
    }
    values["y3_raw"] = _self_reflection_power_mean_coeffs(coeffs["t"], links["b,r"])
    return SurfaceTerms(**values)


@dataclass(frozen=True)
class RateInputs:
    """Everything the six rate formulas read, with terms precomputed."""

    cfg: SystemConfig
    power: PowerAllocation
    state: StarRisState
    terms: ExpectationTerms
    surface: SurfaceTerms

    @property
    def cluster(self) -> int:
        return self.terms.cluster


def build_rate_inputs(
    cfg: SystemConfig,
    power: PowerAllocation,
    state: StarRisState,
    cluster: int = 1,
    terms: ExpectationTerms | None = None,
    links: dict | None = None,
) -> RateInputs:
    terms = terms if terms is not None else expectation_terms(cfg, cluster)
    return RateInputs(
        cfg=cfg, power=power, state=state, terms=terms,
        surface=surface_terms(cfg, state, links),
    )


def _rate(num: float, den: float, clusters: int) -> float:
    return math.log2(1.0 + num / den) / clusters


def dl_rate_strong(inputs: RateInputs) -> float:
    """DL strong user: decodes both partners first, leaks a residual xi of their power."""
    cfg, a, p = inputs.cfg, inputs.power.alpha, inputs.power.p_ul
    t, s = inputs.terms, inputs.surface
    num = a[0] * cfg.P_b * t.x1_u1d
    den = (
        cfg.xi_sic * cfg.P_b * (a[1] + a[2]) * t.x1_u1d
        + (p[0] + p[1]) * t.y1
        + p[2] * s.omega_u1d_u3u * t.y2_u1d
        + cfg.sigma2
    )
    return _rate(num, den, cfg.M_d)


def dl_rate_mid(inputs: RateInputs) -> float:
    """DL mid user: cancels only the edge signal, the strong user's stays as interference."""
    cfg, a, p = inputs.cfg, inputs.power.alpha, inputs.power.p_ul
    t, s = inputs.terms, inputs.surface
    num = a[1] * cfg.P_b * t.x1_u2d
    den = (
        cfg.P_b * t.x1_u2d * (cfg.xi_sic * a[2] + a[0])
        + (p[0] + p[1]) * t.y1
        + p[2] * s.omega_u2d_u3u * t.y2_u1d
        + cfg.sigma2
    )
    return _rate(num, den, cfg.M_d)


def dl_rate_edge(inputs: RateInputs) -> float:
    """DL edge user: served through the surface, decodes nothing, sees both partners."""
    cfg, a, p = inputs.cfg, inputs.power.alpha, inputs.power.p_ul
    t, s = inputs.terms, inputs.surface
    x_u3d = t.l_br * s.omega_u3d_br * t.x1_u3d
    b1 = p[0] * s.omega_u3d_u1u + p[1] * s.omega_u3d_u2u
    b2 = p[2] * s.omega_u3d_u3u
    num = a[2] * cfg.P_b * x_u3d
    den = (a[0] + a[1]) * cfg.P_b * x_u3d + b1 * t.y1_u3d + b2 * t.y2_u3d + cfg.sigma2
    return _rate(num, den, cfg.M_d)


def _ul_common(inputs: RateInputs) -> tuple:
    cfg, t, s = inputs.cfg, inputs.terms, inputs.surface
    edge_gain = s.omega_br_u3u * t.l_br * t.x1_u3u      # UL edge signal power factor
    bounce = cfg.P_b * t.l_br**2 * s.y3_raw             # BS's own signal off the surface
    return edge_gain, bounce + si_variance(cfg) + cfg.sigma2


def ul_rate_strong(inputs: RateInputs) -> float:
    """UL strong user: decoded first at the BS, all partners still at full power."""
    cfg, p = inputs.cfg, inputs.power.p_ul
    t = inputs.terms
    edge_gain, floor = _ul_common(inputs)
    num = p[0] * t.chi_u1u
    den = p[1] * t.chi_u2u + p[2] * edge_gain + floor
    return _rate(num, den, cfg.M_u)


def ul_rate_mid(inputs: RateInputs) -> float:
    """UL mid user: the strong user's signal is cancelled up to the SIC residual."""
    cfg, p = inputs.cfg, inputs.power.p_ul
    t = inputs.terms
    edge_gain, floor = _ul_common(inputs)
    num = p[1] * t.chi_u2u
    den = cfg.xi_sic * p[0] * t.chi_u1u + p[2] * edge_gain + floor
    return _rate(num, den, cfg.M_u)


def ul_rate_edge(inputs: RateInputs) -> float:
    """UL edge user: decoded last, only SIC residuals of the center users remain."""
    cfg, p = inputs.cfg, inputs.power.p_ul
    t = inputs.terms
    edge_gain, floor = _ul_common(inputs)
    num = p[2] * edge_gain
    den = cfg.xi_sic * (p[0] * t.chi_u1u + p[1] * t.chi_u2u) + floor
    return _rate(num, den, cfg.M_u)


_RATE_FN = {
    "DL1": dl_rate_strong,
    "DL2": dl_rate_mid,
    "DL3": dl_rate_edge,
    "UL1": ul_rate_strong,
    "UL2": ul_rate_mid,
    "UL3": ul_rate_edge,
}


def weighted_sum_rate(inputs: RateInputs, weights: dict | None = None) -> float:
    """Priority-weighted sum of the six role rates of one cluster."""
    cfg = inputs.cfg
    if weights is None:
        weights = {
            **{f"DL{i+1}": w for i, w in enumerate(cfg.weights_dl)},
            **{f"UL{i+1}": w for i, w in enumerate(cfg.weights_ul)},
        }
    if any(w < 0 for w in weights.values()):
        raise ValueError("weights must be nonnegative")
    return sum(weights.get(role, 0.0) * fn(inputs) for role, fn in _RATE_FN.items())


@dataclass(frozen=True)
class RateReport:
    """Per-role ergodic rates of one cluster plus their aggregates."""

    rates: dict                  # role -> bits/s/Hz
    method: str                  # "analytic" | "simulated"
    cluster: int
    stderr: dict | None = None
    trials: int | None = None
    seed: int | None = None

    def __post_init__(self):
        missing = set(ROLES) - set(self.rates)
        if missing:
            raise ValueError(f"report missing roles: {sorted(missing)}")
        if any(v < 0 for v in self.rates.values()):
            raise ValueError("rates must be nonnegative")

    @property
    def dl_sum(self) -> float:
        return self.rates["DL1"] + self.rates["DL2"] + self.rates["DL3"]

    @property
    def ul_sum(self) -> float:
        return self.rates["UL1"] + self.rates["UL2"] + self.rates["UL3"]

    def weighted_sum(self, weights_dl, weights_ul) -> float:
        return sum(w * self.rates[f"DL{i+1}"] for i, w in enumerate(weights_dl)) + sum(
            w * self.rates[f"UL{i+1}"] for i, w in enumerate(weights_ul)
        )


def rate_report(
    cfg: SystemConfig,
    power: PowerAllocation,
    state: StarRisState,
    cluster: int = 1,
    terms: ExpectationTerms | None = None,
    links: dict | None = None,
) -> RateReport:
    inputs = build_rate_inputs(cfg, power, state, cluster, terms=terms, links=links)
    return RateReport(
        rates={role: fn(inputs) for role, fn in _RATE_FN.items()},
        method="analytic",
        cluster=inputs.cluster,
    )


def conditional_terms(cfg: SystemConfig, layout, cluster: int = 1) -> ExpectationTerms:
    """Position terms of one concrete layout instead of their statistical means.

    Used to cross-check the simulator: averaging these over many layouts must
    reproduce expectation_terms.  Pair and outside-point factors are taken
    between the cluster's own members.
    """
    k = cluster_orders(cfg, cluster)
    m = cfg.m

    d_dl = np.sort(layout.bs_distances("dl_center"))
    d_ul = np.sort(layout.bs_distances("ul_center"))
    e_dl = np.sort(layout.surface_distances("dl_edge"))
    e_ul = np.sort(layout.surface_distances("ul_edge"))

    order_dl = np.argsort(layout.bs_distances("dl_center"), kind="stable")
    order_ul = np.argsort(layout.bs_distances("ul_center"), kind="stable")
    p_u1d = layout.dl_center[order_dl[k["k_cd1"] - 1]]
    p_u1u = layout.ul_center[order_ul[k["k_cu1"] - 1]]
    p_u2u = layout.ul_center[order_ul[k["k_cu2"] - 1]]
    pair_d = 0.5 * (np.linalg.norm(p_u1d - p_u1u) + np.linalg.norm(p_u1d - p_u2u))
    q_d = np.linalg.norm(p_u1d - layout.surface_center)

    return ExpectationTerms(
        x1_u1d=float(pathloss(d_dl[k["k_cd1"] - 1], m)),
        x1_u2d=float(pathloss(d_dl[k["k_cd2"] - 1], m)),
        x1_u3d=float(pathloss(e_dl[k["k_ed3"] - 1], m)),
        x1_u3u=float(pathloss(e_ul[k["k_eu3"] - 1], m)),
        chi_u1u=float(pathloss(d_ul[k["k_cu1"] - 1], m)),
        chi_u2u=float(pathloss(d_ul[k["k_cu2"] - 1], m)),
        y1=float(pathloss(pair_d, m)),
        q_center=float(pathloss(q_d, m)),
        l_br=float(pathloss(cfg.d_br, m)),
        cluster=int(cluster),
    )
