"""Surface design: projected gradient ascent, closed-form phase alignment,
and minimum-power allocation.

The ascent treats the two phase vectors as unconstrained complex variables
and the two amplitude vectors as real variables, takes finite-difference
gradient steps on the weighted sum rate, and projects back onto the feasible
sets after every step: entrywise unit modulus for phases, the per-element
segment rho_t + rho_r = 1, rho >= 0 for amplitudes.  A halving line search
keeps the best-seen objective monotone, which the convergence test relies on.

Off the unit-modulus manifold the objective is evaluated through the combined
element coefficients c = rho * theta (so the scatter power is sum |c|^2);
on-manifold this coincides with the closed-form rates.
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
from .rates import (
    ROLES,
    SurfaceTerms,
    _OMEGA_PATHS,
    RateInputs,
    build_rate_inputs,
    expectation_terms,
    si_variance,
    weighted_sum_rate,
)

__all__ = [
    "PgamSettings",
    "InfeasibleTargetsError",
    "project_phases",
    "project_amplitudes",
    "pgam_optimize",
    "suboptimal_phases",
    "aligned_state",
    "min_power_allocation",
]


@dataclass(frozen=True)
class PgamSettings:
    """Ascent controls: iteration cap, stop tolerance, and step sizes.

    Steps are measured after normalizing the gradient to unit norm, so
    phase_step is roughly the complex-plane distance moved per iteration and
    amplitude_step the corresponding amplitude movement.  The raw gradient
    scale of this objective is set by the tiny through-surface terms and
    varies by orders of magnitude across configs; normalizing keeps one set
    of defaults usable everywhere.
    """

    max_iters: int = 80
    tolerance: float = 1e-10
    phase_step: float = 0.5
    amplitude_step: float = 0.2
    step_decay: float = 0.5       # halving factor of the backtracking search
    max_backtracks: int = 30
    fd_step: float = 1e-6
    restarts: int = 0             # extra random starting points

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.phase_step <= 0 or self.amplitude_step <= 0:
            raise ValueError("step sizes must be positive")


def project_phases(raw_t: np.ndarray, raw_r: np.ndarray):
    """Entrywise projection onto unit modulus, returned as phase angles.

    Zero entries have no nearest unit-modulus point; they map to phase 0.
    """
    out = []
    for raw in (raw_t, raw_r):
        raw = np.asarray(raw, dtype=complex)
        phases = np.where(raw == 0, 0.0, np.angle(raw))
        out.append(np.mod(phases, 2.0 * np.pi))
    return tuple(out)


def project_amplitudes(raw_t: np.ndarray, raw_r: np.ndarray):
    """Per-element Euclidean projection of (rho_t, rho_r) onto the energy split.

    The feasible set per element is the segment {t + r = 1, t >= 0, r >= 0};
    projecting onto its supporting line gives t = (a - b + 1)/2, then clamping
    to [0, 1] lands on the segment ends when needed.
    """
    a = np.asarray(raw_t, dtype=float)
    b = np.asarray(raw_r, dtype=float)
    t = np.clip((a - b + 1.0) / 2.0, 0.0, 1.0)
    return t, 1.0 - t


class _Objective:
    """Weighted sum rate as a smooth function of (theta_t, theta_r, rho_t, rho_r)."""

    def __init__(self, cfg, power, weights=None, cluster=1):
        self.cfg = cfg
        self.power = power
        self.links = build_links(cfg)
        self.terms = expectation_terms(cfg, cluster)
        self.weights = weights

    def surface_terms(self, c_t, c_r):
        coeffs = {"t": c_t, "r": c_r}
        vals = {
            name: _cascaded_power_mean_coeffs(coeffs[side], self.links[out], self.links[inp])
            for name, (out, side, inp) in _OMEGA_PATHS.items()
        }
        vals["y3_raw"] = _self_reflection_power_mean_coeffs(c_t, self.links["b,r"])
        return SurfaceTerms(**vals)

    def value(self, theta_t, theta_r, rho_t, rho_r) -> float:
        # carrier state: the rate formulas only read the surface terms, which
        # are supplied directly from the (possibly infeasible) trial point
        inputs = RateInputs(
            cfg=self.cfg,
            power=self.power,
            state=StarRisState.uniform(len(rho_t)),
            terms=self.terms,
            surface=self.surface_terms(rho_t * theta_t, rho_r * theta_r),
        )
        return weighted_sum_rate(inputs, self.weights)


def _fd_gradient(fun, x: np.ndarray, h: float, complex_vars: bool) -> np.ndarray:
    """Central finite differences, elementwise, over real or complex entries."""
    g = np.zeros_like(x, dtype=complex if complex_vars else float)
    steps = [1.0, 1j] if complex_vars else [1.0]
    for direction in steps:
        for i in range(x.size):
            xp = x.copy(); xp[i] += h * direction
            xm = x.copy(); xm[i] -= h * direction
            d = (fun(xp) - fun(xm)) / (2.0 * h)
            g[i] += d * direction
    return g


def pgam_optimize(
    cfg: SystemConfig,
    power: PowerAllocation,
    settings: PgamSettings | None = None,
    initial: StarRisState | None = None,
    weights: dict | None = None,
    cluster: int = 1,
    rng: np.random.Generator | None = None,
):
    """Maximize the weighted sum rate over surface phases and amplitudes.

    Returns (best_state, trace): the best feasible iterate seen and the
    non-decreasing per-iteration objective sequence.  When restarts are
    requested, additional random feasible starting points are attacked with
    the same loop and the overall best is kept (the trace is the winner's).
    """
    settings = settings or PgamSettings()
    obj = _Objective(cfg, power, weights, cluster)
    if initial is None:
        initial = default_initial_state(cfg)
    starts = [initial]
    if settings.restarts:
        rng = rng or np.random.default_rng(0)
        starts += [StarRisState.random(cfg.N, rng) for _ in range(settings.restarts)]

    best_state, best_trace = None, None
    for start in starts:
        state, trace = _ascend(obj, start, settings)
        if best_trace is None or trace[-1] > best_trace[-1]:
            best_state, best_trace = state, trace
    return best_state, best_trace


def default_initial_state(cfg: SystemConfig) -> StarRisState:
    """Aligned phases at an even split when the array is square, else flat."""
    s = math.isqrt(cfg.N)
    if s * s == cfg.N:
        return aligned_state(cfg)
    return StarRisState.uniform(cfg.N)


def _ascend(obj: _Objective, start: StarRisState, st: PgamSettings):
    theta_t = np.exp(1j * start.phi_t)
    theta_r = np.exp(1j * start.phi_r)
    rho_t, rho_r = start.rho_t.copy(), start.rho_r.copy()

    def feasible_value(tt, tr, at, ar):
        pt, pr = project_phases(tt, tr)
        qt, qr = project_amplitudes(at, ar)
        return obj.value(np.exp(1j * pt), np.exp(1j * pr), qt, qr), (pt, pr, qt, qr)

    f_cur, (pt, pr, qt, qr) = feasible_value(theta_t, theta_r, rho_t, rho_r)
    theta_t, theta_r = np.exp(1j * pt), np.exp(1j * pr)
    rho_t, rho_r = qt, qr
    trace = [f_cur]
    nu, vartheta = st.phase_step, st.amplitude_step

    for _ in range(st.max_iters):
        g_tt = _fd_gradient(lambda x: obj.value(x, theta_r, rho_t, rho_r), theta_t, st.fd_step, True)
        g_tr = _fd_gradient(lambda x: obj.value(theta_t, x, rho_t, rho_r), theta_r, st.fd_step, True)
        g_at = _fd_gradient(lambda x: obj.value(theta_t, theta_r, x, rho_r), rho_t, st.fd_step, False)
        g_ar = _fd_gradient(lambda x: obj.value(theta_t, theta_r, rho_t, x), rho_r, st.fd_step, False)

        g_phase = math.sqrt(np.sum(np.abs(g_tt) ** 2) + np.sum(np.abs(g_tr) ** 2))
        g_amp = math.sqrt(np.sum(g_at**2) + np.sum(g_ar**2))
        if g_phase == 0.0 and g_amp == 0.0:
            trace.append(f_cur)
            break
        d_tt = g_tt / g_phase if g_phase > 0 else g_tt
        d_tr = g_tr / g_phase if g_phase > 0 else g_tr
        d_at = g_at / g_amp if g_amp > 0 else g_at
        d_ar = g_ar / g_amp if g_amp > 0 else g_ar

        improved = False
        step_p, step_a = nu, vartheta
        for _ in range(st.max_backtracks):
            f_new, proj = feasible_value(
                theta_t + step_p * d_tt,
                theta_r + step_p * d_tr,
                rho_t + step_a * d_at,
                rho_r + step_a * d_ar,
            )
            if f_new > f_cur:
                improved = True
                break
            step_p *= st.step_decay
            step_a *= st.step_decay
        if not improved:
            trace.append(f_cur)
            break
        pt, pr, qt, qr = proj
        theta_t, theta_r = np.exp(1j * pt), np.exp(1j * pr)
        rho_t, rho_r = qt, qr
        gain, f_cur = f_new - f_cur, f_new
        trace.append(f_cur)
        if gain < st.tolerance:
            break

    state = StarRisState(rho_t=qt, rho_r=qr, phi_t=pt, phi_r=pr)
    return state, trace


# -- closed-form phase alignment --------------------------------------------


def suboptimal_phases(cfg: SystemConfig):
    """Phases that cohere the BS-surface-edge-user paths, per surface face.

    For a square array the per-element phase -2*pi*(spacing/wavelength) *
    (c_n*nu + f_n*ell) cancels the geometric phase of the cascade toward the
    targeted edge user: the transmission face targets the UL edge user, the
    reflection face the DL edge user.  nu and ell are the azimuth/elevation
    direction differences between the BS-surface link and the surface-user
    link.
    """
    s = math.isqrt(cfg.N)
    if s * s != cfg.N:
        raise ValueError(f"N={cfg.N} is not a perfect square")
    n = np.arange(cfg.N)
    cols, rows = n % s, n // s
    ratio = cfg.element_spacing / cfg.carrier_wavelength
    az_b, el_b = cfg.angle_map["b,r"]
    out = {}
    for side, target in (("t", "r,u3u"), ("r", "r,u3d")):
        az_u, el_u = cfg.angle_map[target]
        nu = math.sin(az_b) * math.sin(el_b) - math.sin(az_u) * math.sin(el_u)
        ell = math.cos(el_b) - math.cos(el_u)
        out[side] = np.mod(-2.0 * np.pi * ratio * (cols * nu + rows * ell), 2.0 * np.pi)
    return out["t"], out["r"]


def aligned_state(cfg: SystemConfig, rho_t: float = 0.5) -> StarRisState:
    phi_t, phi_r = suboptimal_phases(cfg)
    return StarRisState(
        rho_t=np.full(cfg.N, rho_t),
        rho_r=np.full(cfg.N, 1.0 - rho_t),
        phi_t=phi_t,
        phi_r=phi_r,
    )


# -- minimum power allocation ------------------------------------------------


class InfeasibleTargetsError(RuntimeError):
    """Raised when no power vector meets the targets; names the binding constraint."""

    def __init__(self, binding: str, detail: str = ""):
        self.binding = binding
        super().__init__(f"targets infeasible, binding constraint: {binding}" + (f" ({detail})" if detail else ""))


def min_power_allocation(
    targets: dict,
    cfg: SystemConfig,
    state: StarRisState,
    cluster: int = 1,
) -> PowerAllocation:
    """Powers meeting six per-role rate targets (bits/s/Hz) with equality.

    Every SINR is linear in its own user's power and affine in the others', so
    the six equalities form one linear system in (alpha1..3, p1..3); the
    unique solution is checked against positivity, the DL budget
    sum(alpha) <= 1, the NOMA ordering, and the per-user cap p_um.  Targets
    beyond the imperfect-SIC ceiling of the DL strong user are rejected up
    front: its SINR cannot exceed alpha1/(xi*(alpha2+alpha3)) < 1/(2*xi) for
    any ordered split.
    """
    missing = set(ROLES) - set(targets)
    if missing:
        raise ValueError(f"targets missing roles: {sorted(missing)}")
    if any(targets[r] < 0 for r in ROLES):
        raise ValueError("targets must be nonnegative")
    if all(targets[r] == 0 for r in ROLES):
        raise InfeasibleTargetsError("degenerate", "all-zero targets have no positive minimal powers")

    g = {r: 2.0 ** (targets[r] * (cfg.M_d if r.startswith("DL") else cfg.M_u)) - 1.0 for r in ROLES}
    if cfg.xi_sic > 0 and g["DL1"] >= 1.0 / (2.0 * cfg.xi_sic):
        raise InfeasibleTargetsError(
            "dl1-sic-ceiling",
            f"required SINR {g['DL1']:.4g} >= 1/(2*xi) = {1.0 / (2.0 * cfg.xi_sic):.4g}",
        )

    inputs = build_rate_inputs(cfg, PowerAllocation((0.1, 0.3, 0.6), (cfg.p_um,) * 3), state, cluster)
    t, s = inputs.terms, inputs.surface
    P, s2, xi = cfg.P_b, cfg.sigma2, cfg.xi_sic
    edge_gain = s.omega_br_u3u * t.l_br * t.x1_u3u
    floor = P * t.l_br**2 * s.y3_raw + si_variance(cfg) + s2
    x3 = t.l_br * s.omega_u3d_br * t.x1_u3d

    # unknown vector [a1, a2, a3, p1, p2, p3]; rows: numerator - g*denominator = g*const
    A = np.zeros((6, 6))
    b = np.zeros(6)
    A[0] = [P * t.x1_u1d, -g["DL1"] * xi * P * t.x1_u1d, -g["DL1"] * xi * P * t.x1_u1d,
            -g["DL1"] * t.y1, -g["DL1"] * t.y1, -g["DL1"] * s.omega_u1d_u3u * t.y2_u1d]
    b[0] = g["DL1"] * s2
    A[1] = [-g["DL2"] * P * t.x1_u2d, P * t.x1_u2d, -g["DL2"] * xi * P * t.x1_u2d,
            -g["DL2"] * t.y1, -g["DL2"] * t.y1, -g["DL2"] * s.omega_u2d_u3u * t.y2_u1d]
    b[1] = g["DL2"] * s2
    A[2] = [-g["DL3"] * P * x3, -g["DL3"] * P * x3, P * x3,
            -g["DL3"] * s.omega_u3d_u1u * t.y1_u3d, -g["DL3"] * s.omega_u3d_u2u * t.y1_u3d,
            -g["DL3"] * s.omega_u3d_u3u * t.y2_u3d]
    b[2] = g["DL3"] * s2
    A[3] = [0, 0, 0, t.chi_u1u, -g["UL1"] * t.chi_u2u, -g["UL1"] * edge_gain]
    b[3] = g["UL1"] * floor
    A[4] = [0, 0, 0, -g["UL2"] * xi * t.chi_u1u, t.chi_u2u, -g["UL2"] * edge_gain]
    b[4] = g["UL2"] * floor
    A[5] = [0, 0, 0, -g["UL3"] * xi * t.chi_u1u, -g["UL3"] * xi * t.chi_u2u, edge_gain]
    b[5] = g["UL3"] * floor

    try:
        x = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise InfeasibleTargetsError("singular-system", str(exc)) from exc

    a1, a2, a3, p1, p2, p3 = (float(v) for v in x)
    names = ("alpha1", "alpha2", "alpha3", "p_u1u", "p_u2u", "p_u3u")
    for name, v in zip(names, x):
        if v <= 0:
            raise InfeasibleTargetsError(f"positivity:{name}", f"{name} = {v:.4g}")
    if a1 + a2 + a3 > 1.0 + 1e-9:
        raise InfeasibleTargetsError("dl-power-budget", f"sum(alpha) = {a1 + a2 + a3:.4g} > 1")
    if not (a1 < a2 < a3):
        raise InfeasibleTargetsError("noma-ordering", f"alpha = ({a1:.4g}, {a2:.4g}, {a3:.4g})")
    for name, v in zip(names[3:], (p1, p2, p3)):
        if v > cfg.p_um * (1 + 1e-9):
            raise InfeasibleTargetsError(f"ul-power-budget:{name}", f"{name} = {v:.4g} > p_um = {cfg.p_um:.4g}")
    return PowerAllocation(alpha=(a1, a2, a3), p_ul=(min(p1, cfg.p_um), min(p2, cfg.p_um), min(p3, cfg.p_um)))
