"""Channels through the energy-splitting surface.

Each surface element n splits the incident energy between a transmission and
a reflection coefficient, rho_t[n] + rho_r[n] = 1, and applies independent
phase shifts phi_t[n], phi_r[n].  Surface-side channels are Rician: a
deterministic line-of-sight vector built from the planar-array response plus
an i.i.d. complex-Gaussian scatter part.  Direct BS-user and user-user
channels are plain Rayleigh scalars and live in the simulator.

Line-of-sight convention: the BS-surface link carries the raw array response
and every surface-user link carries its conjugate (the two surface faces see
opposite phase progressions).  Under this convention the closed-form phase
alignment in the design module cancels the BS-surface-edge-user geometry
exactly on both faces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "StarRisState",
    "RicianLink",
    "ChannelRealization",
    "steering_vector",
    "array_response",
    "build_links",
    "draw_realization",
    "sample_rician",
    "cascade",
    "cascaded_power_mean",
    "self_reflection_power_mean",
    "ARRIVAL_LINKS",
    "CASCADE_SIDE",
]

# Links carrying the raw (unconjugated) array response; user links flip sign.
ARRIVAL_LINKS = frozenset({"b,r"})

# Which face of the surface each cascaded path goes through: downlink edge
# users are served off the reflection face, the uplink edge user and the BS
# self-reflection go through the transmission face.
CASCADE_SIDE = {
    ("r,u1d", "r,u3u"): "t",
    ("r,u2d", "r,u3u"): "t",
    ("b,r", "r,u3u"): "t",
    ("b,r", "b,r"): "t",
    ("r,u3d", "b,r"): "r",
    ("r,u3d", "r,u1u"): "r",
    ("r,u3d", "r,u2u"): "r",
    ("r,u3d", "r,u3u"): "r",
}


@dataclass(frozen=True)
class StarRisState:
    """Per-element amplitudes and phases of both surface faces.

    Amplitudes are energy-splitting coefficients with rho_t + rho_r = 1 per
    element; phases are stored wrapped to [0, 2*pi).
    """

    rho_t: np.ndarray
    rho_r: np.ndarray
    phi_t: np.ndarray
    phi_r: np.ndarray

    def __post_init__(self):
        for name in ("rho_t", "rho_r", "phi_t", "phi_r"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        n = self.rho_t.shape
        if not (self.rho_r.shape == self.phi_t.shape == self.phi_r.shape == n):
            raise ValueError("state arrays must share one length N")
        if np.any(self.rho_t < -1e-12) or np.any(self.rho_r < -1e-12):
            raise ValueError("amplitudes must be nonnegative")
        if np.max(np.abs(self.rho_t + self.rho_r - 1.0)) > 1e-12:
            raise ValueError("energy split violated: rho_t + rho_r must equal 1 per element")
        object.__setattr__(self, "rho_t", np.clip(self.rho_t, 0.0, 1.0))
        object.__setattr__(self, "rho_r", np.clip(self.rho_r, 0.0, 1.0))
        object.__setattr__(self, "phi_t", np.mod(self.phi_t, 2.0 * np.pi))
        object.__setattr__(self, "phi_r", np.mod(self.phi_r, 2.0 * np.pi))

    @property
    def N(self) -> int:
        return self.rho_t.size

    def amplitudes(self, side: str) -> np.ndarray:
        return self.rho_t if side == "t" else self.rho_r

    def phases(self, side: str) -> np.ndarray:
        return self.phi_t if side == "t" else self.phi_r

    def coefficients(self, side: str) -> np.ndarray:
        """Complex element responses rho * exp(j*phi) of one face."""
        if side not in ("t", "r"):
            raise ValueError(f"side must be 't' or 'r', got {side!r}")
        return self.amplitudes(side) * np.exp(1j * self.phases(side))

    @classmethod
    def uniform(cls, N: int, rho_t: float = 0.5) -> "StarRisState":
        return cls(
            rho_t=np.full(N, rho_t),
            rho_r=np.full(N, 1.0 - rho_t),
            phi_t=np.zeros(N),
            phi_r=np.zeros(N),
        )

    @classmethod
    def random(cls, N: int, rng: np.random.Generator) -> "StarRisState":
        t = rng.random(N)
        return cls(
            rho_t=t,
            rho_r=1.0 - t,
            phi_t=rng.uniform(0.0, 2.0 * np.pi, N),
            phi_r=rng.uniform(0.0, 2.0 * np.pi, N),
        )


def array_response(N: int, azimuth: float, elevation: float, spacing: float, wavelength: float) -> np.ndarray:
    """Planar-array response for an N-element surface laid out on a grid.

    Element n sits at column c_n = (n-1) mod s and row f_n = floor((n-1)/s)
    with s = ceil(sqrt(N)); a perfect square N gives the usual s x s grid and
    any other N truncates the last row.  Entry n is
    exp(j*2*pi*(spacing/wavelength)*(c_n*sin(az)*sin(el) + f_n*cos(el))).
    """
    if N < 1:
        raise ValueError("N must be positive")
    s = math.isqrt(N)
    if s * s != N:
        s = s + 1
    n = np.arange(N)
    cols = n % s
    rows = n // s
    phase = (
        2.0 * np.pi * (spacing / wavelength)
        * (cols * np.sin(azimuth) * np.sin(elevation) + rows * np.cos(elevation))
    )
    return np.exp(1j * phase)


def steering_vector(N: int, azimuth: float, elevation: float, spacing: float, wavelength: float) -> np.ndarray:
    """Square planar-array steering vector; N must be a perfect square."""
    if wavelength <= 0:
        raise ValueError("wavelength must be positive")
    s = math.isqrt(N)
    if s * s != N:
        raise ValueError(f"N={N} is not a perfect square")
    return array_response(N, azimuth, elevation, spacing, wavelength)


@dataclass(frozen=True)
class RicianLink:
    """One surface-side fading link: Rician factor plus its deterministic LoS vector."""

    kappa: float
    los: np.ndarray
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "los", np.asarray(self.los, dtype=complex))
        if self.kappa < 0:
            raise ValueError("kappa must be nonnegative")
        if np.max(np.abs(np.abs(self.los) - 1.0)) > 1e-9:
            raise ValueError("LoS entries must have unit modulus")

    @property
    def los_weight(self) -> float:
        return self.kappa / (self.kappa + 1.0)

    @property
    def scatter_weight(self) -> float:
        return 1.0 / (self.kappa + 1.0)


def build_links(cfg) -> dict[str, RicianLink]:
    """Deterministic LoS vectors for every surface-side link of the config."""
    links = {}
    for label, (az, el) in cfg.angle_map.items():
        resp = array_response(cfg.N, az, el, cfg.element_spacing, cfg.carrier_wavelength)
        if label not in ARRIVAL_LINKS:
            resp = np.conj(resp)
        links[label] = RicianLink(kappa=cfg.kappa_map[label], los=resp, label=label)
    return links


def sample_rician(link: RicianLink, rng: np.random.Generator, trials: int | None = None) -> np.ndarray:
    """Draw the link vector: sqrt(k/(k+1))*los + sqrt(1/(k+1))*CN(0, I).

    With trials set, returns a (trials, N) batch sharing the same LoS.
    """
    n = link.los.size
    shape = (n,) if trials is None else (trials, n)
    w = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    return np.sqrt(link.los_weight) * link.los + np.sqrt(link.scatter_weight) * w


def cascade(g_out: np.ndarray, state: StarRisState, side: str, g_in: np.ndarray) -> complex | np.ndarray:
    """Cascaded scalar channel sum_n g_out[n] * rho_n e^{j phi_n} * g_in[n].

    Inputs may be batched with shape (..., N); the element axis is reduced.
    """
    g_out = np.asarray(g_out)
    g_in = np.asarray(g_in)
    if g_out.shape[-1] != state.N or g_in.shape[-1] != state.N:
        raise ValueError("vector length mismatch against state N")
    out = np.sum(g_out * state.coefficients(side) * g_in, axis=-1)
    return complex(out) if out.ndim == 0 else out


def _cascaded_power_mean_coeffs(c: np.ndarray, link_out: RicianLink, link_in: RicianLink) -> float:
    """E|g_out diag(c) g_in|^2 for independent Rician vectors and coefficients c."""
    los_gain = np.abs(np.sum(link_out.los * c * link_in.los)) ** 2
    p = float(np.sum(np.abs(c) ** 2))
    wo, wi = link_out.los_weight, link_in.los_weight
    so, si = link_out.scatter_weight, link_in.scatter_weight
    return wo * wi * los_gain + (wo * si + wi * so + so * si) * p


def cascaded_power_mean(link_out: RicianLink, state: StarRisState, side: str, link_in: RicianLink) -> float:
    """Mean cascaded power through one surface face, for two independent links.

    Splitting each Rician vector into LoS and scatter parts and dropping the
    zero-mean cross terms leaves one deterministic LoS term and three scatter
    terms, each proportional to sum_n rho_n^2.
    """
    return _cascaded_power_mean_coeffs(state.coefficients(side), link_out, link_in)


def _self_reflection_power_mean_coeffs(c: np.ndarray, link: RicianLink) -> float:
    """E|g^H diag(c) g|^2 when the same Rician vector hits both sides."""
    zeta = np.sum(np.conj(link.los) * c * link.los)
    xi8 = np.abs(zeta) ** 2
    p = float(np.sum(np.abs(c) ** 2))
    sum_c = np.sum(c)
    u, v = link.los_weight, link.scatter_weight
    # Fourth-moment bookkeeping: |w|^4 has mean 2, so the pure-scatter term
    # carries 2*p plus the off-diagonal double sum |sum c|^2 - p; the LoS /
    # scatter cross term is real by construction.
    return (
        u * u * xi8
        + 2.0 * u * v * p
        + v * v * (2.0 * p + (np.abs(sum_c) ** 2 - p))
        + 2.0 * u * v * float(np.real(zeta * np.conj(sum_c)))
    )


def self_reflection_power_mean(link: RicianLink, state: StarRisState, side: str) -> float:
    """Mean power of the surface bounce of a node's own signal, E|g^H diag(c) g|^2.

    Unlike the two-link cascade, the identical vector on both sides correlates
    the scatter contributions, which brings in the element coherence term
    |sum_n rho_n e^{j phi_n}|^2.
    """
    return _self_reflection_power_mean_coeffs(state.coefficients(side), link)


@dataclass
class ChannelRealization:
    """One Monte-Carlo draw of every random quantity the SINRs touch."""

    layout: object
    scalars: dict = field(default_factory=dict)     # label -> complex CN(0,1) draws
    vectors: dict = field(default_factory=dict)     # label -> (N,) complex vector
    si_power: float = 0.0                           # realized |residual self-interference|^2

    def __post_init__(self):
        sizes = {v.shape[-1] for v in self.vectors.values()}
        if len(sizes) > 1:
            raise ValueError("all channel vectors must share the surface size N")


# scalar Rayleigh links drawn alongside the surface-side vectors
SCALAR_LINKS = (
    "b,u1d", "b,u2d", "b,u1u", "b,u2u",
    "u1d,u1u", "u1d,u2u", "u2d,u1u", "u2d,u2u",
)


def draw_realization(cfg, rng: np.random.Generator, layout=None) -> ChannelRealization:
    """One full draw: user drop, scalar and vector channels, and the SI power.

    The bulk simulator keeps these quantities in batched arrays for speed;
    this constructor materializes a single trial for inspection and tests.
    """
    from .geometry import sample_layout  # deferred: geometry does not import channel

    if layout is None:
        layout = sample_layout(cfg, rng)
    scalars = {
        lbl: complex((rng.standard_normal() + 1j * rng.standard_normal()) / np.sqrt(2.0))
        for lbl in SCALAR_LINKS
    }
    vectors = {lbl: sample_rician(link, rng) for lbl, link in build_links(cfg).items()}
    variance = cfg.beta_si * cfg.P_b**cfg.lambda_si
    draw = (rng.standard_normal() + 1j * rng.standard_normal()) / np.sqrt(2.0)
    return ChannelRealization(
        layout=layout, scalars=scalars, vectors=vectors,
        si_power=float(variance * abs(draw) ** 2),
    )
