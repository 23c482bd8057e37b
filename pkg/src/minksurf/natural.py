"""Natural PDE systems for the geometric function triple (lambda, mu, nu).

Three cases, tagged by the sign of K - H^2:

  positive (eps = +1):  nu_u + lam_v = lam (ln|mu|)_v
                        lam_u - nu_v = lam (ln|mu|)_u
                        |mu| (ln|mu|)_uv = -nu^2 - (lam^2 + mu^2)

  negative (eps = -1):  same first equation,
                        lam_u + nu_v = lam (ln|mu|)_u
                        |mu| (ln|mu|)_uv = -nu^2 + (lam^2 + mu^2)

  degenerate:           nu = nu(u),
                        nu_u + lam_v = lam (ln|mu|)_v
                        |mu| (ln|mu|)_uv = -nu^2

This module evaluates residuals of sampled triples, classifies the case from
frame functions, and manufactures solution fixtures: a causal Goursat march
for the degenerate case and a characteristic Picard sweep for eps = -1.  With
p = lam + nu, q = lam - nu, g = ln|mu| the eps = -1 system is equivalent to

    p_u + p_v = lam (g_u + g_v)
    q_u - q_v = lam (g_u - g_v)
    g_uv      = p q e^{-g} + e^{g}

(p transports along (1,1), q along (1,-1); the equivalence is checked
symbolically in the test suite).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline, RectBivariateSpline

from .errors import BlowUp, BothMuZero, NearZeroField, NoConvergence, ValidationError
from .fields import MU_MIN, GridSpec, ScalarField, d_du, d_dudv, d_dv, ln_abs

G_LIMIT = 50.0          # |ln mu| trust region during marching
CLASSIFY_TOL = 1e-10    # relative zero threshold for K - H^2


class Case(enum.Enum):
    POSITIVE_KH = "positive"    # K - H^2 > 0, eps = +1
    NEGATIVE_KH = "negative"    # K - H^2 < 0, eps = -1
    DEGENERATE = "degenerate"   # K - H^2 = 0

    @property
    def epsilon(self) -> int:
        if self is Case.POSITIVE_KH:
            return 1
        if self is Case.NEGATIVE_KH:
            return -1
        raise ValueError("degenerate case has no epsilon")


def nu_constancy_tol(nu_max: float) -> float:
    return 1e-8 * (1.0 + nu_max)


@dataclass
class CanonicalTriple:
    """Geometric functions (lambda, mu, nu) with the case tag.

    mu must stay away from zero with constant sign.  In the degenerate case
    nu depends on u only; its samples must be v-constant to tight tolerance.
    """

    lam: ScalarField
    mu: ScalarField
    nu: ScalarField
    case: Case
    flags: tuple = ()

    def __post_init__(self):
        if not (self.lam.grid == self.mu.grid == self.nu.grid):
            raise ValueError("triple fields must share one grid")
        if self.mu.min_abs() < MU_MIN:
            raise NearZeroField(f"min |mu| = {self.mu.min_abs():.3e} < {MU_MIN:.3e}")
        if not self.mu.sign_constant():
            raise NearZeroField("mu changes sign on the grid")
        if self.case is Case.DEGENERATE:
            dv = np.max(np.abs(np.diff(self.nu.values, axis=1)))
            if dv > nu_constancy_tol(self.nu.max_abs()):
                raise ValidationError("degenerate case requires nu = nu(u); samples vary along v")

    @property
    def grid(self) -> GridSpec:
        return self.lam.grid

    @property
    def sign_mu(self) -> int:
        return 1 if self.mu.values.flat[0] > 0 else -1

    def nu_variation(self) -> float:
        return float(self.nu.values.max() - self.nu.values.min())

    def diagnostics(self) -> dict:
        """Soft flags; constant nu means parallel H rather than PNMC."""
        return {
            "nu_constant": self.nu_variation() <= nu_constancy_tol(self.nu.max_abs()),
            "nu_min": float(self.nu.values.min()),
            "nu_nonpositive_nodes": int(np.sum(self.nu.values <= 0.0)),
            "flags": list(self.flags),
        }


@dataclass
class ResidualReport:
    r1: ScalarField
    r2: ScalarField
    r3: ScalarField
    max_abs: float
    interior_max_abs: float

    @classmethod
    def from_fields(cls, r1, r2, r3) -> "ResidualReport":
        full = max(r.max_abs() for r in (r1, r2, r3))
        inner = max(r.interior_max_abs() for r in (r1, r2, r3))
        return cls(r1, r2, r3, full, inner)


def residual(t: CanonicalTriple) -> ResidualReport:
    """Left-minus-right sides of the natural system for the triple's case."""
    g = ln_abs(t.mu)
    g_u, g_v, g_uv = d_du(g), d_dv(g), d_dudv(g)
    lam_u, lam_v = d_du(t.lam), d_dv(t.lam)
    nu_u, nu_v = d_du(t.nu), d_dv(t.nu)
    abs_mu = t.mu.abs()

    r1 = nu_u + lam_v - t.lam * g_v
    if t.case is Case.DEGENERATE:
        r2 = nu_v
        r3 = abs_mu * g_uv + t.nu * t.nu
    else:
        eps = t.case.epsilon
        r2 = lam_u - eps * nu_v - t.lam * g_u
        r3 = abs_mu * g_uv + t.nu * t.nu + eps * (t.lam * t.lam + t.mu * t.mu)
    return ResidualReport.from_fields(r1, r2, r3)


def classify_from_frame(lambda1: float, mu1: float, lambda2: float, mu2: float) -> tuple[Case, float]:
    """Case and K - H^2 = -(mu2/mu1)(lambda1^2 + mu1^2) from frame functions.

    If mu1 vanishes but mu2 does not, the roles of the two directions are
    swapped first.  Raises BothMuZero when both vanish (inflection
    configuration: the surface lies in a 3-dimensional Minkowski subspace).
    """
    scale = 1.0 + lambda1 * lambda1 + mu1 * mu1 + lambda2 * lambda2 + mu2 * mu2
    tol = CLASSIFY_TOL * scale
    if abs(mu1) <= tol and abs(mu2) <= tol:
        raise BothMuZero("mu1 = mu2 = 0: inflection configuration")
    if abs(mu1) <= tol < abs(mu2):
        lambda1, mu1, lambda2, mu2 = lambda2, mu2, lambda1, mu1
    km = -(mu2 / mu1) * (lambda1 * lambda1 + mu1 * mu1)
    if km > tol:
        return Case.POSITIVE_KH, km
    if km < -tol:
        return Case.NEGATIVE_KH, km
    return Case.DEGENERATE, km


# ---------------------------------------------------------------------------
# Goursat marching helpers


def _samples_1d(data, nodes: np.ndarray, name: str) -> np.ndarray:
    """Accept a callable or an array sampled on the coarse nodes."""
    if callable(data):
        return np.asarray(data(nodes), dtype=float) * np.ones_like(nodes)
    arr = np.asarray(data, dtype=float)
    if arr.shape != nodes.shape:
        raise ValidationError(f"{name}: expected {nodes.shape[0]} samples, got {arr.shape}")
    return arr


def _resample_1d(samples: np.ndarray, coarse: np.ndarray, fine: np.ndarray) -> np.ndarray:
    if len(coarse) == len(fine):
        return samples.copy()
    return CubicSpline(coarse, samples)(fine)


def _wavefront_indices(Nu: int, Nv: int):
    """Anti-diagonal batches of interior nodes, each causally independent."""
    for s in range(2, Nu + Nv - 1):
        i0 = max(1, s - (Nv - 1))
        i1 = min(Nu - 1, s - 1)
        if i0 > i1:
            continue
        i = np.arange(i0, i1 + 1)
        yield i, s - i


def _goursat_march(grid: GridSpec, g_bottom: np.ndarray, g_left: np.ndarray, rhs: Callable) -> np.ndarray:
    """March g_uv = rhs(i, j, g) over the grid from two characteristic edges.

    Cell update is the trapezoidal corner rule, implicit in the new corner and
    solved by a few Newton steps; second order overall.
    """
    Nu, Nv = grid.Nu, grid.Nv
    hu, hv = grid.hu, grid.hv
    if abs(g_bottom[0] - g_left[0]) > 1e-10 * (1.0 + abs(g_bottom[0])):
        raise ValidationError("incompatible corner data: g_bottom(u0) != g_left(v0)")
    g = np.empty((Nu, Nv))
    g[:, 0] = g_bottom
    g[0, :] = g_left
    cell = hu * hv / 4.0
    for i, j in _wavefront_indices(Nu, Nv):
        base = g[i - 1, j] + g[i, j - 1] - g[i - 1, j - 1]
        known = rhs(i - 1, j - 1, g[i - 1, j - 1]) + rhs(i - 1, j, g[i - 1, j]) + rhs(i, j - 1, g[i, j - 1])
        x = base + cell * (known + rhs(i, j, base))  # predictor
        for _ in range(3):
            val, dval = rhs(i, j, x, with_derivative=True)
            phi = x - base - cell * (known + val)
            x = x - phi / (1.0 - cell * dval)
        g[i, j] = x
        # NaN-safe: any non-finite or out-of-range entry trips the guard
        if not np.all(np.abs(x) <= G_LIMIT):
            raise BlowUp(f"|ln mu| exceeded {G_LIMIT} during marching")
    return g


def solve_goursat_degenerate(
    nu_of_u,
    g_bottom,
    g_left,
    lambda_bottom,
    sign_mu: int,
    grid: GridSpec,
    refine: int = 1,
) -> CanonicalTriple:
    """Degenerate-case fixture generator.

    With g = ln|mu| the curvature equation becomes g_uv = -nu(u)^2 e^{-g},
    marched causally from data on the bottom (v = v0) and left (u = u0)
    edges.  lambda then solves the linear transport lam_v = lam g_v - nu_u
    along each u = const line (RK4 in v).  `refine` marches on an internally
    refined grid and restricts, trading time for a smaller residual constant.

    Edge data may be callables of the coordinate or arrays on the coarse
    nodes.  nu must be non-constant (constant nu is the parallel-H case the
    degenerate system is not meant for).
    """
    if sign_mu not in (1, -1):
        raise ValidationError("sign_mu must be +1 or -1")
    u_c, v_c = grid.u_nodes, grid.v_nodes
    fine = grid.refined_by(refine) if refine > 1 else grid
    u_f, v_f = fine.u_nodes, fine.v_nodes

    nu_u_coarse = _samples_1d(nu_of_u, u_c, "nu_of_u")
    if np.max(nu_u_coarse) - np.min(nu_u_coarse) <= nu_constancy_tol(np.max(np.abs(nu_u_coarse))):
        raise ValidationError("nu must be non-constant over the u-range")
    if callable(nu_of_u):
        nu_f = np.asarray(nu_of_u(u_f), dtype=float) * np.ones_like(u_f)
    else:
        nu_f = _resample_1d(nu_u_coarse, u_c, u_f)
    gb = _resample_1d(_samples_1d(g_bottom, u_c, "g_bottom"), u_c, u_f) if not callable(g_bottom) \
        else np.asarray(g_bottom(u_f), dtype=float) * np.ones_like(u_f)
    gl = _resample_1d(_samples_1d(g_left, v_c, "g_left"), v_c, v_f) if not callable(g_left) \
        else np.asarray(g_left(v_f), dtype=float) * np.ones_like(v_f)
    lb = _resample_1d(_samples_1d(lambda_bottom, u_c, "lambda_bottom"), u_c, u_f) if not callable(lambda_bottom) \
        else np.asarray(lambda_bottom(u_f), dtype=float) * np.ones_like(u_f)

    nusq = nu_f * nu_f

    def rhs(i, j, g, with_derivative=False):
        e = np.exp(-np.clip(g, -700.0, 700.0))  # overflow-safe; guard trips first
        val = -nusq[i] * e
        if with_derivative:
            return val, nusq[i] * e
        return val

    g = _goursat_march(fine, gb, gl, rhs)

    # transport lambda: lam_v = lam * g_v - nu_u, RK4 up every column at once
    g_spline = RectBivariateSpline(u_f, v_f, g, kx=3, ky=3, s=0)
    nu_u_f = np.gradient(nu_f, fine.hu, edge_order=2)
    lam = np.empty_like(g)
    lam[:, 0] = lb
    hv = fine.hv

    def slope(lam_vec, v):
        return g_spline(u_f, v, dy=1)[:, 0] * lam_vec - nu_u_f

    for j in range(fine.Nv - 1):
        v = v_f[j]
        y = lam[:, j]
        k1 = slope(y, v)
        k2 = slope(y + 0.5 * hv * k1, v + 0.5 * hv)
        k3 = slope(y + 0.5 * hv * k2, v + 0.5 * hv)
        k4 = slope(y + hv * k3, v + hv)
        lam[:, j + 1] = y + hv / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)

    step = refine if refine > 1 else 1
    g_c = g[::step, ::step]
    lam_c = lam[::step, ::step]
    nu_c = np.repeat(nu_f[::step, None], grid.Nv, axis=1)
    return CanonicalTriple(
        lam=ScalarField(grid, lam_c),
        mu=ScalarField(grid, sign_mu * np.exp(g_c)),
        nu=ScalarField(grid, nu_c),
        case=Case.DEGENERATE,
    )


def solve_goursat_hyperbolic(
    p_bottom,
    p_left,
    q_left,
    q_top,
    g_bottom,
    g_left,
    grid: GridSpec,
    sign_mu: int = 1,
    max_sweeps: int = 25,
    tol: float = 1e-10,
) -> CanonicalTriple:
    """eps = -1 fixture generator via the characteristic reformulation.

    p = lam + nu rides the (1,1) characteristics (data on bottom + left),
    q = lam - nu rides (1,-1) (data on left + top), g = ln|mu| solves the
    Goursat problem g_uv = p q e^{-g} + e^g from bottom + left data.  Picard
    sweeps alternate the g-march with first-order upwind transports of p, q
    until the max sweep-to-sweep change drops below tol.  Residual is O(h).
    """
    Nu, Nv = grid.Nu, grid.Nv
    hu, hv = grid.hu, grid.hv
    u, v = grid.u_nodes, grid.v_nodes

    pb = _samples_1d(p_bottom, u, "p_bottom")
    pl = _samples_1d(p_left, v, "p_left")
    ql = _samples_1d(q_left, v, "q_left")
    qt = _samples_1d(q_top, u, "q_top")
    gb = _samples_1d(g_bottom, u, "g_bottom")
    gl = _samples_1d(g_left, v, "g_left")
    for a, b, what in ((pb[0], pl[0], "p"), (ql[-1], qt[0], "q"), (gb[0], gl[0], "g")):
        if abs(a - b) > 1e-10 * (1.0 + abs(a)):
            raise ValidationError(f"incompatible corner data for {what}")

    # additive initial extensions of the edge data
    p = pb[:, None] + pl[None, :] - pb[0]
    q = ql[None, :] + qt[:, None] - ql[-1]
    g = gb[:, None] + gl[None, :] - gb[0]

    wu, wv = 1.0 / hu, 1.0 / hv
    for sweep in range(max_sweeps):
        p_old, q_old, g_old = p, q, g
        lam = 0.5 * (p_old + q_old)

        pq = p_old * q_old

        def rhs(i, j, gval, with_derivative=False):
            gc = np.clip(gval, -700.0, 700.0)
            val = pq[i, j] * np.exp(-gc) + np.exp(gc)
            if with_derivative:
                return val, -pq[i, j] * np.exp(-gc) + np.exp(gc)
            return val

        g = _goursat_march(grid, gb, gl, rhs)

        g_u = np.gradient(g, hu, axis=0, edge_order=2)
        g_v = np.gradient(g, hv, axis=1, edge_order=2)
        rhs_p = lam * (g_u + g_v)
        rhs_q = lam * (g_u - g_v)

        p = np.empty_like(p_old)
        p[:, 0] = pb
        p[0, :] = pl
        for i, j in _wavefront_indices(Nu, Nv):
            p[i, j] = (wu * p[i - 1, j] + wv * p[i, j - 1] + rhs_p[i, j]) / (wu + wv)

        q = np.empty_like(q_old)
        q[0, :] = ql
        q[:, -1] = qt
        for i, jj in _wavefront_indices(Nu, Nv):
            j = Nv - 1 - jj  # march downward in v along (1,-1)
            q[i, j] = (wu * q[i - 1, j] + wv * q[i, j + 1] + rhs_q[i, j]) / (wu + wv)

        delta = max(
            np.max(np.abs(p - p_old)),
            np.max(np.abs(q - q_old)),
            np.max(np.abs(g - g_old)),
        )
        if delta <= tol:
            break
    else:
        raise NoConvergence(f"Picard sweeps did not converge ({max_sweeps} sweeps, last change {delta:.3e})")

    lam = 0.5 * (p + q)
    nu = 0.5 * (p - q)
    flags = ()
    # upwind errors hit p and q through different stencils, so data meant to
    # give constant (or zero) nu shows O(h) noise; flag at scheme accuracy
    scheme_tol = 4.0 * (hu + hv) * max(1.0, np.max(np.abs(p)), np.max(np.abs(q)))
    variation = np.max(nu) - np.min(nu)
    if variation <= max(nu_constancy_tol(np.max(np.abs(nu))), scheme_tol):
        flags = ("nu-constant",)
    return CanonicalTriple(
        lam=ScalarField(grid, lam),
        mu=ScalarField(grid, sign_mu * np.exp(g)),
        nu=ScalarField(grid, nu),
        case=Case.NEGATIVE_KH,
        flags=flags,
    )
