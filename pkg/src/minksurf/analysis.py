"""Inverse direction: invariants of a sampled isotropic immersion.

From z(u, v) in Minkowski 4-space the pipeline recovers the first fundamental
form, the geometric frame {x, y, n1, n2} (x = z_u/f, y = z_v/f, n1 = H/|H|,
n2 fixed by orientation), the frame functions (gamma1, gamma2, lambda1, mu1,
lambda2, mu2, nu, beta1, beta2), curvature invariants through two independent
formulas, the inflection determinants, and the parallel / PNMC
classification.

Derivatives here use order-4 stencils: the isotropy check |E|, |G| <= 1e-6|F|
and the beta tolerances sit below what order-2 differencing of an oscillatory
immersion can deliver on production grids.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RectBivariateSpline

from .errors import (
    DegenerateMetric,
    MinimalOrTotallyGeodesic,
    NotIsotropic,
)
from .fields import GridSpec, ScalarField, d_dudv, diff_values
from .minkowski import lorentz_inner, minkowski_cross

FD_ORDER = 4
ISO_FLAG_TOL = 1e-6      # strict isotropy flag: max(|E|,|G|) <= tol * max|F|
ISO_GATE_TOL = 1e-3      # looser gate for running the frame pipeline
NU_FLOOR = 1e-8          # below this (relative) the surface counts as minimal
C_ZERO_TOL = 1e-8        # relative zero for the c_ij^k coefficients
TOL_BETA_REL = 1e-4      # parallel-normal threshold, scaled by |sigma|
NU_VAR_REL = 1e-4        # nu-variation threshold separating parallel-H from PNMC


class SurfaceClass(enum.Enum):
    TOTALLY_GEODESIC = "totally-geodesic"
    MINIMAL = "minimal"
    PARALLEL_H = "parallel-H"
    PNMC = "pnmc"
    GENERIC = "generic"


@dataclass
class Immersion:
    """Sampled surface z: grid -> R^4_1; points indexed [i, j, component]."""

    grid: GridSpec
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.shape != (self.grid.Nu, self.grid.Nv, 4):
            raise ValueError(f"points shape {pts.shape} != (Nu, Nv, 4)")
        if not np.all(np.isfinite(pts)):
            raise ValueError("immersion samples must be finite")
        self.points = pts

    def component(self, k: int) -> ScalarField:
        return ScalarField(self.grid, self.points[..., k])

    def d_du(self) -> np.ndarray:
        return diff_values(self.points, self.grid.hu, axis=0, order=FD_ORDER)

    def d_dv(self) -> np.ndarray:
        return diff_values(self.points, self.grid.hv, axis=1, order=FD_ORDER)

    def resample(self, new_u: np.ndarray, new_v: np.ndarray) -> "Immersion":
        """Componentwise bicubic sampling at the given coordinate arrays.

        The returned grid spans the target endpoints assuming uniform nodes;
        callers passing non-uniform targets (the canonicalization quadrature
        does) must relabel the grid themselves.
        """
        g = self.grid
        new_grid = GridSpec(new_u[0], new_u[-1], new_v[0], new_v[-1], len(new_u), len(new_v))
        cu = np.clip(new_u, g.u0, g.u1)
        cv = np.clip(new_v, g.v0, g.v1)
        pts = np.empty((len(new_u), len(new_v), 4))
        for k in range(4):
            pts[..., k] = RectBivariateSpline(g.u_nodes, g.v_nodes, self.points[..., k], kx=3, ky=3, s=0)(cu, cv)
        return Immersion(new_grid, pts)

    def transpose(self) -> "Immersion":
        """Swap the roles of u and v (used by the canonicalization role-swap)."""
        g = self.grid
        return Immersion(
            GridSpec(g.v0, g.v1, g.u0, g.u1, g.Nv, g.Nu),
            np.swapaxes(self.points, 0, 1).copy(),
        )


@dataclass
class FundamentalForm:
    E: ScalarField
    F: ScalarField
    G: ScalarField
    W: ScalarField
    is_timelike: bool
    is_isotropic: bool


def first_fundamental_form(m: Immersion) -> FundamentalForm:
    zu = m.d_du()
    zv = m.d_dv()
    E = lorentz_inner(zu, zu)
    F = lorentz_inner(zu, zv)
    G = lorentz_inner(zv, zv)
    disc = E * G - F * F
    scale = max(np.max(np.abs(E)), np.max(np.abs(F)), np.max(np.abs(G)))
    if np.min(np.abs(disc)) < 1e-14 * scale**2:
        raise DegenerateMetric("EG - F^2 is numerically zero somewhere")
    g = m.grid
    return FundamentalForm(
        E=ScalarField(g, E),
        F=ScalarField(g, F),
        G=ScalarField(g, G),
        W=ScalarField(g, np.sqrt(np.abs(disc))),
        is_timelike=bool(np.all(disc < 0)),
        is_isotropic=bool(max(np.max(np.abs(E)), np.max(np.abs(G))) <= ISO_FLAG_TOL * np.max(np.abs(F))),
    )


@dataclass
class GeometricFrame:
    frames: np.ndarray       # (Nu, Nv, 4, 4), rows x, y, n1, n2
    f: ScalarField           # metric function, F = -f^2
    nu: ScalarField          # |H|
    H: np.ndarray            # (Nu, Nv, 4)
    fundamental: FundamentalForm


def _require_isotropic(fff: FundamentalForm, gate: float):
    worst = max(fff.E.max_abs(), fff.G.max_abs())
    limit = gate * fff.F.max_abs()
    if worst > limit:
        raise NotIsotropic(
            f"max(|E|,|G|) = {worst:.3e} exceeds {limit:.3e}; analysis needs isotropic "
            "(null) parameters - construct them before calling"
        )


def geometric_frame(m: Immersion, iso_gate: float = ISO_GATE_TOL) -> GeometricFrame:
    """Frame {x, y, n1, n2} with x = z_u/f, y = z_v/f, n1 along H.

    n2 is the unit normal orthogonal to n1 with det[x; y; n1; n2] > 0.
    Raises MinimalOrTotallyGeodesic when |H| falls below its floor anywhere.
    """
    fff = first_fundamental_form(m)
    _require_isotropic(fff, iso_gate)
    if np.any(fff.F.values >= 0):
        raise NotIsotropic("requires <z_u, z_v> < 0 at every node")

    g = m.grid
    zu = m.d_du()
    zv = m.d_dv()
    f = np.sqrt(-fff.F.values)
    x = zu / f[..., None]
    y = zv / f[..., None]

    zuv = diff_values(zu, g.hv, axis=1, order=FD_ORDER)
    # tangential part of w is -<w,y>x - <w,x>y for the pseudo-orthonormal pair
    wy = lorentz_inner(zuv, y)
    wx = lorentz_inner(zuv, x)
    normal_part = zuv + wy[..., None] * x + wx[..., None] * y
    H = -normal_part / (f * f)[..., None]

    H2 = lorentz_inner(H, H)
    scale = 1.0 + float(np.max(np.sqrt(np.abs(H2))))
    if np.any(H2 <= (NU_FLOOR * scale) ** 2):
        raise MinimalOrTotallyGeodesic(
            f"|H| falls below {NU_FLOOR * scale:.3e}: minimal or totally geodesic patch"
        )
    nu = np.sqrt(H2)
    n1 = H / nu[..., None]

    n2 = minkowski_cross(x, y, n1)
    n2_norm2 = lorentz_inner(n2, n2)
    n2 = n2 / np.sqrt(np.abs(n2_norm2))[..., None]
    frames = np.stack([x, y, n1, n2], axis=-2)
    flip = np.linalg.det(frames) < 0
    n2[flip] = -n2[flip]
    frames = np.stack([x, y, n1, n2], axis=-2)

    return GeometricFrame(
        frames=frames,
        f=ScalarField(g, f),
        nu=ScalarField(g, nu),
        H=H,
        fundamental=fff,
    )


@dataclass
class FrameFunctions:
    gamma1: ScalarField
    gamma2: ScalarField
    lambda1: ScalarField
    mu1: ScalarField
    lambda2: ScalarField
    mu2: ScalarField
    nu: ScalarField
    beta1: ScalarField
    beta2: ScalarField
    f: ScalarField

    def sigma_scale(self) -> float:
        return max(
            self.lambda1.max_abs(), self.mu1.max_abs(),
            self.lambda2.max_abs(), self.mu2.max_abs(), self.nu.max_abs(),
        )


def frame_functions(m: Immersion, frame: GeometricFrame | None = None) -> FrameFunctions:
    """Connection coefficients of the geometric frame.

    With the frame normalized as x = z_u/f, y = z_v/f the directional
    derivatives are (1/f) d/du and (1/f) d/dv applied to the frame fields.
    """
    if frame is None:
        frame = geometric_frame(m)
    g = m.grid
    f = frame.f.values
    x = frame.frames[..., 0, :]
    y = frame.frames[..., 1, :]
    n1 = frame.frames[..., 2, :]
    n2 = frame.frames[..., 3, :]

    ln_f = np.log(f)
    gamma1 = diff_values(ln_f, g.hu, axis=0, order=FD_ORDER) / f
    gamma2 = diff_values(ln_f, g.hv, axis=1, order=FD_ORDER) / f

    x_u = diff_values(x, g.hu, axis=0, order=FD_ORDER)
    y_v = diff_values(y, g.hv, axis=1, order=FD_ORDER)
    n1_u = diff_values(n1, g.hu, axis=0, order=FD_ORDER)
    n1_v = diff_values(n1, g.hv, axis=1, order=FD_ORDER)

    lam1 = lorentz_inner(x_u, n1) / f
    mu1 = lorentz_inner(x_u, n2) / f
    lam2 = lorentz_inner(y_v, n1) / f
    mu2 = lorentz_inner(y_v, n2) / f
    beta1 = lorentz_inner(n1_u, n2) / f
    beta2 = lorentz_inner(n1_v, n2) / f

    F = lambda a: ScalarField(g, a)
    return FrameFunctions(
        gamma1=F(gamma1), gamma2=F(gamma2),
        lambda1=F(lam1), mu1=F(mu1), lambda2=F(lam2), mu2=F(mu2),
        nu=frame.nu, beta1=F(beta1), beta2=F(beta2), f=frame.f,
    )


@dataclass
class InvariantReport:
    K_metric: ScalarField
    K_frame: ScalarField
    H2: ScalarField
    KmH2_direct: ScalarField
    KmH2_formula: ScalarField    # zeroed where |mu1| is below threshold
    formula_valid: np.ndarray    # mask: where KmH2_formula is meaningful
    Delta1: ScalarField
    Delta2: ScalarField
    Delta3: ScalarField
    classification: np.ndarray   # per-node SurfaceClass
    functions: FrameFunctions

    def overall_class(self) -> SurfaceClass:
        from collections import Counter

        su, sv = self.K_metric.grid.interior(2)
        counts = Counter(self.classification[su, sv].ravel().tolist())
        return counts.most_common(1)[0][0]


def invariants(m: Immersion, frame: GeometricFrame | None = None) -> InvariantReport:
    if frame is None:
        frame = geometric_frame(m)
    funcs = frame_functions(m, frame)
    g = m.grid
    f = frame.f.values

    ln_f_field = ScalarField(g, np.log(f))
    K_metric = 2.0 / (f * f) * d_dudv(ln_f_field, order=FD_ORDER).values

    nu = funcs.nu.values
    K_frame = nu * nu - funcs.lambda1.values * funcs.lambda2.values - funcs.mu1.values * funcs.mu2.values
    H2 = nu * nu
    KmH2 = K_frame - H2

    mu1 = funcs.mu1.values
    sigma_scale = funcs.sigma_scale()
    formula_valid = np.abs(mu1) > C_ZERO_TOL * (1.0 + sigma_scale)
    with np.errstate(divide="ignore", invalid="ignore"):
        formula = -(funcs.mu2.values / mu1) * (funcs.lambda1.values**2 + mu1**2)
    formula = np.where(formula_valid, formula, 0.0)

    # inflection determinants from c_ij^k = <z_ij, n_k>
    zu = m.d_du()
    zv = m.d_dv()
    zuu = diff_values(zu, g.hu, axis=0, order=FD_ORDER)
    zuv = diff_values(zu, g.hv, axis=1, order=FD_ORDER)
    zvv = diff_values(zv, g.hv, axis=1, order=FD_ORDER)
    n1 = frame.frames[..., 2, :]
    n2 = frame.frames[..., 3, :]
    c = {
        (1, 1, 1): lorentz_inner(zuu, n1), (1, 1, 2): lorentz_inner(zuu, n2),
        (1, 2, 1): lorentz_inner(zuv, n1), (1, 2, 2): lorentz_inner(zuv, n2),
        (2, 2, 1): lorentz_inner(zvv, n1), (2, 2, 2): lorentz_inner(zvv, n2),
    }
    D1 = c[(1, 1, 1)] * c[(1, 2, 2)] - c[(1, 1, 2)] * c[(1, 2, 1)]
    D2 = c[(1, 1, 1)] * c[(2, 2, 2)] - c[(1, 1, 2)] * c[(2, 2, 1)]
    D3 = c[(1, 2, 1)] * c[(2, 2, 2)] - c[(1, 2, 2)] * c[(2, 2, 1)]

    c_scale = max(np.max(np.abs(v)) for v in c.values()) + 1e-300
    c_small = np.ones(c[(1, 1, 1)].shape, dtype=bool)
    for k in c:
        c_small &= np.abs(c[k]) <= C_ZERO_TOL * c_scale

    nu_small = nu <= NU_FLOOR * (1.0 + float(np.max(nu)))
    beta_max = max(funcs.beta1.max_abs(), funcs.beta2.max_abs())
    betas_small = beta_max <= TOL_BETA_REL * (1.0 + sigma_scale)
    nu_varies = (float(np.max(nu)) - float(np.min(nu))) > NU_VAR_REL * (1.0 + float(np.max(nu)))

    cls = np.full(nu.shape, SurfaceClass.GENERIC, dtype=object)
    if betas_small:
        cls[:] = SurfaceClass.PNMC if nu_varies else SurfaceClass.PARALLEL_H
    cls[nu_small] = SurfaceClass.MINIMAL
    cls[c_small] = SurfaceClass.TOTALLY_GEODESIC

    F = lambda a: ScalarField(g, a)
    return InvariantReport(
        K_metric=F(K_metric), K_frame=F(K_frame), H2=F(H2),
        KmH2_direct=F(KmH2), KmH2_formula=F(formula), formula_valid=formula_valid,
        Delta1=F(D1), Delta2=F(D2), Delta3=F(D3),
        classification=cls, functions=funcs,
    )


@dataclass
class ChristoffelReport:
    """Nonzero symbols of an isotropic parametrization plus a cross-check.

    In null coordinates only G111 = 2 f_u / f and G222 = 2 f_v / f survive.
    The check fields measure how far the tangential part of z_uu strays from
    +G111 z_u (inner products against x and y; O(h^2) for honest input).
    """

    G111: ScalarField
    G112: ScalarField
    G121: ScalarField
    G122: ScalarField
    G221: ScalarField
    G222: ScalarField
    check_x: ScalarField
    check_y: ScalarField


def christoffel_isotropic(m: Immersion, frame: GeometricFrame | None = None) -> ChristoffelReport:
    if frame is None:
        frame = geometric_frame(m)
    g = m.grid
    f = frame.f.values
    f_u = diff_values(f, g.hu, axis=0, order=FD_ORDER)
    f_v = diff_values(f, g.hv, axis=1, order=FD_ORDER)
    G111 = 2.0 * f_u / f
    G222 = 2.0 * f_v / f

    zu = m.d_du()
    zuu = diff_values(zu, g.hu, axis=0, order=FD_ORDER)
    x = frame.frames[..., 0, :]
    y = frame.frames[..., 1, :]
    tang = -(lorentz_inner(zuu, y)[..., None] * x) - (lorentz_inner(zuu, x)[..., None] * y)
    d = tang - G111[..., None] * zu
    zero = ScalarField(g, np.zeros_like(f))
    F = lambda a: ScalarField(g, a)
    return ChristoffelReport(
        G111=F(G111), G112=zero, G121=zero, G122=zero, G221=zero, G222=F(G222),
        check_x=F(lorentz_inner(d, x)), check_y=F(lorentz_inner(d, y)),
    )
