"""Scalar fields of (u, v) on uniform rectangular grids.

A ScalarField is a sampled Nu x Nv array, optionally backed by a closed-form
evaluator with declared analytic partials.  Differentiation uses order-2
central differences with 3-point one-sided closures on the boundary rows and
columns (an order-4 variant is available for the analysis pipeline); when an
analytic partial is attached it is used instead of the stencil.

Partial keys are canonical strings "u"*a + "v"*b, e.g. "u", "v", "uv", "uuv".
All fields are immutable by convention: operations return new instances.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import RectBivariateSpline

from .errors import GridTooSmall, NearZeroField, OutOfDomain

MU_MIN = 1e-8  # guards ln|mu| and 1/sqrt|mu| against blow-up


@dataclass(frozen=True)
class GridSpec:
    """Uniform rectangular grid on [u0, u1] x [v0, v1] with Nu x Nv nodes."""

    u0: float
    u1: float
    v0: float
    v1: float
    Nu: int
    Nv: int

    def __post_init__(self):
        if not (self.u1 > self.u0 and self.v1 > self.v0):
            raise ValueError("domain bounds must satisfy u1 > u0 and v1 > v0")
        if self.Nu < 5 or self.Nv < 5:
            raise GridTooSmall("grids need at least 5 nodes per axis")

    @property
    def hu(self) -> float:
        return (self.u1 - self.u0) / (self.Nu - 1)

    @property
    def hv(self) -> float:
        return (self.v1 - self.v0) / (self.Nv - 1)

    @property
    def u_nodes(self) -> np.ndarray:
        return np.linspace(self.u0, self.u1, self.Nu)

    @property
    def v_nodes(self) -> np.ndarray:
        return np.linspace(self.v0, self.v1, self.Nv)

    def mesh(self):
        return np.meshgrid(self.u_nodes, self.v_nodes, indexing="ij")

    def interior(self, layers: int = 2):
        """Index slices excluding `layers` boundary rows/columns."""
        return slice(layers, self.Nu - layers), slice(layers, self.Nv - layers)

    def refine(self) -> "GridSpec":
        """Halve both spacings (nodes 33 -> 65 -> 129 ...)."""
        return GridSpec(self.u0, self.u1, self.v0, self.v1, 2 * self.Nu - 1, 2 * self.Nv - 1)

    def refined_by(self, factor: int) -> "GridSpec":
        return GridSpec(
            self.u0, self.u1, self.v0, self.v1,
            factor * (self.Nu - 1) + 1, factor * (self.Nv - 1) + 1,
        )

    def to_dict(self) -> dict:
        return {
            "u0": self.u0, "u1": self.u1, "v0": self.v0, "v1": self.v1,
            "Nu": self.Nu, "Nv": self.Nv,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GridSpec":
        return cls(d["u0"], d["u1"], d["v0"], d["v1"], int(d["Nu"]), int(d["Nv"]))


@dataclass
class ScalarField:
    grid: GridSpec
    values: np.ndarray
    evaluator: Optional[Callable] = None
    partials: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid.Nu, self.grid.Nv):
            raise ValueError(f"values shape {vals.shape} != grid {(self.grid.Nu, self.grid.Nv)}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("field samples must be finite")
        self.values = vals
        if self.evaluator is not None:
            U, V = self.grid.mesh()
            probe = np.broadcast_to(np.asarray(self.evaluator(U, V), dtype=float), U.shape)
            scale = 1.0 + np.max(np.abs(vals))
            if np.max(np.abs(probe - vals)) > 1e-14 * scale:
                raise ValueError("attached evaluator disagrees with the samples")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_function(cls, grid: GridSpec, fn: Callable, partials: dict | None = None) -> "ScalarField":
        U, V = grid.mesh()
        vals = np.broadcast_to(np.asarray(fn(U, V), dtype=float), U.shape).copy()
        return cls(grid, vals, evaluator=fn, partials=dict(partials or {}))

    @classmethod
    def constant(cls, grid: GridSpec, value: float) -> "ScalarField":
        zero = lambda U, V: np.zeros_like(np.asarray(U, dtype=float))
        return cls(
            grid,
            np.full((grid.Nu, grid.Nv), float(value)),
            evaluator=lambda U, V, c=float(value): np.full_like(np.asarray(U, dtype=float), c),
            partials={"u": zero, "v": zero, "uu": zero, "uv": zero, "vv": zero, "uuv": zero, "uvv": zero},
        )

    # -- reductions --------------------------------------------------------

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def min_abs(self) -> float:
        return float(np.min(np.abs(self.values)))

    def interior_max_abs(self, layers: int = 2) -> float:
        su, sv = self.grid.interior(layers)
        return float(np.max(np.abs(self.values[su, sv])))

    def sign_constant(self) -> bool:
        return bool(np.all(self.values > 0) or np.all(self.values < 0))

    # -- arithmetic (drops evaluators) --------------------------------------

    def _binop(self, other, op) -> "ScalarField":
        if isinstance(other, ScalarField):
            if other.grid != self.grid:
                raise ValueError("fields live on different grids")
            return ScalarField(self.grid, op(self.values, other.values))
        return ScalarField(self.grid, op(self.values, other))

    def __add__(self, other):
        return self._binop(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binop(other, np.subtract)

    def __rsub__(self, other):
        return ScalarField(self.grid, other - self.values)

    def __mul__(self, other):
        return self._binop(other, np.multiply)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binop(other, np.divide)

    def __rtruediv__(self, other):
        return ScalarField(self.grid, other / self.values)

    def __neg__(self):
        return ScalarField(self.grid, -self.values)

    def abs(self) -> "ScalarField":
        return ScalarField(self.grid, np.abs(self.values))


# ---------------------------------------------------------------------------
# differentiation


def _diff2(vals: np.ndarray, h: float, axis: int) -> np.ndarray:
    # order-2 central interior, 3-point one-sided order-2 closures
    return np.gradient(vals, h, axis=axis, edge_order=2)


def _diff4(vals: np.ndarray, h: float, axis: int) -> np.ndarray:
    """Order-4 first derivative: 5-point central, one-sided at the edges."""
    f = np.moveaxis(np.asarray(vals, dtype=float), axis, 0)
    n = f.shape[0]
    if n < 5:
        raise GridTooSmall("order-4 stencils need at least 5 nodes")
    out = np.empty_like(f)
    out[2:-2] = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / 12.0
    out[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / 12.0
    out[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / 12.0
    out[-2] = (3 * f[-1] + 10 * f[-2] - 18 * f[-3] + 6 * f[-4] - f[-5]) / 12.0
    out[-1] = (25 * f[-1] - 48 * f[-2] + 36 * f[-3] - 16 * f[-4] + 3 * f[-5]) / 12.0
    return np.moveaxis(out / h, 0, axis)


def diff_values(vals: np.ndarray, h: float, axis: int, order: int = 2) -> np.ndarray:
    """Finite-difference derivative of a raw sample array (any extra axes)."""
    if order == 2:
        return _diff2(np.asarray(vals, dtype=float), h, axis)
    if order == 4:
        return _diff4(vals, h, axis)
    raise ValueError("order must be 2 or 4")


def _d_axis(s: ScalarField, letter: str, order: int) -> ScalarField:
    axis = 0 if letter == "u" else 1
    h = s.grid.hu if letter == "u" else s.grid.hv
    if letter in s.partials:
        fn = s.partials[letter]
        U, V = s.grid.mesh()
        vals = np.broadcast_to(np.asarray(fn(U, V), dtype=float), U.shape).copy()
        # parent key "letter"+k supplies the derivative's partial k
        new_partials = {}
        for key, pfn in s.partials.items():
            au, av = key.count("u"), key.count("v")
            if letter == "u" and au >= 1:
                new_partials["u" * (au - 1) + "v" * av] = pfn
            elif letter == "v" and av >= 1:
                new_partials["u" * au + "v" * (av - 1)] = pfn
        new_partials.pop("", None)
        return ScalarField(s.grid, vals, evaluator=fn, partials=new_partials)
    return ScalarField(s.grid, diff_values(s.values, h, axis, order))


def d_du(s: ScalarField, order: int = 2) -> ScalarField:
    return _d_axis(s, "u", order)


def d_dv(s: ScalarField, order: int = 2) -> ScalarField:
    return _d_axis(s, "v", order)


def d_dudv(s: ScalarField, order: int = 2) -> ScalarField:
    """Mixed partial, declared composition order: d/du first, then d/dv."""
    return d_dv(d_du(s, order), order)


# ---------------------------------------------------------------------------
# pointwise transforms that keep analytic partials when available


def ln_abs(s: ScalarField, mu_min: float = MU_MIN, require_constant_sign: bool = False) -> ScalarField:
    """Pointwise ln|s|; rejects fields that come within mu_min of zero.

    With require_constant_sign the samples must not change sign either (a sign
    flip between nodes implies a zero crossing of the underlying function).
    """
    if s.min_abs() < mu_min:
        raise NearZeroField(f"min |field| = {s.min_abs():.3e} < {mu_min:.3e}")
    if require_constant_sign and not s.sign_constant():
        raise NearZeroField("field changes sign on the grid")
    vals = np.log(np.abs(s.values))
    evaluator = None
    partials = {}
    if s.evaluator is not None:
        f = s.evaluator
        evaluator = lambda U, V: np.log(np.abs(f(U, V)))
        if "u" in s.partials:
            fu = s.partials["u"]
            partials["u"] = lambda U, V: fu(U, V) / f(U, V)
        if "v" in s.partials:
            fv = s.partials["v"]
            partials["v"] = lambda U, V: fv(U, V) / f(U, V)
        if {"u", "v", "uv"} <= set(s.partials):
            fu, fv, fuv = s.partials["u"], s.partials["v"], s.partials["uv"]
            partials["uv"] = lambda U, V: fuv(U, V) / f(U, V) - fu(U, V) * fv(U, V) / f(U, V) ** 2
    return ScalarField(s.grid, vals, evaluator=evaluator, partials=partials)


def sqrt_abs(s: ScalarField, mu_min: float = MU_MIN) -> ScalarField:
    """Pointwise sqrt|s| with first-order analytic partials when available."""
    if s.min_abs() < mu_min:
        raise NearZeroField(f"min |field| = {s.min_abs():.3e} < {mu_min:.3e}")
    vals = np.sqrt(np.abs(s.values))
    evaluator = None
    partials = {}
    if s.evaluator is not None:
        f = s.evaluator
        evaluator = lambda U, V: np.sqrt(np.abs(f(U, V)))
        for key in ("u", "v"):
            if key in s.partials:
                fk = s.partials[key]
                partials[key] = (
                    lambda U, V, fk=fk: np.sign(f(U, V)) * fk(U, V) / (2.0 * np.sqrt(np.abs(f(U, V))))
                )
    return ScalarField(s.grid, vals, evaluator=evaluator, partials=partials)


# ---------------------------------------------------------------------------
# resampling


def spline_of(s: ScalarField) -> RectBivariateSpline:
    return RectBivariateSpline(s.grid.u_nodes, s.grid.v_nodes, s.values, kx=3, ky=3, s=0)


def resample(s: ScalarField, new_u: np.ndarray, new_v: np.ndarray) -> ScalarField:
    """Bicubic resampling onto a new uniform node set inside the domain."""
    new_u = np.asarray(new_u, dtype=float)
    new_v = np.asarray(new_v, dtype=float)
    g = s.grid
    pad_u = 1e-12 * (g.u1 - g.u0)
    pad_v = 1e-12 * (g.v1 - g.v0)
    if new_u.min() < g.u0 - pad_u or new_u.max() > g.u1 + pad_u:
        raise OutOfDomain("u nodes leave the source domain")
    if new_v.min() < g.v0 - pad_v or new_v.max() > g.v1 + pad_v:
        raise OutOfDomain("v nodes leave the source domain")
    if np.any(np.diff(new_u) <= 0) or np.any(np.diff(new_v) <= 0):
        raise ValueError("new nodes must be strictly increasing")
    hu = np.diff(new_u)
    hv = np.diff(new_v)
    if np.ptp(hu) > 1e-9 * (new_u[-1] - new_u[0]) or np.ptp(hv) > 1e-9 * (new_v[-1] - new_v[0]):
        raise ValueError("resample targets must be uniform node sets")
    new_grid = GridSpec(new_u[0], new_u[-1], new_v[0], new_v[-1], len(new_u), len(new_v))
    vals = spline_of(s)(np.clip(new_u, g.u0, g.u1), np.clip(new_v, g.v0, g.v1))
    return ScalarField(new_grid, vals)
