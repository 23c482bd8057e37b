import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minksurf.errors import BlowUp, BothMuZero, NearZeroField, ValidationError
from minksurf.fields import GridSpec, ScalarField
from minksurf.fixtures import (
    constant_triple,
    degenerate_g_exact,
    goursat_degenerate_triple,
    goursat_hyperbolic_triple,
    nonsolution_triple,
)
from minksurf.natural import (
    CanonicalTriple,
    Case,
    classify_from_frame,
    residual,
    solve_goursat_degenerate,
    solve_goursat_hyperbolic,
)

G65 = GridSpec(0, 1, 0, 1, 65, 65)


# ---------------------------------------------------------------------------
# residual


def test_constant_solution_residual_zero():
    rep = residual(constant_triple(65))
    assert rep.max_abs <= 1e-12


def test_nonsolution_residual_values():
    # (lambda, mu, nu) = (1, e, u), eps = +1: r1 = 1, r2 = 0, r3 = 1 + e^2 at (0, 0)
    rep = residual(nonsolution_triple(65))
    assert abs(rep.r1.values[0, 0] - 1.0) < 1e-10
    assert abs(rep.r2.values[0, 0]) < 1e-10
    assert abs(rep.r3.values[0, 0] - (1.0 + np.e**2)) < 1e-8


def test_goursat_degenerate_residual_convergence():
    errs = []
    for n in (33, 65, 129):
        tri = goursat_degenerate_triple(n)
        errs.append(residual(tri).interior_max_abs)
    slopes = [np.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert min(slopes) >= 1.8, (errs, slopes)


def test_residual_nu_shift_changes_only_r3():
    tri = goursat_degenerate_triple(33)
    base = residual(tri)
    c = 0.37
    shifted = CanonicalTriple(
        lam=tri.lam,
        mu=tri.mu,
        nu=ScalarField(tri.grid, tri.nu.values + c),
        case=Case.DEGENERATE,
    )
    rep = residual(shifted)
    # r1, r2 depend on nu only through derivatives
    assert np.max(np.abs(rep.r1.values - base.r1.values)) <= 1e-12
    assert np.max(np.abs(rep.r2.values - base.r2.values)) <= 1e-12
    expected = base.r3.values + 2 * tri.nu.values * c + c * c
    assert np.max(np.abs(rep.r3.values - expected)) <= 1e-12


def test_degenerate_r3_independent_of_lambda():
    tri = goursat_degenerate_triple(33)
    other = CanonicalTriple(
        lam=ScalarField(tri.grid, tri.lam.values + np.sin(tri.grid.mesh()[0])),
        mu=tri.mu,
        nu=tri.nu,
        case=Case.DEGENERATE,
    )
    assert np.max(np.abs(residual(other).r3.values - residual(tri).r3.values)) <= 1e-12


def test_triple_validation():
    with pytest.raises(NearZeroField):
        CanonicalTriple(
            lam=ScalarField.constant(G65, 0.0),
            mu=ScalarField.constant(G65, 0.0),
            nu=ScalarField.constant(G65, 1.0),
            case=Case.NEGATIVE_KH,
        )
    U, _ = G65.mesh()
    with pytest.raises(ValidationError):
        # nu varying along v contradicts the degenerate case tag
        CanonicalTriple(
            lam=ScalarField.constant(G65, 0.0),
            mu=ScalarField.constant(G65, 1.0),
            nu=ScalarField(G65, G65.mesh()[1].copy()),
            case=Case.DEGENERATE,
        )


# ---------------------------------------------------------------------------
# classification


def test_classify_examples():
    case, km = classify_from_frame(0, 1, 0, 1)
    assert case is Case.NEGATIVE_KH and abs(km + 1) < 1e-14
    case, km = classify_from_frame(1, 1, -2, -2)
    assert case is Case.POSITIVE_KH and abs(km - 4) < 1e-14
    case, km = classify_from_frame(0, 1, 0, 0)
    assert case is Case.DEGENERATE
    with pytest.raises(BothMuZero):
        classify_from_frame(1, 0, 1, 0)


def test_classify_role_swap():
    # mu1 = 0, mu2 != 0: swaps internally instead of dividing by zero
    case, km = classify_from_frame(0, 0, 0, 2)
    assert case is Case.DEGENERATE or np.isfinite(km)


@given(
    st.floats(-2, 2),
    st.floats(0.05, 2),
    st.floats(0.05, 2),
    st.booleans(),
    st.booleans(),
)
@settings(max_examples=200)
def test_classify_sign_law(lam1, m1, m2, s1, s2):
    mu1 = m1 if s1 else -m1
    mu2 = m2 if s2 else -m2
    lam2 = lam1 * mu2 / mu1  # integrability-consistent
    case, km = classify_from_frame(lam1, mu1, lam2, mu2)
    expected = Case.NEGATIVE_KH if -mu1 * mu2 < 0 else Case.POSITIVE_KH
    assert case is expected
    assert np.sign(km) == np.sign(-mu1 * mu2)


# ---------------------------------------------------------------------------
# Goursat, degenerate case


def test_goursat_degenerate_rejects_constant_nu():
    with pytest.raises(ValidationError):
        solve_goursat_degenerate(
            lambda u: 0 * u, lambda u: 0 * u, lambda v: 0 * v, lambda u: 0 * u, 1, G65
        )


def test_goursat_degenerate_nu_copied_exactly():
    tri = goursat_degenerate_triple(33)
    assert np.max(np.abs(np.diff(tri.nu.values, axis=1))) == 0.0


def test_goursat_degenerate_matches_closed_form():
    # raised-edge data admits g = c + 2 ln(1 - (v/2) e^{-c} W(u)); the march
    # must approach it at second order
    errs = []
    for n in (33, 65, 129):
        tri = goursat_degenerate_triple(n)
        U, V = tri.grid.mesh()
        g_num = np.log(np.abs(tri.mu.values))
        errs.append(np.max(np.abs(g_num - degenerate_g_exact(U, V))))
    slopes = [np.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert min(slopes) >= 1.9, (errs, slopes)
    assert errs[-1] < 2e-5


def test_goursat_degenerate_zero_data_exists_on_subdomain():
    g = GridSpec(0, 0.7, 0, 0.7, 65, 65)
    tri = solve_goursat_degenerate(
        lambda u: 1 + u, lambda u: 0 * u, lambda v: 0 * v, lambda u: 0 * u, 1, g
    )
    assert residual(tri).interior_max_abs <= 1e-2


def test_goursat_degenerate_zero_data_blows_up_on_unit_square():
    # the closed-form solution is singular at v * int(nu^2) = 2, inside [0,1]^2
    with pytest.raises(BlowUp):
        solve_goursat_degenerate(
            lambda u: 1 + u, lambda u: 0 * u, lambda v: 0 * v, lambda u: 0 * u, 1, G65
        )


def test_goursat_degenerate_incompatible_corner():
    with pytest.raises(ValidationError):
        solve_goursat_degenerate(
            lambda u: 1 + u, lambda u: 1 + 0 * u, lambda v: 0 * v, lambda u: 0 * u, 1, G65
        )


# ---------------------------------------------------------------------------
# Goursat, hyperbolic case


def test_goursat_hyperbolic_constant_solution():
    g = GridSpec(0, 0.5, 0, 0.5, 33, 33)
    tri = solve_goursat_hyperbolic(
        lambda u: 1 + 0 * u, lambda v: 1 + 0 * v,
        lambda v: -1 + 0 * v, lambda u: -1 + 0 * u,
        lambda u: 0 * u, lambda v: 0 * v, g,
    )
    assert residual(tri).max_abs <= 1e-12
    assert np.max(np.abs(tri.lam.values)) == 0.0
    assert np.max(np.abs(tri.nu.values - 1.0)) == 0.0
    assert np.max(np.abs(tri.mu.values - 1.0)) == 0.0
    assert "nu-constant" in tri.flags


def test_goursat_hyperbolic_zero_nu_flagged():
    # p = q means nu = 0; the solver succeeds and flags the constant nu
    g = GridSpec(0, 0.5, 0, 0.5, 33, 33)
    tri = solve_goursat_hyperbolic(
        lambda u: 0.5 + 0 * u, lambda v: 0.5 + 0 * v,
        lambda v: 0.5 + 0 * v, lambda u: 0.5 + 0 * u,
        lambda u: 0 * u, lambda v: 0 * v, g,
    )
    assert "nu-constant" in tri.flags
    # numerical nu is upwind noise around zero, not exactly zero
    assert np.max(np.abs(tri.nu.values)) < 4 * (g.hu + g.hv)


def test_goursat_hyperbolic_convergence():
    errs = []
    for n in (33, 65, 129):
        errs.append(residual(goursat_hyperbolic_triple(n)).interior_max_abs)
    slopes = [np.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert min(slopes) >= 0.9, (errs, slopes)


def test_characteristic_reformulation_symbolic():
    sympy = pytest.importorskip("sympy")
    sp = sympy
    u, v = sp.symbols("u v")
    lam = sp.Function("lam")(u, v)
    nu = sp.Function("nu")(u, v)
    g = sp.Function("g")(u, v)
    r1 = sp.diff(nu, u) + sp.diff(lam, v) - lam * sp.diff(g, v)
    r2 = sp.diff(lam, u) + sp.diff(nu, v) - lam * sp.diff(g, u)  # eps = -1
    r3 = sp.exp(g) * sp.diff(g, u, v) + nu**2 - lam**2 - sp.exp(2 * g)
    p = lam + nu
    q = lam - nu
    c1 = sp.diff(p, u) + sp.diff(p, v) - lam * (sp.diff(g, u) + sp.diff(g, v))
    c2 = sp.diff(q, u) - sp.diff(q, v) - lam * (sp.diff(g, u) - sp.diff(g, v))
    c3 = sp.diff(g, u, v) - p * q * sp.exp(-g) - sp.exp(g)
    assert sp.simplify(c1 - (r1 + r2)) == 0
    assert sp.simplify(c2 - (r2 - r1)) == 0
    assert sp.simplify(sp.exp(g) * c3 - r3) == 0


def test_triple_diagnostics_flags():
    tri = constant_triple(33)
    d = tri.diagnostics()
    assert d["nu_constant"] is True
    tri2 = goursat_degenerate_triple(33)
    assert tri2.diagnostics()["nu_constant"] is False
