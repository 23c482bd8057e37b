import numpy as np
import pytest

from minksurf.errors import ValidationError
from minksurf.fixtures import jet_seed, jet_triple
from minksurf.jets import JetSeed, jet_manufacture, p_diff_u, p_eval, p_exp, p_mul, p_zero
from minksurf.natural import Case, residual


def test_poly_mul_and_eval():
    n = 5
    a = p_zero(n)
    a[1, 0] = 1.0  # U
    b = p_zero(n)
    b[0, 2] = 3.0  # 3 V^2
    c = p_mul(a, b, n)
    assert c[1, 2] == 3.0
    X = np.linspace(-1, 1, 7)[:, None]
    Y = np.linspace(-1, 1, 5)[None, :]
    assert np.allclose(p_eval(c, X, Y), 3 * X * Y**2)


def test_poly_exp_matches_series():
    n = 6
    g = p_zero(n)
    g[0, 0] = 0.3
    g[1, 0] = 0.5
    g[0, 1] = -0.25
    e = p_exp(g, n)
    X = np.full((1, 1), 0.05)
    Y = np.full((1, 1), -0.04)
    exact = np.exp(0.3 + 0.5 * 0.05 - 0.25 * -0.04)
    assert abs(p_eval(e, X, Y)[0, 0] - exact) < 1e-12


def test_poly_diff():
    n = 4
    a = p_zero(n)
    a[3, 1] = 2.0
    d = p_diff_u(a)
    assert d[2, 1] == 6.0


def test_constants_seed_reproduces_exact_solution():
    seed = JetSeed.constants(2, 0.0, 1.0, 1.0)
    t = jet_manufacture(Case.NEGATIVE_KH, 2, seed, radius=0.3)
    assert residual(t).max_abs == 0.0
    assert np.max(np.abs(t.lam.values)) == 0.0
    assert np.max(np.abs(t.mu.values - 1.0)) == 0.0
    assert np.max(np.abs(t.nu.values - 1.0)) == 0.0


def test_positive_case_residual_and_radius_scaling():
    t1 = jet_triple(Case.POSITIVE_KH, order=6, radius=0.1, nodes=65)
    r1 = residual(t1).interior_max_abs
    assert r1 <= 1e-4
    t2 = jet_triple(Case.POSITIVE_KH, order=6, radius=0.05, nodes=65)
    r2 = residual(t2).interior_max_abs
    # truncation scales like r^(order-1) = r^5; allow some slack
    assert r1 / r2 >= 2 ** 4.5, (r1, r2)


def test_degenerate_case_nu_independent_of_v():
    t = jet_triple(Case.DEGENERATE, order=6, radius=0.1, nodes=33)
    assert np.max(np.abs(np.diff(t.nu.values, axis=1))) == 0.0
    assert residual(t).interior_max_abs <= 1e-3


def test_negative_case_manufacture():
    t = jet_triple(Case.NEGATIVE_KH, order=6, radius=0.1, nodes=33)
    assert residual(t).interior_max_abs <= 1e-3


def test_seed_length_validation():
    seed = JetSeed(np.zeros(3), np.zeros(3), np.zeros(3), np.zeros(3))
    with pytest.raises(ValidationError):
        jet_manufacture(Case.POSITIVE_KH, 6, seed)
    with pytest.raises(ValidationError):
        jet_manufacture(Case.POSITIVE_KH, 1, jet_seed(1))


def test_negative_sign_mu():
    rng = np.random.default_rng(3)
    s = JetSeed.random(6, rng, amplitude=0.4)
    s.sign_mu = -1
    t = jet_manufacture(Case.POSITIVE_KH, 6, s, radius=0.1, nodes=33)
    assert np.all(t.mu.values < 0)
    assert residual(t).interior_max_abs <= 1e-3


def test_analytic_partials_attached():
    t = jet_triple(Case.POSITIVE_KH, order=4, radius=0.1, nodes=33)
    assert "uv" in t.mu.partials
    assert "u" in t.lam.partials and "v" in t.nu.partials
    # evaluator consistency at nodes
    U, V = t.grid.mesh()
    assert np.max(np.abs(t.lam.values - t.lam.evaluator(U, V))) < 1e-14
