import math

import numpy as np
import pytest
from scipy import integrate

from lagvar.geometry import KernelContext, cutoff_value
from lagvar.operators import (
    MultiplierSpec,
    default_epsilon,
    g_function,
    global_maximal_bound_check,
    h_apply,
    h_kernel,
    log_v,
    maximal_heat,
    maximal_poisson,
    multiplier_apply,
    multiplier_expansion,
    multiplier_kernel,
    multiplier_values,
    riesz_kernel,
    riesz_polynomial,
    riesz_spectral,
    t_grid,
    vt_analyze,
)
from lagvar.semigroup import Expansion, dt_heat_kernel
from lagvar.specfun import PolyCoeffs
from lagvar.varlp import DiscreteFunction, ExponentField, TensorGrid

A0 = (0.0,)


def ctx1(x, y, s, alpha=A0):
    return KernelContext(alpha, [x], [y], [s])


def test_vt_branches():
    v = vt_analyze(ctx1(3.0, 2.0, 0.0))
    assert v.branch == "b_nonpositive"
    assert v.sup_value == pytest.approx(math.exp(-4.0))
    assert v.grid_sup <= (1 + 1e-6) * math.exp(-4.0)
    # a = |x|^2 + |y|^2 = 5, b = 2 x y s = 3
    c = KernelContext(A0, [1.0], [2.0], [0.75])
    v = vt_analyze(c, c0=1.0)
    assert (v.a, v.b) == pytest.approx((5.0, 3.0))
    assert v.t0 == pytest.approx(8 / 9)


def test_vt_comparability_on_global_point():
    v = vt_analyze(ctx1(1.0, 6.0, 0.9))
    assert v.branch == "b_positive"
    assert 0.1 <= v.comparability <= 10


def test_vt_rejects_local():
    with pytest.raises(ValueError):
        vt_analyze(ctx1(2.0, 2.0, 0.999))


def test_log_v_matches_direct_formula():
    c = ctx1(1.5, 2.5, 0.4)
    t = np.array([0.01, 0.3, 0.9])
    q = (np.sqrt(1 - t) * 1.5 - 2.5 * 0.4) ** 2 + 2.5 ** 2 * (1 - 0.16)
    np.testing.assert_allclose(log_v(c, t), -q / t - np.log(t), rtol=1e-13)


def test_h_kernel_examples():
    assert h_kernel(A0, 0.3, ctx1(1.0, 2.0, 0.0)) == pytest.approx(math.exp(-0.7 * 4))
    want = 7 * math.exp(-(3 + math.sqrt(21)) / 2)
    assert h_kernel(A0, 0.0, ctx1(1.0, 2.0, 0.5)) == pytest.approx(want, rel=1e-13)
    c = ctx1(1.0, 2.0, 0.5)
    vals = [h_kernel(A0, e, c) for e in (0.0, 0.3, 0.6, 0.9, 0.99)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        h_kernel(A0, 1.0, c)


def _h_apply_nested_oracle(x, eps, c0):
    # the (1 - s^2)^(-1/2) endpoint singularity goes into quad's algebraic weight
    def inner(y):
        def part(s, sign):
            v = sign * s
            h = h_kernel(A0, eps, ctx1(x, y, v))
            phi = cutoff_value(np.array([x]), np.array([y]), np.array([v]), c0)
            return h * (1 - phi) / (math.pi * math.sqrt(1 + s))
        tot = sum(integrate.quad(part, 0, 1, args=(sg,), weight="alg", wvar=(0, -0.5), limit=200,
                                 epsabs=1e-16, epsrel=1e-10)[0] for sg in (1.0, -1.0))
        return tot * 2 * y * math.exp(-y * y)
    return integrate.quad(inner, 0, 12, limit=400, epsabs=1e-15, epsrel=1e-8)[0]


def test_h_apply_against_nested_quadrature():
    g = TensorGrid.panels(A0, 8.0, 64, 8)
    one = DiscreteFunction(g, np.ones(g.shape))
    got = h_apply(one, A0, 0.2, np.array([[1.0]]))[0]
    want = _h_apply_nested_oracle(1.0, 0.2, 9.0)
    assert got > 0
    assert got == pytest.approx(want, rel=1e-3)
    zero = DiscreteFunction(g, np.zeros(g.shape))
    assert h_apply(zero, A0, 0.2, np.array([[1.0]]))[0] == 0.0


def test_h_apply_flags_out_of_range_epsilon():
    g = TensorGrid.laguerre(A0, 10)
    one = DiscreteFunction(g, np.ones(g.shape))
    p = ExponentField.constant(2.0)
    with pytest.warns(RuntimeWarning):
        h_apply(one, A0, 0.9, np.array([[1.0]]), p=p)
    assert default_epsilon(A0, p) == pytest.approx(0.25)


def test_maximal_heat_examples():
    x = np.linspace(0.1, 3, 7)[:, None]
    one = Expansion.single(A0, (0,))
    for pts in (20, 40, 80):
        np.testing.assert_array_equal(maximal_heat(one, x, np.geomspace(1e-3, 20, pts)), 1.0)
    f = Expansion.single(A0, (2,))
    np.testing.assert_allclose(maximal_heat(f, x, np.geomspace(1e-3, 20, 30)), np.abs(f.evaluate(x)), rtol=1e-14)


def test_maximal_grid_refinement_is_monotone_and_poisson_dominated():
    rng = np.random.default_rng(0)
    f = Expansion.full(A0, 8, rng.normal(size=9))
    x = np.linspace(0.1, 3, 15)[:, None]
    coarse, fine = np.geomspace(1e-3, 20, 30), np.geomspace(1e-3, 20, 59)
    assert np.all(maximal_heat(f, x, fine) >= maximal_heat(f, x, coarse) - 1e-15)
    dense = np.geomspace(1e-4, 50, 3000)
    w = maximal_heat(f, x, dense, refine=True)
    p = maximal_poisson(f, x, coarse)
    assert np.all(p <= w + 1e-8)
    with pytest.raises(ValueError):
        maximal_heat(f, x, [])


def test_global_maximal_bound_check():
    rng = np.random.default_rng(1)
    xs, ys, ss = rng.uniform(0, 3, 200), rng.uniform(3, 8, 200), rng.uniform(-1, 1, 200)
    rep = global_maximal_bound_check(A0, xs[:, None], ys[:, None], ss[:, None], points=800)
    assert rep.samples + rep.rejected == 200 and rep.samples > 0
    assert 1.0 <= rep.comparability <= 100
    assert math.isfinite(rep.bound_constant) and abs(rep.bound_drift - 1) <= 0.15
    assert rep.nonpositive_excess <= 1e-6
    neg = global_maximal_bound_check(A0, np.array([[1.0]]), np.array([[5.0]]), np.array([[-0.3]]))
    assert neg.bound_constant == pytest.approx(1.0, rel=1e-6)
    local = global_maximal_bound_check(A0, np.array([[2.0]]), np.array([[2.0]]), np.array([[0.999]]))
    assert (local.samples, local.rejected) == (0, 1)


def test_riesz_spectral_examples():
    x = np.linspace(0.1, 3, 9)[:, None]
    np.testing.assert_allclose(riesz_spectral(Expansion.single(A0, (0,)), 1, x), 0.0)
    np.testing.assert_allclose(riesz_spectral(Expansion.single(A0, (1,)), 1, x), -2 * x[:, 0], rtol=1e-14)
    assert riesz_polynomial(1, 0.0, 1) == PolyCoeffs([0.0, -2.0])
    g = TensorGrid.laguerre(A0, 20)
    r = riesz_spectral(Expansion.single(A0, (1,)), 1, g).values
    assert math.sqrt(np.sum(r ** 2 * g.weights())) == pytest.approx(2.0, rel=1e-12)
    with pytest.raises(ValueError):
        riesz_spectral(Expansion.single(A0, (1,)), 0, x)


def test_riesz_kernel_matches_heat_derivative_integral():
    # kernel of D Delta^{-1/2}: (1/Gamma(1/2)) int tau^{-1/2} d_x W_tau dtau
    x, y, h = 0.8, 2.1, 1e-5

    def dxw(tau):
        from lagvar.semigroup import heat_kernel_bessel
        return (heat_kernel_bessel(A0, tau, np.array([x + h]), np.array([y]))
                - heat_kernel_bessel(A0, tau, np.array([x - h]), np.array([y]))) / (2 * h)

    val = integrate.quad(lambda lt: math.exp(0.5 * lt) * dxw(math.exp(lt)), -12, 5, limit=400)[0]
    want = val / math.gamma(0.5)
    got = riesz_kernel(A0, 1, np.array([x]), np.array([y]))
    assert got == pytest.approx(want, rel=1e-4)
    again = riesz_kernel(A0, 2, np.array([x]), np.array([y]))
    assert again == riesz_kernel(A0, 2, np.array([x]), np.array([y]))


def test_g_function_examples():
    g = TensorGrid.laguerre(A0, 40)
    pts = g.points()
    w = g.weights()
    assert np.all(g_function(Expansion.single(A0, (0,)), 0, 1, pts) == 0)
    for r in (1, 2, 5):
        f = Expansion.single(A0, (r,))
        vals = g_function(f, 0, 1, pts)
        np.testing.assert_allclose(vals, np.abs(f.evaluate(pts)) / 2, rtol=1e-10, atol=1e-12)
        assert math.sqrt(np.sum(vals ** 2 * w)) == pytest.approx(0.5, abs=1e-6)
    f = Expansion.single(A0, (3,))
    for k in (1, 2, 3):
        norm = math.sqrt(np.sum(g_function(f, 0, k, pts) ** 2 * w))
        assert norm == pytest.approx(math.sqrt(math.gamma(2 * k)) / 2 ** k, abs=1e-5)
    with pytest.raises(ValueError):
        g_function(f, 0, 0, pts)


def test_multiplier_examples():
    rng = np.random.default_rng(2)
    f = Expansion.full(A0, 12, rng.normal(size=13))
    ip = multiplier_expansion(f, MultiplierSpec.imaginary_power(0.7))
    np.testing.assert_allclose(np.abs(ip.coeffs[1:]), np.abs(f.coeffs[1:]), rtol=1e-15)
    assert ip.coeffs[0] == 0
    one = multiplier_expansion(f, MultiplierSpec.constant(1.0))
    np.testing.assert_allclose(one.coeffs[1:], f.coeffs[1:], atol=1e-10)
    assert one.coeffs[0] == 0
    x = np.linspace(0.1, 3, 9)[:, None]
    np.testing.assert_allclose(multiplier_apply(f, MultiplierSpec.constant(1.0), x),
                               f.evaluate(x) - f.coeffs[0], atol=1e-10)


def test_multiplier_values_and_sup_bound():
    spec = MultiplierSpec(lambda t: np.cos(t), "custom", 0.0, 1.0)
    lam = np.arange(0, 20.0)
    m = multiplier_values(spec, lam)
    # lam int cos(y) e^{-lam y} dy = lam^2 / (lam^2 + 1)
    np.testing.assert_allclose(m[1:], lam[1:] ** 2 / (lam[1:] ** 2 + 1), rtol=1e-12)
    f = Expansion.full(A0, 19, np.random.default_rng(3).normal(size=20))
    assert multiplier_expansion(f, spec).norm2() <= np.max(np.abs(m)) * f.norm2() + 1e-10


def test_multiplier_kernel_examples():
    x, y = np.array([0.5]), np.array([2.0])
    assert multiplier_kernel(A0, MultiplierSpec.constant(1.0), x, y) == pytest.approx(-1.0, abs=1e-4)
    assert multiplier_kernel(A0, MultiplierSpec.constant(0.0), x, y) == 0.0
    spec = MultiplierSpec(lambda t: np.exp(-t), "custom", 0.0, 1.0)
    want = integrate.quad(lambda t: math.exp(-t) * -dt_heat_kernel(A0, t, x, y), 0, 60, limit=400, points=[0.1, 1])[0]
    assert multiplier_kernel(A0, spec, x, y) == pytest.approx(want, rel=1e-6)
