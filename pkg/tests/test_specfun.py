import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from lagvar.specfun import (
    AlphaParam,
    PolyCoeffs,
    bessel_i_scaled,
    hermite,
    laguerre_normalized,
    laguerre_tensor,
    log_gamma,
    make_rule,
    multi_indices,
)


def test_laguerre_k0_is_one():
    p = laguerre_normalized(0, 1.5)
    assert p.degree == 0
    assert p(3.7) == pytest.approx(1.0)


def test_laguerre_k1_alpha0():
    p = laguerre_normalized(1, 0.0)
    np.testing.assert_allclose(p.coeffs, [1.0, -1.0], atol=1e-14)


def test_laguerre_value_at_zero_is_sqrt_binomial():
    for a in (0.0, 0.5, 2.0):
        for k in range(6):
            want = math.sqrt(math.comb(k, k) if a == 0 else
                             math.exp(math.lgamma(a + k + 1) - math.lgamma(a + 1) - math.lgamma(k + 1)))
            assert laguerre_normalized(k, a)(0.0) == pytest.approx(want, rel=1e-12)
    assert laguerre_normalized(2, 0.0)(0.0) == pytest.approx(1.0)


def test_laguerre_against_scipy():
    u = np.linspace(0, 12, 30)
    for a in (0.0, 0.5, 2.0):
        for k in range(9):
            scale = math.exp(0.5 * (math.lgamma(k + 1) + math.lgamma(a + 1) - math.lgamma(k + a + 1)))
            want = scale * special.eval_genlaguerre(k, a, u)
            np.testing.assert_allclose(laguerre_normalized(k, a)(u), want, rtol=1e-10, atol=1e-10)


def test_laguerre_tensor_examples():
    assert laguerre_tensor((0, 0), (0.3, 1.0), (2.0, 5.0)) == pytest.approx(1.0)
    assert laguerre_tensor((1,), (0.0,), (2.0,)) == pytest.approx(-3.0)
    assert laguerre_tensor((1, 0), (0.0, 0.0), (1.0, 5.0)) == pytest.approx(0.0, abs=1e-14)


def test_domain_errors():
    with pytest.raises(ValueError):
        laguerre_tensor((1,), (0.0,), (1.0, 2.0))
    with pytest.raises(ValueError):
        laguerre_normalized(-1, 0.0)
    with pytest.raises(ValueError):
        laguerre_normalized(2, -0.5)
    with pytest.raises(ValueError):
        bessel_i_scaled(-1.0, 1.0)


def test_hermite_examples():
    np.testing.assert_allclose(hermite(0).coeffs, [1.0])
    np.testing.assert_allclose(hermite(1).coeffs, [0.0, 2.0])
    assert hermite(3)(1.0) == pytest.approx(-4.0)
    np.testing.assert_allclose(hermite(3).coeffs, [0, -12, 0, 8])


def test_polycoeffs_arithmetic():
    p = PolyCoeffs([1.0, 2.0])
    q = PolyCoeffs([0.0, 0.0, 3.0])
    assert (p * q)(2.0) == pytest.approx(5.0 * 12.0)
    assert (1.0 - p)(3.0) == pytest.approx(-6.0)
    assert q.deriv(2)(7.0) == pytest.approx(6.0)
    assert p.of_square()(3.0) == pytest.approx(19.0)


def test_bessel_examples():
    assert bessel_i_scaled(0.0, 0.0) == pytest.approx(1.0)
    want = math.exp(-1) * math.sqrt(2 / math.pi) * math.sinh(1.0)
    assert bessel_i_scaled(0.5, 1.0) == pytest.approx(want, rel=1e-13)
    assert want == pytest.approx(0.3449, abs=1e-4)
    assert bessel_i_scaled(2.0, 0.0) == 0.0


@pytest.mark.parametrize("nu", [-0.5, 0.0, 0.3, 1.0, 2.5, 7.0])
def test_bessel_against_mpmath(nu):
    for z in (1e-8, 0.01, 0.7, 3.0, 17.0, 30.0, 31.0, 200.0, 5e4):
        want = float(mpmath.besseli(nu, z) * mpmath.exp(-z))
        assert bessel_i_scaled(nu, z) == pytest.approx(want, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 6.0), st.floats(1e-3, 80.0))
def test_bessel_recurrence(nu, z):
    lhs = bessel_i_scaled(nu, z) - bessel_i_scaled(nu + 2, z)
    rhs = 2 * (nu + 1) / z * bessel_i_scaled(nu + 1, z)
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-300)


def test_log_gamma_examples():
    assert log_gamma(1.0) == pytest.approx(0.0, abs=1e-15)
    assert log_gamma(0.5) == pytest.approx(0.5723649429, abs=1e-10)
    assert log_gamma(11.0) == pytest.approx(math.log(math.factorial(10)), rel=1e-14)
    with pytest.raises(ValueError):
        log_gamma(0.0)


def test_rule_examples():
    r = make_rule("gauss-legendre", 1)
    np.testing.assert_allclose(r.nodes, [0.0], atol=1e-15)
    np.testing.assert_allclose(r.weights, [2.0])
    r = make_rule("gauss-laguerre", 2, alpha=0.0)
    np.testing.assert_allclose(np.sort(r.nodes), [2 - math.sqrt(2), 2 + math.sqrt(2)], rtol=1e-14)
    for n in (3, 17, 60):
        r = make_rule("gauss-jacobi", n, alpha=0.0)
        assert np.sum(r.weights) == pytest.approx(math.pi, rel=1e-13)


def test_rule_moments():
    r = make_rule("gauss-laguerre", 20, alpha=1.5)
    for j in range(10):
        want = math.gamma(j + 2.5)
        assert r.integrate(r.nodes ** j) == pytest.approx(want, rel=1e-12)
    r = make_rule("gauss-legendre", 10)
    assert r.integrate(r.nodes ** 18) == pytest.approx(2 / 19, rel=1e-13)


def test_rule_rejects_bad_order():
    with pytest.raises(ValueError):
        make_rule("gauss-legendre", 0)
    with pytest.raises(ValueError):
        make_rule("simpson", 4)


def test_alpha_param_and_indices():
    a = AlphaParam.of((0.0, 1.0))
    assert a.n == 2 and a.alpha_hat == 1.0
    with pytest.raises(ValueError):
        AlphaParam.of((-0.5,))
    idx = list(multi_indices(2, 2))
    assert len(idx) == 6
    assert all(sum(k) <= 2 for k in idx)
