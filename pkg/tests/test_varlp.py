import math

import numpy as np
import pytest
from scipy import integrate

from lagvar.semigroup import Expansion
from lagvar.varlp import (
    DiscreteFunction,
    ExponentField,
    TensorGrid,
    a_epsilon,
    class_constants,
    conjugate,
    holder_check,
    lift_check,
    lift_exponent_radial,
    luxemburg_norm,
    modular,
)

DECAY = ExponentField.decay_power(2.0, 1.0, 2.0)


@pytest.fixture(scope="module")
def grid():
    return TensorGrid.laguerre((0.0,), 60)


def test_grid_masses():
    for a in [(0.0,), (0.5,), (0.0, 1.0)]:
        g = TensorGrid.laguerre(a, 30)
        assert g.weights("mu_alpha").sum() == pytest.approx(1.0, rel=1e-13)
    g = TensorGrid.panels((0.0,), 3.0, 10)
    assert g.weights("lebesgue").sum() == pytest.approx(3.0, rel=1e-13)
    assert g.weights("m_alpha").sum() == pytest.approx(4.5, rel=1e-13)
    with pytest.raises(ValueError):
        g.weights("counting")


def test_modular_examples(grid):
    zero = DiscreteFunction(grid, np.zeros(grid.shape))
    assert modular(zero, DECAY) == 0.0
    lag = Expansion.single((0.0,), (3,)).on_grid(grid)
    assert modular(lag, ExponentField.constant(2.0)) == pytest.approx(1.0, abs=1e-8)
    fine = TensorGrid.panels((0.0,), 8.0, 64, 8)
    half = DiscreteFunction(fine, np.full(fine.shape, 0.5))
    want = integrate.quad(lambda x: 0.5 ** (2 + 1 / (math.e + x) ** 2) * 2 * x * math.exp(-x * x), 0, np.inf,
                          epsabs=1e-14, epsrel=1e-13)[0]
    got = modular(half, DECAY)
    assert 0 < got <= 1
    assert got == pytest.approx(want, rel=1e-10)


def test_luxemburg_constant_exponent_is_classical(grid):
    rng = np.random.default_rng(1)
    f = DiscreteFunction(grid, rng.normal(size=grid.shape))
    w = grid.weights()
    for p in (1.0, 1.5, 2.0, 4.0):
        classical = np.sum(np.abs(f.values) ** p * w) ** (1 / p)
        assert luxemburg_norm(f, ExponentField.constant(p)) == pytest.approx(classical, rel=1e-8)


def test_luxemburg_homogeneity_and_unit_modular(grid):
    rng = np.random.default_rng(2)
    f = DiscreteFunction(grid, rng.normal(size=grid.shape))
    res = luxemburg_norm(f, DECAY, full=True)
    assert res.modular_at_norm == pytest.approx(1.0, abs=1e-8)
    for c in rng.uniform(-5, 5, 5):
        assert luxemburg_norm(f * c, DECAY) == pytest.approx(abs(c) * res.norm, rel=1e-10)
    assert luxemburg_norm(DiscreteFunction(grid, np.zeros(grid.shape)), DECAY) == 0.0


def test_luxemburg_triangle_and_monotone_modular(grid):
    rng = np.random.default_rng(4)
    for _ in range(20):
        f = DiscreteFunction(grid, rng.normal(size=grid.shape))
        g = DiscreteFunction(grid, rng.normal(size=grid.shape))
        lhs = luxemburg_norm(f + g, DECAY)
        assert lhs <= luxemburg_norm(f, DECAY) + luxemburg_norm(g, DECAY) + 1e-8
        mods = [modular(f * (1 / lam), DECAY) for lam in (0.5, 1.0, 2.0, 4.0)]
        assert all(a > b for a, b in zip(mods, mods[1:]))


def test_conjugate_examples():
    x = np.array([[0.3]])
    assert conjugate(ExponentField.constant(2.0))(x) == pytest.approx(2.0)
    assert conjugate(ExponentField.constant(4.0))(x) == pytest.approx(4 / 3)
    xr = math.sqrt(10.0) - math.e  # p(x) = 2.1 here
    assert DECAY(np.array([[xr]]))[0] == pytest.approx(2.1)
    assert conjugate(DECAY)(np.array([[xr]]))[0] == pytest.approx(2.1 / 1.1)
    with pytest.raises(ValueError):
        conjugate(ExponentField.constant(1.0))


def test_holder_examples(grid):
    rng = np.random.default_rng(5)
    f = DiscreteFunction(grid, rng.normal(size=grid.shape))
    zero = DiscreteFunction(grid, np.zeros(grid.shape))
    assert holder_check(f, zero, DECAY)[0] == 0.0
    ratio, _ = holder_check(f, f, ExponentField.constant(2.0))
    assert ratio == pytest.approx(0.5, rel=1e-10)
    fs = [DiscreteFunction(grid, np.abs(rng.normal(size=grid.shape))) for _ in range(30)]
    gs = [DiscreteFunction(grid, np.abs(rng.normal(size=grid.shape))) for _ in range(30)]
    ratio, ok = holder_check(fs, gs, DECAY)
    assert ok and ratio <= 1.0


def test_class_constants():
    rng = np.random.default_rng(6)
    xs = rng.uniform(0, 50, (2000, 2))
    ys = xs + rng.uniform(-0.3, 0.3, xs.shape)
    const = ExponentField.constant(3.0)
    for which, probes in [("LH0", (xs, ys)), ("LHinf", xs), ("Pe_inf", xs)]:
        assert class_constants(const, which, probes)[0] == 0.0
        c, finite = class_constants(DECAY, which, probes)
        assert finite and c > 0
    # for this family |p - p_infty| |x|^2 <= 1
    assert class_constants(DECAY, "Pe_inf", xs)[0] <= 1.0
    with pytest.raises(ValueError):
        class_constants(DECAY, "LH7", xs)


def test_lift():
    lifted = lift_exponent_radial(DECAY, (2,))
    assert (lifted.p_minus, lifted.p_plus) == (DECAY.p_minus, DECAY.p_plus)
    c = lift_exponent_radial(ExponentField.constant(3.0), (3, 2))
    assert c(np.ones((4, 5))) == pytest.approx(3.0)
    rng = np.random.default_rng(7)
    xb = rng.normal(size=(500, 2)) * 5
    yb = xb + rng.normal(size=xb.shape) * 0.1
    out, dominated = lift_check(DECAY, (2,), xb, yb)
    assert dominated
    assert out["LHinf"][0] == pytest.approx(out["LHinf"][1], rel=1e-12)


def test_exponent_config_and_a_epsilon():
    p = ExponentField.from_config({"kind": "decay-power", "p_infty": 2.0, "A": 1.0, "q": 2.0})
    assert p.p_minus == 2.0 and p.p_plus == pytest.approx(2 + math.e ** -2)
    assert a_epsilon(p, 0.2) == pytest.approx(0.4 - 0.1)
    with pytest.raises(ValueError):
        ExponentField.from_config({"kind": "decay-power", "p_infty": 2.0, "A": 1.0, "q": 2.0, "r": 1})
    t = ExponentField.tabulated([[0.0, 1.0, 2.0]], [3.0, 2.5, 2.0])
    assert t(np.array([[0.5], [9.0]])) == pytest.approx([2.75, 2.0])
