import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lagvar.geometry import (
    KernelContext,
    RegionParams,
    build_ball_system,
    cutoff_phi,
    cz_regularity_check,
    cz_size_check,
    malpha_ball,
    malpha_ball_many,
    q_forms,
    region_classify,
)

pos = st.floats(0.01, 10.0)
unit = st.floats(-0.999, 0.999)


def test_q_forms_examples():
    qp, qm = q_forms([1.0, 2.0], [2.0, 1.0], [0.0, 0.0])
    assert qp == qm == pytest.approx(10.0)
    qp, qm = q_forms([1.0, 2.0], [2.0, 1.0], [0.5, -0.5])
    assert qp == pytest.approx(10.0) and qm == pytest.approx(10.0)
    qp, qm = q_forms([1.0], [1.0], [1.0 - 1e-12])
    assert qm == pytest.approx(0.0, abs=1e-10) and qp == pytest.approx(4.0)


@settings(max_examples=200, deadline=None)
@given(pos, pos, pos, pos, unit, unit)
def test_q_product_bound(x1, x2, y1, y2, s1, s2):
    x, y = np.array([x1, x2]), np.array([y1, y2])
    qp, qm = q_forms(x, y, [s1, s2])
    gap = (x @ x - y @ y) ** 2
    assert qp >= 0 and qm >= 0
    assert qp * qm >= gap - 1e-12 * (x @ x + y @ y) ** 2


def test_region_examples():
    ctx = KernelContext((0.0,), [10.0], [0.1], [0.0])
    assert region_classify(ctx, RegionParams(1.0, 9.0)) == "global"
    ctx = KernelContext((0.0,), [3.0], [3.0], [1.0])
    assert region_classify(ctx, RegionParams(1e-3, 9.0)) == "local"


def test_default_region_constant():
    p = RegionParams.default((0.0, 1.0))
    assert p.c0 == pytest.approx(8 * 3 + 1)
    assert p.admissible_for_maximal((0.0, 1.0))


def test_cutoff_limits():
    ctx = KernelContext((0.0,), [2.0], [2.0], [1.0])
    v, gx, gy = cutoff_phi(ctx, 9.0)
    assert v == pytest.approx(1.0)
    np.testing.assert_allclose(gx, 0.0, atol=1e-14)
    np.testing.assert_allclose(gy, 0.0, atol=1e-14)
    ctx = KernelContext((0.0,), [20.0], [0.1], [0.0])
    assert cutoff_phi(ctx, 9.0)[0] == 0.0


def test_cutoff_gradient_matches_finite_differences():
    rng = np.random.default_rng(3)
    c0, h = 9.0, 1e-6
    checked = 0
    for _ in range(200):
        x, y, s = rng.uniform(0.2, 3, 2), rng.uniform(0.2, 3, 2), rng.uniform(-1, 1, 2)
        v, gx, gy = cutoff_phi(KernelContext((0.0, 0.5), x, y, s), c0)
        if not 0.02 < v < 0.98:
            continue
        checked += 1
        for i in range(2):
            e = np.eye(2)[i] * h
            fx = (cutoff_phi(KernelContext((0.0, 0.5), x + e, y, s), c0)[0]
                  - cutoff_phi(KernelContext((0.0, 0.5), x - e, y, s), c0)[0]) / (2 * h)
            fy = (cutoff_phi(KernelContext((0.0, 0.5), x, y + e, s), c0)[0]
                  - cutoff_phi(KernelContext((0.0, 0.5), x, y - e, s), c0)[0]) / (2 * h)
            assert gx[i] == pytest.approx(fx, rel=1e-5, abs=1e-7)
            assert gy[i] == pytest.approx(fy, rel=1e-5, abs=1e-7)
    assert checked > 5


def test_malpha_ball_examples():
    exact, closed, ratio = malpha_ball((0.0,), [2.0], 1.0)
    assert isinstance(exact, float)
    assert exact == pytest.approx(4.0)
    assert malpha_ball((0.0,), [0.0], 1.0)[0] == pytest.approx(0.5)
    np.testing.assert_allclose(malpha_ball_many((0.0,), [[2.0], [0.0]], [1.0, 1.0]), [4.0, 0.5])


def test_malpha_ball_two_dims_against_closed_form():
    # alpha = 0 in 2d: density x1 x2, ball far from the axes
    exact = malpha_ball((0.0, 0.0), [3.0, 4.0], 0.5)[0]
    r = 0.5
    # int over disc of (3+u)(4+v) = 12 * area (odd moments vanish)
    assert exact == pytest.approx(12 * math.pi * r * r, rel=1e-8)
    for c, r in [([0.5, 1.0], 0.7), ([2.0, 0.1], 3.0)]:
        ratio = malpha_ball((0.0, 1.0), c, r)[2]
        assert 0 < ratio < 100


def test_ball_system_examples():
    sys1 = build_ball_system(0.4, 2.0)
    assert len(sys1) == 1 and sys1.cover_gap == 0.0
    sys5 = build_ball_system(5.0, 2.0)
    assert sys5.max_overlap <= 8
    np.testing.assert_array_equal(sys5.radii, 1.0 / (2.0 * (1.0 + np.linalg.norm(sys5.centers, axis=1))))
    assert math.isfinite(sys5.measure_constant)
    with pytest.raises(ValueError):
        build_ball_system(1.0, 1.0)


def test_cz_trivial_kernels():
    rng = np.random.default_rng(0)
    xs, ys = rng.uniform(0.1, 4, (50, 1)), rng.uniform(0.1, 4, (50, 1))
    a = (0.0,)

    def inv_mass(x, y):
        return 1.0 / malpha_ball_many(a, x, np.linalg.norm(x - y))[0]

    rep = cz_size_check(inv_mass, a, xs, ys)
    assert rep.constant == pytest.approx(1.0, rel=1e-12)
    assert cz_size_check(lambda x, y: 0.0, a, xs, ys).constant == 0.0
    zs = xs + 0.1 * (ys - xs)
    assert cz_regularity_check(lambda x, y: 3.0, a, xs, ys, zs).constant == 0.0
    rep = cz_regularity_check(inv_mass, a, xs, ys, zs)
    assert math.isfinite(rep.constant) and rep.constant > 0
    far = xs + 0.9 * (ys - xs)
    assert cz_regularity_check(inv_mass, a, xs, ys, far).skipped == len(xs)
