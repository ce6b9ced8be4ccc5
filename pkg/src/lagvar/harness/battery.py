"""The verification battery: one function per acceptance criterion, each
returning rows whose pass flag is recomputable from value and tolerance."""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from ..geometry import KernelContext, RegionParams, cz_regularity_check, cz_size_check, is_local, q_forms
from ..operators import (
    MultiplierSpec,
    default_epsilon,
    g_function,
    global_maximal_bound_check,
    h_kernel,
    maximal_heat,
    maximal_poisson,
    multiplier_apply,
    multiplier_expansion,
    multiplier_global_ratio,
    multiplier_kernel,
    multiplier_values,
    riesz_kernel,
    riesz_majorant,
    riesz_polynomial,
    riesz_spectral,
    vt_analyze,
)
from ..semigroup import (
    Expansion,
    HeatEval,
    SubordinationRule,
    exp_derivative_factor,
    heat_apply,
    heat_kernel_bessel,
    heat_kernel_malpha,
    heat_kernel_sintegral,
    heat_kernel_spectral,
    log_gaussian_factor,
    poisson_apply,
)
from ..specfun import AlphaParam, PolyCoeffs, laguerre_normalized, laguerre_tensor_values, make_rule, multi_indices
from ..varlp import (
    DiscreteFunction,
    ExponentField,
    TensorGrid,
    class_constants,
    holder_check,
    lift_check,
    luxemburg_norm,
    modular,
)
from .experiments import FAMILIES, THEOREM_OPERATORS, default_resolution, ratio_cell

RELATIONS = ("<=", "<", ">=", "==")


@dataclass(frozen=True)
class Row:
    criterion: str
    experiment: str
    metric: str
    value: float
    tolerance: float
    relation: str = "<="

    @property
    def passed(self) -> bool:
        return row_passes(self.value, self.tolerance, self.relation)

    def fields(self):
        return (self.criterion, self.experiment, self.metric, self.value, self.tolerance, self.relation, self.passed)


def row_passes(value, tolerance, relation) -> bool:
    if relation == "<=":
        return bool(value <= tolerance)
    if relation == "<":
        return bool(value < tolerance)
    if relation == ">=":
        return bool(value >= tolerance)
    if relation == "==":
        return bool(value == tolerance)
    raise ValueError(f"unknown relation {relation!r}")


# (id, suite, title, gate): gate names the operator selection needed, if any
CRITERIA = [
    ("C01", "specfun", "orthonormality of normalized Laguerre functions", None),
    ("C02", "specfun", "eigenfunction identity, coefficientwise", None),
    ("C03", "semigroup", "heat kernel cross-validation", "any"),
    ("C04", "semigroup", "conservation and contraction", "any"),
    ("C05", "semigroup", "semigroup law", "any"),
    ("C06", "semigroup", "subordination and P_* <= W_*", "any"),
    ("C07", "geometry", "q_plus q_minus >= (|x|^2 - |y|^2)^2", None),
    ("C08", "operators", "global maximal analysis", ("maximal_heat", "maximal_poisson")),
    ("C09", "operators", "g-function eigenfunction identities", ("g_function",)),
    ("C10", "operators", "Riesz transforms", ("riesz",)),
    ("C11", "operators", "Laplace-type multipliers", ("multiplier",)),
    ("C12", "varlp", "variable exponent norms and classes", None),
    ("C13", "geometry", "local heat kernel size and regularity", None),
    ("C14", "semigroup", "degree-4 derivative structure", "any"),
    ("C15", "operators", "norm-ratio stability under doubling", "any"),
    ("C16", "harness", "determinism across thread counts", "any"),
]
SUITES = ("specfun", "geometry", "varlp", "semigroup", "operators", "harness")


def selected(cfg, gate) -> bool:
    if gate is None:
        return True
    ops = [op for op in cfg.operators if op in THEOREM_OPERATORS]
    if gate == "any":
        return bool(ops)
    return any(op in ops for op in gate)


def _rng(cfg, cid):
    return np.random.default_rng([cfg.seed, int(cid[1:])])


def _probe_points(n, values):
    values = np.asarray(values, dtype=float)
    if n == 1:
        return values[:, None]
    return np.stack([values, values[::-1] * 0.8 + 0.1], axis=-1)


def _one_dim_alpha(cfg):
    return cfg.alpha_param if cfg.n == 1 else AlphaParam.of(0.0)


def _random_expansion(alpha, kmax, rng, decay=0.0):
    idx = np.array(multi_indices(alpha.n, kmax), dtype=int).reshape(-1, alpha.n)
    c = rng.normal(size=len(idx)) / (1.0 + idx.sum(axis=1)) ** decay
    return Expansion(alpha, idx, c)


def _grid_norm2(values, grid):
    return float(np.sqrt(np.sum(np.abs(values) ** 2 * grid.weights("mu_alpha"))))


# ----------------------------------------------------------------------------

def c01(cfg):
    rows = []
    for alpha in [(0.0,), (0.5,), (2.0,), (0.0, 1.0)]:
        a = AlphaParam.of(alpha)
        idx = np.array(multi_indices(a.n, 10), dtype=int).reshape(-1, a.n)
        grid = TensorGrid.laguerre(a, 40)
        basis = laguerre_tensor_values(idx, a, grid.flat_points())
        gram = (basis * grid.weights("mu_alpha").ravel()) @ basis.T
        dev = float(np.max(np.abs(gram - np.eye(len(idx)))))
        rows.append(Row("C01", f"alpha={alpha}", "orthonormality_max_dev", dev, cfg.tolerance("orthonormality_max_dev", 1e-8)))
    return rows


def _laguerre_operator(p: PolyCoeffs, alpha: float) -> PolyCoeffs:
    """-(1/4)(p'' + (2 alpha + 1) p'/x) + (x/2) p' for an even polynomial p."""
    d1 = p.deriv(1)
    return (p.deriv(2) + d1.shift_down() * (2 * alpha + 1)) * -0.25 + PolyCoeffs([0.0, 0.5]) * d1


def c02(cfg):
    rows = []
    for alpha in (0.0, 0.5, 2.0):
        worst = 0.0
        for k in range(9):
            p = laguerre_normalized(k, alpha).of_square()
            diff = _laguerre_operator(p, alpha) - p * float(k)
            worst = max(worst, float(np.max(np.abs(diff.coeffs))))
        rows.append(Row("C02", f"alpha={alpha}", "eigen_coeff_max_dev", worst, cfg.tolerance("eigen_coeff_max_dev", 1e-10)))
    return rows


def c03(cfg):
    a = cfg.alpha_param
    pts = _probe_points(a.n, np.linspace(0.1, 3.0, 10))
    X, Y = pts[:, None, :], pts[None, :, :]
    rows = []
    for t in (0.05, 0.1, 0.5, 1.0, 2.0):
        wb = heat_kernel_bessel(a, t, X, Y)
        ws = heat_kernel_sintegral(a, t, X, Y)
        rel = float(np.max(np.abs(ws - wb) / np.abs(wb)))
        rows.append(Row("C03", f"t={t}", "bessel_vs_sintegral_rel", rel, cfg.tolerance("bessel_vs_sintegral_rel", 1e-8)))
        if t >= 0.5:
            wk = heat_kernel_spectral(a, t, X, Y, kmax=60)
            dev = float(np.max(np.abs(wk - wb) / np.maximum(1.0, np.abs(wb))))
            rows.append(Row("C03", f"t={t}", "spectral60_vs_bessel", dev, cfg.tolerance("spectral60_vs_bessel", 1e-6)))
    return rows


def _semigroup_grid(a):
    return TensorGrid.laguerre(a, 120)


def c04(cfg):
    a = cfg.alpha_param
    grid = _semigroup_grid(a)
    probes = _probe_points(a.n, np.linspace(0.1, 3.0, 10))
    one = DiscreteFunction(grid, np.ones(grid.shape))
    rows = []
    for t in (0.1, 0.5, 1.0, 2.0):
        dev = float(np.max(np.abs(heat_apply(one, HeatEval(a, t), probes) - 1.0)))
        rows.append(Row("C04", f"t={t}", "conservation_dev", dev, cfg.tolerance("conservation_dev", 1e-8)))
    rng = _rng(cfg, "C04")
    kmax = 10 if a.n == 1 else 6
    # W_t keeps the degree, so a small grid integrates |W_t f|^2 exactly
    small = TensorGrid.laguerre(a, kmax + 2)
    exps = [_random_expansion(a, kmax, rng) for _ in range(50)]
    for t in (0.1, 1.0):
        heat = HeatEval(a, t)
        worst = max(_grid_norm2(heat_apply(e.on_grid(grid), heat, small).values, small)
                    / _grid_norm2(e.on_grid(small).values, small) for e in exps)
        rows.append(Row("C04", f"t={t}", "contraction_ratio", worst, cfg.tolerance("contraction_ratio", 1 + 1e-6)))
    return rows


def c05(cfg):
    a = cfg.alpha_param
    grid = _semigroup_grid(a)
    probes = _probe_points(a.n, np.linspace(0.2, 2.5, 8))
    f = _random_expansion(a, 8 if a.n == 1 else 5, _rng(cfg, "C05")).on_grid(grid)
    rows = []
    for t in (0.1, 0.5, 1.0):
        for s in (0.1, 0.5, 1.0):
            ws = heat_apply(f, HeatEval(a, s), grid)
            lhs = heat_apply(ws, HeatEval(a, t), probes)
            rhs = heat_apply(f, HeatEval(a, t + s), probes)
            dev = float(np.max(np.abs(lhs - rhs)))
            rows.append(Row("C05", f"t={t},s={s}", "semigroup_law_dev", dev, cfg.tolerance("semigroup_law_dev", 1e-5)))
    return rows


def c06(cfg):
    a = cfg.alpha_param
    rng = _rng(cfg, "C06")
    rule = SubordinationRule()
    probes = _probe_points(a.n, np.linspace(0.1, 3.0, 12))
    fs = [_random_expansion(a, 10 if a.n == 1 else 6, rng, decay=1.0) for _ in range(5)]
    worst = 0.0
    for f in fs:
        for t in (0.1, 0.5, 1.0, 2.0):
            d = poisson_apply(f, t, probes, rule) - poisson_apply(f, t, probes, exact=True)
            worst = max(worst, float(np.max(np.abs(d))))
    rows = [Row("C06", "expansions", "subordination_vs_spectral", worst, cfg.tolerance("subordination_vs_spectral", 1e-5))]
    tg = np.geomspace(cfg.t_lo, cfg.t_hi, cfg.t_points)
    dense = np.geomspace(1e-5, 1e3, 400)
    excess = -math.inf
    for f in fs:
        ps = maximal_poisson(f, probes, tg, rule)
        ws = maximal_heat(f, probes, dense, refine=True)
        excess = max(excess, float(np.max(ps - ws)))
    rows.append(Row("C06", "expansions", "poisson_max_minus_heat_max", excess, cfg.tolerance("poisson_max_minus_heat_max", 1e-8)))
    return rows


def c07(cfg):
    rows = []
    for n in sorted({cfg.n, 1, 2}):
        rng = np.random.default_rng([cfg.seed, 7, n])
        x = rng.uniform(0, 10, (100_000, n))
        y = rng.uniform(0, 10, (100_000, n))
        s = rng.uniform(-1, 1, (100_000, n))
        qp, qm = q_forms(x, y, s)
        x2, y2 = np.sum(x * x, axis=-1), np.sum(y * y, axis=-1)
        scale = (x2 + y2) ** 2
        viol = float(np.max(((x2 - y2) ** 2 - qp * qm) / scale))
        rows.append(Row("C07", f"n={n}", "qform_violation_scaled", viol, cfg.tolerance("qform_violation_scaled", 1e-12)))
    return rows


def _global_samples(a, count, rng, c0, bound=6.0):
    xs, ys, ss = [], [], []
    params = RegionParams(1.0, c0)
    while len(xs) < count:
        x = rng.uniform(0, bound, (count, a.n))
        y = rng.uniform(0, bound, (count, a.n))
        s = rng.uniform(-1, 1, (count, a.n))
        glob = ~is_local(KernelContext(a, x, y, s), params)
        for i in np.flatnonzero(glob):
            if len(xs) < count:
                xs.append(x[i])
                ys.append(y[i])
                ss.append(s[i])
    return np.array(xs), np.array(ys), np.array(ss)


def c08(cfg):
    a = cfg.alpha_param
    c0 = RegionParams.default(a).c0
    xs, ys, ss = _global_samples(a, cfg.maximal_samples, _rng(cfg, "C08"), c0)
    rep = global_maximal_bound_check(a, xs, ys, ss, c0)
    rows = [
        Row("C08", "global", "global_samples", float(rep.samples), float(cfg.maximal_samples), ">="),
        Row("C08", "b<=0", "nonpositive_branch_excess", rep.nonpositive_excess, cfg.tolerance("nonpositive_branch_excess", 1e-6)),
        Row("C08", "b>0", "comparability_constant", rep.comparability, cfg.tolerance("comparability_constant", 100.0)),
        Row("C08", "b>0", "comparability_drift", abs(rep.comparability_drift - 1), cfg.tolerance("comparability_drift", 0.15)),
        Row("C08", "global", "maximal_vs_h0_constant", rep.bound_constant, math.inf, "<"),
        Row("C08", "global", "maximal_vs_h0_drift", abs(rep.bound_drift - 1), cfg.tolerance("maximal_vs_h0_drift", 0.15)),
    ]
    va = vt_analyze(KernelContext(a, xs[0] * 0 + 1.0, ys[0] * 0 + 6.0, np.zeros(a.n)), c0)
    rows.append(Row("C08", "s=0", "b_zero_sup_dev", abs(va.sup_value - math.exp(-36.0 * a.n)) * math.exp(36.0 * a.n),
                    cfg.tolerance("b_zero_sup_dev", 1e-12)))
    return rows


def c09(cfg):
    a = _one_dim_alpha(cfg)
    grid = TensorGrid.laguerre(a, 24)
    pts = grid.points()
    rows = []
    worst = 0.0
    for r in range(1, 6):
        g = g_function(Expansion.single(a, [r]), [0], 1, pts)
        worst = max(worst, abs(_grid_norm2(g, grid) - 0.5))
    rows.append(Row("C09", "k=1", "g1_eigen_norm_dev", worst, cfg.tolerance("g1_eigen_norm_dev", 1e-6)))
    for k in (1, 2, 3):
        g = g_function(Expansion.single(a, [2]), [0], k, pts)
        target = math.sqrt(math.gamma(2 * k)) / 2 ** k
        rows.append(Row("C09", f"k={k}", "gk_eigen_norm_dev", abs(_grid_norm2(g, grid) - target),
                        cfg.tolerance("gk_eigen_norm_dev", 1e-5)))
    rng = _rng(cfg, "C09")
    ratio = 0.0
    for _ in range(20):
        f = _random_expansion(a, 8, rng)
        ratio = max(ratio, _grid_norm2(g_function(f, [0], 1, pts), grid) / f.norm2())
    rows.append(Row("C09", "mixtures", "g1_over_f_l2", ratio, cfg.tolerance("g1_over_f_l2", 1.0)))
    zero = g_function(Expansion.single(a, [0]), [0], 1, pts)
    rows.append(Row("C09", "k=0 index", "g1_constant_abs", float(np.max(np.abs(zero))), 0.0, "=="))
    return rows


def _bump(lo, hi):
    def fn(x):
        x = np.asarray(x, dtype=float)
        t = (2 * x - lo - hi) / (hi - lo)
        inside = np.abs(t) < 1
        out = np.zeros_like(x)
        out[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2))
        return out
    return fn


def _riesz_route_check(a, truncation=1500):
    lo, hi = 1.0, 3.0
    rule = make_rule("gauss-legendre", 20)
    edges = np.linspace(lo, hi, 17)
    mids, halves = 0.5 * (edges[:-1] + edges[1:]), 0.5 * np.diff(edges)
    ys = (mids[:, None] + halves[:, None] * rule.nodes[None]).ravel()
    wl = (halves[:, None] * rule.weights[None]).ravel()
    alpha = a.alpha[0]
    wmu = wl * 2.0 * ys ** (2 * alpha + 1) * np.exp(-ys * ys - gammaln(alpha + 1))
    fy = _bump(lo, hi)(ys)
    xs = np.array([0.2, 0.4, 0.6, 0.8, 3.2, 3.5])
    kern = np.array([[riesz_kernel(a, [1], [x], [y]) for y in ys] for x in xs])
    via_kernel = kern @ (fy * wmu)
    idx = np.arange(truncation + 1)[:, None]
    coeffs = laguerre_tensor_values(idx, a, ys[:, None]) @ (fy * wmu)
    via_spectrum = riesz_spectral(Expansion(a, idx, coeffs), [1], xs[:, None])
    return float(np.max(np.abs(via_spectrum - via_kernel)))


def c10(cfg):
    rows = []
    p = riesz_polynomial(1, 0.0, 1)
    target = PolyCoeffs([0.0, -2.0])
    rows.append(Row("C10", "L_1,alpha=0", "riesz_coeff_dev", float(np.max(np.abs((p - target).coeffs))), 0.0, "=="))
    a = cfg.alpha_param
    beta = (1,) + (0,) * (a.n - 1)
    consts = []
    for trunc in (10, 20):
        rng = _rng(cfg, "C10")
        grid = TensorGrid.laguerre(a, 2 * trunc + 10 if a.n == 1 else trunc + 6)
        worst = 0.0
        for _ in range(100):
            f = _random_expansion(a, trunc, rng)
            worst = max(worst, _grid_norm2(riesz_spectral(f, beta, grid).values, grid) / f.norm2())
        consts.append(worst)
        rows.append(Row("C10", f"truncation={trunc}", "riesz_l2_constant", worst, math.inf, "<"))
    rows.append(Row("C10", "10->20", "riesz_l2_drift", abs(consts[1] / consts[0] - 1), cfg.tolerance("riesz_l2_drift", 0.10)))
    a1 = _one_dim_alpha(cfg)
    rows.append(Row("C10", "bump[1,3]", "riesz_spectral_vs_kernel", _riesz_route_check(a1),
                    cfg.tolerance("riesz_spectral_vs_kernel", 1e-3)))
    eps = default_epsilon(a, cfg.exponent_field)
    xs, ys, ss = _global_samples(a, 20, _rng(cfg, "C10"), RegionParams.default(a).c0)
    ratio = max(riesz_majorant(a, eps, x, y, s) / h_kernel(a, eps, KernelContext(a, x, y, s)) for x, y, s in zip(xs, ys, ss))
    rows.append(Row("C10", "global", "riesz_majorant_over_h", ratio, math.inf, "<"))
    return rows


def c11(cfg):
    a = cfg.alpha_param
    rng = _rng(cfg, "C11")
    kmax = 20 if a.n == 1 else 8
    f = _random_expansion(a, kmax, rng)
    out = multiplier_expansion(f, MultiplierSpec.imaginary_power(1.0))
    nz = f.eigenvalues > 0
    dev = float(np.max(np.abs(np.abs(out.coeffs[nz]) - np.abs(f.coeffs[nz])) / np.abs(f.coeffs[nz])))
    rows = [Row("C11", "imaginary-power", "modulus_preservation_rel", dev, cfg.tolerance("modulus_preservation_rel", 1e-15)),
            Row("C11", "imaginary-power", "zero_mode_abs", float(np.max(np.abs(out.coeffs[~nz]))), 0.0, "==")]
    probes = _probe_points(a.n, np.linspace(0.1, 3.0, 12))
    unit = multiplier_apply(f, MultiplierSpec.constant(1.0), probes)
    no_mean = f.map_spectrum(lambda lam: (lam > 0).astype(float)).evaluate(probes)
    rows.append(Row("C11", "phi=1", "unit_multiplier_dev", float(np.max(np.abs(unit - no_mean))),
                    cfg.tolerance("unit_multiplier_dev", 1e-10)))
    grid = TensorGrid.laguerre(a, kmax + 4)
    specs = {
        "imaginary-power": MultiplierSpec.imaginary_power(1.0),
        "phi=1/(1+t)": MultiplierSpec(lambda t: 1.0 / (1.0 + t), "custom", 0.0, 1.0),
        "phi=cos": MultiplierSpec(np.cos, "custom", 0.0, 1.0),
    }
    for name, spec in specs.items():
        worst = -math.inf
        for _ in range(10):
            g = _random_expansion(a, kmax, rng)
            lhs = _grid_norm2(multiplier_apply(g, spec, grid).values, grid)
            bound = float(np.max(np.abs(multiplier_values(spec, g.eigenvalues)))) * _grid_norm2(g.on_grid(grid).values, grid)
            worst = max(worst, lhs - bound)
        rows.append(Row("C11", name, "plancherel_excess", worst, cfg.tolerance("plancherel_excess", 1e-10)))
    pairs = [((1.0,), (2.0,)), ((0.5,), (1.5,)), ((2.0,), (3.5,))] if a.n == 1 else \
        [((1.0, 0.5), (2.0, 1.5)), ((0.5, 1.0), (1.5, 2.0))]
    dev = max(abs(multiplier_kernel(a, MultiplierSpec.constant(1.0), x, y) + 1.0) for x, y in pairs)
    rows.append(Row("C11", "phi=1", "kernel_telescoping_dev", dev, cfg.tolerance("kernel_telescoping_dev", 1e-4)))
    xs, ys, _ = _global_samples(a, 8, rng, RegionParams.default(a).c0, bound=4.0)
    ratio = max(multiplier_global_ratio(a, specs["imaginary-power"], x, y) for x, y in zip(xs, ys))
    rows.append(Row("C11", "global", "multiplier_global_ratio", ratio, math.inf, "<"))
    return rows


def _reference_exponent():
    return ExponentField.decay_power(2.0, 1.0, 2.0)


def c12(cfg):
    rng = _rng(cfg, "C12")
    a = cfg.alpha_param
    grid = TensorGrid.laguerre(a, 40 if a.n == 1 else 16)
    pts = grid.points()
    w = grid.weights("mu_alpha")
    rows = []
    fs = [DiscreteFunction(grid, np.exp(-np.sum((pts - c) ** 2, axis=-1))) for c in (0.3, 1.0, 2.0)]
    worst = 0.0
    for p in (1.0, 1.5, 2.0, 3.0):
        for f in fs:
            classical = float(np.sum(np.abs(f.values) ** p * w)) ** (1 / p)
            worst = max(worst, abs(luxemburg_norm(f, ExponentField.constant(p)) / classical - 1))
    rows.append(Row("C12", "constant p", "luxemburg_vs_classical_rel", worst, cfg.tolerance("luxemburg_vs_classical_rel", 1e-8)))
    exps = {"reference": _reference_exponent(), "configured": cfg.exponent_field}
    resid = 0.0
    for p in exps.values():
        for f in fs:
            nrm = luxemburg_norm(f, p)
            resid = max(resid, abs(modular(f * (1.0 / nrm), p) - 1.0))
    rows.append(Row("C12", "variable p", "unit_modular_residual", resid, cfg.tolerance("unit_modular_residual", 1e-8)))
    p = exps["configured"] if exps["configured"].p_minus > 1 else exps["reference"]
    fs_h = [DiscreteFunction(grid, rng.normal(size=grid.shape) * rng.uniform(0.1, 10)) for _ in range(1000)]
    gs_h = [DiscreteFunction(grid, rng.normal(size=grid.shape) * rng.uniform(0.1, 10)) for _ in range(1000)]
    ratio, _ = holder_check(fs_h, gs_h, p)
    rows.append(Row("C12", "1000 pairs", "holder_ratio", ratio, cfg.tolerance("holder_ratio", 1.0)))
    ref = exps["reference"]
    xs = rng.uniform(0, 30, (4000, 1))
    ys = xs + rng.uniform(-0.45, 0.45, (4000, 1))
    for which in ("LH0", "LHinf", "Pe_inf"):
        c, _ = class_constants(ref, which, (xs, ys) if which == "LH0" else xs)
        rows.append(Row("C12", f"decay-power {which}", "class_constant", c, math.inf, "<"))
    xb = rng.uniform(-4, 4, (2000, 3))
    yb = xb + rng.uniform(-0.25, 0.25, (2000, 3))
    lifted, dominated = lift_check(ref, (2, 1), xb, yb)
    from ..varlp import lift_exponent_radial
    pbar = lift_exponent_radial(ref, (2, 1))
    rows.append(Row("C12", "lift (2,1)", "lift_range_dev", abs(pbar.p_minus - ref.p_minus) + abs(pbar.p_plus - ref.p_plus), 0.0, "=="))
    for which in ("LHinf", "Pe_inf"):
        lv, pv = lifted[which]
        rows.append(Row("C12", f"lift {which}", "lift_class_rel_dev", abs(lv - pv) / max(pv, 1e-300),
                        cfg.tolerance("lift_class_rel_dev", 1e-12)))
    rows.append(Row("C12", "lift LH0", "lift_lh0_dominated", float(dominated), 1.0, "=="))
    return rows


def c13(cfg):
    a = _one_dim_alpha(cfg)
    rng = _rng(cfg, "C13")
    m = 40
    xs = rng.uniform(0.2, 3.0, m)
    ys = np.clip(xs + rng.choice([-1.0, 1.0], m) * rng.uniform(0.05, 0.6, m), 0.2, 3.0)
    zs = xs + rng.uniform(-1, 1, m) * np.abs(xs - ys) / 2.5
    px = np.concatenate([xs, zs])[:, None]
    py = np.concatenate([ys, ys])[:, None]

    def table(points, order):
        us = np.geomspace(1e-6, 1 - 1e-6, points)
        vals = np.stack([heat_kernel_malpha(a, u, px, py, part="local", order=order) for u in us], axis=-1)
        lookup = {(float(x), float(y)): v for x, y, v in zip(px[:, 0], py[:, 0], vals)}
        return lambda x, y: lookup[(float(np.ravel(x)[0]), float(np.ravel(y)[0]))]

    base, fine = table(200, 40), table(400, 80)
    size = cz_size_check(base, a, xs, ys, kernel_refined=fine)
    reg = cz_regularity_check(base, a, xs, ys, zs, kernel_refined=fine)
    tol = cfg.tolerance("cz_drift", 0.10)
    return [
        Row("C13", "size", "cz_constant", size.constant, math.inf, "<"),
        Row("C13", "size", "cz_drift", abs(size.refinement_ratio - 1), tol),
        Row("C13", "regularity", "cz_constant", reg.constant, math.inf, "<"),
        Row("C13", "regularity", "cz_drift", abs(reg.refinement_ratio - 1), tol),
    ]


def c14(cfg):
    a = cfg.alpha_param
    rng = _rng(cfg, "C14")
    r_fit = np.linspace(0.02, 0.98, 60)
    r_dense = np.linspace(1e-3, 1 - 1e-3, 2000)
    h = 1e-30
    resid = closed = 0.0
    changes = 0
    design = np.vander(r_fit, 5, increasing=True)
    for _ in range(100):
        x = rng.uniform(0, 4, a.n)
        y = rng.uniform(0, 4, a.n)
        s = rng.uniform(-1, 1, a.n)
        z = -2.0 * np.log(r_fit)
        dlog = np.imag(log_gaussian_factor(a, x, y, s, z + 1j * h)) / h
        fac = dlog * (1 - r_fit ** 2) ** 2
        coef, *_ = np.linalg.lstsq(design, fac, rcond=None)
        scale = max(1.0, float(np.max(np.abs(fac))))
        resid = max(resid, float(np.max(np.abs(design @ coef - fac))) / scale)
        closed = max(closed, float(np.max(np.abs(exp_derivative_factor(a, x, y, s, r_fit) - fac))) / scale)
        vals = exp_derivative_factor(a, x, y, s, r_dense)
        sg = np.sign(vals[vals != 0])
        changes = max(changes, int(np.sum(sg[1:] != sg[:-1])))
    tol = cfg.tolerance("degree4_fit_residual", 1e-8)
    return [
        Row("C14", "100 samples", "degree4_fit_residual", resid, tol),
        Row("C14", "100 samples", "closed_form_residual", closed, cfg.tolerance("closed_form_residual", 1e-8)),
        Row("C14", "100 samples", "sign_changes", float(changes), 4.0),
    ]


def c15(cfg):
    a = cfg.alpha_param
    p = cfg.exponent_field
    res = default_resolution(a.n, cfg.grid_order, cfg.truncation, cfg.s_order)
    rows = []
    tol = cfg.tolerance("norm_ratio_drift", 0.10)
    for op in cfg.operators:
        if op not in THEOREM_OPERATORS:
            continue
        for fam in FAMILIES:
            lo = ratio_cell(op, fam, a, p, res, cfg.seed)
            hi = ratio_cell(op, fam, a, p, res.doubled(), cfg.seed)
            rows.append(Row("C15", f"{op}/{fam}", "norm_ratio", lo, math.inf, "<"))
            rows.append(Row("C15", f"{op}/{fam}", "norm_ratio_drift", abs(hi / lo - 1), tol))
    return rows


def c16(cfg):
    """Re-run cheap criteria sequentially and with eight workers and compare
    the serialized rows byte for byte."""
    from .report import serialize_rows
    subset = [c01, c07, c12]
    serial = serialize_rows([r for fn in subset for r in fn(cfg)])
    with ThreadPoolExecutor(max_workers=8) as pool:
        parts = list(pool.map(lambda fn: fn(cfg), subset))
    threaded = serialize_rows([r for part in parts for r in part])
    mismatch = sum(x != y for x, y in zip(serial, threaded)) + abs(len(serial) - len(threaded))
    return [Row("C16", "threads 1 vs 8", "serialized_byte_mismatch", float(mismatch), 0.0, "==")]


CHECKS = {cid: globals()[cid.lower()] for cid, *_ in CRITERIA}


def metric_names():
    return sorted({
        "orthonormality_max_dev", "eigen_coeff_max_dev", "bessel_vs_sintegral_rel", "spectral60_vs_bessel",
        "conservation_dev", "contraction_ratio", "semigroup_law_dev", "subordination_vs_spectral",
        "poisson_max_minus_heat_max", "qform_violation_scaled", "nonpositive_branch_excess",
        "comparability_constant", "comparability_drift", "maximal_vs_h0_drift", "b_zero_sup_dev",
        "g1_eigen_norm_dev", "gk_eigen_norm_dev", "g1_over_f_l2", "riesz_l2_drift", "riesz_spectral_vs_kernel",
        "modulus_preservation_rel", "unit_multiplier_dev", "plancherel_excess", "kernel_telescoping_dev",
        "luxemburg_vs_classical_rel", "unit_modular_residual", "holder_ratio", "lift_class_rel_dev", "cz_drift",
        "degree4_fit_residual", "closed_form_residual", "norm_ratio_drift",
    })


def run_criterion(cid, cfg):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return CHECKS[cid](cfg)
