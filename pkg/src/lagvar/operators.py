"""Maximal operators, Riesz transforms, square functions, Laplace-type
multipliers and the positive majorant operator for global parts."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, optimize
from scipy.special import gamma as gamma_fn
from scipy.special import logsumexp

from .geometry import KernelContext, RegionParams, cutoff_value, is_local, psi
from .semigroup import (
    Expansion,
    SubordinationRule,
    _s_nodes,
    dt_heat_kernel,
    exp_derivative_factor,
    heat_apply,
    jacobi_order_for,
    poisson_apply,
)
from .specfun import AlphaParam, PolyCoeffs, hermite, laguerre_normalized, make_rule
from .varlp import DiscreteFunction, TensorGrid

__all__ = [
    "VtAnalysis",
    "MultiplierSpec",
    "MaximalBoundReport",
    "t_grid",
    "vt_analyze",
    "log_v",
    "maximal_heat",
    "maximal_poisson",
    "global_maximal_bound_check",
    "h_kernel",
    "h_kernel_xy",
    "h_apply",
    "default_epsilon",
    "riesz_spectral",
    "riesz_polynomial",
    "riesz_kernel",
    "riesz_s_kernel",
    "riesz_majorant",
    "g_function",
    "multiplier_values",
    "multiplier_expansion",
    "multiplier_apply",
    "multiplier_kernel",
    "multiplier_global_ratio",
]


def t_grid(points: int = 2000, lo: float = 1e-6):
    """Log-spaced grid in (lo, 1 - lo) for the (0,1) time variable."""
    return np.geomspace(lo, 1.0 - lo, points)


# ----------------------------------------------------------------------------
# sup over time of the global Gaussian factor

@dataclass(frozen=True)
class VtAnalysis:
    a: float
    b: float
    u0: float
    t0: float
    sup_value: float
    log_sup_value: float
    grid_sup: float
    log_grid_sup: float
    branch: str

    @property
    def comparability(self) -> float:
        """grid_sup / v(t0)."""
        return math.exp(self.log_grid_sup - self.log_sup_value)


def log_v(ctx: KernelContext, t):
    """log of v(t) = e^{-u(t)} / t^{n+alpha_hat}, u(t) = a/t - sqrt(1-t) b/t - |x|^2."""
    t = np.asarray(t, dtype=float)
    m = ctx.alpha.n + ctx.alpha.alpha_hat
    # u(t) = q_-(sqrt(1-t) x, y, s)/t, written as a sum of squares
    rt = np.sqrt(1.0 - t)[..., None]
    x, y, s = ctx.x, ctx.y, ctx.s
    q = np.sum((rt * x - y * s) ** 2 + y * y * (1 - s * s), axis=-1)
    return -q / t - m * np.log(t)


def vt_analyze(ctx: KernelContext, c0: float | None = None, points: int = 2000) -> VtAnalysis:
    """Analytic surrogate and dense-grid sup of v(t) on (0,1) for a global context."""
    alpha = ctx.alpha
    if c0 is None:
        c0 = RegionParams.default(alpha).c0
    if np.ndim(ctx.q_minus) != 0:
        raise ValueError("vt_analyze takes a single context")
    if is_local(ctx, RegionParams(1.0, c0)):
        raise ValueError("context lies in the local region; maximal analysis needs a global point")
    a, b = float(ctx.a), float(ctx.b)
    m = alpha.n + alpha.alpha_hat
    grid = t_grid(points)
    lg = float(np.max(log_v(ctx, grid)))
    if b <= 0:
        ly = -float(ctx.ynorm2)
        return VtAnalysis(a, b, float(ctx.ynorm2), 1.0, math.exp(ly), ly, math.exp(lg), lg, "b_nonpositive")
    root = math.sqrt(max(a * a - b * b, 0.0))
    t0 = 2.0 * root / (a + root)
    u0 = 0.5 * (float(ctx.ynorm2) - float(ctx.xnorm2) + math.sqrt(float(ctx.q_plus * ctx.q_minus)))
    lv0 = float(log_v(ctx, min(t0, 1.0)))
    return VtAnalysis(a, b, u0, t0, math.exp(lv0), lv0, math.exp(lg), lg, "b_positive")


# ----------------------------------------------------------------------------
# majorant kernel

def h_kernel(alpha, epsilon: float, ctx: KernelContext):
    """Positive majorant: e^{-(1-eps)|y|^2} when sum x_i y_i s_i <= 0, else
    q_plus^{n+alpha_hat} exp(-(1-eps)/2 (|y|^2 - |x|^2 + sqrt(q_plus q_minus)))."""
    alpha = AlphaParam.of(alpha)
    if not epsilon < 1:
        raise ValueError("epsilon must be < 1")
    m = alpha.n + alpha.alpha_hat
    neg = ctx.b <= 0
    with np.errstate(invalid="ignore"):
        lpos = m * np.log(ctx.q_plus) - 0.5 * (1 - epsilon) * (
            ctx.ynorm2 - ctx.xnorm2 + np.sqrt(ctx.q_plus * ctx.q_minus))
    out = np.exp(np.where(neg, -(1 - epsilon) * ctx.ynorm2, lpos))
    return out if np.ndim(out) else float(out)


def log_h_kernel(alpha, epsilon, x, y, s):
    alpha = AlphaParam.of(alpha)
    m = alpha.n + alpha.alpha_hat
    rest = y * y * (1 - s * s)
    qp = np.sum((x + y * s) ** 2 + rest, axis=-1)
    qm = np.sum((x - y * s) ** 2 + rest, axis=-1)
    x2, y2 = np.sum(x * x, axis=-1), np.sum(y * y, axis=-1)
    sig = np.sum(x * y * s, axis=-1)
    lpos = m * np.log(qp) - 0.5 * (1 - epsilon) * (y2 - x2 + np.sqrt(qp * qm))
    return np.where(sig <= 0, -(1 - epsilon) * y2, lpos)


def default_epsilon(alpha, p=None) -> float:
    """Half of min(1/(p_minus)', 1/(n + alpha_hat)); with no exponent, half of 1/(n+alpha_hat)."""
    alpha = AlphaParam.of(alpha)
    bound = 1.0 / (alpha.n + alpha.alpha_hat)
    if p is not None:
        bound = min(bound, 1.0 - 1.0 / p.p_minus)
    return 0.5 * bound


def _half_s_nodes(alpha, m):
    """Nodes/log-weights for Pi_alpha(s) ds split at s_i = 0, so integrands
    that jump across the hyperplanes s_i = 0 are integrated piecewise."""
    nodes, logw = [], []
    for a in alpha.alpha:
        e = a - 0.5
        rule = make_rule("gauss-jacobi", m, a=e, b=0.0)
        sp = 0.5 * (rule.nodes + 1.0)  # (1-s)^e on (0,1) after s = (1+r)/2
        lwp = np.log(rule.weights) - (e + 1.0) * math.log(2.0) + e * np.log1p(sp)
        const = math.lgamma(a + 1) - math.lgamma(a + 0.5) - 0.5 * math.log(math.pi)
        nodes.append(np.concatenate([-sp[::-1], sp]))
        logw.append(np.concatenate([lwp[::-1], lwp]) + const)
    mesh = np.stack(np.meshgrid(*nodes, indexing="ij"), axis=-1).reshape(-1, alpha.n)
    lw = logw[0]
    for extra in logw[1:]:
        lw = np.add.outer(lw, extra)
    return mesh, np.ravel(lw)


def h_kernel_xy(alpha, epsilon, x, y, c0=None, order=48):
    """int H(x,y,s) (1 - phi(x,y,s)) Pi_alpha(s) ds for point pairs (..., n).

    Both H and phi see s only through S = sum x_i y_i s_i, since
    q_pm = |x|^2 + |y|^2 +- 2S, so each node costs a few scalar flops.
    """
    alpha = AlphaParam.of(alpha)
    c0 = RegionParams.default(alpha).c0 if c0 is None else c0
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    shape = x.shape[:-1]
    xf, yf = x.reshape(-1, alpha.n), y.reshape(-1, alpha.n)
    m = alpha.n + alpha.alpha_hat
    c = xf * yf
    x2, y2 = np.sum(xf * xf, axis=-1), np.sum(yf * yf, axis=-1)
    a = x2 + y2
    scale = ((1.0 + np.sqrt(x2) + np.sqrt(y2)) / c0) ** 2
    # phi = 1 at every node when even the largest q_minus sits inside psi's flat part
    live = np.flatnonzero((a + 2.0 * np.sum(np.abs(c), axis=-1)) * scale > 1.0)
    out = np.zeros(xf.shape[0])
    S_nodes, lw = _half_s_nodes(alpha, order)
    w_nodes = np.exp(lw)
    step = max(1, 1_000_000 // len(lw))
    for i in range(0, live.size, step):
        k = live[i:i + step]
        S = c[k] @ S_nodes.T
        ak = a[k, None]
        qp = ak + 2.0 * S
        qm = np.maximum(ak - 2.0 * S, 0.0)
        with np.errstate(divide="ignore"):
            lpos = m * np.log(qp) - 0.5 * (1 - epsilon) * ((y2[k] - x2[k])[:, None] + np.sqrt(qp * qm))
        lh = np.where(S <= 0, -(1 - epsilon) * y2[k, None], lpos)
        # exponents stay within a few hundred on grids, so plain exp is safe
        out[k] = np.einsum("pj,pj,j->p", 1.0 - psi(qm * scale[k, None]), np.exp(lh), w_nodes)
    return out.reshape(shape)


def h_apply(f: DiscreteFunction, alpha, epsilon, x, p=None, c0=None, order=48):
    """int H_eps(x, y) f(y) dmu_alpha(y) at the points (or grid) x."""
    alpha = AlphaParam.of(alpha)
    if p is not None and not epsilon < 2 * default_epsilon(alpha, p):
        warnings.warn("epsilon lies outside the admissible interval for this exponent", RuntimeWarning, stacklevel=2)
    pts, grid = (x.points(), x) if isinstance(x, TensorGrid) else (np.asarray(x, float), None)
    ys = f.grid.flat_points()
    fw = (f.values * f.grid.weights("mu_alpha")).ravel()
    flat = pts.reshape(-1, alpha.n)
    kern = h_kernel_xy(alpha, epsilon, flat[:, None, :], ys[None], c0, order)
    out = (kern @ fw).reshape(pts.shape[:-1])
    return DiscreteFunction(grid, out) if grid is not None else out


# ----------------------------------------------------------------------------
# maximal operators

def _refine_sup(fn, grid, vals):
    """Polish the grid maximum of fn(t) with a bounded scalar search in log t."""
    j = int(np.argmax(vals))
    best = float(vals[j])
    lo = grid[max(j - 1, 0)]
    hi = grid[min(j + 1, len(grid) - 1)]
    if hi > lo:
        res = optimize.minimize_scalar(lambda s: -fn(math.exp(s)), bounds=(math.log(lo), math.log(hi)),
                                       method="bounded", options={"xatol": 1e-10})
        best = max(best, -float(res.fun))
    return best


def _maximal(values_at, f: Expansion, x, t_grid, include_zero, refine):
    if len(t_grid) == 0:
        raise ValueError("empty time grid")
    t_grid = np.sort(np.asarray(t_grid, dtype=float))
    pts = np.asarray(x, dtype=float)
    flat = pts.reshape(-1, f.alpha.n)
    basis_vals = np.abs(np.stack([values_at(t, flat) for t in t_grid]))
    sup = basis_vals.max(axis=0)
    if include_zero:
        # both ends of (0, inf): f itself and its constant term
        sup = np.maximum(sup, np.abs(f.evaluate(flat)))
        sup = np.maximum(sup, np.abs(f.map_spectrum(lambda lam: (lam == 0).astype(float)).evaluate(flat)))
    if refine:
        for i in range(flat.shape[0]):
            sup[i] = max(sup[i], _refine_sup(lambda t: abs(values_at(t, flat[i:i + 1])[0]), t_grid, basis_vals[:, i]))
    return sup.reshape(pts.shape[:-1])


def maximal_heat(f, x, t_grid, include_zero=True, refine=False):
    """sup over t_grid of |W_t f(x)|; for expansions the limits t -> 0 and
    t -> inf are included when include_zero is set."""
    if isinstance(f, DiscreteFunction):
        from .semigroup import HeatEval
        vals = [np.abs(heat_apply(f, HeatEval(f.grid.alpha, t), x)) for t in t_grid]
        return np.max(vals, axis=0)
    return _maximal(lambda t, p: f.map_spectrum(lambda lam: np.exp(-lam * t)).evaluate(p),
                    f, x, t_grid, include_zero, refine)


def maximal_poisson(f: Expansion, x, t_grid, rule: SubordinationRule | None = None,
                    include_zero=True, refine=False, exact=False):
    """sup over t_grid of |P_t f(x)|, subordinated through the heat semigroup."""
    rule = rule or SubordinationRule()
    return _maximal(lambda t, p: poisson_apply(f, t, p, rule, exact=exact), f, x, t_grid, include_zero, refine)


@dataclass(frozen=True)
class MaximalBoundReport:
    samples: int
    rejected: int
    comparability: float
    comparability_refined: float
    nonpositive_excess: float
    bound_constant: float
    bound_constant_refined: float

    @property
    def comparability_drift(self):
        return self.comparability_refined / self.comparability

    @property
    def bound_drift(self):
        return self.bound_constant_refined / self.bound_constant


def global_maximal_bound_check(alpha, xs, ys, ss, c0=None, points=2000) -> MaximalBoundReport:
    """Over global samples: comparability constant of grid_sup v vs v(t0)
    (b > 0), the excess of grid_sup over e^{-|y|^2} (b <= 0), and
    sup grid_sup v / H_{alpha,0}; each at `points` and `2*points` t-nodes."""
    alpha = AlphaParam.of(alpha)
    c0 = RegionParams.default(alpha).c0 if c0 is None else c0
    comp = [0.0, 0.0]
    bound = [0.0, 0.0]
    excess = 0.0
    used = rejected = 0
    for x, y, s in zip(xs, ys, ss):
        ctx = KernelContext(alpha, x, y, s)
        if is_local(ctx, RegionParams(1.0, c0)):
            rejected += 1
            continue
        used += 1
        lh0 = float(log_h_kernel(alpha, 0.0, ctx.x, ctx.y, ctx.s))
        for j, pts in enumerate((points, 2 * points)):
            va = vt_analyze(ctx, c0, pts)
            if va.branch == "b_positive":
                comp[j] = max(comp[j], abs(va.log_grid_sup - va.log_sup_value))
            elif j == 0:
                excess = max(excess, va.log_grid_sup + float(ctx.ynorm2))
            bound[j] = max(bound[j], va.log_grid_sup - lh0)
    return MaximalBoundReport(used, rejected, math.exp(comp[0]), math.exp(comp[1]), math.expm1(excess),
                              math.exp(bound[0]), math.exp(bound[1]))


# ----------------------------------------------------------------------------
# Riesz transforms

def _beta(alpha, beta):
    beta = tuple(int(b) for b in np.atleast_1d(beta))
    if len(beta) != alpha.n or any(b < 0 for b in beta):
        raise ValueError("beta must be a multi-index of the right dimension")
    return beta


def riesz_spectral(f: Expansion, beta, x):
    """sum_{k != 0} lambda_k^{-|beta|/2} c_k D^beta L_k at the points (or grid) x."""
    beta = _beta(f.alpha, beta)
    bh = sum(beta)
    if bh == 0:
        raise ValueError("beta = 0 is not a Riesz transform")
    g = f.map_spectrum(lambda lam: np.where(lam > 0, np.maximum(lam, 1e-300) ** (-0.5 * bh), 0.0))
    if isinstance(x, TensorGrid):
        return g.on_grid(x, beta)
    return g.evaluate(np.asarray(x, float), beta)


def riesz_polynomial(k: int, alpha: float, beta: int):
    """lambda_k^{-beta/2} d^beta/dx^beta of the normalized Laguerre function,
    as exact polynomial coefficients in x (one dimension)."""
    if beta <= 0:
        raise ValueError("beta = 0 is not a Riesz transform")
    if k == 0:
        return PolyCoeffs([0.0])
    return laguerre_normalized(k, alpha).of_square().deriv(beta) * (float(k) ** (-0.5 * beta))


def _log_time_nodes(lo, hi, h):
    sig = np.arange(math.log(lo), math.log(hi) + h, h)
    return np.exp(sig), h


def riesz_s_kernel(alpha, beta, x, y, s, h=0.05):
    """For each s (rows, n): the t-integral over (0,1)

        (1-t)^{(|b|-1)/2} (-log(1-t)/t)^{(|b|-2)/2} prod H_{b_i}((sqrt(1-t) x_i - y_i s_i)/sqrt t)
        * exp(-q_-(sqrt(1-t) x, y, s)/t) / t^{n+alpha_hat+1} / sqrt(1-t)

    computed in the variable tau = -log(1-t), trapezoid in log tau.
    Returns (log|value|, sign)."""
    alpha = AlphaParam.of(alpha)
    beta = _beta(alpha, beta)
    bh = sum(beta)
    m = alpha.n + alpha.alpha_hat
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    s = np.atleast_2d(np.asarray(s, float))
    qmin = float(np.min(np.sum((x - y * s) ** 2 + y * y * (1 - s * s), axis=-1)))
    taus, hh = _log_time_nodes(max(qmin / 120.0, 1e-12), 60.0, h)
    r = np.exp(-taus)[:, None]
    em = -np.expm1(-taus)[:, None]
    # integrand in tau (dt = (1-t) dtau) times tau for the log-tau measure
    lpref = (0.5 * bh - 1.0) * np.log(taus)[:, None] + 0.5 * bh * np.log(r) - (0.5 * bh + m) * np.log(em) \
        + np.log(taus)[:, None] + math.log(hh)
    sr = np.sqrt(r)[..., None]
    U = (sr * x - y * s[None]) / np.sqrt(em)[..., None]
    herm = np.ones(U.shape[:-1])
    for i, bi in enumerate(beta):
        herm = herm * hermite(bi)(U[..., i])
    q = np.sum((sr * x - y * s[None]) ** 2 + y * y * (1 - s[None] ** 2), axis=-1)
    expo = lpref - q / em
    lv, sign = logsumexp(expo, axis=0, b=herm, return_sign=True)
    return lv, sign


def riesz_kernel(alpha, beta, x, y, order=None, h=0.05):
    """Riesz kernel R(x, y), x != y, as a density against mu_alpha:
    R(x,y) = (-1)^|b| e^{|y|^2} / Gamma(|b|/2) * int K(x,y,s) Pi_alpha(s) ds."""
    alpha = AlphaParam.of(alpha)
    beta = _beta(alpha, beta)
    bh = sum(beta)
    if bh == 0:
        raise ValueError("beta = 0 is not a Riesz transform")
    x = np.asarray(x, float).reshape(alpha.n)
    y = np.asarray(y, float).reshape(alpha.n)
    if np.allclose(x, y, rtol=0, atol=0):
        raise ValueError("the kernel is singular on the diagonal")
    qmin = float(np.sum((x - y) ** 2))
    zmax = float(np.max(2.0 * x * y)) / max(qmin / 120.0, 1e-12)
    m = jacobi_order_for(zmax, order, cap=3000 if alpha.n == 1 else 300)
    S, lw = _s_nodes(alpha, m)
    lk, sg = riesz_s_kernel(alpha, beta, x, y, S, h)
    lv, sign = logsumexp(lk + lw, b=sg, return_sign=True)
    return float((-1) ** bh * sign * math.exp(lv + float(np.sum(y * y)) - math.lgamma(0.5 * bh)))


def riesz_majorant(alpha, epsilon, x, y, s):
    """int_0^1 e^{-(1-eps) u(t)} t^{-(n+alpha_hat)-1} (1-t)^{-1/2} dt for one (x, y, s)."""
    alpha = AlphaParam.of(alpha)
    ctx = KernelContext(alpha, x, y, s)
    m = alpha.n + alpha.alpha_hat

    def f_log(sig):
        t = math.exp(sig)
        return math.exp(-(1 - epsilon) * float(-log_v(ctx, t) - m * math.log(t)) - m * sig) / math.sqrt(1 - t)

    def f_hi(t):
        return math.exp(-(1 - epsilon) * float(-log_v(ctx, t) - m * math.log(t))) * t ** (-m - 1)

    lo_part = integrate.quad(f_log, math.log(1e-12), math.log(0.5), limit=400, epsrel=1e-10)[0]
    hi_part = integrate.quad(f_hi, 0.5, 1.0, weight="alg", wvar=(0.0, -0.5), limit=200, epsrel=1e-10)[0]
    return lo_part + hi_part


# ----------------------------------------------------------------------------
# Littlewood-Paley g-function

def g_function(f: Expansion, beta, k: int, x, order: int = 64):
    """(int_0^inf |t^{k+|b|} d_t^k D^b P_t f(x)|^2 dt/t)^{1/2} for a finite expansion."""
    alpha = f.alpha
    beta = _beta(alpha, beta)
    bh = sum(beta)
    if k + bh == 0:
        raise ValueError("need k + |beta| > 0")
    pts = np.asarray(x, float)
    flat = pts.reshape(-1, alpha.n)
    lam = f.eigenvalues
    live = (lam > 0) & (f.coeffs != 0)
    if not live.any():
        return np.zeros(pts.shape[:-1])
    root = np.sqrt(lam[live])
    sub = Expansion(alpha, f.indices[live], f.coeffs[live] * (-root) ** k)
    from .specfun import laguerre_tensor_values
    amps = sub.coeffs[:, None] * laguerre_tensor_values(sub.indices, alpha, flat, beta)
    p = 2 * (k + bh)
    sigma = 2.0 * root.min()
    rule = make_rule("gauss-laguerre", order, alpha=p - 1.0)
    tau = np.asarray(rule.nodes)
    decay = np.exp(-np.outer(root - 0.5 * sigma, tau / sigma))
    prof = decay.T @ amps
    g2 = (np.abs(prof) ** 2).T @ rule.weights / sigma ** p
    return np.sqrt(g2).reshape(pts.shape[:-1])


# ----------------------------------------------------------------------------
# multipliers of Laplace-transform type

@dataclass(frozen=True)
class MultiplierSpec:
    """m(lam) = lam int_0^inf phi(y) e^{-lam y} dy with bounded phi."""

    phi: Callable | None = field(default=None, compare=False)
    tag: str = "custom"
    beta: float = 0.0
    phi_sup: float = 1.0
    order: int = 64

    @classmethod
    def imaginary_power(cls, beta: float) -> "MultiplierSpec":
        g = complex(gamma_fn(1 - 1j * beta))

        def phi(t):
            return np.exp(-1j * beta * np.log(t)) / g

        return cls(phi, "imaginary-power", float(beta), float(1.0 / abs(g)))

    @classmethod
    def constant(cls, c: float = 1.0) -> "MultiplierSpec":
        return cls(lambda t: np.full(np.shape(t), c), "custom", 0.0, abs(c))


def multiplier_values(spec: MultiplierSpec, lam):
    """m at the eigenvalues lam, with m(0) = 0."""
    lam = np.asarray(lam, dtype=float)
    pos = lam > 0
    safe = np.where(pos, lam, 1.0)
    if spec.tag == "imaginary-power":
        out = np.exp(1j * spec.beta * np.log(safe))
    else:
        rule = make_rule("gauss-laguerre", spec.order, alpha=0.0)
        vals = spec.phi(np.asarray(rule.nodes)[None, :] / safe[..., None])
        out = np.asarray(vals) @ rule.weights
    return np.where(pos, out, 0.0)


def multiplier_expansion(f: Expansion, spec: MultiplierSpec) -> Expansion:
    return f.map_spectrum(lambda lam: multiplier_values(spec, lam))


def multiplier_apply(f: Expansion, spec: MultiplierSpec, x):
    g = multiplier_expansion(f, spec)
    if isinstance(x, TensorGrid):
        return g.on_grid(x)
    return g.evaluate(np.asarray(x, float))


def multiplier_kernel(alpha, spec: MultiplierSpec, x, y, t_max: float = 60.0):
    """int_0^inf phi(t) (-d_t W_t(x, y)) dt for x != y, adaptive in log t."""
    alpha = AlphaParam.of(alpha)
    x = np.asarray(x, float).reshape(alpha.n)
    y = np.asarray(y, float).reshape(alpha.n)
    if np.array_equal(x, y):
        raise ValueError("the kernel is singular on the diagonal")
    lo = max(float(np.sum((x - y) ** 2)) / 200.0, 1e-10)

    def integrand(sig, part):
        t = math.exp(sig)
        val = spec.phi(np.array(t)) * -float(dt_heat_kernel(alpha, t, x, y)) * t
        return float(np.real(val) if part == 0 else np.imag(val))

    parts = []
    for part in (0, 1):
        val, err = integrate.quad(integrand, math.log(lo), math.log(t_max), args=(part,), limit=400,
                                  epsabs=1e-13, epsrel=1e-10)
        if not np.isfinite(val):
            raise ArithmeticError("multiplier kernel quadrature did not converge")
        parts.append(val)
    return parts[0] + 1j * parts[1] if spec.tag == "imaginary-power" else parts[0]


def multiplier_global_ratio(alpha, spec: MultiplierSpec, x, y, c0=None, s_order=96, points=400):
    """|K_glob(x,y)| / (sup|phi| int sup_t E(t,s) (1-phi) Pi ds), with
    K_glob = int phi(t) (-d_t W_t,glob) dt; the t-derivative uses the exact
    factor (d_z E)/E = N(e^{-z/2}) / (1 - e^{-z})^2.  Values near or below a
    small constant certify domination by the sup-in-time expression."""
    alpha = AlphaParam.of(alpha)
    c0 = RegionParams.default(alpha).c0 if c0 is None else c0
    x = np.asarray(x, float).reshape(alpha.n)
    y = np.asarray(y, float).reshape(alpha.n)
    S, lw = _half_s_nodes(alpha, s_order)
    glob = 1.0 - cutoff_value(x[None], y[None], S, c0)
    m = alpha.n + alpha.alpha_hat
    sig = np.linspace(math.log(1e-5), math.log(60.0), points)
    t = np.exp(sig)
    h = sig[1] - sig[0]
    r = np.exp(-0.5 * t)[:, None]
    em = -np.expm1(-t)[:, None]
    q = (r * r) * np.sum(x * x) + np.sum(y * y) - 2 * r * (S @ (x * y))[None]
    logE = -q / em - m * np.log(em) + np.sum(y * y)
    sums = (S @ (x * y))[None]
    fac = m * r ** 4 - sums * r ** 3 + (np.sum(x * x) + np.sum(y * y) - m) * r ** 2 - sums * r
    dE = np.exp(logE + lw[None]) * fac / em ** 2 * glob[None]
    phi = np.asarray(spec.phi(t))
    k_glob = np.sum((phi * t * h)[:, None] * -dE)
    sup_t = np.exp(np.max(logE, axis=0) + lw) * glob
    denom = spec.phi_sup * np.sum(sup_t)
    return abs(k_glob) / denom if denom > 0 else 0.0
