"""Heat and Poisson semigroups of the Laguerre operator.

Three routes to the heat kernel W_t(x, y) (density against mu_alpha):

* ``bessel-product``: the closed product of scaled modified Bessel functions,
  assembled in the log domain;
* ``s-integral``: the representation over (-1, 1)^n integrated with
  Gauss-Jacobi nodes, which also carries the local/global cutoff split;
* ``spectral``: the truncated eigenfunction sum, used as an oracle.

The Poisson kernel comes from Gaussian subordination, discretised with the
trapezoid rule in log v where v = t^2 / (4u).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .geometry import cutoff_value
from .specfun import (
    AlphaParam,
    hermite,
    laguerre_tensor_values,
    log_bessel_i_scaled,
    make_rule,
    multi_indices,
)
from .varlp import DiscreteFunction, TensorGrid

__all__ = [
    "HeatEval",
    "SubordinationRule",
    "Expansion",
    "SmallTimeWarning",
    "heat_kernel",
    "log_heat_kernel",
    "heat_kernel_bessel",
    "heat_kernel_sintegral",
    "heat_kernel_spectral",
    "heat_kernel_split",
    "heat_kernel_malpha",
    "dt_heat_kernel",
    "heat_apply",
    "poisson_kernel",
    "poisson_apply",
    "dt_poisson",
    "exp_derivative_factor",
    "log_gaussian_factor",
]

SMALL_T = 1e-6


class SmallTimeWarning(UserWarning):
    """Kernel requested at t below the reliable float64 range."""


def _check_t(t):
    if not t > 0:
        raise ValueError("t must be positive")
    if t < SMALL_T:
        warnings.warn(f"t={t:g} is below {SMALL_T:g}; kernel values are near-singular", SmallTimeWarning, stacklevel=3)


@dataclass(frozen=True)
class HeatEval:
    alpha: AlphaParam
    t: float
    method: str = "bessel-product"
    kmax: int = 60
    order: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "alpha", AlphaParam.of(self.alpha))
        if self.method not in ("bessel-product", "s-integral", "spectral"):
            raise ValueError(f"unknown heat kernel method {self.method!r}")
        if self.kmax < 0:
            raise ValueError("spectral truncation must be >= 0")
        if self.order is not None and self.order < 4:
            raise ValueError("s-integral order must be >= 4")
        if not self.t > 0:
            raise ValueError("t must be positive")


def _pair(alpha, x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape[-1] != alpha.n or y.shape[-1] != alpha.n:
        raise ValueError("point dimension does not match alpha")
    return np.broadcast_arrays(x, y)


# ----------------------------------------------------------------------------
# closed product form

def log_heat_kernel(alpha, t, x, y):
    """log W_t(x, y) from the Bessel product, elementwise over broadcast points."""
    alpha = AlphaParam.of(alpha)
    x, y = _pair(alpha, x, y)
    x = np.maximum(x, 1e-300)
    y = np.maximum(y, 1e-300)
    a = alpha.array
    em = -math.expm1(-t)
    r = math.exp(-0.5 * t)
    z = 2.0 * r * (x * y) / em
    out = (alpha.log_normalizers - math.log(em)
           - a * (np.log(x) + np.log(y) - 0.5 * t)
           + log_bessel_i_scaled(a, z)
           # -(r x - y)^2/em + y^2 rearranged so x <-> y is exact
           - r * (x - y) ** 2 / em + r * (x * x + y * y) / (1.0 + r))
    return np.sum(out, axis=-1)


def heat_kernel_bessel(alpha, t, x, y):
    _check_t(t)
    with np.errstate(over="ignore"):
        return np.exp(log_heat_kernel(alpha, t, x, y))


def dt_heat_kernel(alpha, t, x, y):
    """d/dt W_t(x, y) from the analytic log-derivative of the product form."""
    alpha = AlphaParam.of(alpha)
    x, y = _pair(alpha, x, y)
    x = np.maximum(x, 1e-300)
    y = np.maximum(y, 1e-300)
    a = alpha.array
    e = math.exp(-t)
    em = -math.expm1(-t)
    z = 2.0 * math.sqrt(e) * x * y / em
    dz = -x * y * math.sqrt(e) * (1.0 + e) / em ** 2
    ratio = np.exp(log_bessel_i_scaled(a + 1.0, z) - log_bessel_i_scaled(a, z))
    dlog = -e / em + 0.5 * a + (ratio + a / z) * dz + (x * x + y * y) * e / em ** 2
    return heat_kernel_bessel(alpha, t, x, y) * np.sum(dlog, axis=-1)


# ----------------------------------------------------------------------------
# integral over (-1, 1)^n

def jacobi_order_for(z_max, order=None, cap=4000):
    """Gauss-Jacobi order that resolves exp(z s) against (1-s^2)^(alpha-1/2)."""
    base = 40 if order is None else int(order)
    need = int(math.ceil(6.0 * math.sqrt(max(z_max, 0.0)))) + 30
    if need > base:
        # snap to a sqrt(2) ladder so cached rules get reused
        need = int(round(40 * 2 ** (math.ceil(2 * math.log2(need / 40)) / 2)))
    return min(max(base, need), cap)


def _s_nodes(alpha, m):
    """Tensor Gauss-Jacobi nodes and log-weights for Pi_alpha(s) ds."""
    nodes, logw = [], []
    for a in alpha.alpha:
        rule = make_rule("gauss-jacobi", m, alpha=a)
        const = math.lgamma(a + 1) - math.lgamma(a + 0.5) - 0.5 * math.log(math.pi)
        nodes.append(rule.nodes)
        logw.append(np.log(rule.weights) + const)
    mesh = np.stack(np.meshgrid(*nodes, indexing="ij"), axis=-1).reshape(-1, alpha.n)
    lw = logw[0]
    for extra in logw[1:]:
        lw = np.add.outer(lw, extra)
    return mesh, np.ravel(lw)


def _sintegral_log(alpha, r, em, x, y, part=None, c0=None, order=None, extra_log=None, chunk=None):
    """log of int exp(-q_-(r x, y, s)/em + |y|^2) w(s) Pi(s) ds for pairs (P, n).

    part selects w = 1, phi or 1-phi.  Returns (P,) log values (-inf for 0).
    """
    zmax = float(np.max(2.0 * r * x * y / em)) if x.size else 0.0
    m = jacobi_order_for(zmax, order, cap=4000 if alpha.n == 1 else 400)
    S, lw = _s_nodes(alpha, m)
    out = np.empty(x.shape[0])
    chunk = chunk or max(1, 2_000_000 // len(lw))
    for i in range(0, x.shape[0], chunk):
        xs, ys = x[i:i + chunk, None, :], y[i:i + chunk, None, :]
        rest = ys * ys * (1.0 - S[None] ** 2)
        expo = -np.sum((r * xs - ys * S[None]) ** 2 + rest, axis=-1) / em + np.sum(ys * ys, axis=-1)
        expo = expo + lw[None]
        if extra_log is not None:
            expo = expo + extra_log(xs, ys, S[None])
        if part is None:
            out[i:i + chunk] = logsumexp(expo, axis=1)
        else:
            phi = cutoff_value(xs, ys, S[None], c0)
            b = phi if part == "local" else 1.0 - phi
            with np.errstate(divide="ignore"):
                out[i:i + chunk] = logsumexp(expo, axis=1, b=b)
    return out


def heat_kernel_sintegral(alpha, t, x, y, part=None, c0=None, order=None):
    """W_t(x, y) (or its local/global part) from the (-1,1)^n representation."""
    alpha = AlphaParam.of(alpha)
    _check_t(t)
    x, y = _pair(alpha, x, y)
    shape = x.shape[:-1]
    xf, yf = x.reshape(-1, alpha.n), y.reshape(-1, alpha.n)
    if part is not None and c0 is None:
        c0 = 8.0 * (alpha.n + alpha.alpha_hat) + 1.0
    em = -math.expm1(-t)
    lg = _sintegral_log(alpha, math.exp(-0.5 * t), em, xf, yf, part, c0, order)
    lg = lg - (alpha.n + alpha.alpha_hat) * math.log(em)
    with np.errstate(over="ignore"):
        return np.exp(lg).reshape(shape)


def heat_kernel_split(heat: HeatEval, x, y, c0=None):
    """(local, global) parts of W_t weighted by phi and 1 - phi."""
    loc = heat_kernel_sintegral(heat.alpha, heat.t, x, y, "local", c0, heat.order)
    glo = heat_kernel_sintegral(heat.alpha, heat.t, x, y, "global", c0, heat.order)
    return loc, glo


def heat_kernel_malpha(alpha, u, x, y, part=None, c0=None, order=None):
    """Kernel of W_t against m_alpha in the variable u = 1 - e^{-t} in (0, 1):
    (2^n / prod Gamma(alpha_i+1)) u^{-(n+alpha)} int exp(-q_-(sqrt(1-u) x, y, s)/u) w(s) Pi(s) ds."""
    alpha = AlphaParam.of(alpha)
    x, y = _pair(alpha, x, y)
    shape = x.shape[:-1]
    xf, yf = x.reshape(-1, alpha.n), y.reshape(-1, alpha.n)
    if part is not None and c0 is None:
        c0 = 8.0 * (alpha.n + alpha.alpha_hat) + 1.0
    lg = _sintegral_log(alpha, math.sqrt(1.0 - u), u, xf, yf, part, c0, order)
    lg = lg - np.sum(yf * yf, axis=-1) - (alpha.n + alpha.alpha_hat) * math.log(u)
    lg = lg + alpha.n * math.log(2.0) - float(np.sum(alpha.log_normalizers))
    with np.errstate(over="ignore"):
        return np.exp(lg).reshape(shape)


# ----------------------------------------------------------------------------
# spectral form and expansions

def _index_table(alpha, kmax):
    return np.array(multi_indices(alpha.n, kmax), dtype=int).reshape(-1, alpha.n)


def heat_kernel_spectral(alpha, t, x, y, kmax=60):
    """Truncated sum over |k| <= kmax of e^{-|k| t} L_k(x) L_k(y)."""
    alpha = AlphaParam.of(alpha)
    x, y = _pair(alpha, x, y)
    idx = _index_table(alpha, kmax)
    lam = idx.sum(axis=1)
    lx = laguerre_tensor_values(idx, alpha, x)
    ly = laguerre_tensor_values(idx, alpha, y)
    decay = np.exp(-lam * t).reshape((-1,) + (1,) * (lx.ndim - 1))
    return np.sum(decay * lx * ly, axis=0)


def heat_kernel(heat: HeatEval, x, y):
    """W_t(x, y) by the method named in ``heat``."""
    if heat.method == "bessel-product":
        return heat_kernel_bessel(heat.alpha, heat.t, x, y)
    if heat.method == "s-integral":
        return heat_kernel_sintegral(heat.alpha, heat.t, x, y, order=heat.order)
    _check_t(heat.t)
    return heat_kernel_spectral(heat.alpha, heat.t, x, y, heat.kmax)


@dataclass(frozen=True)
class Expansion:
    """Finite Laguerre expansion sum_k c_k L_k with multi-indices as rows."""

    alpha: AlphaParam
    indices: np.ndarray = field(repr=False)
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "alpha", AlphaParam.of(self.alpha))
        idx = np.asarray(self.indices, dtype=int).reshape(-1, self.alpha.n)
        c = np.asarray(self.coeffs)
        if c.shape != (idx.shape[0],):
            raise ValueError("one coefficient per multi-index expected")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def single(cls, alpha, k, c=1.0):
        alpha = AlphaParam.of(alpha)
        return cls(alpha, np.atleast_2d(np.asarray(k, dtype=int)).reshape(1, alpha.n), np.array([c]))

    @classmethod
    def full(cls, alpha, kmax, coeffs):
        alpha = AlphaParam.of(alpha)
        return cls(alpha, _index_table(alpha, kmax), coeffs)

    @classmethod
    def project(cls, alpha, fn, kmax, grid: TensorGrid | None = None):
        """Coefficients <fn, L_k> for |k| <= kmax by quadrature on ``grid``."""
        alpha = AlphaParam.of(alpha)
        grid = grid or TensorGrid.laguerre(alpha, max(2 * kmax + 20, 60))
        idx = _index_table(alpha, kmax)
        pts = grid.flat_points()
        vals = np.asarray(fn(pts)) * grid.weights("mu_alpha").ravel()
        basis = laguerre_tensor_values(idx, alpha, pts)
        return cls(alpha, idx, basis @ vals)

    @property
    def eigenvalues(self):
        return self.indices.sum(axis=1).astype(float)

    def evaluate(self, x, beta=None):
        x = np.asarray(x, dtype=float)
        basis = laguerre_tensor_values(self.indices, self.alpha, x, beta)
        return np.tensordot(self.coeffs, basis, axes=(0, 0))

    def on_grid(self, grid: TensorGrid, beta=None) -> DiscreteFunction:
        return DiscreteFunction(grid, self.evaluate(grid.points(), beta))

    def map_spectrum(self, fn) -> "Expansion":
        return Expansion(self.alpha, self.indices, self.coeffs * fn(self.eigenvalues))

    def norm2(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))


# ----------------------------------------------------------------------------
# semigroup application

def _output_points(x, alpha):
    if isinstance(x, TensorGrid):
        return x.points(), x
    return np.asarray(x, dtype=float), None


def _wrap(vals, grid):
    return DiscreteFunction(grid, vals) if grid is not None else vals


def heat_apply(f, heat: HeatEval, x):
    """W_t f at the points (or grid) x.

    Expansions are propagated exactly on the spectrum; discrete functions on a
    mu_alpha grid are integrated against the product-form kernel.
    """
    pts, grid = _output_points(x, heat.alpha)
    if isinstance(f, Expansion):
        return _wrap(f.map_spectrum(lambda lam: np.exp(-lam * heat.t)).evaluate(pts), grid)
    if not isinstance(f, DiscreteFunction):
        raise TypeError("heat_apply needs an Expansion or a DiscreteFunction")
    if f.grid.alpha != heat.alpha:
        raise ValueError("function grid and semigroup use different alpha")
    flat = pts.reshape(-1, heat.alpha.n)
    if heat.method == "bessel-product" and heat.alpha.n > 1:
        if grid is not None:
            return _wrap(_heat_apply_tensor(f, heat, grid), grid)
        return _wrap(_heat_apply_separable(f, heat, flat).reshape(pts.shape[:-1]), grid)
    ys = f.grid.flat_points()
    fw = (f.values * f.grid.weights("mu_alpha")).ravel()
    out = np.empty(flat.shape[0], dtype=np.result_type(fw, float))
    step = max(1, 400_000 // max(ys.shape[0], 1))
    for i in range(0, flat.shape[0], step):
        k = heat_kernel(heat, flat[i:i + step, None, :], ys[None])
        out[i:i + step] = k @ fw
    return _wrap(out.reshape(pts.shape[:-1]), grid)


def _heat_apply_tensor(f, heat, grid):
    """Tensor grid to tensor grid: one small kernel matrix per axis."""
    acc = f.values * f.grid.weights("mu_alpha")
    for i, (a, src, dst) in enumerate(zip(heat.alpha.alpha, f.grid.axes, grid.axes)):
        k = heat_kernel_bessel(AlphaParam.of(a), heat.t, dst[:, None, None], src[None, :, None])
        acc = np.moveaxis(np.tensordot(k, acc, axes=(1, i)), 0, i)
    return acc


def _heat_apply_separable(f, heat, flat):
    """The product kernel contracted one axis at a time against a tensor grid."""
    acc = f.values * f.grid.weights("mu_alpha")
    for i, (a, axis) in enumerate(zip(heat.alpha.alpha, f.grid.axes)):
        k = heat_kernel_bessel(AlphaParam.of(a), heat.t, flat[:, i, None, None], axis[None, :, None])
        if i == 0:
            acc = np.tensordot(k, acc, axes=(1, 0))
        else:
            acc = np.einsum("pj,pj...->p...", k, acc)
    return acc


# ----------------------------------------------------------------------------
# subordination

@dataclass(frozen=True)
class SubordinationRule:
    """Nodes for int_0^inf e^{-v} v^{-1/2} g(t^2/(4v)) dv / sqrt(pi).

    ``log-trapezoid`` integrates in sigma = log v with step h over
    [sigma_lo, sigma_hi]; nodes whose u = t^2/(4v) exceeds u_max are merged
    into a single node at u_max (the heat kernel has relaxed to its limit
    there).  ``gauss-laguerre`` uses the rule of the given order with weight
    v^{-1/2} e^{-v}.
    """

    kind: str = "log-trapezoid"
    order: int = 64
    h: float = 0.2
    sigma_lo: float = -75.0
    sigma_hi: float = 4.5
    u_max: float = 40.0

    def _v_nodes(self):
        if self.kind == "gauss-laguerre":
            rule = make_rule("gauss-laguerre", self.order, alpha=-0.5)
            v = np.asarray(rule.nodes)
            return v, np.asarray(rule.weights) * np.sqrt(v) * np.exp(v)
        if self.kind != "log-trapezoid":
            raise ValueError(f"unknown subordination rule {self.kind!r}")
        sig = np.arange(self.sigma_lo, self.sigma_hi + 1e-12, self.h)
        v = np.exp(sig)
        # weight for int g(v) dv with g = integrand without any built-in factor
        return v, self.h * v

    def nodes(self, t, k=0):
        """(u_nodes, weights) so that d^k/dt^k P_t = sum_j weights_j W_{u_j}."""
        if k > 8:
            raise ValueError("time derivatives above order 8 are not supported")
        v, dv = self._v_nodes()
        if k == 0:
            w = dv * np.exp(-v) / np.sqrt(v) / math.sqrt(math.pi)
        else:
            hk = hermite(k + 1)
            w = dv * v ** (0.5 * k - 1.0) * hk(np.sqrt(v)) * np.exp(-v)
            w = w * (-1) ** k * t ** (-k) / (2.0 * math.sqrt(math.pi))
        u = t * t / (4.0 * v)
        if self.kind == "log-trapezoid":
            far = u >= self.u_max
            if far.any():
                u = np.concatenate([[self.u_max], u[~far]])
                w = np.concatenate([[w[far].sum()], w[~far]])
        return u, w


def poisson_kernel(alpha, t, x, y, rule: SubordinationRule | None = None):
    """P_t(x, y) by subordination of the product-form heat kernel."""
    alpha = AlphaParam.of(alpha)
    _check_t(t)
    rule = rule or SubordinationRule()
    u, w = rule.nodes(t)
    x, y = _pair(alpha, x, y)
    return sum(wj * heat_kernel_bessel(alpha, uj, x, y) for uj, wj in zip(u, w))


def dt_poisson(alpha, k, t, x, y, rule: SubordinationRule | None = None):
    """k-th t-derivative of P_t(x, y), differentiating the subordination Gaussian."""
    alpha = AlphaParam.of(alpha)
    if k < 1:
        raise ValueError("derivative order must be >= 1")
    _check_t(t)
    rule = rule or SubordinationRule()
    u, w = rule.nodes(t, k)
    x, y = _pair(alpha, x, y)
    return sum(wj * heat_kernel_bessel(alpha, uj, x, y) for uj, wj in zip(u, w))


def poisson_apply(f: Expansion, t, x, rule: SubordinationRule | None = None, exact=False, k=0):
    """d^k/dt^k P_t f at points x; exact=True uses e^{-t sqrt(lambda)} directly,
    otherwise subordination over the exact heat propagation of f."""
    pts, grid = _output_points(x, f.alpha)
    if exact:
        def mult(lam):
            s = np.sqrt(lam)
            return (-s) ** k * np.exp(-t * s)
        return _wrap(f.map_spectrum(mult).evaluate(pts), grid)
    rule = rule or SubordinationRule()
    u, w = rule.nodes(t, k)
    lam = f.eigenvalues
    mult = np.exp(-np.outer(u, lam)).T @ w
    return _wrap(Expansion(f.alpha, f.indices, f.coeffs * mult).evaluate(pts), grid)


# ----------------------------------------------------------------------------
# z-derivative structure of the Gaussian factor

def exp_derivative_factor(alpha, x, y, s, r):
    """(d/dz E)/E times (1 - r^2)^2 at r = e^{-z/2}, where
    E = exp(-q_-(r x, y, s)/(1 - r^2)) / (1 - r^2)^(n + alpha_hat).

    Equals m r^4 - S r^3 + (a - m) r^2 - S r with m = n + alpha_hat,
    S = sum x_i y_i s_i and a = |x|^2 + |y|^2.
    """
    alpha = AlphaParam.of(alpha)
    x, y, s = (np.asarray(v, dtype=float) for v in (x, y, s))
    m = alpha.n + alpha.alpha_hat
    S = float(np.sum(x * y * s))
    a = float(np.sum(x * x + y * y))
    r = np.asarray(r, dtype=float)
    return m * r ** 4 - S * r ** 3 + (a - m) * r ** 2 - S * r


def log_gaussian_factor(alpha, x, y, s, z):
    """log[exp(-q_-(e^{-z/2} x, y, s)/(1 - e^{-z})) / (1 - e^{-z})^(n + alpha_hat)];
    accepts complex z for complex-step differentiation."""
    alpha = AlphaParam.of(alpha)
    x, y, s = (np.asarray(v, dtype=float) for v in (x, y, s))
    r = np.exp(-0.5 * np.asarray(z))
    em = 1.0 - r * r
    q = r * r * np.sum(x * x) + np.sum(y * y) - 2.0 * r * np.sum(x * y * s)
    return -q / em - (alpha.n + alpha.alpha_hat) * np.log(em)
