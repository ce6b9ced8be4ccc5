"""Measures, quadratic forms, local/global regions, the smooth cutoff, the
covering ball system and Calderon-Zygmund constant estimators."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import integrate
from scipy.special import expit

from .specfun import AlphaParam, make_rule

__all__ = [
    "RegionParams",
    "KernelContext",
    "BallSystem",
    "CheckReport",
    "q_forms",
    "region_classify",
    "cutoff_phi",
    "cutoff_value",
    "psi",
    "malpha_ball",
    "malpha_ball_closed",
    "mu_density",
    "malpha_density",
    "mu_total_mass",
    "build_ball_system",
    "locality_delta",
    "cz_size_check",
    "cz_regularity_check",
]

TINY = 1e-300


@dataclass(frozen=True)
class RegionParams:
    tau: float = 1.0
    c0: float = 9.0

    def __post_init__(self):
        if not (self.tau > 0 and self.c0 > 0):
            raise ValueError("tau and c0 must be positive")

    @classmethod
    def default(cls, alpha, tau: float = 1.0) -> "RegionParams":
        alpha = AlphaParam.of(alpha)
        return cls(tau, 8.0 * (alpha.n + alpha.alpha_hat) + 1.0)

    def admissible_for_maximal(self, alpha) -> bool:
        alpha = AlphaParam.of(alpha)
        return self.c0 > 8.0 * (alpha.n + alpha.alpha_hat)


def q_forms(x, y, s):
    """(q_plus, q_minus) with the last axis summed.  Written as sums of
    squares so both stay nonnegative in floating point."""
    x, y, s = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, s)))
    rest = y * y * (1.0 - s * s)
    qp = np.sum((x + y * s) ** 2 + rest, axis=-1)
    qm = np.sum((x - y * s) ** 2 + rest, axis=-1)
    return qp, qm


@dataclass(frozen=True)
class KernelContext:
    """An evaluation point (x, y, s); arrays may carry leading batch axes."""

    alpha: AlphaParam
    x: np.ndarray
    y: np.ndarray
    s: np.ndarray

    def __post_init__(self):
        alpha = AlphaParam.of(self.alpha)
        object.__setattr__(self, "alpha", alpha)
        x, y, s = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (self.x, self.y, self.s)))
        if x.shape[-1] != alpha.n:
            raise ValueError("point dimension does not match alpha")
        if np.any(np.abs(s) > 1):
            raise ValueError("s must lie in [-1, 1]^n")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "s", s)

    @cached_property
    def _q(self):
        return q_forms(self.x, self.y, self.s)

    @property
    def q_plus(self):
        return self._q[0]

    @property
    def q_minus(self):
        return self._q[1]

    @cached_property
    def a(self):
        return np.sum(self.x ** 2 + self.y ** 2, axis=-1)

    @cached_property
    def b(self):
        return 2.0 * np.sum(self.x * self.y * self.s, axis=-1)

    @cached_property
    def xnorm2(self):
        return np.sum(self.x ** 2, axis=-1)

    @cached_property
    def ynorm2(self):
        return np.sum(self.y ** 2, axis=-1)

    @cached_property
    def weight(self):
        """1 + |x| + |y|."""
        return 1.0 + np.sqrt(self.xnorm2) + np.sqrt(self.ynorm2)


def region_classify(ctx: KernelContext, params: RegionParams):
    """'local' where sqrt(q_minus) <= c0 tau / (1+|x|+|y|), else 'global'."""
    local = np.sqrt(ctx.q_minus) <= params.c0 * params.tau / ctx.weight
    if np.ndim(local) == 0:
        return "local" if local else "global"
    return np.where(local, "local", "global")


def is_local(ctx: KernelContext, params: RegionParams):
    return np.sqrt(ctx.q_minus) <= params.c0 * params.tau / ctx.weight


def psi(r):
    """Smooth step: 1 on [0,1], 0 on [4,inf), built from exp(-1/t)."""
    r = np.asarray(r, dtype=float)
    val = np.array(r <= 1, dtype=float)
    band = (r > 1) & (r < 4)
    rb = r[band]
    val[band] = expit(1.0 / (rb - 1.0) - 1.0 / (4.0 - rb))
    return val if val.ndim else float(val)


def _psi_and_slope(r):
    inside = (r > 1) & (r < 4)
    ri = np.where(inside, r, 2.5)
    e1 = -1.0 / (4.0 - ri)
    e2 = -1.0 / (ri - 1.0)
    p = expit(e1 - e2)
    slope = p * (1 - p) * (-1.0 / (4.0 - ri) ** 2 - 1.0 / (ri - 1.0) ** 2)
    val = np.where(r <= 1, 1.0, np.where(r >= 4, 0.0, p))
    return val, np.where(inside, slope, 0.0)


def cutoff_value(x, y, s, c0):
    qp, qm = q_forms(x, y, s)
    w = 1.0 + np.linalg.norm(np.asarray(x, float), axis=-1) + np.linalg.norm(np.asarray(y, float), axis=-1)
    return psi(qm * w * w / (c0 * c0))


def cutoff_phi(ctx: KernelContext, c0: float):
    """phi = psi(q_minus (1+|x|+|y|)^2 / c0^2) with analytic x- and y-gradients."""
    w = ctx.weight
    arg = ctx.q_minus * w * w / (c0 * c0)
    val, slope = _psi_and_slope(np.asarray(arg))
    xn = np.sqrt(ctx.xnorm2)[..., None]
    yn = np.sqrt(ctx.ynorm2)[..., None]
    wq = (w * w)[..., None] / c0 ** 2
    q2w = (2.0 * ctx.q_minus * w)[..., None] / c0 ** 2
    dq_dx = 2.0 * (ctx.x - ctx.y * ctx.s)
    dq_dy = 2.0 * (ctx.y - ctx.x * ctx.s)
    grad_x = slope[..., None] * (dq_dx * wq + q2w * ctx.x / np.maximum(xn, TINY))
    grad_y = slope[..., None] * (dq_dy * wq + q2w * ctx.y / np.maximum(yn, TINY))
    return val, grad_x, grad_y


# ----------------------------------------------------------------------------
# measures

def malpha_density(alpha, x):
    alpha = AlphaParam.of(alpha)
    x = np.maximum(np.asarray(x, dtype=float), TINY)
    return np.prod(x ** (2 * alpha.array + 1), axis=-1)


def mu_density(alpha, x):
    alpha = AlphaParam.of(alpha)
    x = np.maximum(np.asarray(x, dtype=float), TINY)
    logd = np.sum((2 * alpha.array + 1) * np.log(x) - x * x - alpha.log_normalizers + math.log(2.0), axis=-1)
    return np.exp(logd)


def mu_total_mass(alpha, order: int = 60) -> float:
    """Total mass of mu_alpha by tensor Gauss-Laguerre in u = x^2."""
    alpha = AlphaParam.of(alpha)
    total = 1.0
    for a, lg in zip(alpha.alpha, alpha.log_normalizers):
        rule = make_rule("gauss-laguerre", order, alpha=a)
        total *= math.fsum(rule.weights) / math.exp(lg)
    return total


def malpha_ball_closed(alpha, center, radius):
    """The comparable closed form r^n prod (x_i + r)^(2 alpha_i + 1)."""
    alpha = AlphaParam.of(alpha)
    c = np.asarray(center, dtype=float)
    r = np.asarray(radius, dtype=float)
    return r ** alpha.n * np.prod((c + r[..., None]) ** (2 * alpha.array + 1), axis=-1)


def _slab(a, lo, hi):
    return (hi ** (2 * a + 2) - lo ** (2 * a + 2)) / (2 * a + 2)


def _ball_mass(alpha, c, r2, dim, epsrel):
    a = alpha[dim]
    rho = math.sqrt(max(r2, 0.0))
    lo, hi = max(0.0, c[dim] - rho), c[dim] + rho
    if hi <= lo:
        return 0.0
    if dim == len(alpha) - 1:
        return _slab(a, lo, hi)

    def inner(t):
        return t ** (2 * a + 1) * _ball_mass(alpha, c, r2 - (t - c[dim]) ** 2, dim + 1, epsrel)

    brk = [p for p in (c[dim],) if lo < p < hi]
    val, err = integrate.quad(inner, lo, hi, epsrel=epsrel, epsabs=0.0, limit=200, points=brk or None)
    if not np.isfinite(val) or err > 1e-6 * abs(val) + 1e-300:
        raise ArithmeticError(f"ball measure quadrature did not converge (err {err:g})")
    return val


def malpha_ball(alpha, center, radius):
    """m_alpha of B(center, radius) intersected with the open orthant.

    Returns (exact, closed_form, exact/closed_form); the last coordinate is
    integrated in closed form, the others by adaptive quadrature.
    """
    alpha = AlphaParam.of(alpha)
    c = np.asarray(center, dtype=float).reshape(alpha.n)
    if not radius > 0:
        raise ValueError("radius must be positive")
    exact = float(_ball_mass(alpha.alpha, c, float(radius) ** 2, 0, 1e-10))
    closed = float(malpha_ball_closed(alpha, c, radius))
    return exact, closed, exact / closed


def malpha_ball_many(alpha, centers, radii):
    alpha = AlphaParam.of(alpha)
    centers = np.asarray(centers, dtype=float).reshape(-1, alpha.n)
    radii = np.broadcast_to(np.asarray(radii, dtype=float), centers.shape[:1])
    if alpha.n == 1:
        a = alpha.alpha[0]
        lo = np.maximum(0.0, centers[:, 0] - radii)
        return _slab(a, lo, centers[:, 0] + radii)
    return np.array([malpha_ball(alpha, c, r)[0] for c, r in zip(centers, radii)])


# ----------------------------------------------------------------------------
# covering balls

@dataclass(frozen=True)
class BallSystem:
    alpha: AlphaParam
    bound: float
    centers: np.ndarray = field(repr=False)
    radii: np.ndarray = field(repr=False)
    overlap_factor: float
    cover_gap: float
    max_overlap: int
    measure_constant: float

    def __len__(self):
        return len(self.radii)


def _dyadic_centers(n, bound):
    cells = [(np.full(n, bound / 2.0), bound / 2.0)]
    done = []
    while cells:
        nxt = []
        for c, h in cells:
            rho = 1.0 / (2.0 * (1.0 + np.linalg.norm(c)))
            if h * math.sqrt(n) <= rho:
                done.append(c)
            else:
                for corner in np.ndindex(*(2,) * n):
                    nxt.append((c + (np.array(corner) - 0.5) * h, h / 2.0))
        cells = nxt
    centers = np.array(sorted(map(tuple, done)))
    return centers


def _multiplicity(points, centers, radii, factor, chunk=4096):
    counts = np.zeros(len(points), dtype=int)
    for i in range(0, len(points), chunk):
        p = points[i:i + chunk]
        d = np.linalg.norm(p[:, None, :] - centers[None], axis=-1)
        counts[i:i + chunk] = np.sum(d < factor * radii[None], axis=1)
    return counts


def build_ball_system(bound: float, delta: float, alpha=(0.0,), probes_per_axis: int | None = None,
                      set_samples: int = 64, seed: int = 0, gap_tol: float = 1e-12) -> BallSystem:
    """Cover (0, bound]^n with balls B(x_l, 1/(2(1+|x_l|))) on a dyadic graded lattice.

    Each accepted dyadic cube fits inside its ball, which gives the cover;
    the probe grid then measures the cover gap, the multiplicity of the
    dilated family, and the comparability constant between mu_alpha and
    e^{-|x_l|^2} m_alpha inside every ball.
    """
    alpha = AlphaParam.of(alpha)
    if not bound > 0:
        raise ValueError("bound must be positive")
    if not delta > 1:
        raise ValueError("overlap factor must exceed 1")
    n = alpha.n
    centers = _dyadic_centers(n, float(bound))
    radii = 1.0 / (2.0 * (1.0 + np.linalg.norm(centers, axis=1)))

    m = probes_per_axis or (400 if n == 1 else 60)
    axis = (np.arange(m) + 0.5) / m * bound
    probes = np.stack(np.meshgrid(*(axis,) * n, indexing="ij"), axis=-1).reshape(-1, n)
    probes = np.vstack([probes, np.full((1, n), float(bound))])
    d = np.min(np.linalg.norm(probes[:, None, :] - centers[None], axis=-1) - radii[None], axis=1)
    gap = float(max(0.0, d.max()))
    if gap > gap_tol:
        raise RuntimeError(f"ball system leaves a gap of {gap:g}")
    overlap = int(_multiplicity(probes, centers, radii, delta).max())

    rng = np.random.default_rng(seed)
    lo_hi = []
    for c, r in zip(centers, radii):
        v = rng.normal(size=(set_samples, n))
        v *= (rng.random((set_samples, 1)) ** (1.0 / n)) * r / np.linalg.norm(v, axis=1, keepdims=True)
        pts = np.abs(c + v)
        ratio = mu_density(alpha, pts) / (math.exp(-float(c @ c)) * malpha_density(alpha, pts))
        lo_hi.append((ratio.min(), ratio.max()))
    lo_hi = np.array(lo_hi)
    const = float(max(lo_hi[:, 1].max(), 1.0 / lo_hi[:, 0].min()))
    return BallSystem(alpha, float(bound), centers, radii, float(delta), gap, overlap, const)


def locality_delta(system: BallSystem, eta: float, c0: float, samples: int = 256, seed: int = 0) -> float:
    """Largest dilation delta (found by bisection on sampled point pairs) for
    which every pair drawn from a dilated ball delta*B_l is local at level
    eta for s near (1, ..., 1), i.e. |x - y| (1 + |x| + |y|) <= c0 eta."""
    rng = np.random.default_rng(seed)
    n = system.centers.shape[1]
    u = rng.normal(size=(2, samples, n))
    u *= (rng.random((2, samples, 1)) ** (1.0 / n)) / np.linalg.norm(u, axis=-1, keepdims=True)

    def ok(dl):
        for c, r in zip(system.centers, system.radii):
            x = np.abs(c + dl * r * u[0])
            y = np.abs(c + dl * r * u[1])
            lhs = np.linalg.norm(x - y, axis=1) * (1 + np.linalg.norm(x, axis=1) + np.linalg.norm(y, axis=1))
            if lhs.max() > c0 * eta:
                return False
        return True

    lo, hi = 1.0, 1.0
    if not ok(1.0):
        return float("nan")
    while ok(hi) and hi < 1e6:
        lo, hi = hi, hi * 2
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if ok(mid) else (lo, mid)
    return lo


# ----------------------------------------------------------------------------
# Calderon-Zygmund constant estimators

@dataclass(frozen=True)
class CheckReport:
    check_name: str
    n: int
    alpha_hat: float
    samples: int
    constant: float
    refinement_ratio: float
    passed: bool
    skipped: int = 0

    def row(self):
        return (self.check_name, self.n, self.alpha_hat, self.samples, self.constant,
                self.refinement_ratio, self.passed)


def _sup_norm(v):
    return float(np.max(np.abs(v))) if np.size(v) else 0.0


def _drift(c, c_ref):
    if c_ref is None:
        return 1.0
    if c == 0 and c_ref == 0:
        return 1.0
    return c_ref / c if c > 0 else math.inf


def _cz_constant(values, masses):
    prods = np.asarray(values) * np.asarray(masses)
    return float(np.max(prods)) if prods.size else 0.0


def cz_size_check(kernel, alpha, xs, ys, kernel_refined=None, norm=_sup_norm, drift_tol=0.1,
                  name="cz_size") -> CheckReport:
    """sup ||K(x,y)|| m_alpha(B(x,|x-y|)) over off-diagonal sample pairs.

    kernel_refined, when given, is the same kernel at a finer discretisation;
    the report carries the ratio of the two constants.
    """
    alpha = AlphaParam.of(alpha)
    xs = np.asarray(xs, dtype=float).reshape(-1, alpha.n)
    ys = np.asarray(ys, dtype=float).reshape(-1, alpha.n)
    dist = np.linalg.norm(xs - ys, axis=1)
    keep = dist > 0
    xs, ys, dist = xs[keep], ys[keep], dist[keep]
    masses = malpha_ball_many(alpha, xs, dist)
    const = _cz_constant([norm(kernel(x, y)) for x, y in zip(xs, ys)], masses)
    ref = None
    if kernel_refined is not None:
        ref = _cz_constant([norm(kernel_refined(x, y)) for x, y in zip(xs, ys)], masses)
    ratio = _drift(const, ref)
    passed = math.isfinite(const) and abs(ratio - 1.0) <= drift_tol
    return CheckReport(name, alpha.n, alpha.alpha_hat, len(xs), const, ratio, passed, int(np.sum(~keep)))


def cz_regularity_check(kernel, alpha, xs, ys, zs, kernel_refined=None, norm=_sup_norm, drift_tol=0.1,
                        name="cz_regularity") -> CheckReport:
    """sup ||K(x,y)-K(z,y)|| |x-y| m_alpha(B(x,|x-y|)) / |x-z| over triples
    with 0 < |x-z| <= |x-y|/2; other triples are skipped and counted."""
    alpha = AlphaParam.of(alpha)
    xs, ys, zs = (np.asarray(v, dtype=float).reshape(-1, alpha.n) for v in (xs, ys, zs))
    dxy = np.linalg.norm(xs - ys, axis=1)
    dxz = np.linalg.norm(xs - zs, axis=1)
    keep = (dxz > 0) & (dxz <= dxy / 2)
    skipped = int(np.sum(~keep))
    xs, ys, zs, dxy, dxz = xs[keep], ys[keep], zs[keep], dxy[keep], dxz[keep]
    scale = dxy * malpha_ball_many(alpha, xs, dxy) / dxz if len(xs) else np.zeros(0)

    def const_for(k):
        return _cz_constant([norm(np.asarray(k(x, y)) - np.asarray(k(z, y))) for x, y, z in zip(xs, ys, zs)], scale)

    const = const_for(kernel)
    ref = const_for(kernel_refined) if kernel_refined is not None else None
    ratio = _drift(const, ref)
    passed = math.isfinite(const) and abs(ratio - 1.0) <= drift_tol
    return CheckReport(name, alpha.n, alpha.alpha_hat, len(xs), const, ratio, passed, skipped)
