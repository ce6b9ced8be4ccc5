"""Orthogonal polynomials, scaled Bessel functions and Gauss-type quadrature.

Everything here is a pure function of its arguments.  Polynomials carry
monomial coefficients (constant term first); numerical evaluation of high
degree Laguerre families goes through the three-term recurrence instead,
which is far better conditioned than Horner on monomial coefficients.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln

__all__ = [
    "AlphaParam",
    "PolyCoeffs",
    "QuadratureRule",
    "laguerre_normalized",
    "laguerre_tensor",
    "laguerre_values",
    "laguerre_square_derivatives",
    "laguerre_tensor_values",
    "hermite",
    "bessel_i_scaled",
    "log_bessel_i_scaled",
    "log_gamma",
    "make_rule",
    "multi_indices",
]


# ----------------------------------------------------------------------------
# parameters

@dataclass(frozen=True)
class AlphaParam:
    """Type vector alpha in [0, inf)^n with cached derived scalars."""

    alpha: tuple

    def __post_init__(self):
        a = tuple(float(v) for v in np.atleast_1d(np.asarray(self.alpha, dtype=float)))
        if len(a) < 1:
            raise ValueError("alpha must have at least one entry")
        if any(not math.isfinite(v) or v < 0 for v in a):
            raise ValueError(f"alpha entries must be finite and >= 0, got {a}")
        object.__setattr__(self, "alpha", a)

    @classmethod
    def of(cls, alpha) -> "AlphaParam":
        if isinstance(alpha, AlphaParam):
            return alpha
        return cls(tuple(np.atleast_1d(alpha)))

    @property
    def n(self) -> int:
        return len(self.alpha)

    @property
    def alpha_hat(self) -> float:
        return math.fsum(self.alpha)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.alpha)

    @property
    def log_normalizers(self) -> np.ndarray:
        return gammaln(np.array(self.alpha) + 1.0)


def multi_indices(n: int, total_max: int):
    """All k in N^n with |k| <= total_max, graded then lexicographic."""
    out = []
    for total in range(total_max + 1):
        for k in itertools.product(range(total + 1), repeat=n):
            if sum(k) == total:
                out.append(k)
    return out


# ----------------------------------------------------------------------------
# polynomials

class PolyCoeffs:
    """Real polynomial stored by monomial coefficients, constant term first."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Sequence[float]):
        c = np.array(coeffs, dtype=float).ravel()
        if c.size == 0:
            c = np.zeros(1)
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else np.zeros(1)
        c.setflags(write=False)
        self._c = c

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int:
        return self._c.size - 1

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        acc = np.full(x.shape, self._c[-1])
        for c in self._c[-2::-1]:
            acc = acc * x + c
        return acc if acc.ndim else float(acc)

    def deriv(self, m: int = 1) -> "PolyCoeffs":
        c = self._c
        for _ in range(m):
            if c.size == 1:
                return PolyCoeffs([0.0])
            c = c[1:] * np.arange(1, c.size)
        return PolyCoeffs(c)

    def __add__(self, other):
        other = other if isinstance(other, PolyCoeffs) else PolyCoeffs([other])
        m = max(self._c.size, other._c.size)
        return PolyCoeffs(np.pad(self._c, (0, m - self._c.size)) + np.pad(other._c, (0, m - other._c.size)))

    __radd__ = __add__

    def __neg__(self):
        return PolyCoeffs(-self._c)

    def __sub__(self, other):
        return self + (-(other if isinstance(other, PolyCoeffs) else PolyCoeffs([other])))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, PolyCoeffs):
            return PolyCoeffs(np.convolve(self._c, other._c))
        return PolyCoeffs(self._c * float(other))

    __rmul__ = __mul__

    def shift_down(self) -> "PolyCoeffs":
        """p(x)/x for a polynomial with zero constant term."""
        if self._c[0] != 0.0:
            raise ValueError("polynomial has a nonzero constant term")
        return PolyCoeffs(self._c[1:]) if self._c.size > 1 else PolyCoeffs([0.0])

    def of_square(self) -> "PolyCoeffs":
        """The polynomial x -> p(x^2)."""
        c = np.zeros(2 * self._c.size - 1)
        c[::2] = self._c
        return PolyCoeffs(c)

    def __eq__(self, other):
        return isinstance(other, PolyCoeffs) and np.array_equal(self._c, other._c)

    def __hash__(self):
        return hash(self._c.tobytes())

    def __repr__(self):
        return f"PolyCoeffs({self._c.tolist()})"


_X = PolyCoeffs([0.0, 1.0])


def _laguerre_scale(k, alpha):
    """Factor turning the classical L_k^(alpha) into the orthonormal one."""
    k = np.asarray(k, dtype=float)
    return np.exp(0.5 * (gammaln(k + 1) + gammaln(alpha + 1) - gammaln(k + alpha + 1)))


@lru_cache(maxsize=512)
def laguerre_normalized(k: int, alpha: float) -> PolyCoeffs:
    """Orthonormal Laguerre polynomial of degree k for the weight u^alpha e^{-u}/Gamma(alpha+1)."""
    if int(k) != k or k < 0:
        raise ValueError(f"degree must be a nonnegative integer, got {k}")
    if not alpha >= 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    k = int(k)
    prev, cur = PolyCoeffs([0.0]), PolyCoeffs([1.0])
    for j in range(k):
        nxt = ((2 * j + 1 + alpha) - _X) * cur - (j + alpha) * prev
        prev, cur = cur, nxt * (1.0 / (j + 1))
    return cur * float(_laguerre_scale(k, alpha))


def _check_point(x, n):
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (n,):
        raise ValueError(f"expected points with trailing dimension {n}, got shape {x.shape}")
    return x


def laguerre_tensor(k, alpha, x):
    """Product of orthonormal Laguerre polynomials at squared coordinates."""
    alpha = AlphaParam.of(alpha)
    k = tuple(int(v) for v in np.atleast_1d(k))
    if len(k) != alpha.n:
        raise ValueError("multi-index and alpha dimensions differ")
    x = _check_point(x, alpha.n)
    out = np.ones(x.shape[:-1])
    for i, (ki, ai) in enumerate(zip(k, alpha.alpha)):
        out = out * laguerre_values(ki, ai, x[..., i] ** 2)[ki]
    return out if out.ndim else float(out)


def _laguerre_classical(kmax: int, alpha: float, u):
    u = np.asarray(u, dtype=float)
    out = np.empty((kmax + 1,) + u.shape)
    out[0] = 1.0
    if kmax >= 1:
        out[1] = 1.0 + alpha - u
    for j in range(1, kmax):
        out[j + 1] = ((2 * j + 1 + alpha - u) * out[j] - (j + alpha) * out[j - 1]) / (j + 1)
    return out


def laguerre_values(kmax: int, alpha: float, u):
    """Orthonormal L_0..L_kmax at u by recurrence; shape (kmax+1, *u.shape)."""
    vals = _laguerre_classical(kmax, alpha, u)
    scale = _laguerre_scale(np.arange(kmax + 1), alpha)
    return vals * scale.reshape((-1,) + (1,) * (vals.ndim - 1))


def laguerre_square_derivatives(kmax: int, alpha: float, m: int, x):
    """m-th x-derivative of x -> L_k(x^2) for k = 0..kmax, orthonormal L_k.

    Uses d^m/dx^m F(x^2) = sum_i m!/(i!(m-2i)!) (2x)^(m-2i) F^(m-i)(x^2) and
    the classical rule d^j/du^j L_k^(a) = (-1)^j L_{k-j}^(a+j).
    """
    x = np.asarray(x, dtype=float)
    u = x * x
    scale = _laguerre_scale(np.arange(kmax + 1), alpha).reshape((-1,) + (1,) * x.ndim)
    out = np.zeros((kmax + 1,) + x.shape)
    for i in range(m // 2 + 1):
        j = m - i
        if j > kmax:
            continue
        coef = math.factorial(m) / (math.factorial(i) * math.factorial(m - 2 * i))
        shifted = _laguerre_classical(kmax - j, alpha + j, u)
        out[j:] += coef * (-1) ** j * (2 * x) ** (m - 2 * i) * shifted
    return out * scale


def laguerre_tensor_values(indices, alpha, x, beta=None):
    """Matrix of D^beta L_k(x) for each multi-index k (rows) at points x (columns)."""
    alpha = AlphaParam.of(alpha)
    x = _check_point(x, alpha.n)
    pts = x.reshape(-1, alpha.n)
    beta = (0,) * alpha.n if beta is None else tuple(int(b) for b in beta)
    idx = np.asarray(indices, dtype=int).reshape(-1, alpha.n)
    out = np.ones((idx.shape[0], pts.shape[0]))
    for i, ai in enumerate(alpha.alpha):
        kmax = int(idx[:, i].max()) if idx.size else 0
        table = laguerre_square_derivatives(kmax, ai, beta[i], pts[:, i])
        out *= table[idx[:, i]]
    return out.reshape((idx.shape[0],) + x.shape[:-1])


@lru_cache(maxsize=64)
def hermite(m: int) -> PolyCoeffs:
    """Physicists' Hermite polynomial H_m."""
    if int(m) != m or m < 0:
        raise ValueError(f"order must be a nonnegative integer, got {m}")
    prev, cur = PolyCoeffs([0.0]), PolyCoeffs([1.0])
    for j in range(int(m)):
        prev, cur = cur, 2.0 * _X * cur - 2.0 * j * prev
    return cur


# ----------------------------------------------------------------------------
# special functions

def log_gamma(x):
    """Natural log of Gamma on the positive axis."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise ValueError("log_gamma needs x > 0")
    out = gammaln(x)
    return out if out.ndim else float(out)


def _bessel_switch(nu):
    # the asymptotic series only reaches 1e-10 once z is large compared to nu^2
    return np.maximum(15.0, np.minimum(nu * nu, 600.0))


def _log_iv_series(nu, z):
    """log(e^{-z} I_nu(z)) by the ascending series, running log-sum-exp."""
    half = 0.5 * z
    with np.errstate(divide="ignore", invalid="ignore"):
        lead = np.where(nu == 0, 0.0, nu * np.log(half)) - gammaln(nu + 1.0)
    zmax = float(np.max(z)) if z.size else 0.0
    kmax = int(math.ceil(zmax / 2 + 12 * math.sqrt(zmax) + 30))
    logq = 2.0 * np.log(np.where(z > 0, half, 1.0))
    lt = np.zeros_like(z)
    mx = np.zeros_like(z)
    s = np.ones_like(z)
    for k in range(1, kmax + 1):
        lt = lt + logq - np.log(k * (k + nu))
        new = np.maximum(mx, lt)
        s = s * np.exp(mx - new) + np.exp(lt - new)
        mx = new
    total = lead + mx + np.log(s) - z
    return np.where(z > 0, total, np.where(nu == 0, 0.0, -np.inf))


def _log_iv_asymptotic(nu, z):
    mu = 4.0 * nu * nu
    term = np.ones_like(z)
    acc = np.ones_like(z)
    live = np.ones(z.shape, dtype=bool)
    for k in range(1, 200):
        nxt = -term * (mu - (2 * k - 1) ** 2) / (8.0 * k * z)
        live &= (np.abs(nxt) < np.abs(term)) & (np.abs(term) > 1e-18)
        if not live.any():
            break
        acc = np.where(live, acc + nxt, acc)
        term = np.where(live, nxt, term)
    return np.log(acc) - 0.5 * np.log(2 * np.pi * z)


def log_bessel_i_scaled(nu, z):
    """log(e^{-z} I_nu(z)) for nu > -1, z >= 0, elementwise with broadcasting."""
    nu, z = np.broadcast_arrays(np.asarray(nu, dtype=float), np.asarray(z, dtype=float))
    if np.any(nu <= -1):
        raise ValueError("bessel order must exceed -1")
    if np.any(z < 0):
        raise ValueError("bessel argument must be >= 0")
    out = np.empty(z.shape)
    big = z > _bessel_switch(nu)
    if np.any(~big):
        out[~big] = _log_iv_series(nu[~big], z[~big])
    if np.any(big):
        out[big] = _log_iv_asymptotic(nu[big], z[big])
    return out if out.ndim else float(out)


def bessel_i_scaled(nu, z):
    """e^{-z} I_nu(z)."""
    out = np.exp(log_bessel_i_scaled(nu, z))
    return out if np.ndim(out) else float(out)


# ----------------------------------------------------------------------------
# quadrature

@dataclass(frozen=True)
class QuadratureRule:
    kind: str
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    order: int
    params: tuple = ()

    @property
    def log_weights(self) -> np.ndarray:
        return np.log(self.weights)

    def integrate(self, values, axis=-1):
        return np.tensordot(np.asarray(values), self.weights, axes=([axis], [0]))


def _jacobi_recurrence(n, a, b):
    k = np.arange(n, dtype=float)
    s = a + b
    with np.errstate(divide="ignore", invalid="ignore"):
        diag = (b * b - a * a) / ((2 * k + s) * (2 * k + s + 2))
    diag[0] = (b - a) / (s + 2)
    kk = np.arange(1, n + 1, dtype=float)
    # (k+s)/(2k+s-1) is 0/0 only at k=1, s=-1, where its limit is 1
    degenerate = np.isclose(2 * kk + s - 1, 0.0)
    ratio = np.where(degenerate, 1.0, (kk + s) / np.where(degenerate, 1.0, 2 * kk + s - 1))
    off2 = 4 * kk * (kk + a) * (kk + b) * ratio / ((2 * kk + s) ** 2 * (2 * kk + s + 1))
    mu0 = math.exp((s + 1) * math.log(2.0) + gammaln(a + 1) + gammaln(b + 1) - gammaln(s + 2))
    return diag, np.sqrt(off2), mu0


def _laguerre_recurrence(n, alpha):
    k = np.arange(n, dtype=float)
    kk = np.arange(1, n + 1, dtype=float)
    return 2 * k + alpha + 1, np.sqrt(kk * (kk + alpha)), math.exp(gammaln(alpha + 1))


def _golub_welsch(diag, off, mu0):
    """Eigen-solve of the Jacobi matrix, one Newton polish per node, and
    weights from the Christoffel function 1/sum p_k(x)^2 (scaled to avoid
    overflow)."""
    n = diag.size
    try:
        x = eigh_tridiagonal(diag, off[: n - 1], eigvals_only=True)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError("tridiagonal eigen-solve failed") from exc
    for _ in range(2):
        p_prev, p = np.zeros_like(x), np.full_like(x, 1.0 / math.sqrt(mu0))
        d_prev, d = np.zeros_like(x), np.zeros_like(x)
        for k in range(n):
            bk = off[k - 1] if k > 0 else 0.0
            p_next = ((x - diag[k]) * p - bk * p_prev) / off[k]
            d_next = ((x - diag[k]) * d + p - bk * d_prev) / off[k]
            p_prev, p, d_prev, d = p, p_next, d, d_next
            big = np.abs(p) > 1e150
            if big.any():
                f = np.where(big, 1e-150, 1.0)
                p_prev, p, d_prev, d = p_prev * f, p * f, d_prev * f, d * f
        step = p / d
        x = x - np.where(np.isfinite(step), step, 0.0)
    p_prev, p = np.zeros_like(x), np.full_like(x, 1.0 / math.sqrt(mu0))
    acc = p * p
    logscale = np.zeros_like(x)
    for k in range(n - 1):
        bk = off[k - 1] if k > 0 else 0.0
        p_next = ((x - diag[k]) * p - bk * p_prev) / off[k]
        p_prev, p = p, p_next
        acc = acc + p * p
        big = acc > 1e250
        if big.any():
            f = np.where(big, 1e-125, 1.0)
            p_prev, p, acc = p_prev * f, p * f, acc * f * f
            logscale = logscale + np.where(big, 250 * math.log(10.0), 0.0)
    w = np.exp(-np.log(acc) - logscale)
    return x, w


@lru_cache(maxsize=256)
def _cached_rule(kind, order, params):
    if kind == "gauss-laguerre":
        (alpha,) = params
        diag, off, mu0 = _laguerre_recurrence(order, alpha)
        x, w = _golub_welsch(diag, off, mu0)
    elif kind == "gauss-jacobi":
        a, b = params
        diag, off, mu0 = _jacobi_recurrence(order, a, b)
        x, w = _golub_welsch(diag, off, mu0)
    elif kind == "gauss-legendre":
        diag, off, mu0 = _jacobi_recurrence(order, 0.0, 0.0)
        x, w = _golub_welsch(diag, off, mu0)
    elif kind == "tanh-sinh":
        m = max(1, (order - 1) // 2)
        h = 3.2 / m
        j = np.arange(-m, m + 1) * h
        arg = 0.5 * np.pi * np.sinh(j)
        x = np.tanh(arg)
        w = h * 0.5 * np.pi * np.cosh(j) / np.cosh(arg) ** 2
        keep = (np.abs(x) < 1.0) & (w > 0)
        x, w = x[keep], w[keep]
    else:
        raise ValueError(f"unknown quadrature kind {kind!r}")
    x.setflags(write=False)
    w.setflags(write=False)
    return QuadratureRule(kind, x, w, int(order), params)


def make_rule(kind: str, order: int, alpha: float | None = None,
              a: float | None = None, b: float | None = None) -> QuadratureRule:
    """Build (and cache) a quadrature rule.

    gauss-laguerre integrates against u^alpha e^{-u} on (0, inf);
    gauss-jacobi against (1-s)^a (1+s)^b, where passing alpha alone means
    a = b = alpha - 1/2; gauss-legendre and tanh-sinh act on (-1, 1).
    """
    order = int(order)
    if order < 1:
        raise ValueError("order must be >= 1")
    if kind == "gauss-laguerre":
        if alpha is None or alpha <= -1:
            raise ValueError("gauss-laguerre needs alpha > -1")
        params = (float(alpha),)
    elif kind == "gauss-jacobi":
        if a is None:
            if alpha is None:
                raise ValueError("gauss-jacobi needs alpha or explicit exponents")
            a = b = float(alpha) - 0.5
        b = a if b is None else b
        if a <= -1 or b <= -1:
            raise ValueError("jacobi exponents must exceed -1")
        params = (float(a), float(b))
    else:
        params = ()
    return _cached_rule(kind, order, params)
