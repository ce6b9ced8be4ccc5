"""Variable exponents, modulars and Luxemburg norms on tensor quadrature grids."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .specfun import AlphaParam, make_rule

__all__ = [
    "TensorGrid",
    "DiscreteFunction",
    "ExponentField",
    "NormResult",
    "modular",
    "luxemburg_norm",
    "conjugate",
    "holder_check",
    "class_constants",
    "lift_exponent_radial",
    "lift_check",
    "a_epsilon",
]

MEASURES = ("mu_alpha", "m_alpha", "lebesgue")


# ----------------------------------------------------------------------------
# grids

@dataclass(frozen=True)
class TensorGrid:
    """Tensor product of per-axis nodes in (0, inf) with log-weights for the
    three measures of interest (mu_alpha, m_alpha, Lebesgue)."""

    alpha: AlphaParam
    axes: tuple = field(repr=False)
    log_weights: dict = field(repr=False)
    label: str = ""

    @property
    def n(self):
        return self.alpha.n

    @property
    def shape(self):
        return tuple(len(a) for a in self.axes)

    @property
    def size(self):
        return int(np.prod(self.shape))

    def points(self) -> np.ndarray:
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack(mesh, axis=-1)

    def flat_points(self) -> np.ndarray:
        return self.points().reshape(-1, self.n)

    def weights(self, measure: str = "mu_alpha") -> np.ndarray:
        if measure not in MEASURES:
            raise ValueError(f"unknown measure {measure!r}")
        logs = self.log_weights[measure]
        total = logs[0]
        for lw in logs[1:]:
            total = np.add.outer(total, lw)
        return np.exp(total)

    @classmethod
    def laguerre(cls, alpha, order: int) -> "TensorGrid":
        """Nodes x = sqrt(u) from Gauss-Laguerre(alpha_i) in u = x^2; exact for
        mu_alpha integrals of polynomials in x^2 up to degree 2*order-1."""
        alpha = AlphaParam.of(alpha)
        axes, lw = [], {m: [] for m in MEASURES}
        for a, lg in zip(alpha.alpha, alpha.log_normalizers):
            rule = make_rule("gauss-laguerre", order, alpha=a)
            u = np.asarray(rule.nodes)
            logw = np.log(rule.weights)
            axes.append(np.sqrt(u))
            lw["mu_alpha"].append(logw - lg)
            lw["m_alpha"].append(logw + u - math.log(2.0))
            lw["lebesgue"].append(logw + u - (a + 0.5) * np.log(u) - math.log(2.0))
        return cls(alpha, tuple(axes), {k: tuple(v) for k, v in lw.items()}, f"laguerre{order}")

    @classmethod
    def panels(cls, alpha, upper: float, panels: int, order: int = 8) -> "TensorGrid":
        """Composite Gauss-Legendre on (0, upper] per axis."""
        alpha = AlphaParam.of(alpha)
        rule = make_rule("gauss-legendre", order)
        edges = np.linspace(0.0, upper, panels + 1)
        half = 0.5 * np.diff(edges)
        x = (0.5 * (edges[:-1] + edges[1:])[:, None] + half[:, None] * rule.nodes[None]).ravel()
        leb = np.log((half[:, None] * rule.weights[None]).ravel())
        axes, lw = [], {m: [] for m in MEASURES}
        for a, lg in zip(alpha.alpha, alpha.log_normalizers):
            axes.append(x)
            lw["lebesgue"].append(leb)
            lw["m_alpha"].append(leb + (2 * a + 1) * np.log(x))
            lw["mu_alpha"].append(leb + (2 * a + 1) * np.log(x) - x * x - lg + math.log(2.0))
        return cls(alpha, tuple(axes), {k: tuple(v) for k, v in lw.items()}, f"panels{panels}x{order}")


@dataclass(frozen=True)
class DiscreteFunction:
    grid: TensorGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != self.grid.shape:
            v = v.reshape(self.grid.shape)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, grid: TensorGrid, fn: Callable) -> "DiscreteFunction":
        return cls(grid, fn(grid.points()))

    def integrate(self, measure: str = "mu_alpha"):
        return np.sum(self.values * self.grid.weights(measure))

    def __mul__(self, c):
        return DiscreteFunction(self.grid, self.values * c)

    __rmul__ = __mul__

    def __add__(self, other):
        if other.grid is not self.grid:
            raise ValueError("functions live on different grids")
        return DiscreteFunction(self.grid, self.values + other.values)


# ----------------------------------------------------------------------------
# exponent fields

@dataclass(frozen=True)
class ExponentField:
    kind: str
    fn: Callable = field(repr=False, compare=False)
    p_minus: float
    p_plus: float
    p_infty: float
    params: tuple = ()

    def __post_init__(self):
        if not (1.0 <= self.p_minus <= self.p_plus < math.inf):
            raise ValueError(f"need 1 <= p_minus <= p_plus < inf, got {self.p_minus}, {self.p_plus}")

    def __call__(self, x):
        return self.fn(np.asarray(x, dtype=float))

    @classmethod
    def constant(cls, p: float) -> "ExponentField":
        p = float(p)
        return cls("constant", lambda x: np.full(x.shape[:-1], p), p, p, p, (p,))

    @classmethod
    def decay_power(cls, p_infty: float, amp: float, q: float) -> "ExponentField":
        """p(x) = p_infty + amp / (e + |x|)^q."""
        p_infty, amp, q = float(p_infty), float(amp), float(q)

        def fn(x):
            return p_infty + amp / (math.e + np.linalg.norm(x, axis=-1)) ** q

        ends = (p_infty, p_infty + amp / math.e ** q)
        return cls("decay-power", fn, min(ends), max(ends), p_infty, (p_infty, amp, q))

    @classmethod
    def tabulated(cls, nodes, values, p_infty: float | None = None) -> "ExponentField":
        """Piecewise-linear interpolation on a tensor table, clamped to the
        table's range; nodes is a list of per-axis node vectors."""
        nodes = [np.asarray(a, dtype=float) for a in nodes]
        values = np.asarray(values, dtype=float).reshape([len(a) for a in nodes])
        lo, hi = float(values.min()), float(values.max())
        interp = RegularGridInterpolator(nodes, values, method="linear")
        box_lo = np.array([a[0] for a in nodes])
        box_hi = np.array([a[-1] for a in nodes])

        def fn(x):
            pts = np.clip(x, box_lo, box_hi)
            return np.clip(interp(pts.reshape(-1, len(nodes))).reshape(x.shape[:-1]), lo, hi)

        p_inf = float(values.flat[-1]) if p_infty is None else float(p_infty)
        return cls("tabulated", fn, lo, hi, p_inf, (tuple(map(tuple, nodes)), tuple(values.ravel())))

    @classmethod
    def from_config(cls, block: dict) -> "ExponentField":
        block = dict(block)
        kind = block.pop("kind", None)
        if kind == "constant":
            allowed = {"p"}
        elif kind == "decay-power":
            allowed = {"p_infty", "A", "q"}
        elif kind == "tabulated":
            allowed = {"nodes", "values", "p_infty"}
        else:
            raise ValueError(f"unknown exponent kind {kind!r}")
        extra = set(block) - allowed
        if extra:
            raise ValueError(f"unknown exponent keys {sorted(extra)}")
        if kind == "constant":
            return cls.constant(block["p"])
        if kind == "decay-power":
            return cls.decay_power(block["p_infty"], block["A"], block["q"])
        return cls.tabulated(block["nodes"], block["values"], block.get("p_infty"))


def conjugate(p: ExponentField) -> ExponentField:
    """Pointwise Hoelder conjugate p/(p-1)."""
    if not p.p_minus > 1:
        raise ValueError("conjugate exponent is unbounded when p_minus = 1")

    def dual(v):
        return v / (v - 1.0) if v > 1 else math.inf

    return ExponentField(
        "conjugate",
        lambda x: (lambda v: v / (v - 1.0))(p(x)),
        dual(p.p_plus),
        dual(p.p_minus),
        dual(p.p_infty),
        (p.kind,) + tuple(p.params),
    )


def a_epsilon(p: ExponentField, eps: float) -> float:
    """(1-eps)/2 - |1/p_infty - (1-eps)/2|."""
    h = 0.5 * (1.0 - eps)
    return h - abs(1.0 / p.p_infty - h)


# ----------------------------------------------------------------------------
# modular and norm

def _pointwise_power(values, pvals):
    a = np.abs(values)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        out = np.where(a > 0, np.exp(pvals * np.log(np.where(a > 0, a, 1.0))), 0.0)
    return out


def modular(f: DiscreteFunction, p: ExponentField, measure: str = "mu_alpha") -> float:
    """int |f|^p(x) dmeasure by the grid rule; +inf signals overflow."""
    pv = p(f.grid.points())
    with np.errstate(over="ignore", invalid="ignore"):
        val = float(np.sum(_pointwise_power(f.values, pv) * f.grid.weights(measure)))
    return val if not math.isnan(val) else math.inf


@dataclass(frozen=True)
class NormResult:
    norm: float
    modular_at_norm: float
    iterations: int


def luxemburg_norm(f: DiscreteFunction, p: ExponentField, measure: str = "mu_alpha",
                   rtol: float = 1e-13, max_iter: int = 200, full: bool = False):
    """inf{lam > 0 : modular(f/lam) <= 1}, by bisection on log(lam)."""
    pv = p(f.grid.points())
    w = f.grid.weights(measure)
    a = np.abs(f.values)
    mask = (a > 0) & (w > 0)
    if not mask.any():
        res = NormResult(0.0, 0.0, 0)
        return res if full else 0.0
    la, pv, w = np.log(a[mask]), pv[mask], w[mask]

    def rho(loglam):
        with np.errstate(over="ignore"):
            return float(np.sum(np.exp(pv * (la - loglam)) * w))

    lo, hi = math.log(1e-30), math.log(1e30)
    if not rho(hi) <= 1.0:
        raise ArithmeticError("modular stays above 1 on the whole bracket; norm unbounded")
    if rho(lo) <= 1.0:
        res = NormResult(1e-30, rho(lo), 0)
        return res if full else res.norm
    it = 0
    while hi - lo > rtol and it < max_iter:
        mid = 0.5 * (lo + hi)
        if rho(mid) <= 1.0:
            hi = mid
        else:
            lo = mid
        it += 1
    if hi - lo > rtol:
        raise ArithmeticError("norm bisection did not converge")
    res = NormResult(math.exp(hi), rho(hi), it)
    return res if full else res.norm


def holder_check(fs, gs, p: ExponentField, measure: str = "mu_alpha"):
    """Max over pairs of int|fg| / (2 ||f||_p ||g||_p'); returns (ratio, ok)."""
    if not p.p_minus > 1:
        raise ValueError("Hoelder check needs p_minus > 1")
    pc = conjugate(p)
    if isinstance(fs, DiscreteFunction):
        fs, gs = [fs], [gs]
    worst = 0.0
    for f, g in zip(fs, gs):
        lhs = float(np.sum(np.abs(f.values * g.values) * f.grid.weights(measure)))
        if lhs == 0.0:
            continue
        rhs = 2.0 * luxemburg_norm(f, p, measure) * luxemburg_norm(g, pc, measure)
        worst = max(worst, lhs / rhs)
    return worst, worst <= 1.0


# ----------------------------------------------------------------------------
# exponent classes

def class_constants(p: ExponentField, which: str, probes):
    """Empirical class constant; probes are (xs, ys) pairs for LH0 and points
    otherwise.  Returns (constant, finite)."""
    if which == "LH0":
        xs, ys = (np.asarray(v, dtype=float) for v in probes)
        d = np.linalg.norm(xs - ys, axis=-1)
        keep = (d > 0) & (d < 0.5)
        vals = np.abs(p(xs[keep]) - p(ys[keep])) * (-np.log(d[keep]))
    elif which in ("LHinf", "Pe_inf"):
        xs = np.asarray(probes, dtype=float)
        r = np.linalg.norm(xs, axis=-1)
        dev = np.abs(p(xs) - p.p_infty)
        vals = dev * (np.log(math.e + r) if which == "LHinf" else r * r)
    else:
        raise ValueError(f"unknown class {which!r}")
    c = float(vals.max()) if vals.size else 0.0
    return c, math.isfinite(c)


def _block_norms(xbar, dims):
    cuts = np.cumsum((0,) + tuple(dims))
    return np.stack([np.linalg.norm(xbar[..., cuts[i]:cuts[i + 1]], axis=-1) for i in range(len(dims))], axis=-1)


def lift_exponent_radial(p: ExponentField, dims) -> ExponentField:
    """p_bar(x_1, ..., x_n) = p(|x_1|, ..., |x_n|) with x_i in R^{dims[i]}."""
    dims = tuple(int(d) for d in np.atleast_1d(dims))
    if any(d < 1 for d in dims):
        raise ValueError("block dimensions must be >= 1")
    return ExponentField(
        "lifted",
        lambda xbar: p(_block_norms(xbar, dims)),
        p.p_minus,
        p.p_plus,
        p.p_infty,
        (p.kind, dims) + tuple(p.params),
    )


def lift_check(p: ExponentField, dims, xbar, ybar):
    """Compare class constants of the lift on (xbar, ybar) pairs with those of
    p on the projected pairs.  Returns a dict of (lifted, projected) and the
    per-pair domination flag for LH0."""
    dims = tuple(int(d) for d in np.atleast_1d(dims))
    pbar = lift_exponent_radial(p, dims)
    X, Y = _block_norms(xbar, dims), _block_norms(ybar, dims)
    d_bar = np.linalg.norm(xbar - ybar, axis=-1)
    d = np.linalg.norm(X - Y, axis=-1)
    keep = (d_bar > 0) & (d_bar < 0.5)
    lifted = np.abs(pbar(xbar[keep]) - pbar(ybar[keep])) * (-np.log(d_bar[keep]))
    same = d[keep] > 0
    proj = np.zeros_like(lifted)
    proj[same] = np.abs(p(X[keep][same]) - p(Y[keep][same])) * (-np.log(d[keep][same]))
    dominated = bool(np.all(lifted <= proj * (1 + 1e-12) + 1e-15))
    out = {
        "LH0": (float(lifted.max(initial=0.0)), float(proj.max(initial=0.0))),
        "LHinf": (class_constants(pbar, "LHinf", xbar)[0], class_constants(p, "LHinf", X)[0]),
        "Pe_inf": (class_constants(pbar, "Pe_inf", xbar)[0], class_constants(p, "Pe_inf", X)[0]),
    }
    return out, dominated
