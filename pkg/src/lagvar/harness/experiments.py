"""Norm-ratio experiments: operators applied to test-function families,
measured in the Luxemburg norm at two resolution levels."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..operators import (
    MultiplierSpec,
    default_epsilon,
    g_function,
    h_kernel_xy,
    maximal_heat,
    maximal_poisson,
    multiplier_apply,
    riesz_spectral,
)
from ..semigroup import Expansion, SubordinationRule
from ..specfun import AlphaParam, multi_indices
from ..varlp import DiscreteFunction, ExponentField, TensorGrid, luxemburg_norm

THEOREM_OPERATORS = ("maximal_heat", "maximal_poisson", "riesz", "g_function", "multiplier", "h_aux")
OPERATORS = ("identity",) + THEOREM_OPERATORS + ("multiplier_unit",)
FAMILIES = ("expansion", "gaussian", "plateau")
EXTRA_FAMILIES = ("one", "mean_zero")


@dataclass(frozen=True)
class Resolution:
    grid_order: int
    truncation: int
    t_points: int
    s_order: int

    def doubled(self) -> "Resolution":
        return Resolution(2 * self.grid_order, 2 * self.truncation, 2 * self.t_points, 2 * self.s_order)


def default_resolution(n: int, grid_order=0, truncation=0, s_order=0) -> Resolution:
    base = Resolution(48, 16, 24, 32) if n == 1 else Resolution(16, 8, 12, 16)
    return Resolution(grid_order or base.grid_order, truncation or base.truncation, base.t_points,
                      s_order or base.s_order)


def family_members(family: str, alpha: AlphaParam, seed: int):
    """Callables on points (..., n); expansions also carry their own coefficients."""
    n = alpha.n
    if family == "expansion":
        rng = np.random.default_rng([seed, 11])
        idx = np.array(multi_indices(n, 6), dtype=int).reshape(-1, n)
        out = []
        for _ in range(4):
            c = rng.normal(size=len(idx)) / (1.0 + idx.sum(axis=1)) ** 2
            e = Expansion(alpha, idx, c)
            out.append(("expansion", e))
        return out
    if family == "one":
        return [("one", Expansion.single(alpha, (0,) * n, 1.0))]
    if family == "mean_zero":
        rng = np.random.default_rng([seed, 13])
        idx = np.array(multi_indices(n, 6), dtype=int).reshape(-1, n)
        out = []
        for _ in range(4):
            c = rng.normal(size=len(idx)) / (1.0 + idx.sum(axis=1)) ** 2
            c[0] = 0.0
            out.append(("mean_zero", Expansion(alpha, idx, c)))
        return out
    if family == "gaussian":
        return [(f"gaussian@{c}", _gaussian(c, 0.6)) for c in (0.5, 1.5, 2.5)]
    if family == "plateau":
        return [(f"plateau[{a},{b}]", _plateau(a, b, 0.15)) for a, b in ((0.2, 1.0), (0.8, 2.0), (1.5, 3.0))]
    raise ValueError(f"unknown family {family!r}")


def _gaussian(c, w):
    return lambda x: np.exp(-np.sum((x - c) ** 2, axis=-1) / (w * w))


def _plateau(a, b, w):
    return lambda x: np.prod(0.5 * (np.tanh((x - a) / w) - np.tanh((x - b) / w)), axis=-1)


def apply_operator(op: str, f: Expansion, grid: TensorGrid, res: Resolution, p: ExponentField):
    pts = grid.points()
    alpha = f.alpha
    if op == "identity":
        return f.on_grid(grid).values
    tg = np.geomspace(1e-3, 20.0, res.t_points)
    if op == "maximal_heat":
        return maximal_heat(f, pts, tg)
    if op == "maximal_poisson":
        return maximal_poisson(f, pts, tg, SubordinationRule())
    if op == "riesz":
        beta = (1,) + (0,) * (alpha.n - 1)
        return riesz_spectral(f, beta, grid).values
    if op == "g_function":
        return g_function(f, (0,) * alpha.n, 1, pts, order=res.s_order)
    if op == "multiplier":
        return multiplier_apply(f, MultiplierSpec.imaginary_power(1.0), grid).values
    if op == "multiplier_unit":
        return multiplier_apply(f, MultiplierSpec.constant(1.0), grid).values
    if op == "h_aux":
        kern = _h_matrix(alpha, default_epsilon(alpha, p), res.grid_order, res.s_order)
        fw = (f.on_grid(grid).values * grid.weights("mu_alpha")).ravel()
        return (kern @ fw).reshape(grid.shape)
    raise ValueError(f"unknown operator {op!r}")


@lru_cache(maxsize=8)
def _h_matrix(alpha, eps, grid_order, s_order):
    """H_eps(x, y) on grid x grid; shared by every member of every family."""
    pts = TensorGrid.laguerre(alpha, grid_order).flat_points()
    return h_kernel_xy(alpha, eps, pts[:, None, :], pts[None], order=s_order)


def ratio_cell(op: str, family: str, alpha, p: ExponentField, res: Resolution, seed: int):
    """Max over the family of ||T f||/||f|| in L^{p(.)}(mu_alpha)."""
    alpha = AlphaParam.of(alpha)
    grid = TensorGrid.laguerre(alpha, res.grid_order)
    worst = 0.0
    for _, member in family_members(family, alpha, seed):
        if isinstance(member, Expansion):
            f = member
        else:
            f = Expansion.project(alpha, member, res.truncation, TensorGrid.laguerre(alpha, 2 * res.grid_order))
        fv = f.on_grid(grid)
        tv = DiscreteFunction(grid, np.abs(apply_operator(op, f, grid, res, p)))
        den = luxemburg_norm(fv, p)
        if den == 0:
            continue
        worst = max(worst, luxemburg_norm(tv, p) / den)
    return worst
