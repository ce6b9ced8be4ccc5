"""Command-line entry point: verify | kernels | norms | operators | report."""
from __future__ import annotations

import argparse
import fnmatch
import math
import os
import sys
import time
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..geometry import KernelContext
from ..operators import (
    MultiplierSpec,
    default_epsilon,
    h_kernel_xy,
    multiplier_kernel,
    riesz_kernel,
)
from ..semigroup import (
    Expansion,
    SubordinationRule,
    heat_kernel_bessel,
    heat_kernel_sintegral,
    heat_kernel_spectral,
    poisson_kernel,
)
from ..varlp import ExponentField, TensorGrid, class_constants, luxemburg_norm, modular
from . import battery
from .config import ConfigError, load_config
from .experiments import EXTRA_FAMILIES, FAMILIES, OPERATORS, default_resolution, family_members, ratio_cell
from .report import ROW_COLUMNS, SUMMARY_COLUMNS, TIMING_COLUMNS, read_csv, write_csv

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
KERNELS = ("heat", "poisson", "riesz", "multiplier", "h-aux")


def _prepare_out(path):
    try:
        os.makedirs(path, exist_ok=True)
        probe = os.path.join(path, ".write-probe")
        with open(probe, "w", encoding="utf-8") as fh:
            fh.write("")
        os.remove(probe)
    except OSError as exc:
        raise ConfigError(f"output directory is not writable: {exc}") from exc
    return path


def _parallel_map(fn, items, threads):
    if threads <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ----------------------------------------------------------------------------
# verify

def cmd_verify(cfg, pattern="*"):
    out = _prepare_out(cfg.out)
    todo = [(cid, suite, title, gate) for cid, suite, title, gate in battery.CRITERIA
            if fnmatch.fnmatch(cid, pattern) and battery.selected(cfg, gate)]

    def run(item):
        cid = item[0]
        t0 = time.perf_counter()
        rows = battery.run_criterion(cid, cfg)
        return cid, rows, time.perf_counter() - t0

    results = sorted(_parallel_map(run, todo, cfg.threads), key=lambda r: r[0])
    by_id = {cid: rows for cid, rows, _ in results}
    for suite in battery.SUITES:
        rows = [r.fields() for cid, s, _, _ in battery.CRITERIA if s == suite for r in by_id.get(cid, [])]
        write_csv(os.path.join(out, f"{suite}.csv"), ROW_COLUMNS, rows)
    summary = []
    for cid, suite, title, _ in battery.CRITERIA:
        if cid not in by_id:
            summary.append((cid, suite, title, "skip", 0, 0))
            continue
        rows = by_id[cid]
        failed = sum(not r.passed for r in rows)
        summary.append((cid, suite, title, "pass" if failed == 0 else "fail", len(rows), failed))
    write_csv(os.path.join(out, "summary.csv"), SUMMARY_COLUMNS, summary)
    write_csv(os.path.join(out, "timings.csv"), TIMING_COLUMNS, [(cid, dt) for cid, _, dt in results])
    for cid, _, title, status, nrows, failed in summary:
        print(f"{cid} {status.upper():4s} {title} ({nrows} rows, {failed} failed)")
    return EXIT_FAIL if any(s[3] == "fail" for s in summary) else EXIT_OK


# ----------------------------------------------------------------------------
# kernels

def _kernel_points(cfg):
    n = cfg.n
    if n == 1:
        return np.linspace(0.25, 3.0, cfg.kernel_points)[:, None]
    side = np.linspace(0.5, 2.5, max(2, int(round(math.sqrt(cfg.kernel_points)))))
    return np.stack(np.meshgrid(side, side, indexing="ij"), axis=-1).reshape(-1, 2)


def _pair_cols(n):
    return tuple(f"x{i + 1}" for i in range(n)) + tuple(f"y{i + 1}" for i in range(n))


def kernel_table(cfg, which):
    a = cfg.alpha_param
    pts = _kernel_points(cfg)
    pairs = [(x, y) for x in pts for y in pts]
    off = [(x, y) for x, y in pairs if not np.array_equal(x, y)]
    base = _pair_cols(a.n)
    if which == "heat":
        cols = base + ("t", "bessel_product", "s_integral", "spectral", "max_pairwise_dev")
        rows = []
        for t in (0.5, 1.0):
            for x, y in pairs:
                b = float(heat_kernel_bessel(a, t, x, y))
                s = float(heat_kernel_sintegral(a, t, x, y))
                k = float(heat_kernel_spectral(a, t, x, y, kmax=60))
                dev = max(abs(b - s), abs(b - k), abs(s - k)) / max(1.0, abs(b))
                rows.append((*x, *y, t, b, s, k, dev))
        return cols, rows
    if which == "poisson":
        cols = base + ("t", "subordinated")
        rule = SubordinationRule()
        return cols, [(*x, *y, t, float(poisson_kernel(a, t, x, y, rule))) for t in (0.5, 1.0) for x, y in pairs]
    if which == "riesz":
        beta = (1,) + (0,) * (a.n - 1)
        cols = base + ("beta", "riesz")
        return cols, [(*x, *y, "".join(map(str, beta)), riesz_kernel(a, beta, x, y)) for x, y in off]
    if which == "multiplier":
        cols = base + ("phi", "real", "imag")
        rows = []
        for name, spec in (("one", MultiplierSpec.constant(1.0)), ("imaginary-power-1", MultiplierSpec.imaginary_power(1.0))):
            for x, y in off:
                v = complex(multiplier_kernel(a, spec, x, y))
                rows.append((*x, *y, name, v.real, v.imag))
        return cols, rows
    if which == "h-aux":
        eps = default_epsilon(a, cfg.exponent_field)
        cols = base + ("epsilon", "h_kernel")
        vals = h_kernel_xy(a, eps, np.array([x for x, _ in pairs]), np.array([y for _, y in pairs]))
        return cols, [(*x, *y, eps, float(v)) for (x, y), v in zip(pairs, vals)]
    raise ConfigError(f"unknown kernel {which!r}; choose from {list(KERNELS)}")


def cmd_kernels(cfg, which, pattern="*"):
    out = _prepare_out(cfg.out)
    names = [k for k in (which or KERNELS) if fnmatch.fnmatch(k, pattern)]
    bad = [k for k in names if k not in KERNELS]
    if bad:
        raise ConfigError(f"unknown kernel {bad}; choose from {list(KERNELS)}")
    tables = _parallel_map(lambda k: (k, kernel_table(cfg, k)), names, cfg.threads)
    for name, (cols, rows) in tables:
        write_csv(os.path.join(out, f"kernel_{name}.csv"), cols, rows)
        print(f"kernel_{name}.csv: {len(rows)} rows")
    return EXIT_OK


# ----------------------------------------------------------------------------
# norms

NORM_COLUMNS = ("exponent_id", "family", "member", "measure", "norm", "modular_residual", "classical",
                "lh0", "lhinf", "pe_inf", "flag")


def _exponents(cfg):
    return [(cfg.exponent_id, cfg.exponent_field), ("constant;p=2", ExponentField.constant(2.0)),
            ("constant;p=1.5", ExponentField.constant(1.5))]


def cmd_norms(cfg, pattern="*"):
    out = _prepare_out(cfg.out)
    a = cfg.alpha_param
    grid = TensorGrid.laguerre(a, default_resolution(a.n, cfg.grid_order).grid_order)
    rng = np.random.default_rng([cfg.seed, 101])
    probes = rng.uniform(0, 30, (2000, a.n))
    near = probes + rng.uniform(-0.45, 0.45, probes.shape)
    rows = []
    for eid, p in _exponents(cfg):
        consts = [class_constants(p, "LH0", (probes, near))[0], class_constants(p, "LHinf", probes)[0],
                  class_constants(p, "Pe_inf", probes)[0]]
        fams = [f for f in FAMILIES + ("zero",) if fnmatch.fnmatch(f, pattern)]
        for fam in fams:
            members = [("zero", Expansion.single(a, (0,) * a.n, 0.0))] if fam == "zero" else family_members(fam, a, cfg.seed)
            for j, (label, member) in enumerate(members):
                f = member if isinstance(member, Expansion) else Expansion.project(
                    a, member, default_resolution(a.n).truncation, TensorGrid.laguerre(a, 2 * grid.shape[0]))
                fv = f.on_grid(grid)
                classical = math.nan
                if p.kind == "constant":
                    classical = float(np.sum(np.abs(fv.values) ** p.p_minus * grid.weights())) ** (1 / p.p_minus)
                flag = "ok"
                try:
                    nrm = luxemburg_norm(fv, p)
                    resid = abs(modular(fv * (1.0 / nrm), p) - 1.0) if nrm > 0 else 0.0
                except ArithmeticError:
                    nrm, resid, flag = math.inf, math.nan, "unbounded"
                rows.append((eid, fam, f"{label}#{j}", "mu_alpha", nrm, resid, classical, *consts, flag))
    write_csv(os.path.join(out, "norms.csv"), NORM_COLUMNS, rows)
    print(f"norms.csv: {len(rows)} rows")
    return EXIT_OK


# ----------------------------------------------------------------------------
# operators

OPERATOR_COLUMNS = ("operator", "n", "alpha_hat", "exponent_id", "family", "grid", "estimate",
                    "refinement_ratio", "pass")


def cmd_operators(cfg, pattern="*"):
    out = _prepare_out(cfg.out)
    a = cfg.alpha_param
    res = default_resolution(a.n, cfg.grid_order, cfg.truncation, cfg.s_order)
    ops = ["identity"] + [op for op in cfg.operators if op != "identity"]
    if "multiplier" in ops:
        ops.append("multiplier_unit")
    ops = [op for op in dict.fromkeys(ops) if fnmatch.fnmatch(op, pattern)]
    exps = [(cfg.exponent_id, cfg.exponent_field), ("constant;p=2", ExponentField.constant(2.0))]
    cells = []
    for op in ops:
        fams = list(FAMILIES)
        if op in ("identity", "maximal_heat", "maximal_poisson"):
            fams.append("one")
        if op == "multiplier_unit":
            fams = ["mean_zero"]
        for eid, p in exps:
            for fam in fams:
                cells.append((op, eid, p, fam))

    def run(cell):
        op, eid, p, fam = cell
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            lo = ratio_cell(op, fam, a, p, res, cfg.seed)
            hi = ratio_cell(op, fam, a, p, res.doubled(), cfg.seed)
        ratio = hi / lo if lo > 0 else math.nan
        if op == "identity" or fam == "one":
            ok = abs(lo - 1) <= 1e-10 and abs(hi - 1) <= 1e-10
        elif op == "multiplier_unit" and eid.startswith("constant;p=2"):
            ok = max(lo, hi) <= 1 + 1e-6
        else:
            ok = math.isfinite(lo) and abs(ratio - 1) <= 0.10
        grid = f"order={res.grid_order},K={res.truncation}"
        return (op, a.n, a.alpha_hat, eid, fam, grid, lo, ratio, ok)

    rows = _parallel_map(run, cells, cfg.threads)
    write_csv(os.path.join(out, "operators.csv"), OPERATOR_COLUMNS, rows)
    failed = sum(not r[-1] for r in rows)
    print(f"operators.csv: {len(rows)} rows, {failed} failed")
    return EXIT_FAIL if failed else EXIT_OK


# ----------------------------------------------------------------------------
# report

def cmd_report(cfg):
    path = os.path.join(cfg.out, "summary.csv")
    try:
        rows = read_csv(path)
    except OSError as exc:
        raise ConfigError(f"no summary found: {exc}") from exc
    for r in rows:
        print(f"{r['criterion']} {r['status'].upper():4s} {r['title']} ({r['rows']} rows, {r['failed_rows']} failed)")
    return EXIT_FAIL if any(r["status"] == "fail" for r in rows) else EXIT_OK


# ----------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="lagvar", description="Laguerre-expansion operators on variable Lebesgue spaces")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("verify", "kernels", "norms", "operators", "report"):
        p = sub.add_parser(name)
        p.add_argument("--config", help="YAML experiment configuration")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=int, help="unsigned 64-bit seed")
        p.add_argument("--threads", type=int, help="worker threads")
        p.add_argument("--filter", default="*", help="glob over criterion ids, kernels, families or operators")
        if name == "kernels":
            p.add_argument("which", nargs="*", help=f"subset of {list(KERNELS)}")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, battery.metric_names())
        cfg = cfg.with_overrides(out=args.out, seed=args.seed, threads=args.threads)
        if args.command == "verify":
            return cmd_verify(cfg, args.filter)
        if args.command == "kernels":
            return cmd_kernels(cfg, args.which, args.filter)
        if args.command == "norms":
            return cmd_norms(cfg, args.filter)
        if args.command == "operators":
            return cmd_operators(cfg, args.filter)
        return cmd_report(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
