"""Sup over time of the global Gaussian factor: grid value vs the analytic point t0."""
import numpy as np

from lagvar.geometry import KernelContext
from lagvar.operators import vt_analyze


def main():
    rng = np.random.default_rng(0)
    shown = 0
    while shown < 8:
        x, y, s = rng.uniform(0, 3), rng.uniform(3, 7), rng.uniform(-1, 1)
        ctx = KernelContext((0.0,), [x], [y], [s])
        try:
            v = vt_analyze(ctx)
        except ValueError:
            continue
        print(f"x={x:5.2f} y={y:5.2f} s={s:+5.2f} {v.branch:14s} t0={v.t0:6.4f} "
              f"grid/analytic={v.comparability:8.4f}")
        shown += 1


if __name__ == "__main__":
    main()
