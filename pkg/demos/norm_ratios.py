"""Luxemburg-norm ratios ||Tf|| / ||f|| for every operator at two resolutions."""
import warnings

from lagvar.harness.experiments import FAMILIES, THEOREM_OPERATORS, default_resolution, ratio_cell
from lagvar.specfun import AlphaParam
from lagvar.varlp import ExponentField


def main():
    warnings.simplefilter("ignore")
    alpha = AlphaParam.of((0.0,))
    p = ExponentField.decay_power(2.0, 1.0, 2.0)
    res = default_resolution(alpha.n)
    print(f"{'operator':16s} {'family':10s} {'coarse':>10s} {'fine':>10s} {'drift':>9s}")
    for op in THEOREM_OPERATORS:
        for fam in FAMILIES:
            lo = ratio_cell(op, fam, alpha, p, res, seed=0)
            hi = ratio_cell(op, fam, alpha, p, res.doubled(), seed=0)
            print(f"{op:16s} {fam:10s} {lo:10.5f} {hi:10.5f} {abs(hi / lo - 1):9.2e}")


if __name__ == "__main__":
    main()
