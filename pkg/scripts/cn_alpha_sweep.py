#!/usr/bin/env python3
"""Fitted Crank-Nicolson decay exponents against alpha on ExpComb and PolyComb.

For each alpha the norm ||A_d^n ... A_d^1 (-A)^{-alpha}|| is computed under a
seeded random stepsize schedule and fitted over n in [1e2, N]. The table puts
the fit next to alpha/2 (ExpComb) and alpha/(2+beta) (PolyComb).

usage: python3 scripts/cn_alpha_sweep.py [--steps 100000] [--modes 4096] [--seed 42]
"""

import argparse

import numpy as np

from semigroup_lab.crank_nicolson import StepsizeSchedule, cn_norm_curves
from semigroup_lab.curves import integer_dyadic_grid
from semigroup_lab.decay_analysis import fit_power
from semigroup_lab.spectrum import SpectrumSpec


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--steps", type=int, default=10**5)
    p.add_argument("--modes", type=int, default=4096)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--alphas", default="0.25,0.5,0.75,1.0")
    p.add_argument("--csv", help="optional output path")
    args = p.parse_args()
    alphas = [float(a) for a in args.alphas.split(",")]
    sched = StepsizeSchedule.uniform_random(0.5, 4, args.seed)
    samples = integer_dyadic_grid(1, args.steps, 4)
    window = (1e2, float(args.steps))
    rows = []
    for family, spec, target in (("exp_comb", SpectrumSpec.exp_comb(1.0, args.modes), lambda a: a / 2),
                                 ("poly_comb", SpectrumSpec.poly_comb(1.0, args.modes), lambda a: a / 3)):
        curves = cn_norm_curves(spec, sched, alphas, args.steps, samples)
        for a, c in zip(alphas, curves):
            f = fit_power(c, window)
            rows.append((family, a, target(a), f.exponent, f.r_squared))
    print(f"{'family':<10} {'alpha':>6} {'target':>8} {'fit':>8} {'R^2':>8}")
    for fam, a, t, e, r2 in rows:
        print(f"{fam:<10} {a:>6.3f} {t:>8.4f} {e:>8.4f} {r2:>8.5f}")
    if args.csv:
        np.savetxt(args.csv, np.array([r[1:] for r in rows]), delimiter=",",
                   header="alpha,target,fit,r_squared", comments="")


if __name__ == "__main__":
    main()
