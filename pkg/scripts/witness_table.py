#!/usr/bin/env python3
"""Optimality witnesses for the fractional inverse-semigroup kernel.

Prints, for a range of mode indices k, the witness time, the lower bound at
that time and the truncated-model norm, on ExpComb(gamma) and PolyComb(1).

usage: python3 scripts/witness_table.py [--alpha 1] [--gamma 1]
"""

import argparse

from semigroup_lab.spectral_calculus import KernelKind, kernel_norm, optimality_witness
from semigroup_lab.spectrum import SpectrumSpec


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--modes", type=int, default=8192)
    args = p.parse_args()
    kind = KernelKind("inv_semigroup_frac", args.alpha)
    for spec in (SpectrumSpec.exp_comb(args.gamma, args.modes), SpectrumSpec.poly_comb(1.0, args.modes)):
        print(spec)
        print(f"{'k':>6} {'t':>14} {'bound':>12} {'norm':>12} {'argmax':>7}")
        for k in (1, 2, 3, 5, 10, 30, 100, 300, 1000):
            t, bound = optimality_witness(spec, args.alpha, k)
            val, arg = kernel_norm(spec, kind, t, warn=False)
            print(f"{k:>6} {t:>14.6g} {bound:>12.8f} {val:>12.8f} {arg:>7}")


if __name__ == "__main__":
    main()
