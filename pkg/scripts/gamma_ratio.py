#!/usr/bin/env python3
"""gamma_J(h) = G_J(beta) / G_J(T=0) for the two-site chain, one column per beta."""
import argparse
import math

import numpy as np

from ising_qfi.estimation import qfi_exact
from ising_qfi.spin_exact import SpinChainParams


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--L", type=int, default=2)
    ap.add_argument("--J", type=float, default=0.5)
    ap.add_argument("--betas", type=float, nargs="+", default=[1.0, 10.0, 100.0, 1000.0])
    ap.add_argument("--h-max", type=float, default=3.0)
    ap.add_argument("--points", type=int, default=31)
    args = ap.parse_args()

    print("h," + ",".join(f"gamma(beta={b:g})" for b in args.betas))
    for h in np.linspace(0.0, args.h_max, args.points)[1:]:
        cold = qfi_exact(SpinChainParams(args.L, args.J, h, math.inf)).value
        ratios = [qfi_exact(SpinChainParams(args.L, args.J, h, b)).value / cold for b in args.betas]
        print(f"{h:.4f}," + ",".join(f"{r:.6g}" for r in ratios))


if __name__ == "__main__":
    main()
