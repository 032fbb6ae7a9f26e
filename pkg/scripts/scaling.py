#!/usr/bin/env python3
"""Finite-size scaling of the QFI at and away from the critical field."""
import argparse
import math

from ising_qfi.fermions import scaling_study


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[64, 128, 256, 512])
    ap.add_argument("--J", type=float, default=1.0)
    args = ap.parse_args()

    for h, beta in ((args.J, math.inf), (2 * args.J, math.inf), (args.J, 20.0)):
        fit = scaling_study(args.sizes, args.J, h, beta)
        print(f"h={h:g} beta={beta:g}: alpha={fit.exponent:.4f}  G(L_max)={fit.qfi_values[-1]:.6g}")


if __name__ == "__main__":
    main()
