#!/usr/bin/env python3
"""Efficiency of the magnetization measurement: F_J(h~) / G_J(h*) against J."""
import argparse

from ising_qfi.measurement import efficiency_report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--betas", type=float, nargs="+", default=[3.0, 10.0])
    ap.add_argument("--J", type=float, nargs="+", default=[0.25, 0.5, 1.0, 2.0, 4.0, 8.0])
    args = ap.parse_args()

    print("L,beta,J,h_tilde,h_star,ratio,delta_J")
    for L in args.sizes:
        for beta in args.betas:
            for r in efficiency_report(L, beta, args.J):
                print(f"{L},{beta:g},{r.J:g},{r.h_tilde:.5f},{r.h_star:.5f},{r.ratio:.6f},{r.delta_J:.5g}")


if __name__ == "__main__":
    main()
