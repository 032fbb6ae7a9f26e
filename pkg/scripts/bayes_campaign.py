#!/usr/bin/env python3
"""Simulated magnetization experiments: Bayes variance vs the Cramer-Rao bound."""
import argparse

from ising_qfi.bayes import bayes_campaign


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--sets", type=int, default=20)
    ap.add_argument("--true-J", type=float, default=3.0)
    ap.add_argument("--beta", type=float, default=1.0)
    ap.add_argument("--M", type=int, nargs="+", default=[10, 20, 50, 100, 200, 300, 400, 500])
    args = ap.parse_args()

    res = bayes_campaign(L=2, beta=args.beta, true_J=args.true_J, M_schedule=args.M,
                         n_sets=args.sets, seed=args.seed)
    print(f"# h~ = {res.h:.6f}, F_J = {res.fisher:.6g}")
    print("M,bayes_var,asymptotic_var,cr_bound,bayes/cr")
    for r in res.rows:
        print(f"{r.M},{r.bayes_variance:.6g},{r.asymptotic_variance:.6g},{r.cr_bound:.6g},{r.bayes_variance / r.cr_bound:.4f}")


if __name__ == "__main__":
    main()
