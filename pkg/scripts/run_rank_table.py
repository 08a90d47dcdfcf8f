"""Frequency of rank-consistent sparsity indices over h and |A|.

    python3 scripts/run_rank_table.py --config ii --reps 100
"""
import argparse

from translasso.simharness import SimScenario, run_rank_only


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--config", choices=["i", "ii"], default="ii")
    ap.add_argument("--cov", default="identity", choices=["identity", "homogeneous_toeplitz", "heterogeneous"])
    ap.add_argument("--p", type=int, default=500)
    ap.add_argument("--reps", type=int, default=100)
    ap.add_argument("--seed", type=int, default=20_000)
    ap.add_argument("--alpha", type=float, default=0.75, help="screening size exponent")
    args = ap.parse_args()

    sizes = (4, 8, 12, 16)
    print("h    " + " ".join(f"|A|={a:<3}" for a in sizes))
    for h in (2, 6, 12):
        row = [run_rank_only(SimScenario(p=args.p, coef_config=args.config, h=h, n_informative=a,
                                         cov_regime=args.cov, seed=args.seed),
                             reps=args.reps, t_star_exponent=args.alpha)
               for a in sizes]
        print(f"{h:<4} " + " ".join(f"{c:<7.2f}" for c in row), flush=True)


if __name__ == "__main__":
    main()
