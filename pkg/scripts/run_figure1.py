"""Estimation error versus number of informative studies (identity covariance).

    python3 scripts/run_figure1.py --config i --h 2 --reps 50 --out figure1_i_h2
"""
import argparse
import json
from pathlib import Path

from translasso.simharness import SimScenario, run_replications, write_tables_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--config", choices=["i", "ii"], default="i")
    ap.add_argument("--h", type=int, default=2)
    ap.add_argument("--cov", default="identity", choices=["identity", "homogeneous_toeplitz", "heterogeneous"])
    ap.add_argument("--reps", type=int, default=50)
    ap.add_argument("--p", type=int, default=500)
    ap.add_argument("--seed", type=int, default=10_000)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("figure1"))
    args = ap.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    methods = ("lasso", "naive", "oracle", "trans_lasso")
    tables = []
    print(f"{'|A|':>4} " + " ".join(f"{m:>12}" for m in methods))
    for a in range(0, 21, 4):
        sc = SimScenario(p=args.p, coef_config=args.config, h=args.h, n_informative=a,
                         cov_regime=args.cov, seed=args.seed)
        t = run_replications(sc, methods, reps=args.reps, n_jobs=args.jobs)
        tables.append(t)
        print(f"{a:>4} " + " ".join(f"{t.mean(m):>7.3f}±{t.se(m):.3f}" for m in methods), flush=True)
    write_tables_csv(tables, args.out / "sse.csv")
    with open(args.out / "summary.json", "w") as f:
        json.dump([t.summary() for t in tables], f, indent=2, sort_keys=True)
        f.write("\n")


if __name__ == "__main__":
    main()
