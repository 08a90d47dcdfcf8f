"""Oracle error as the pooled sample grows, with exactly shared coefficients (h = 0)."""
import argparse

import numpy as np

from translasso.simharness import SimScenario, run_replications


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--reps", type=int, default=100)
    ap.add_argument("--seed", type=int, default=40_000)
    args = ap.parse_args()

    rows = []
    for a in range(1, 8):
        sc = SimScenario(p=200, n0=100, nk=100, K=7, s=8, h=0, n_informative=a,
                         h_noninformative=20, seed=args.seed)
        t = run_replications(sc, ("oracle",), reps=args.reps)
        n = sc.n0 + a * sc.nk
        rows.append((n, t.mean("oracle")))
        print(f"pooled n={n:<5} oracle SSE {t.mean('oracle'):.4f} ± {t.se('oracle'):.4f}", flush=True)
    n, e = np.array(rows).T
    slope = np.polyfit(np.log(n), np.log(e), 1)[0]
    print(f"log-log slope {slope:.2f} (1/n scaling gives -1)")


if __name__ == "__main__":
    main()
