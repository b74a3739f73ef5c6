"""Gelfand error ||T^k||^{1/k} - r(T) across k for the verify ensemble.

Shows the O(1/k) decay and which seeds fall outside 1e-2 at k = 64.

    python3 scripts/gelfand_sweep.py --trials 200 --ks 16 64 256 1024
"""
import argparse

import numpy as np

from fbl_lab.lattice_expr import DEFAULT_SEED
from fbl_lab.spectra import gelfand_radius, random_radius_matrix


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ap.add_argument("--ks", type=int, nargs="+", default=[16, 64, 256, 1024])
    ap.add_argument("--tol", type=float, default=1e-2)
    args = ap.parse_args()

    kmax = max(args.ks)
    errs = np.zeros((args.trials, len(args.ks)))
    gaps = np.zeros(args.trials)
    conds = np.zeros(args.trials)
    for i in range(args.trials):
        T = random_radius_matrix(np.random.default_rng([args.seed, i]), 3)
        w, V = np.linalg.eig(T)
        mods = np.sort(np.abs(w))[::-1]
        conds[i] = np.linalg.cond(V)
        g = gelfand_radius(T, kmax)
        errs[i] = [g[k - 1] - mods[0] for k in args.ks]
        gaps[i] = mods[1] / mods[0]

    print("k      median       p95          max          frac > tol")
    for j, k in enumerate(args.ks):
        e = errs[:, j]
        print(f"{k:<6} {np.median(e):.3e}    {np.quantile(e, 0.95):.3e}    {e.max():.3e}    "
              f"{np.mean(e > args.tol):.3f}")
    j64 = args.ks.index(64) if 64 in args.ks else 0
    bad = np.flatnonzero(errs[:, j64] > args.tol)
    ok = np.setdiff1d(np.arange(args.trials), bad)
    print(f"\nmedian cond(V): over tol {np.median(conds[bad]) if len(bad) else float('nan'):.2f}, "
          f"within tol {np.median(conds[ok]):.2f}")
    print(f"trials over tol at k={args.ks[j64]}: {bad.tolist()}")
    for i in bad[:10]:
        print(f"  trial {i}: error {errs[i, j64]:.4f}, |lambda_2| / |lambda_1| = {gaps[i]:.4f}, "
              f"cond(V) = {conds[i]:.2f}")


if __name__ == "__main__":
    main()
