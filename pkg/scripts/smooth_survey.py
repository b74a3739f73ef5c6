"""Directional-limit error of the phase-sup quotient at t = 1e-4, by p and dimension.

Near coordinate hyperplanes l_p with p < 2 is strongly curved, so the O(t)
gap can exceed 1e-4; the worst cases are listed with min |z_k|.

    python3 scripts/smooth_survey.py --trials 300
"""
import argparse

import numpy as np

from fbl_lab.lattice_expr import DEFAULT_SEED
from fbl_lab.smooth import directional_limit_check, random_pair
from fbl_lab.spaces import lp


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=300)
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ap.add_argument("--ps", type=float, nargs="+", default=[1.5, 2.0, 3.0])
    ap.add_argument("--dims", type=int, nargs="+", default=[1, 2, 3])
    args = ap.parse_args()

    for p in args.ps:
        for n in args.dims:
            E = lp(n, p)
            rows = []
            for i in range(args.trials):
                z, w = random_pair(np.random.default_rng([args.seed, n, i]), E)
                r = directional_limit_check(E, z, w)
                rows.append((r.error / r.tol, r.ok, float(np.min(np.abs(z)))))
            rel = np.array([a for a, _, _ in rows])
            passed = sum(ok for _, ok, _ in rows)
            worst = max(rows)
            print(f"p={p:<4g} dim={n}: pass {passed}/{args.trials}, max error/tol {rel.max():.3f}"
                  f" (min |z_k| = {worst[2]:.2e})")


if __name__ == "__main__":
    main()
