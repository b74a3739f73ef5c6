"""Ratio of complex to real free norms on random real expressions.

The ratio always lies in [1/2, 1]; this prints its spread per dimension.

    python3 scripts/sandwich_survey.py --trials 30 --dims 1 2
"""
import argparse

import numpy as np

from fbl_lab.fbl_norm import norm_equivalence_check
from fbl_lab.lattice_expr import DEFAULT_SEED, random_expr
from fbl_lab.spaces import lp


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=30)
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ap.add_argument("--dims", type=int, nargs="+", default=[1, 2])
    ap.add_argument("--p", default="2")
    args = ap.parse_args()

    for n in args.dims:
        E = lp(n, args.p)
        ratios, fails = [], 0
        for i in range(args.trials):
            rng = np.random.default_rng([args.seed, n, i])
            f = random_expr(rng, 2 * n, depth=3)
            r = norm_equivalence_check(f, E, m_max=2, budget=150, restarts=3, seed=args.seed + i)
            if r.real.lower_bound > 0:
                ratios.append(r.complex.lower_bound / r.real.lower_bound)
            fails += not r.ok
        q = np.quantile(ratios, [0, 0.5, 1])
        print(f"dim {n}, p={args.p}: complex/real min {q[0]:.4f} median {q[1]:.4f} "
              f"max {q[2]:.4f}; failed checks {fails}/{args.trials}")


if __name__ == "__main__":
    main()
