"""Property suites shared by the CLI ``verify`` command and the acceptance tests.

Each trial draws from its own generator ``default_rng([seed, trial])`` so a
failing trial can be replayed alone, and trials may run on a thread pool
without changing any result.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict

import numpy as np

from . import fbl_norm, functionals, homs, lattice_expr, smooth, spectra
from .lattice_expr import DEFAULT_SEED, delta_embed, random_complex_elem, random_expr
from .spaces import NormedSpace, lp

P_VALUES = (1.0, 2.0, 3.0, np.inf)
SMOOTH_P = (1.5, 2.0, 3.0)


@dataclass
class Trial:
    index: int
    ok: bool
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        self.ok = bool(self.ok)


@dataclass
class SuiteResult:
    suite: str
    trials: list
    tolerance: str
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> int:
        return sum(t.ok for t in self.trials)

    @property
    def total(self) -> int:
        return len(self.trials)

    @property
    def ok(self) -> bool:
        return self.passed == self.total and all(self.extra.get("checks", {}).values())

    @property
    def failing(self) -> list:
        return [t.index for t in self.trials if not t.ok]

    def to_dict(self) -> dict:
        return _plain({
            "suite": self.suite,
            "passed": self.passed,
            "total": self.total,
            "ok": self.ok,
            "tolerance": self.tolerance,
            "failing_trials": self.failing,
            "trials": [dict(index=t.index, ok=t.ok, **t.info) for t in self.trials],
            **self.extra,
        })

    def line(self) -> str:
        return f"{self.suite}: {self.passed}/{self.total} {'PASS' if self.ok else 'FAIL'}"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return "inf" if v == np.inf else v
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("FBL_LAB_THREADS", "1")))
    except ValueError:
        return 1


def _run(name, fn, trials, seed, tolerance, threads=None) -> SuiteResult:
    threads = thread_cap() if threads is None else threads
    rngs = [np.random.default_rng([seed, i]) for i in range(trials)]
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            out = list(ex.map(fn, range(trials), rngs))
    else:
        out = [fn(i, r) for i, r in enumerate(rngs)]
    return SuiteResult(name, out, tolerance)


def _rand_vec(rng, n, complex_=True):
    v = rng.normal(size=n)
    return v + 1j * rng.normal(size=n) if complex_ else v


def _rand_lp(rng, dims=(1, 2, 3), ps=P_VALUES, field="complex"):
    return lp(int(rng.choice(dims)), float(rng.choice(ps)), field)


# -- suites -----------------------------------------------------------------------------------


def suite_isometry(trials=100, seed=DEFAULT_SEED, threads=None, extra_tuples=3):
    """``||delta_E(z)||`` equals ``||z||``; random feasible tuples never exceed it."""
    def one(i, rng):
        E = lp(int(rng.integers(1, 4)), P_VALUES[i % 4])
        z = _rand_vec(rng, E.dim)
        h = delta_embed(E, z)
        nz = float(E.norm(z))
        est = fbl_norm.complex_free_norm(h, E, m_max=1, budget=120, restarts=2, seed=seed + i)
        worst = est.lower_bound
        for _ in range(extra_tuples):
            m = int(rng.integers(1, 4))
            C = _rand_vec(rng, m * E.dim).reshape(m, E.dim)
            worst = max(worst, fbl_norm.certify(h, E, C, rng=rng).value)
        ok = abs(est.lower_bound - nz) <= 1e-6 and worst <= nz + 1e-9
        return Trial(i, ok, {"space": E.describe(), "norm": nz, "lower_bound": est.lower_bound,
                             "max_feasible": worst})
    return _run("isometry", one, trials, seed, "|lb - ||z||| <= 1e-6; feasible <= ||z|| + 1e-9", threads)


def suite_oracle(trials=50, seed=DEFAULT_SEED, threads=None):
    """Estimator vs the dim-1 grid oracle on random trees over a weighted line."""
    def one(i, rng):
        E = NormedSpace(1, "complex", "weighted_lp", p=2.0, weights=(float(rng.uniform(0.5, 2)),))
        h = random_complex_elem(rng, 2, depth=3)
        orc = fbl_norm.dim1_complex_oracle(h, E)
        est = fbl_norm.complex_free_norm(h, E, m_max=2, budget=150, restarts=3, seed=seed + i)
        rel = abs(est.lower_bound - orc.value) / max(orc.value, 1e-300) if orc.value > 0 else est.lower_bound
        ok = rel <= 1e-3 and est.lower_bound <= orc.value + orc.error_bound + 1e-9
        return Trial(i, ok, {"oracle": orc.value, "lower_bound": est.lower_bound, "rel_gap": rel})
    return _run("oracle", one, trials, seed, "relative 1e-3", threads)


def suite_sandwich(trials=50, seed=DEFAULT_SEED, threads=None):
    """``||f||_R / 2 <= ||f||_C <= ||f||_R`` over C and C^2 (dim 1 also against the oracle)."""
    def one(i, rng):
        n = 1 + i % 2
        E = lp(n, float(rng.choice(P_VALUES)))
        f = random_expr(rng, 2 * n, depth=3)
        r = fbl_norm.norm_equivalence_check(f, E, m_max=2, budget=150, restarts=3, seed=seed + i)
        return Trial(i, r.ok, {"dim": n, "real": r.real.lower_bound, "complex": r.complex.lower_bound,
                               "oracle": r.oracle, "upper_ok": r.upper_ok, "lower_ok": r.lower_ok,
                               "oracle_ok": r.oracle_ok})
    return _run("sandwich", one, trials, seed, "certified direction 1e-6; dim-1 oracle 1e-9", threads)


def suite_oneweak(trials=200, seed=DEFAULT_SEED, threads=None):
    """``ball_sup`` and ``sign_formula`` agree on random tuples."""
    def one(i, rng):
        E = _rand_lp(rng, field="complex" if i % 2 == 0 else "real")
        m = int(rng.integers(1, 5))
        C = _rand_vec(rng, m * E.dim, E.is_complex).reshape(m, E.dim)
        a = functionals.one_weak_norm(E, C, "ball_sup", rng=rng).value
        b = functionals.one_weak_norm(E, C, "sign_formula", rng=rng).value
        return Trial(i, abs(a - b) <= 1e-6, {"space": E.describe(), "m": m, "ball_sup": a,
                                              "sign_formula": b})
    return _run("oneweak", one, trials, seed, "abs 1e-6", threads)


def suite_modulus(trials=1000, seed=DEFAULT_SEED, threads=None):
    """``theta_grid(256)`` vs ``sqrt``; monotone along nested grids."""
    rng = np.random.default_rng([seed, 0])
    h = random_complex_elem(rng, 4, depth=3)
    X = rng.normal(size=(trials, 4))
    exact = lattice_expr.modulus_eval(h, X)
    Ns = (4, 8, 16, 32, 64, 128, 256, 512, 1024)
    grids = np.array([lattice_expr.modulus_eval(h, X, "theta_grid", N) for N in Ns])
    g256 = grids[Ns.index(256)]
    rel = np.abs(exact - g256) / np.maximum(exact, 1e-300)
    mono = np.all(np.diff(grids, axis=0) >= -1e-12 * (1 + exact), axis=0)
    below = np.all(grids <= exact + 1e-12 * (1 + exact), axis=0)
    ok = (rel <= 3e-4) & mono & below
    res = SuiteResult("modulus", [Trial(i, bool(ok[i]), {"rel_gap_256": float(rel[i])})
                                  for i in range(trials)], "relative 3e-4; nondecreasing in N")
    res.extra = {"max_rel_gap_256": float(rel.max()), "grid_sizes": list(Ns)}
    return res


def suite_phi(trials=100, seed=DEFAULT_SEED, threads=None):
    """``one_weak_E(Phi tuple) <= ||T|| one_weak_F(tuple)``."""
    def one(i, rng):
        E = _rand_lp(rng)
        F = _rand_lp(rng)
        T = homs.InducedHom(homs.random_matrix(rng, F.dim, E.dim), E, F)
        m = int(rng.integers(1, 4))
        C = _rand_vec(rng, m * F.dim).reshape(m, F.dim)
        r = homs.phi_inequality_check(T, C, seed=seed + i)
        return Trial(i, r.ok, {"lhs": r.lhs, "rhs": r.rhs, "op_norm": r.op_norm})
    return _run("phi", one, trials, seed, "slack 1e-6", threads)


def suite_routes(trials=20, seed=DEFAULT_SEED, threads=None, samples=1000):
    """Substitution and composition evaluate ``T-bar h`` identically."""
    def one(i, rng):
        E = _rand_lp(rng, dims=(1, 2, 3))
        F = _rand_lp(rng, dims=(1, 2, 3))
        if i % 4 == 3:
            E, F = E.conjugate_space(), F.conjugate_space()
        T = homs.InducedHom(homs.random_matrix(rng, F.dim, E.dim), E, F)
        h = random_complex_elem(rng, E.real_dim, depth=3)
        r = homs.route_agreement(T, h, samples=samples, seed=seed + i)
        X = rng.normal(size=(samples, F.real_dim))
        lat = np.max(np.abs(homs.apply_hom_subst(T, h).modulus(X) - h.modulus(homs.phi_re(T, X))))
        return Trial(i, r.ok and lat <= 1e-10 * (1 + np.max(h.modulus(homs.phi_re(T, X)))),
                     {"route_defect": r.max_defect, "modulus_defect": float(lat)})
    return _run("routes", one, trials, seed, "1e-10 on 1e3 samples", threads)


def suite_spectra(trials=20, seed=DEFAULT_SEED, threads=None):
    """Eigen-witnesses, fixed points of rotations, and residual directions."""
    def one(i, rng):
        n = int(rng.integers(1, 4))
        T = spectra.random_radius_matrix(rng, n) if i % 2 == 0 else spectra.random_positive_triangular(rng, n)
        E = lp(n, float(rng.choice(P_VALUES)))
        wit = spectra.eigenpair_witnesses(T, E)
        ok = all(r.ok for _, r in wit)
        res = []
        for lam in np.linalg.eigvals(T):
            if lam.imag == 0 and lam.real >= 0:
                r = spectra.residual_direction_check(T, float(lam.real), E, seed=seed + i)
                res.append(r.max_residual)
                ok = ok and r.ok
        return Trial(i, bool(ok), {"n": n, "witness_defects": [r.max_defect / r.scale for _, r in wit],
                                   "residuals": res})
    out = _run("spectra", one, trials, seed, "witness 1e-9 relative; residual 1e-9", threads)
    fixed = {}
    rng = np.random.default_rng([seed, trials])
    for name, th in (("pi", np.pi), ("2pi/3", 2 * np.pi / 3), ("2pi/5", 2 * np.pi / 5)):
        E = lp(2, 2.0)
        fixed[name] = spectra.fixed_point_check(th, E, _rand_vec(rng, 2)).ok
    out.extra = {"checks": {f"fixed_point_{k}": v for k, v in fixed.items()}}
    return out


def suite_gelfand(trials=20, seed=DEFAULT_SEED, threads=None, k=64, tol=1e-2):
    """``| ||T^64||^{1/64} - r(T) | <= 1e-2`` on rescaled complex Ginibre 3x3 matrices."""
    def one(i, rng):
        T = spectra.random_radius_matrix(rng, 3)
        r = float(np.max(np.abs(np.linalg.eigvals(T))))
        g = float(spectra.gelfand_radius(T, k)[-1])
        return Trial(i, abs(g - r) <= tol, {"radius": r, "gelfand": g, "error": abs(g - r)})
    return _run("gelfand", one, trials, seed, f"abs {tol:g} at k={k}", threads)


def suite_smooth(trials=100, seed=DEFAULT_SEED, threads=None):
    """Directional limits of the phase-sup quotient; monotone difference quotients."""
    def one(i, rng):
        E = lp(int(rng.integers(1, 4)), SMOOTH_P[i % 3])
        z, w = smooth.random_pair(rng, E)
        d = smooth.directional_limit_check(E, z, w)
        m = smooth.quotient_monotonicity(E, z, w)
        return Trial(i, d.ok and m.ok, {"p": E.p, "dim": E.dim, "limit": d.target,
                                        "quotients": list(d.quotients), "error": d.error,
                                        "monotone_t": m.ok})
    return _run("smooth", one, trials, seed, "limit 1e-4 (1 + |f_z(w)|); monotone slack 1e-12", threads)


def suite_conjugate(trials=50, seed=DEFAULT_SEED, threads=None):
    """Free norms over ``E`` and its conjugate agree."""
    def one(i, rng):
        E = lp(1, float(rng.choice(P_VALUES)))
        h = random_complex_elem(rng, 2, depth=3)
        r = fbl_norm.conjugate_invariance_check(h, E, m_max=2, budget=150, restarts=3, seed=seed + i)
        return Trial(i, r.ok, {"E": r.over_E.lower_bound, "conj": r.over_conj.lower_bound,
                               "oracle_E": r.oracle_E, "oracle_conj": r.oracle_conj})
    return _run("conjugate", one, trials, seed, "oracles exact; estimates 1e-6", threads)


SUITES: Dict[str, Callable[..., SuiteResult]] = {
    "isometry": suite_isometry,
    "oracle": suite_oracle,
    "sandwich": suite_sandwich,
    "oneweak": suite_oneweak,
    "modulus": suite_modulus,
    "phi": suite_phi,
    "routes": suite_routes,
    "spectra": suite_spectra,
    "gelfand": suite_gelfand,
    "smooth": suite_smooth,
    "conjugate": suite_conjugate,
}


def run_suite(name: str, trials=None, seed=DEFAULT_SEED, threads=None) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(name)
    kw = {"seed": seed, "threads": threads}
    if trials is not None:
        kw["trials"] = trials
    return SUITES[name](**kw)
