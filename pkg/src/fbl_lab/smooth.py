"""Supporting functionals, phase-sup difference quotients and the dual semi-inner product.

Convention: the supporting functional ``f_z`` at ``z != 0`` has ``||f_z|| = 1``
and ``f_z(z) = ||z||``.  The bracket ``[w*, z*] = f_{z*}(w*)`` therefore has
``[z*, z*] = ||z*||``; :func:`lumer_bracket` rescales to ``||z*||^2``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .lattice_expr import DEFAULT_SEED
from .spaces import NormedSpace, _holder_conjugate

T_LADDER = (1e-2, 1e-3, 1e-4)
MONOTONE_LADDER = (1e-3, 1e-2, 1e-1, 1.0)
PHASE_GRID = 64
EPS = np.finfo(float).eps


def _smooth_p(space) -> float:
    if getattr(space, "kind", None) not in ("lp", "weighted_lp"):
        raise ValueError("closed-form supporting functionals need an l_p or weighted l_p norm")
    p = float(space.p)
    if not 1 < p < np.inf:
        raise ValueError(f"the l_{p:g} norm is not smooth; need 1 < p < inf")
    return p


@dataclass(frozen=True, eq=False)
class SupportingFunctional:
    base: np.ndarray
    coeffs: np.ndarray
    space: NormedSpace

    def __call__(self, w):
        return self.space.pair(self.coeffs, w)

    @property
    def norm(self) -> float:
        return float(self.space.dual_norm(self.coeffs))


def supporting_functional(space: NormedSpace, z) -> SupportingFunctional:
    """``f_k = w_k |z_k|^{p-1} conj(sgn z_k) / ||z||^{p-1}`` (no conjugation on a conjugate space).

    Coordinates with ``z_k = 0`` contribute nothing, also for ``p < 2``.
    """
    p = _smooth_p(space)
    z = np.asarray(space.check(z), dtype=space.dtype)
    nz = float(space.norm(z))
    if nz == 0:
        raise ValueError("no supporting functional at 0")
    a = np.abs(z) / nz
    ph = np.zeros_like(z)
    nzm = a > 0
    ph[nzm] = z[nzm] / np.abs(z[nzm])
    if space.is_complex and not getattr(space, "conjugate", False):
        ph = np.conj(ph)
    w = np.ones(space.dim) if space.weights is None else np.asarray(space.weights, dtype=float)
    f = w * a ** (p - 1) * ph
    return SupportingFunctional(z, f, space)


def finite_difference_gradient(space: NormedSpace, z, h=1e-6) -> np.ndarray:
    """Central differences of the norm along real coordinates of ``E_R``; returns a functional."""
    z = np.asarray(space.check(z), dtype=space.dtype)
    x = space.to_real(z)
    g = np.zeros_like(x)
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = h
        g[k] = (space.norm(space.from_real(x + e)) - space.norm(space.from_real(x - e))) / (2 * h)
    # g is Re f_z on E_R
    return space.complexify(g)


def difference_quotient(space, x, y, t: float) -> float:
    """``(||x + t y|| - ||x||) / t``: nondecreasing in ``t > 0``."""
    if not t > 0:
        raise ValueError("t must be positive")
    return float((space.norm(x + t * np.asarray(y)) - space.norm(x)) / t)


def sup_directional_quotient(space, z, w, t: float, grid: int = PHASE_GRID) -> float:
    """``(sup_{|eps|=1} ||z + eps t w|| - ||z||) / t``.

    Complex phases: ``grid`` equispaced angles, then bounded scalar
    refinement of the offset around the best few.  Real spaces: ``eps = +-1``.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    z = np.asarray(space.check(z), dtype=space.dtype)
    w = np.asarray(space.check(w), dtype=space.dtype)
    nz = float(space.norm(z))
    if not space.is_complex:
        v = max(float(space.norm(z + t * w)), float(space.norm(z - t * w)))
        return (v - nz) / t
    # the scalar action of a conjugate space only relabels the phase circle
    phi = 2 * np.pi * np.arange(grid) / grid
    vals = space.norm(z[None, :] + t * np.exp(1j * phi)[:, None] * w[None, :])
    best = float(np.max(vals))
    d = 2 * np.pi / grid

    def neg(u, c):
        return -float(space.norm(z + t * np.exp(1j * (c + u)) * w))

    for i in np.argsort(-vals)[:3]:
        r = minimize_scalar(neg, bounds=(-d, d), args=(phi[i],), method="bounded",
                            options={"xatol": 1e-13})
        best = max(best, -float(r.fun))
    return (best - nz) / t


@dataclass(frozen=True)
class DirectionalReport:
    ts: tuple
    quotients: tuple
    target: float
    monotone: bool
    error: float
    tol: float

    @property
    def ok(self) -> bool:
        return self.monotone and self.error <= self.tol

    def __bool__(self):
        return self.ok


def directional_limit_check(space, z, w, ts=T_LADDER, rtol=1e-4, slack=1e-12) -> DirectionalReport:
    """Quotients at shrinking ``t`` must decrease toward ``|f_z(w)|``.

    The quotients bracket the limit from above; the lower end ``|f_z(w)|`` is
    also a lower bound for every quotient.
    """
    f = supporting_functional(space, z)
    target = float(abs(f(w)))
    ts = tuple(sorted(ts, reverse=True))
    q = tuple(sup_directional_quotient(space, z, w, t) for t in ts)
    # a norm difference carries ~eps ||z|| of rounding, amplified by 1/t
    nz = float(space.norm(np.asarray(z)))
    mono = all(b <= a + slack * (1 + abs(a)) + 8 * EPS * nz / t
               for a, b, t in zip(q, q[1:], ts[1:]))
    mono = mono and q[-1] >= target - 1e-9
    return DirectionalReport(ts, q, target, bool(mono), abs(q[-1] - target), rtol * (1 + target))


@dataclass(frozen=True)
class MonotoneReport:
    ts: tuple
    quotients: tuple
    ok: bool


def quotient_monotonicity(space, x, y, ts=MONOTONE_LADDER, slack=1e-12) -> MonotoneReport:
    ts = tuple(sorted(ts))
    q = tuple(difference_quotient(space, x, y, t) for t in ts)
    # same rounding allowance as directional_limit_check, at the smaller t
    nx = float(space.norm(np.asarray(x)))
    ok = all(a <= b + slack * (1 + abs(b)) + 8 * EPS * nx / t
             for a, b, t in zip(q, q[1:], ts))
    return MonotoneReport(ts, q, bool(ok))


# -- the dual bracket ---------------------------------------------------------------------


def dual_space(space: NormedSpace) -> NormedSpace:
    """``E*`` as a coefficient space (natural pairing); weighted duals get weights ``w^{1-q}``."""
    p = _smooth_p(space)
    q = _holder_conjugate(p)
    if space.kind == "lp":
        return NormedSpace(space.dim, space.field, "lp", p=q)
    w = np.asarray(space.weights, dtype=float) ** (1 - q)
    return NormedSpace(space.dim, space.field, "weighted_lp", p=q, weights=tuple(w))


def semi_inner_product(space: NormedSpace, w_star, z_star) -> complex:
    """``[w*, z*] = f_{z*}(w*)``, and ``0`` when ``z* = 0``; ``space`` is the predual."""
    D = dual_space(space)
    z_star = np.asarray(D.check(z_star), dtype=D.dtype)
    w_star = np.asarray(D.check(w_star), dtype=D.dtype)
    if not np.any(z_star != 0):
        return 0j if D.is_complex else 0.0
    f = supporting_functional(D, z_star)
    v = f(w_star)
    return complex(v) if D.is_complex else float(np.real(v))


def lumer_bracket(space: NormedSpace, w_star, z_star) -> complex:
    """``||z*|| [w*, z*]``, so that the bracket of ``z*`` with itself is ``||z*||^2``."""
    D = dual_space(space)
    return float(D.norm(np.asarray(z_star))) * semi_inner_product(space, w_star, z_star)


def random_pair(rng, space, unit: bool = True):
    """Random ``(z, w)``, normalized to the unit sphere by default."""
    def draw():
        if space.is_complex:
            v = rng.normal(size=space.dim) + 1j * rng.normal(size=space.dim)
        else:
            v = rng.normal(size=space.dim)
        return v / float(space.norm(v)) if unit else v
    return draw(), draw()


def smooth_survey(space, trials=100, seed=DEFAULT_SEED, **kw):
    rng = np.random.default_rng(seed)
    return [directional_limit_check(space, *random_pair(rng, space), **kw) for _ in range(trials)]
