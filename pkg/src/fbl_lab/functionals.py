"""Functionals, realification, conjugation and (1,weak)-norms of tuples."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .maximize import DEFAULT_PHASES, DEFAULT_RESTARTS, maximize_convex_on_ball, maximize_on_torus
from .spaces import NormedSpace, _sgn

DEFAULT_SEED = 0x5EED


@dataclass(frozen=True, eq=False)
class ComplexFunctional:
    """``z -> sum(coeffs * z)``, or ``sum(coeffs * conj(z))`` on a conjugate space."""

    coeffs: np.ndarray
    on_conjugate: bool = False

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=complex))

    def __call__(self, z):
        z = np.asarray(z)
        if self.on_conjugate:
            return np.sum(self.coeffs * np.conj(z), axis=-1)
        return np.sum(self.coeffs * z, axis=-1)

    def __eq__(self, other):
        return (isinstance(other, ComplexFunctional) and self.on_conjugate == other.on_conjugate
                and np.array_equal(self.coeffs, other.coeffs))

    __hash__ = None


Functional = Union[ComplexFunctional, np.ndarray, Sequence]


def _coeffs(f) -> np.ndarray:
    if isinstance(f, ComplexFunctional):
        return f.coeffs
    return np.asarray(f)


def realify(functional: ComplexFunctional) -> np.ndarray:
    """Real part of ``z*`` as a functional on ``E_R`` (coordinates ``(Re, Im)``)."""
    c = functional.coeffs
    if functional.on_conjugate:
        return np.concatenate([c.real, c.imag])
    return np.concatenate([c.real, -c.imag])


def complexify(x, on_conjugate: bool = False) -> ComplexFunctional:
    """``z*(z) = x*(z) - i x*(iz)`` for a real functional ``x*`` on ``E_R``."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size % 2:
        raise ValueError("a real functional on E_R has an even number of coordinates")
    n = x.size // 2
    a, b = x[:n], x[n:]
    return ComplexFunctional(a + 1j * b if on_conjugate else a - 1j * b, on_conjugate)


def conjugate_functional(functional: ComplexFunctional) -> ComplexFunctional:
    """``psi(z) = Re z*(z) - i Im z*(z)``, a C-linear functional on the conjugate space.

    Same real part and same modulus as ``z*`` at every point.
    """
    if not isinstance(functional, ComplexFunctional):
        c = np.asarray(functional)
        if not np.iscomplexobj(c):
            raise ValueError("conjugation needs a functional on a complex space")
        functional = ComplexFunctional(c)
    return ComplexFunctional(np.conj(functional.coeffs), not functional.on_conjugate)


def conjugate_tuple(tup) -> np.ndarray:
    """Coefficient-level conjugation of a tuple (flips to the other space)."""
    return np.conj(np.asarray(tup))


def as_tuple(space, functionals) -> np.ndarray:
    """Coerce functionals to an ``(m, dim)`` coefficient array."""
    if isinstance(functionals, np.ndarray) and functionals.ndim == 2:
        arr = functionals
    else:
        arr = np.array([_coeffs(f) for f in functionals])
    if arr.size == 0 or arr.ndim != 2 or arr.shape[0] < 1:
        raise ValueError("a functional tuple needs at least one functional")
    space.check(arr, "functional tuple")
    return arr.astype(space.dtype) if space.is_complex else np.real_if_close(arr).astype(float)


def dual_norm(space, functional) -> float:
    return float(space.dual_norm(space.check(_coeffs(functional), "functional")))


def realified_dual_norm(space: NormedSpace, x, rng=None, restarts=DEFAULT_RESTARTS) -> float:
    """``sup_{B_E} x*(z)`` for a real functional ``x*`` on ``E_R``, by ball ascent.

    Independent of the dual-norm formula: only the norm and support-point
    oracles of ``E`` are used.
    """
    rng = np.random.default_rng(DEFAULT_SEED) if rng is None else rng
    x = np.asarray(x, dtype=float)

    def vg(z):
        v = float(x @ space.to_real(z))
        return v, space.complexify(x)

    return maximize_convex_on_ball(space, vg, rng, restarts=restarts).value


@dataclass(frozen=True)
class OneWeak:
    value: float
    method: str
    witness: np.ndarray  # argmax point of B_E, or the maximizing signs


def one_weak_norm(space, tup, method="ball_sup", rng=None, restarts=DEFAULT_RESTARTS,
                  phases=DEFAULT_PHASES) -> OneWeak:
    """``sup_{z in B_E} sum_j |z_j*(z)|`` computed by one of two routes.

    ``ball_sup`` maximizes over the unit ball directly; ``sign_formula``
    maximizes ``||sum eps_j z_j*||`` over unimodular signs (enumerated over
    the reals, torus search over the complexes).  ``best`` returns the larger
    of the two lower bounds.
    """
    C = as_tuple(space, tup)
    rng = np.random.default_rng(DEFAULT_SEED) if rng is None else rng
    if method == "ball_sup":
        return _ball_sup(space, C, rng, restarts)
    if method == "sign_formula":
        return _sign_formula(space, C, rng, phases)
    if method == "best":
        a = _ball_sup(space, C, rng, restarts)
        b = _sign_formula(space, C, rng, phases)
        return a if a.value >= b.value else b
    raise ValueError(f"unknown method {method!r}")


def _ball_sup(space, C, rng, restarts) -> OneWeak:
    def vg(z):
        w = space.pair(C, z)
        ph = _sgn(np.conj(w))
        return float(np.sum(np.abs(w))), ph @ C

    starts = space.support_point(C)
    res = maximize_convex_on_ball(space, vg, rng, restarts=restarts, starts=starts)
    return OneWeak(res.value, "ball_sup", res.argmax)


def _sign_formula(space, C, rng, phases) -> OneWeak:
    m = C.shape[0]
    if not space.is_complex:
        signs = np.array([(1.0,) + s for s in itertools.product((1.0, -1.0), repeat=m - 1)])
        vals = space.dual_norm(signs @ C)
        k = int(np.argmax(vals))
        return OneWeak(float(vals[k]), "sign_formula", signs[k])

    def fn(theta):
        eps = np.exp(1j * theta)
        return space.dual_norm(C[0] + eps @ C[1:])

    v, th = maximize_on_torus(fn, m - 1, rng, phases=phases)
    eps = np.concatenate([[1.0 + 0j], np.exp(1j * th)])
    return OneWeak(v, "sign_formula", eps)


def weak_fast(space, C, rng=None) -> float:
    """Cheap (1,weak)-norm used inside optimizer loops; exact when dim == 1 or real."""
    m = C.shape[0]
    if m == 1:
        return float(space.dual_norm(C[0]))
    if space.dim == 1:
        # every norm on a line is a multiple of |.|
        return float(np.sum(np.abs(C[:, 0])) * space.dual_norm(np.ones(1, dtype=space.dtype)))
    if not space.is_complex:
        return _sign_formula(space, C, rng, DEFAULT_PHASES).value
    rng = np.random.default_rng(DEFAULT_SEED) if rng is None else rng

    def fn(theta):
        return space.dual_norm(C[0] + np.exp(1j * theta) @ C[1:])

    return maximize_on_torus(fn, m - 1, rng, phases=12, top=1, min_step=1e-4)[0]


def weak_p_norm(space, tup, p: float, rng=None, restarts=DEFAULT_RESTARTS) -> OneWeak:
    """``(sup_{B_E} sum_j |z_j*(z)|^p)^{1/p}``; ``p = inf`` gives ``max_j ||z_j*||``."""
    C = as_tuple(space, tup)
    if p < 1:
        raise ValueError("p must be >= 1")
    if np.isinf(p):
        norms = space.dual_norm(C)
        k = int(np.argmax(norms))
        return OneWeak(float(norms[k]), "max_dual_norm", np.array([k]))
    if p == 1:
        return one_weak_norm(space, C, "best", rng=rng, restarts=restarts)
    rng = np.random.default_rng(DEFAULT_SEED) if rng is None else rng

    def vg(z):
        w = space.pair(C, z)
        a = np.abs(w)
        return float(np.sum(a ** p)), (p * a ** (p - 1) * _sgn(np.conj(w))) @ C

    res = maximize_convex_on_ball(space, vg, rng, restarts=restarts, starts=space.support_point(C))
    return OneWeak(res.value ** (1.0 / p), "ball_sup", res.argmax)
