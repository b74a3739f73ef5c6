"""Induced lattice homomorphisms, composition operators and lattice extensions of operators.

For ``T: E -> F`` the induced homomorphism acts on expressions by generator
substitution ``delta_x -> delta_{Tx}`` (in realified coordinates).  On the
dual side it is the composition operator ``f -> f o Phi^Re`` where
``Phi z* = z* o T`` is the adjoint.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .functionals import DEFAULT_SEED, one_weak_norm
from .lattice_expr import (Add, ComplexLatticeElem, Gen, Inf, LatticeExpr, Modulus, Scale, Sup,
                           modulus_expr)
from .maximize import maximize_convex_on_ball
from .spaces import NormedSpace, lp


@dataclass(frozen=True)
class OperatorNorm:
    value: float
    witness: np.ndarray
    method: str


@dataclass(frozen=True, eq=False)
class InducedHom:
    """A linear map ``T: source -> target`` given by a ``target.dim x source.dim`` matrix."""

    matrix: np.ndarray
    source: NormedSpace
    target: NormedSpace

    def __post_init__(self):
        M = np.asarray(self.matrix)
        if M.ndim != 2 or M.shape != (self.target.dim, self.source.dim):
            raise ValueError(f"matrix shape {M.shape} does not map dim {self.source.dim} "
                             f"to dim {self.target.dim}")
        if not np.all(np.isfinite(M)):
            raise ValueError("matrix has non-finite entries")
        if self.source.field != self.target.field:
            raise ValueError("source and target must share the scalar field")
        if self.source.is_complex and self.source.conjugate != self.target.conjugate:
            # a matrix between E and conj(F) would be conjugate-linear
            raise ValueError("mixed conjugate/plain spaces are not supported")
        if not self.source.is_complex and np.iscomplexobj(M) and np.any(M.imag != 0):
            raise ValueError("a real space needs a real matrix")
        M = M.astype(self.source.dtype)
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    @classmethod
    def identity(cls, space):
        return cls(np.eye(space.dim, dtype=space.dtype), space, space)

    def __call__(self, z):
        return np.asarray(z) @ self.matrix.T

    def compose(self, other: "InducedHom") -> "InducedHom":
        """``self o other``."""
        return InducedHom(self.matrix @ other.matrix, other.source, self.target)

    @cached_property
    def real_matrix(self) -> np.ndarray:
        """Action on ``E_R -> F_R`` coordinates ``(Re, Im)``."""
        M = self.matrix
        if not self.source.is_complex:
            return M.astype(float)
        A, B = M.real, M.imag
        # on conjugate spaces the vectors are the same, only the scalar action differs
        return np.block([[A, -B], [B, A]])

    def adjoint_coeffs(self, c) -> np.ndarray:
        """Coefficients of ``z* o T`` for ``z*`` with coefficients ``c`` on the target."""
        c = self.target.check(c, "functional")
        if self.target.is_complex and self.target.conjugate:
            return c @ np.conj(self.matrix)
        return c @ self.matrix

    def norm(self, restarts=32, seed=DEFAULT_SEED) -> OperatorNorm:
        return operator_norm(self, restarts, seed)


def operator_norm(T: InducedHom, restarts=32, seed=DEFAULT_SEED) -> OperatorNorm:
    """``sup_{B_E} ||Tz||_F``: closed form for unweighted l1 / l2 / l-inf pairs, else ball ascent."""
    E, F, M = T.source, T.target, T.matrix
    plain = E.kind == "lp" and F.kind == "lp"
    if plain and E.p == 2 and F.p == 2:
        U, s, Vh = np.linalg.svd(M)
        v = np.conj(Vh[0]) if E.is_complex else Vh[0]
        if E.conjugate:
            v = np.conj(v)
        return OperatorNorm(float(s[0]), v, "svd")
    if plain and E.p == 1:
        cols = F.norm(M.T)
        k = int(np.argmax(cols))
        return OperatorNorm(float(cols[k]), np.eye(E.dim, dtype=E.dtype)[k], "max_column")
    if plain and np.isinf(F.p):
        rows = E.dual_norm(T.adjoint_coeffs(np.eye(F.dim, dtype=F.dtype)))
        k = int(np.argmax(rows))
        c = T.adjoint_coeffs(np.eye(F.dim, dtype=F.dtype)[k])
        return OperatorNorm(float(rows[k]), E.support_point(c), "max_row")
    rng = np.random.default_rng(seed)

    def vg(z):
        w = T(z)
        nw = float(F.norm(w))
        if nw == 0:
            return 0.0, np.zeros(E.dim, dtype=E.dtype)
        return nw, T.adjoint_coeffs(F.norming_functional(w))

    starts = E.support_point(T.adjoint_coeffs(np.eye(F.dim, dtype=F.dtype)))
    res = maximize_convex_on_ball(E, vg, rng, restarts=restarts, starts=starts)
    return OperatorNorm(res.value, res.argmax, "ball_ascent")


# -- the two routes ---------------------------------------------------------------


def apply_hom_subst(T: InducedHom, h):
    """``T-bar h``: replace every generator ``delta_x`` by ``delta_{Tx}``."""
    if h.dim != T.source.real_dim:
        raise ValueError(f"element lives over dim {h.dim}, hom source has {T.source.real_dim}")
    R = T.real_matrix
    return h.map_generators(lambda x: R @ x)


def phi_map(T: InducedHom, functional) -> np.ndarray:
    """``Phi_T z* = z* o T``: a functional on the target mapped to one on the source."""
    return T.adjoint_coeffs(np.asarray(functional))


def phi_re(T: InducedHom, x) -> np.ndarray:
    """``Phi^Re(Re z*) = Re(Phi z*)`` on real functionals of ``F_R``."""
    F, E = T.target, T.source
    return E.realify(phi_map(T, F.complexify(np.asarray(x, dtype=float))))


def apply_hom_composition(T: InducedHom, h, x) -> np.ndarray:
    """``(T-bar h)(x*) = h(Phi^Re x*)``."""
    return h.eval(phi_re(T, x))


@dataclass(frozen=True)
class RouteReport:
    max_defect: float
    samples: int
    tol: float

    @property
    def ok(self) -> bool:
        return self.max_defect <= self.tol


def route_agreement(T: InducedHom, h, samples=1000, seed=DEFAULT_SEED, tol=1e-10) -> RouteReport:
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(samples, T.target.real_dim))
    a = apply_hom_subst(T, h).eval(X)
    b = apply_hom_composition(T, h, X)
    scale = 1.0 + np.abs(b)
    return RouteReport(float(np.max(np.abs(a - b) / scale)), samples, tol)


@dataclass(frozen=True)
class PhiReport:
    lhs: float
    rhs: float
    op_norm: float
    weak_target: float
    slack: float

    @property
    def ok(self) -> bool:
        return self.lhs <= self.rhs + self.slack


def phi_inequality_check(T: InducedHom, tup, method="best", seed=DEFAULT_SEED, restarts=32,
                         slack=1e-6) -> PhiReport:
    """``one_weak_E(Phi tuple) <= ||T|| one_weak_F(tuple)``, same method on both sides."""
    C = np.atleast_2d(np.asarray(tup))
    rng = np.random.default_rng(seed)
    lhs = one_weak_norm(T.source, phi_map(T, C), method, rng=rng, restarts=restarts).value
    rhs_w = one_weak_norm(T.target, C, method, rng=rng, restarts=restarts).value
    nT = operator_norm(T, restarts, seed).value
    return PhiReport(lhs, nT * rhs_w, nT, rhs_w, slack)


# -- interpretation in concrete lattices ----------------------------------------------


def interpret(expr: LatticeExpr, gen_map) -> np.ndarray:
    """Evaluate an expression in ``R^n`` with coordinatewise lattice operations.

    ``gen_map(x)`` gives the image of the generator ``delta_x``.  A modulus
    node ``|f + ig|`` becomes ``hypot(S f, S g)``.
    """
    if isinstance(expr, Gen):
        return np.asarray(gen_map(expr.x), dtype=float)
    if isinstance(expr, Scale):
        return expr.c * interpret(expr.child, gen_map)
    if isinstance(expr, Add):
        return sum(interpret(k, gen_map) for k in expr.children)
    if isinstance(expr, Sup):
        return np.max([interpret(k, gen_map) for k in expr.children], axis=0)
    if isinstance(expr, Inf):
        return np.min([interpret(k, gen_map) for k in expr.children], axis=0)
    if isinstance(expr, Modulus):
        return np.hypot(interpret(expr.elem.re, gen_map), interpret(expr.elem.im, gen_map))
    raise TypeError(type(expr))


def _as_matrix(T, space):
    M = np.asarray(T.matrix if isinstance(T, InducedHom) else T)
    if M.ndim != 2 or M.shape[1] != space.dim:
        raise ValueError(f"operator needs {space.dim} columns, got shape {M.shape}")
    return M


def extend_operator(T, h: ComplexLatticeElem, space: NormedSpace) -> np.ndarray:
    """``T-hat(f + ig) = Sf + iSg`` with ``S delta_x = Re T x`` in ``X = C^n`` (pointwise order)."""
    M = _as_matrix(T, space)
    if h.dim != space.real_dim:
        raise ValueError("element and space dimensions differ")

    def s_gen(x):
        return np.real(M @ space.from_real(x))

    return interpret(h.re, s_gen) + 1j * interpret(h.im, s_gen)


def beta_interpret(h: ComplexLatticeElem, Z: NormedSpace) -> np.ndarray:
    """``beta``: interpret ``h`` in ``Z = C^n`` itself, so that ``beta delta_Z = Id``."""
    return extend_operator(np.eye(Z.dim), h, Z)


@dataclass(frozen=True)
class ExtensionReport:
    generator_defect: float
    modulus_defect: float
    modulus_bound: float
    norm_on_generators: float
    op_norm: float

    @property
    def ok(self) -> bool:
        return self.generator_defect <= 1e-12 and self.modulus_defect <= self.modulus_bound


def extension_check(T, space: NormedSpace, h: ComplexLatticeElem, zs, N=256, X_p=2.0) -> ExtensionReport:
    """``T-hat delta_E = T`` on ``zs``; ``|T-hat h|`` vs ``T-hat`` of the ``theta_grid(N)`` modulus.

    The grid modulus undershoots by at most ``1 - cos(pi/N)`` relative.
    """
    from .lattice_expr import delta_embed

    M = _as_matrix(T, space)
    X = lp(M.shape[0], X_p)
    gen_def, ratio = 0.0, 0.0
    for z in np.atleast_2d(zs):
        Tz = M @ z
        gen_def = max(gen_def, float(np.max(np.abs(extend_operator(M, delta_embed(space, z), space) - Tz))))
        nz = float(space.norm(z))
        if nz > 0:
            ratio = max(ratio, float(X.norm(Tz)) / nz)
    exact = np.abs(extend_operator(M, h, space))
    approx = interpret(modulus_expr(h, N), lambda x: np.real(M @ space.from_real(x)))
    defect = float(np.max(np.abs(exact - approx)))
    bound = float(np.max(exact)) * (1 - np.cos(np.pi / N)) + 1e-12
    nT = operator_norm(InducedHom(M.astype(complex), space, X)).value if space.is_complex else float("nan")
    return ExtensionReport(gen_def, defect, bound, ratio, nT)


def lattice_hom_matrix(rng, n: int, scale=(0.5, 2.0)) -> np.ndarray:
    """A random lattice homomorphism of ``R^n``: nonnegative, one positive entry per row."""
    M = np.zeros((n, n))
    M[np.arange(n), rng.integers(n, size=n)] = rng.uniform(*scale, size=n)
    return M


def random_matrix(rng, rows: int, cols: int, complex_: bool = True) -> np.ndarray:
    if complex_:
        return rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))
    return rng.normal(size=(rows, cols))


def gaussian_integer_matrix(rng, rows: int, cols: int, lo=-3, hi=4) -> np.ndarray:
    """Entries in ``Z[i]``: products stay exact in floating point."""
    return (rng.integers(lo, hi, size=(rows, cols)) + 1j * rng.integers(lo, hi, size=(rows, cols))).astype(complex)


__all__ = [
    "InducedHom", "OperatorNorm", "operator_norm", "apply_hom_subst", "phi_map", "phi_re",
    "apply_hom_composition", "route_agreement", "phi_inequality_check", "interpret",
    "extend_operator", "beta_interpret", "extension_check", "lattice_hom_matrix", "random_matrix",
    "gaussian_integer_matrix", "RouteReport", "PhiReport", "ExtensionReport",
]
