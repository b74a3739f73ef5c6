"""Lattice-linear expressions over generators ``delta_x``.

An expression is an immutable tree evaluated as a positively homogeneous
function on real functionals of ``E_R``.  Generator payloads are stored in
``E_R`` coordinates, so ``delta_x(x*) = x* . x``.  Evaluation is vectorized:
``expr(X)`` accepts an array of functionals with shape ``(..., real_dim)``.

:class:`Modulus` is the one node outside the lattice-linear grammar.  It
represents ``|f + ig|``, which is a member of the free complex lattice but
not a finite lattice-linear combination of generators.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterator, Tuple

import numpy as np

DEFAULT_SEED = 0x5EED


class CanonicalFormBudgetError(RuntimeError):
    """Rewriting into ``V delta(x_i) - V delta(y_j)`` exceeded the term budget."""


def _vec(x) -> tuple:
    return tuple(float(v) for v in np.asarray(x, dtype=float).ravel())


class LatticeExpr:
    dim: int

    def __call__(self, X):
        return self.eval(X)

    def eval(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.shape[-1] != self.dim:
            raise ValueError(f"functional has {X.shape[-1]} coordinates, expression expects {self.dim}")
        return self._eval(X)

    # lattice-linear sugar; no simplification is ever applied
    def __add__(self, other):
        return Add((self, other))

    def __sub__(self, other):
        return Add((self, Scale(-1.0, other)))

    def __neg__(self):
        return Scale(-1.0, self)

    def __mul__(self, c):
        return Scale(float(c), self)

    __rmul__ = __mul__

    def __or__(self, other):
        return Sup((self, other))

    def __and__(self, other):
        return Inf((self, other))

    def generators(self) -> Iterator[np.ndarray]:
        for node in self.walk():
            if isinstance(node, Gen):
                yield node.x

    def walk(self):
        yield self


@dataclass(frozen=True)
class Gen(LatticeExpr):
    """``delta_x``; ``x`` in ``E_R`` coordinates."""

    payload: tuple

    def __init__(self, x):
        object.__setattr__(self, "payload", _vec(x))

    @property
    def dim(self):
        return len(self.payload)

    @cached_property
    def x(self) -> np.ndarray:
        return np.array(self.payload)

    def _eval(self, X):
        return X @ self.x

    def map_generators(self, fn):
        return Gen(fn(self.x))


@dataclass(frozen=True)
class Scale(LatticeExpr):
    c: float
    child: LatticeExpr

    def __post_init__(self):
        object.__setattr__(self, "c", float(self.c))

    @property
    def dim(self):
        return self.child.dim

    def _eval(self, X):
        return self.c * self.child._eval(X)

    def map_generators(self, fn):
        return Scale(self.c, self.child.map_generators(fn))

    def walk(self):
        yield self
        yield from self.child.walk()


class _Nary(LatticeExpr):
    children: Tuple[LatticeExpr, ...]

    def __post_init__(self):
        kids = tuple(self.children)
        if not kids:
            raise ValueError(f"{type(self).__name__} needs at least one child")
        dims = {k.dim for k in kids}
        if len(dims) != 1:
            raise ValueError(f"children disagree on dimension: {sorted(dims)}")
        object.__setattr__(self, "children", kids)

    @property
    def dim(self):
        return self.children[0].dim

    def map_generators(self, fn):
        return type(self)(tuple(k.map_generators(fn) for k in self.children))

    def walk(self):
        yield self
        for k in self.children:
            yield from k.walk()


@dataclass(frozen=True)
class Add(_Nary):
    children: tuple

    def _eval(self, X):
        out = self.children[0]._eval(X)
        for k in self.children[1:]:
            out = out + k._eval(X)
        return out


@dataclass(frozen=True)
class Sup(_Nary):
    children: tuple

    def _eval(self, X):
        out = self.children[0]._eval(X)
        for k in self.children[1:]:
            out = np.maximum(out, k._eval(X))
        return out


@dataclass(frozen=True)
class Inf(_Nary):
    children: tuple

    def _eval(self, X):
        out = self.children[0]._eval(X)
        for k in self.children[1:]:
            out = np.minimum(out, k._eval(X))
        return out


@dataclass(frozen=True)
class Modulus(LatticeExpr):
    """Pointwise ``sqrt(re^2 + im^2)`` of a complex element."""

    elem: "ComplexLatticeElem"

    @property
    def dim(self):
        return self.elem.dim

    def _eval(self, X):
        return np.hypot(self.elem.re._eval(X), self.elem.im._eval(X))

    def map_generators(self, fn):
        return Modulus(self.elem.map_generators(fn))

    def walk(self):
        yield self
        yield from self.elem.re.walk()
        yield from self.elem.im.walk()


def zero(dim: int) -> LatticeExpr:
    """``delta_0``: the zero function."""
    return Gen(np.zeros(dim))


def eval_expr(expr: LatticeExpr, x) -> np.ndarray:
    return expr.eval(x)


@dataclass(frozen=True)
class ComplexLatticeElem:
    """``f + i g`` with ``f, g`` real expressions over the same ``E_R``."""

    re: LatticeExpr
    im: LatticeExpr

    def __post_init__(self):
        if self.re.dim != self.im.dim:
            raise ValueError("real and imaginary parts live over different spaces")

    @property
    def dim(self):
        return self.re.dim

    def __call__(self, X):
        return self.eval(X)

    def eval(self, X) -> np.ndarray:
        return self.re.eval(X) + 1j * self.im.eval(X)

    def modulus(self, X) -> np.ndarray:
        return np.hypot(self.re.eval(X), self.im.eval(X))

    def map_generators(self, fn):
        return ComplexLatticeElem(self.re.map_generators(fn), self.im.map_generators(fn))

    def generators(self):
        yield from self.re.generators()
        yield from self.im.generators()

    def __add__(self, other):
        return ComplexLatticeElem(self.re + other.re, self.im + other.im)

    def scale(self, c: complex) -> "ComplexLatticeElem":
        """``(a + bi)(f + ig) = (af - bg) + i(bf + ag)``."""
        a, b = float(np.real(c)), float(np.imag(c))
        return ComplexLatticeElem(Add((Scale(a, self.re), Scale(-b, self.im))),
                                  Add((Scale(b, self.re), Scale(a, self.im))))

    def abs(self) -> "ComplexLatticeElem":
        """``(|h|, 0)``."""
        return ComplexLatticeElem(Modulus(self), zero(self.dim))


def real_elem(f: LatticeExpr) -> ComplexLatticeElem:
    return ComplexLatticeElem(f, zero(f.dim))


def modulus_eval(h: ComplexLatticeElem, x, method="sqrt", N: int = 256) -> np.ndarray:
    """Modulus of ``h`` at real functionals ``x``.

    ``sqrt`` is ``sqrt(f^2 + g^2)``; ``theta_grid`` takes the maximum of
    ``cos(t) f + sin(t) g`` over ``N`` equispaced angles, a lower bound with
    relative gap at most ``1 - cos(pi / N)``.
    """
    if method == "sqrt":
        return h.modulus(x)
    if method == "theta_grid":
        if N < 4:
            raise ValueError("theta_grid needs N >= 4")
        f = h.re.eval(x)
        g = h.im.eval(x)
        t = 2 * np.pi * np.arange(N) / N
        return np.max(np.multiply.outer(f, np.cos(t)) + np.multiply.outer(g, np.sin(t)), axis=-1)
    raise ValueError(f"unknown modulus method {method!r}")


def modulus_expr(h: ComplexLatticeElem, N: int = 256) -> LatticeExpr:
    """The ``theta_grid(N)`` modulus written as a lattice-linear expression."""
    if N < 4:
        raise ValueError("theta_grid needs N >= 4")
    t = 2 * np.pi * np.arange(N) / N
    return Sup(tuple(Add((Scale(np.cos(a), h.re), Scale(np.sin(a), h.im))) for a in t))


def delta_embed(space, z) -> ComplexLatticeElem:
    """``delta_E(z) = delta(z) - i delta(iz)`` for ``z`` in a complex space."""
    if not space.is_complex:
        raise ValueError("delta_embed needs a complex space")
    z = np.asarray(space.check(z), dtype=complex)
    return ComplexLatticeElem(Gen(space.to_real(z)), Scale(-1.0, Gen(space.to_real(space.mul_i(z)))))


def delta_real(space, x) -> LatticeExpr:
    """``delta_{E_R}(x)`` for a vector of ``E`` (complex vectors are realified)."""
    return Gen(space.to_real(x))


# -- canonical positive form ------------------------------------------------


@dataclass(frozen=True, eq=False)
class CanonicalForm:
    """``max_i <., pos_i> - max_j <., neg_j>``."""

    pos: np.ndarray
    neg: np.ndarray

    def eval(self, X):
        X = np.asarray(X, dtype=float)
        return np.max(X @ self.pos.T, axis=-1) - np.max(X @ self.neg.T, axis=-1)

    __call__ = eval

    def to_expr(self) -> LatticeExpr:
        return Add((Sup(tuple(Gen(v) for v in self.pos)),
                    Scale(-1.0, Sup(tuple(Gen(v) for v in self.neg)))))


def _minkowski(A, B, budget):
    if len(A) * len(B) > budget:
        raise CanonicalFormBudgetError(f"{len(A)} x {len(B)} terms exceed budget {budget}")
    S = (A[:, None, :] + B[None, :, :]).reshape(-1, A.shape[1])
    return np.unique(S, axis=0)


def _stack(parts, budget):
    S = np.unique(np.vstack(parts), axis=0)
    if len(S) > budget:
        raise CanonicalFormBudgetError(f"{len(S)} terms exceed budget {budget}")
    return S


def _dc(expr, budget):
    if isinstance(expr, Gen):
        return expr.x[None, :], np.zeros((1, expr.dim))
    if isinstance(expr, Scale):
        P, N = _dc(expr.child, budget)
        c = expr.c
        return (c * P, c * N) if c >= 0 else (-c * N, -c * P)
    if isinstance(expr, Add):
        P, N = _dc(expr.children[0], budget)
        for k in expr.children[1:]:
            P2, N2 = _dc(k, budget)
            P, N = _minkowski(P, P2, budget), _minkowski(N, N2, budget)
        return P, N
    if isinstance(expr, (Sup, Inf)):
        parts = [_dc(k, budget) for k in expr.children]
        if isinstance(expr, Inf):
            # min_k f_k = -max_k(-f_k)
            parts = [(N, P) for P, N in parts]
        # max_k (A_k - B_k) = max_k (A_k + sum_{l != k} B_l) - sum_l B_l
        total_neg = parts[0][1]
        for _, N in parts[1:]:
            total_neg = _minkowski(total_neg, N, budget)
        pos_parts = []
        for k, (P, _) in enumerate(parts):
            acc = P
            for l, (_, N) in enumerate(parts):
                if l != k:
                    acc = _minkowski(acc, N, budget)
            pos_parts.append(acc)
        P = _stack(pos_parts, budget)
        if isinstance(expr, Inf):
            return total_neg, P
        return P, total_neg
    raise ValueError(f"{type(expr).__name__} has no canonical positive form")


def canonical_positive_form(expr: LatticeExpr, budget: int = 4096, samples: int = 1000,
                            seed: int = DEFAULT_SEED, atol: float = 1e-10) -> CanonicalForm:
    """Rewrite ``expr`` as ``V delta(x_i) - V delta(y_j)``.

    The result is checked against ``expr`` on ``samples`` random functionals;
    exceeding ``budget`` terms raises :class:`CanonicalFormBudgetError`.
    """
    P, N = _dc(expr, budget)
    form = CanonicalForm(P, N)
    X = np.random.default_rng(seed).normal(size=(samples, expr.dim))
    a, b = expr.eval(X), form.eval(X)
    scale = 1.0 + np.max(np.abs(a))
    if not np.allclose(a, b, rtol=0, atol=atol * scale):
        raise AssertionError("canonical form disagrees with the expression on samples")
    return form


# -- range of delta_E -------------------------------------------------------


@dataclass(frozen=True)
class DeltaRangeReport:
    additive: bool
    rotates_with_L_i: bool
    samples: int
    max_additivity_defect: float
    max_rotation_defect: float
    note: str = "necessary condition checked on samples only"

    @property
    def in_range(self) -> bool:
        return self.additive and self.rotates_with_L_i

    def __bool__(self):
        return self.in_range


def is_in_delta_range(h: ComplexLatticeElem, space, samples: int = 200, seed: int = DEFAULT_SEED,
                      tol: float = 1e-9) -> DeltaRangeReport:
    """Sampled test of additivity and ``h(L_i x*) = i h(x*)``."""
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(samples, space.real_dim))
    Y = rng.normal(size=(samples, space.real_dim))
    hx, hy, hxy = h.eval(X), h.eval(Y), h.eval(X + Y)
    scale = 1.0 + max(np.max(np.abs(hx)), np.max(np.abs(hy)))
    add_def = float(np.max(np.abs(hxy - hx - hy)))
    rot_def = float(np.max(np.abs(h.eval(space.L_i(X)) - 1j * hx)))
    return DeltaRangeReport(bool(add_def <= tol * scale), bool(rot_def <= tol * scale), samples,
                            add_def, rot_def)


# -- tabulated closure ------------------------------------------------------


def sphere_grid(real_dim: int, size: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    """Deterministic points on the Euclidean unit sphere of ``(E_R)*``."""
    if real_dim == 1:
        return np.array([[1.0], [-1.0]])
    if real_dim == 2:
        t = 2 * np.pi * np.arange(size) / size
        return np.stack([np.cos(t), np.sin(t)], axis=1)
    X = np.random.default_rng(seed).normal(size=(size, real_dim))
    return X / np.linalg.norm(X, axis=1, keepdims=True)


def default_grid_size(space) -> int:
    return 512 if space.dim <= 2 else 4096


@dataclass(frozen=True, eq=False)
class ClosureFamily:
    """Members of ``E_n`` tabulated on a fixed sphere grid.

    Values at ``t x`` (``t >= 0``) are ``t`` times the tabulated value, so
    every member is positively homogeneous on the cone over the grid.
    """

    grid: np.ndarray
    values: np.ndarray
    depth: int
    stage_sizes: tuple
    truncated: bool
    note: str = "tabulated stand-in for members of the uniform completion"

    def __len__(self):
        return len(self.values)

    def contains(self, table, atol=1e-9) -> bool:
        return bool(np.any(np.max(np.abs(self.values - np.asarray(table)), axis=1) <= atol))


def _pair_limit(n, per_pair, max_members):
    k = n
    while k > 1 and per_pair * k * (k - 1) // 2 > max_members:
        k -= 1
    return k


def _lattice_round(vals, max_members):
    """One round of pairwise ``sup, inf, +, -`` (pairs limited to the budget)."""
    k = _pair_limit(len(vals), 5, max_members)
    i, j = np.triu_indices(k, 1)
    a, b = vals[i], vals[j]
    new = np.vstack([np.maximum(a, b), np.minimum(a, b), a + b, a - b, b - a])
    out, truncated = _dedup(np.vstack([vals, new]), max_members)
    return out, truncated or k < len(vals)


def _moduli(vals, max_members):
    k = _pair_limit(len(vals), 1, max_members)
    i, j = np.triu_indices(k, 1)
    return np.hypot(vals[i], vals[j]), k < len(vals)


def _dedup(vals, max_members):
    key = np.round(vals, 10)
    _, idx = np.unique(key, axis=0, return_index=True)
    idx = np.sort(idx)
    truncated = len(idx) > max_members
    return vals[idx[:max_members]], truncated


def complex_sublattice_closure(generators, space, depth: int = 1, cap: int = 3,
                               grid_size: int | None = None, max_members: int = 4096,
                               seed: int = DEFAULT_SEED) -> ClosureFamily:
    """Tabulate ``E_1 = lat(Re A, Im A)``, ``E_{n+1} = lat(E_n u F_n)`` with ``F_n`` moduli.

    ``lat`` is realized by one round of pairwise ``sup, inf, +, -``; the
    family is capped at ``max_members`` and flagged when truncated.
    ``depth = 0`` returns the first lattice round only.
    """
    gens = list(generators)
    if not gens:
        raise ValueError("need at least one generator")
    if depth > cap:
        raise ValueError(f"depth {depth} exceeds cap {cap}")
    if depth < 0:
        raise ValueError("depth must be >= 0")
    grid = sphere_grid(space.real_dim, grid_size or default_grid_size(space), seed)
    base = np.vstack([np.stack([h.re.eval(grid), h.im.eval(grid)]) for h in gens])
    vals, truncated = _lattice_round(base, max_members)
    sizes = [len(vals)]
    for _ in range(depth):
        mods, t0 = _moduli(vals, max_members)
        merged, t1 = _dedup(np.vstack([vals, mods]), max_members)
        vals, t2 = _lattice_round(merged, max_members)
        truncated = truncated or t0 or t1 or t2
        sizes.append(len(vals))
    return ClosureFamily(grid, vals, depth, tuple(sizes), truncated)


# -- the map iota into FVL(A x A)_C ------------------------------------------


def iota_embed(A, a) -> ComplexLatticeElem:
    """``iota(a) = eta_(a,a) + i eta_(-a,a)`` over ``R^(A x A)``.

    ``A`` is a finite sequence closed under negation (``-a`` must be a
    member); coordinates are ordered pairs ``(x, y)`` indexed
    ``i(x) * |A| + i(y)``.
    """
    A = list(A)
    if len(set(A)) != len(A):
        raise ValueError("index set has repeated elements")
    if a not in A:
        raise ValueError(f"{a!r} is not in the index set")
    if -a not in A:
        raise ValueError(f"-{a!r} is not in the index set; iota needs the pair (-a, a)")
    n = len(A)
    pos = {x: i for i, x in enumerate(A)}

    def eta(x, y):
        e = np.zeros(n * n)
        e[pos[x] * n + pos[y]] = 1.0
        return Gen(e)

    return ComplexLatticeElem(eta(a, a), eta(-a, a))


def pair_index(A, x, y) -> int:
    A = list(A)
    return A.index(x) * len(A) + A.index(y)


# -- random trees and Lipschitz bounds --------------------------------------


def random_expr(rng, dim: int, depth: int = 3, max_children: int = 3,
                gen: Callable | None = None) -> LatticeExpr:
    """A random lattice-linear expression of depth at most ``depth``."""
    if gen is None:
        def gen():
            return rng.normal(size=dim)
    if depth <= 0 or rng.uniform() < 0.25:
        return Gen(gen())
    kind = rng.integers(4)
    if kind == 0:
        return Scale(float(rng.uniform(-2, 2)), random_expr(rng, dim, depth - 1, max_children, gen))
    k = int(rng.integers(1, max_children + 1))
    kids = tuple(random_expr(rng, dim, depth - 1, max_children, gen) for _ in range(k))
    return (Add, Sup, Inf)[kind - 1](kids)


def random_complex_elem(rng, dim: int, depth: int = 3, max_children: int = 3) -> ComplexLatticeElem:
    return ComplexLatticeElem(random_expr(rng, dim, depth, max_children),
                              random_expr(rng, dim, depth, max_children))


def lipschitz_bound(expr) -> float:
    """Euclidean Lipschitz constant bound of ``expr`` (or of ``|h|``)."""
    if isinstance(expr, ComplexLatticeElem):
        return lipschitz_bound(expr.re) + lipschitz_bound(expr.im)
    if isinstance(expr, Gen):
        return float(np.linalg.norm(expr.x))
    if isinstance(expr, Scale):
        return abs(expr.c) * lipschitz_bound(expr.child)
    if isinstance(expr, Add):
        return sum(lipschitz_bound(k) for k in expr.children)
    if isinstance(expr, (Sup, Inf)):
        return max(lipschitz_bound(k) for k in expr.children)
    if isinstance(expr, Modulus):
        return lipschitz_bound(expr.elem)
    raise TypeError(type(expr))
