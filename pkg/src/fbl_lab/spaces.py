"""Finite-dimensional real and complex normed spaces.

Vectors of a complex space are complex arrays of length ``dim``.  The
realification ``E_R`` uses the stacked coordinates ``(Re z, Im z)``, so a
real functional on ``E_R`` is a real array of length ``2 * dim``.

A functional on a complex space is stored by its coefficient vector ``c``.
On an ordinary space it acts as ``sum(c * z)``; on a conjugate space (same
vectors, scalar action ``a . z = conj(a) z``) a C-linear functional acts as
``sum(c * conj(z))``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np
from scipy.optimize import linprog

REAL = "real"
COMPLEX = "complex"


class DimensionError(ValueError):
    pass


def _sgn(a):
    """Unimodular phase of ``a``; zero entries map to zero."""
    a = np.asarray(a)
    if not np.iscomplexobj(a):
        return np.sign(a)
    # via the angle: dividing by a subnormal modulus overflows
    return np.where(a == 0, 0, np.exp(1j * np.angle(a)))


def _holder_conjugate(p: float) -> float:
    if p == 1:
        return np.inf
    if np.isinf(p):
        return 1.0
    return p / (p - 1.0)


@dataclass(frozen=True, eq=False)
class NormedSpace:
    """An ``lp``, weighted ``lp`` or polytope norm on ``R^dim`` or ``C^dim``.

    Polytope norms ``max_k |phi_k . x|`` are only available over the reals:
    a complex unit ball is circled and therefore never a polytope.
    """

    dim: int
    field: str = COMPLEX
    kind: str = "lp"
    p: float = 2.0
    weights: Optional[tuple] = None
    facets: Optional[tuple] = None
    conjugate: bool = False

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim!r}")
        if self.field not in (REAL, COMPLEX):
            raise ValueError(f"field must be 'real' or 'complex', got {self.field!r}")
        if self.kind not in ("lp", "weighted_lp", "polytope"):
            raise ValueError(f"unknown norm kind {self.kind!r}")
        if self.conjugate and self.field != COMPLEX:
            raise ValueError("only complex spaces have a conjugate")
        if self.kind in ("lp", "weighted_lp"):
            p = float(self.p)
            if not p >= 1:
                raise ValueError(f"p must lie in [1, inf], got {self.p!r}")
            object.__setattr__(self, "p", p)
        if self.kind == "weighted_lp":
            w = np.asarray(self.weights, dtype=float)
            if w.shape != (self.dim,) or not np.all(w > 0):
                raise ValueError("weights must be dim positive numbers")
            object.__setattr__(self, "weights", tuple(float(v) for v in w))
        if self.kind == "polytope":
            if self.field == COMPLEX:
                raise ValueError("polytope norms are only defined for real spaces")
            phi = np.asarray(self.facets, dtype=float)
            if phi.ndim != 2 or phi.shape[1] != self.dim:
                raise ValueError("polytope facets must be a list of dim-vectors")
            if np.linalg.matrix_rank(phi) < self.dim:
                raise ValueError("polytope facets must span the dual space")
            object.__setattr__(self, "facets", tuple(tuple(float(v) for v in row) for row in phi))

    # -- basic structure -------------------------------------------------

    @property
    def is_complex(self) -> bool:
        return self.field == COMPLEX

    @property
    def real_dim(self) -> int:
        return 2 * self.dim if self.is_complex else self.dim

    @property
    def dtype(self):
        return complex if self.is_complex else float

    @property
    def _w(self) -> np.ndarray:
        if self.weights is None:
            return np.ones(self.dim)
        return np.asarray(self.weights)

    @cached_property
    def _phi(self) -> np.ndarray:
        return np.asarray(self.facets, dtype=float)

    def describe(self) -> dict:
        if self.kind == "lp":
            norm = {"lp": _p_json(self.p)}
        elif self.kind == "weighted_lp":
            norm = {"weighted_lp": {"p": _p_json(self.p), "weights": list(self.weights)}}
        else:
            norm = {"polytope": [list(r) for r in self.facets]}
        out = {"dim": self.dim, "field": self.field, "norm": norm}
        if self.conjugate:
            out["conjugate"] = True
        return out

    def conjugate_space(self) -> "NormedSpace":
        if not self.is_complex:
            raise ValueError("real spaces have no complex conjugate")
        return NormedSpace(self.dim, self.field, self.kind, self.p, self.weights,
                           self.facets, conjugate=not self.conjugate)

    def realification(self) -> "RealifiedSpace":
        if not self.is_complex:
            raise ValueError("realification needs a complex space")
        return RealifiedSpace(self)

    def check(self, x, what="vector") -> np.ndarray:
        x = np.asarray(x)
        if x.shape[-1:] != (self.dim,):
            raise DimensionError(f"{what} has trailing dimension {x.shape[-1:]}, expected {self.dim}")
        return x

    # -- coordinates -----------------------------------------------------

    def to_real(self, z) -> np.ndarray:
        """Vector of ``E`` -> coordinates in ``E_R``."""
        z = self.check(z)
        if not self.is_complex:
            return np.asarray(z, dtype=float)
        return np.concatenate([z.real, z.imag], axis=-1).astype(float)

    def from_real(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.real_dim:
            raise DimensionError(f"expected {self.real_dim} real coordinates, got {x.shape[-1]}")
        if not self.is_complex:
            return x
        return x[..., : self.dim] + 1j * x[..., self.dim:]

    def mul_i(self, z):
        """Scalar multiplication by ``i`` in this space."""
        return -1j * z if self.conjugate else 1j * z

    def pair(self, c, z):
        """Action ``c(z)`` of a functional on a vector (broadcasting)."""
        c = self.check(c, "functional")
        z = self.check(z)
        if self.conjugate:
            return np.sum(c * np.conj(z), axis=-1)
        return np.sum(c * z, axis=-1)

    def realify(self, c) -> np.ndarray:
        """Real part of a functional, as a real functional on ``E_R``."""
        c = self.check(c, "functional")
        if not self.is_complex:
            return np.asarray(c, dtype=float)
        if self.conjugate:
            return np.concatenate([c.real, c.imag], axis=-1)
        return np.concatenate([c.real, -c.imag], axis=-1)

    def complexify(self, x) -> np.ndarray:
        """Inverse of :meth:`realify`: ``z*(z) = x*(z) - i x*(iz)``."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.real_dim:
            raise DimensionError(f"expected {self.real_dim} real coordinates, got {x.shape[-1]}")
        if not self.is_complex:
            return x
        a, b = x[..., : self.dim], x[..., self.dim:]
        if self.conjugate:
            return a + 1j * b
        return a - 1j * b

    def L_i(self, x) -> np.ndarray:
        """``(L_i x*)(v) = x*(i v)`` on real functionals of ``E_R``."""
        x = np.asarray(x, dtype=float)
        a, b = x[..., : self.dim], x[..., self.dim:]
        # i.(u + iv) = -v + iu, conjugate space flips the sign
        s = -1.0 if self.conjugate else 1.0
        return s * np.concatenate([b, -a], axis=-1)

    # -- norm oracles ----------------------------------------------------

    def norm(self, x) -> np.ndarray:
        x = self.check(x)
        if self.kind == "polytope":
            return np.max(np.abs(x @ self._phi.T), axis=-1)
        a = np.abs(x)
        if np.isinf(self.p):
            return np.max(self._w * a, axis=-1)
        if self.p == 1:
            return np.sum(self._w * a, axis=-1)
        if self.p == 2:
            return np.sqrt(np.sum(self._w * a * a, axis=-1))
        # scale before powering to avoid under/overflow
        m = np.max(a, axis=-1, keepdims=True)
        m_safe = np.where(m == 0, 1.0, m)
        s = np.sum(self._w * (a / m_safe) ** self.p, axis=-1) ** (1.0 / self.p)
        return np.where(m[..., 0] == 0, 0.0, s * m[..., 0])

    @property
    def dual_norm_method(self) -> str:
        if self.kind != "polytope":
            return "holder"
        return "polytope_vertices" if self.dim <= 3 else "linprog"

    def dual_norm(self, c) -> np.ndarray:
        """``sup_{B_E} |c(z)|``.  Exact for every supported norm kind."""
        c = self.check(c, "functional")
        if self.kind == "polytope":
            if self.dim <= 3:
                return np.max(np.asarray(c, dtype=float) @ self._vertices.T, axis=-1)
            return self._dual_norm_lp(c)
        a = np.abs(c)
        w = self._w
        if self.p == 1:
            return np.max(a / w, axis=-1)
        if np.isinf(self.p):
            return np.sum(a / w, axis=-1)
        q = _holder_conjugate(self.p)
        if q == 2:
            return np.sqrt(np.sum(a * a / w, axis=-1))
        m = np.max(a, axis=-1, keepdims=True)
        m_safe = np.where(m == 0, 1.0, m)
        s = np.sum(w ** (1.0 - q) * (a / m_safe) ** q, axis=-1) ** (1.0 / q)
        return np.where(m[..., 0] == 0, 0.0, s * m[..., 0])

    def support_point(self, c) -> np.ndarray:
        """A unit vector ``z`` maximizing ``Re c(z)`` over the unit ball."""
        c = self.check(c, "functional")
        if self.conjugate:
            # Re sum(c conj z) = Re sum(conj(c) z)
            return self._support_point_plain(np.conj(c))
        return self._support_point_plain(c)

    def norming_functional(self, z) -> np.ndarray:
        """A functional ``c`` with dual norm 1 and ``c(z) = ||z||``."""
        z = self.check(z)
        c = self._norming_plain(z)
        return np.conj(c) if self.conjugate else c

    # -- helpers for the plain (non-conjugate) coordinates ----------------

    def _support_point_plain(self, c) -> np.ndarray:
        if self.kind == "polytope":
            if self.dim <= 3:
                vals = np.asarray(c, dtype=float) @ self._vertices.T
                return self._vertices[np.argmax(vals, axis=-1)]
            return np.array([self._support_lp(ci) for ci in np.atleast_2d(c)]).reshape(np.shape(c))
        w = self._w
        p = self.p
        if np.isinf(p):
            ph = _sgn(np.conj(c))
            ph = np.where(ph == 0, 1.0, ph)
            return (ph / w).astype(self.dtype)
        a = c * w ** (-1.0 / p)
        if p == 1:
            k = np.argmax(np.abs(a), axis=-1)
            y = np.zeros(np.shape(c), dtype=self.dtype)
            idx = np.indices(k.shape)
            ph = _sgn(np.conj(np.take_along_axis(a, k[..., None], axis=-1)[..., 0]))
            ph = np.where(ph == 0, 1.0, ph)
            y[(*idx, k)] = ph
            return y * w ** (-1.0 / p)
        q = _holder_conjugate(p)
        mod = np.abs(a)
        top = np.max(mod, axis=-1, keepdims=True)
        top = np.where(top == 0, 1.0, top)
        r = (mod / top) ** (q - 1.0)
        y = _sgn(np.conj(a)) * r
        nrm = np.sum(np.abs(y) ** p, axis=-1, keepdims=True) ** (1.0 / p)
        zero = nrm == 0
        y = np.where(zero, np.eye(1, self.dim, dtype=self.dtype)[0], y / np.where(zero, 1.0, nrm))
        return (y * w ** (-1.0 / p)).astype(self.dtype)

    def _norming_plain(self, z) -> np.ndarray:
        if self.kind == "polytope":
            vals = z @ self._phi.T
            k = np.argmax(np.abs(vals), axis=-1)
            s = np.sign(np.take_along_axis(vals, k[..., None], axis=-1))
            s = np.where(s == 0, 1.0, s)
            return s * self._phi[k]
        w = self._w
        p = self.p
        if np.isinf(p):
            k = np.argmax(w * np.abs(z), axis=-1)
            out = np.zeros(np.shape(z), dtype=self.dtype)
            idx = np.indices(k.shape)
            zk = np.take_along_axis(z, k[..., None], axis=-1)[..., 0]
            ph = _sgn(np.conj(zk))
            ph = np.where(ph == 0, 1.0, ph)
            out[(*idx, k)] = w[k] * ph
            return out
        if p == 1:
            return (w * _sgn(np.conj(z))).astype(self.dtype)
        nz = self.norm(z)[..., None]
        nz_safe = np.where(nz == 0, 1.0, nz)
        c = w * (np.abs(z) / nz_safe) ** (p - 1.0) * _sgn(np.conj(z))
        return c.astype(self.dtype)

    @cached_property
    def _vertices(self) -> np.ndarray:
        phi = self._phi
        n = self.dim
        verts = []
        for rows in itertools.combinations(range(len(phi)), n):
            A = phi[list(rows)]
            if abs(np.linalg.det(A)) < 1e-12:
                continue
            for signs in itertools.product((1.0, -1.0), repeat=n):
                v = np.linalg.solve(A, np.array(signs))
                if np.all(np.abs(phi @ v) <= 1 + 1e-10):
                    verts.append(v)
        V = np.unique(np.round(np.array(verts), 12), axis=0)
        return V

    def _dual_norm_lp(self, c) -> np.ndarray:
        c = np.asarray(c, dtype=float)
        flat = c.reshape(-1, self.dim)
        out = np.array([abs(float(ci @ self._support_lp(ci))) for ci in flat])
        return out.reshape(c.shape[:-1])

    def _support_lp(self, c) -> np.ndarray:
        phi = self._phi
        A = np.vstack([phi, -phi])
        res = linprog(-np.asarray(c, dtype=float), A_ub=A, b_ub=np.ones(len(A)),
                      bounds=[(None, None)] * self.dim, method="highs")
        return res.x


@dataclass(frozen=True, eq=False)
class RealifiedSpace:
    """``E_R``: a complex space viewed as a real space in ``(Re, Im)`` coordinates."""

    parent: NormedSpace
    field: str = field(default=REAL, init=False)

    @property
    def dim(self) -> int:
        return self.parent.real_dim

    @property
    def real_dim(self) -> int:
        return self.parent.real_dim

    @property
    def is_complex(self) -> bool:
        return False

    @property
    def dtype(self):
        return float

    @property
    def dual_norm_method(self) -> str:
        return self.parent.dual_norm_method

    def describe(self) -> dict:
        return {"realification_of": self.parent.describe()}

    def check(self, x, what="vector") -> np.ndarray:
        x = np.asarray(x)
        if x.shape[-1:] != (self.dim,):
            raise DimensionError(f"{what} has trailing dimension {x.shape[-1:]}, expected {self.dim}")
        return x

    def to_real(self, x):
        return np.asarray(self.check(x), dtype=float)

    def from_real(self, x):
        return np.asarray(self.check(x), dtype=float)

    def pair(self, c, x):
        return np.sum(self.check(c, "functional") * self.check(x), axis=-1)

    def realify(self, c):
        return np.asarray(self.check(c, "functional"), dtype=float)

    def complexify(self, x):
        return np.asarray(self.check(x), dtype=float)

    def norm(self, x):
        return self.parent.norm(self.parent.from_real(self.check(x)))

    def dual_norm(self, c):
        return self.parent.dual_norm(self.parent.complexify(self.check(c, "functional")))

    def support_point(self, c):
        z = self.parent.support_point(self.parent.complexify(self.check(c, "functional")))
        return self.parent.to_real(z)

    def norming_functional(self, x):
        c = self.parent.norming_functional(self.parent.from_real(self.check(x)))
        return self.parent.realify(c)


def _p_json(p):
    return "inf" if np.isinf(p) else p


def _parse_p(p) -> float:
    if isinstance(p, str):
        if p.strip().lower() in ("inf", "infinity", "oo"):
            return np.inf
        try:
            return float(p)
        except ValueError:
            raise ValueError(f"bad p value {p!r}") from None
    return float(p)


def space_from_spec(spec: dict) -> NormedSpace:
    """Build a space from ``{"dim": n, "field": ..., "norm": {...}}``."""
    if not isinstance(spec, dict):
        raise ValueError("space spec must be a JSON object")
    unknown = set(spec) - {"dim", "field", "norm", "conjugate"}
    if unknown:
        raise ValueError(f"unknown space keys: {sorted(unknown)}")
    dim = spec.get("dim")
    if not isinstance(dim, int):
        raise ValueError("space spec needs an integer 'dim'")
    fld = spec.get("field", COMPLEX)
    norm = spec.get("norm", {"lp": 2})
    if not isinstance(norm, dict) or len(norm) != 1:
        raise ValueError("'norm' must be an object with exactly one key")
    (kind, val), = norm.items()
    conj = bool(spec.get("conjugate", False))
    if kind == "lp":
        return NormedSpace(dim, fld, "lp", p=_parse_p(val), conjugate=conj)
    if kind == "weighted_lp":
        if not isinstance(val, dict) or set(val) != {"p", "weights"}:
            raise ValueError("weighted_lp needs exactly 'p' and 'weights'")
        return NormedSpace(dim, fld, "weighted_lp", p=_parse_p(val["p"]),
                           weights=tuple(val["weights"]), conjugate=conj)
    if kind == "polytope":
        return NormedSpace(dim, fld, "polytope", facets=tuple(map(tuple, val)), conjugate=conj)
    raise ValueError(f"unknown norm kind {kind!r}")


def lp(dim: int, p=2.0, field: str = COMPLEX) -> NormedSpace:
    return NormedSpace(dim, field, "lp", p=_parse_p(p))
