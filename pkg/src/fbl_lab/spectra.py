"""Spectra of matrices and the subsets of the induced homomorphism's spectrum they predict.

Nothing here computes the spectrum of the induced homomorphism itself: it acts on
an infinite-dimensional lattice.  Every set reported is labelled as a
*predicted subset* of it, backed by explicit eigen-witnesses where one exists.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .homs import InducedHom, apply_hom_subst
from .lattice_expr import DEFAULT_SEED, ComplexLatticeElem, delta_embed, random_complex_elem
from .spaces import NormedSpace, lp

PREDICTED_LABEL = "predicted subset of sigma(T-bar)"
DEDUP_TOL = 1e-9


def _square(T) -> np.ndarray:
    T = np.asarray(T, dtype=complex)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {T.shape}")
    if T.shape[0] > 32:
        raise ValueError("matrices are limited to dim <= 32")
    return T


def _sorted_points(pts) -> np.ndarray:
    pts = np.asarray(list(pts), dtype=complex)
    if pts.size == 0:
        return pts
    key = np.lexsort((np.round(np.mod(np.angle(pts), 2 * np.pi), 9), np.round(np.abs(pts), 9)))
    return pts[key]


def dedup(points, tol=DEDUP_TOL) -> np.ndarray:
    out = []
    for p in np.asarray(points, dtype=complex).ravel():
        if not any(abs(p - q) <= tol for q in out):
            out.append(p)
    return _sorted_points(out)


def cyclic_closure(points, k_max: int = 64, tol=DEDUP_TOL) -> np.ndarray:
    """Add ``|l| e^{ik arg l}`` for ``|k| <= k_max`` (``k = 0`` contributes ``|l|``)."""
    pts = []
    ks = np.arange(-k_max, k_max + 1)
    for lam in np.asarray(points, dtype=complex).ravel():
        r = abs(lam)
        if r == 0:
            pts.append(0j)
            continue
        pts.extend(r * np.exp(1j * ks * np.angle(lam)))
    # round-trip through exp(i k theta) is inexact; snap near-real points
    pts = np.array(pts, dtype=complex)
    pts.imag[np.abs(pts.imag) <= tol * (1 + np.abs(pts.real))] = 0.0
    return dedup(pts, tol)


def gelfand_radius(T, k_max: int = 64, space: Optional[NormedSpace] = None) -> np.ndarray:
    """``||T^k||^{1/k}`` for ``k = 1..k_max`` with running normalization against overflow.

    The default norm is the l2 operator norm; any other ``space`` uses its
    operator-norm oracle.
    """
    T = _square(T)
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    if space is not None and space.dim != T.shape[0]:
        raise ValueError("space and matrix dimensions differ")

    def opnorm(P):
        if space is None:
            return float(np.linalg.norm(P, 2))
        return InducedHom(P, space, space).norm().value

    out = np.zeros(k_max)
    P = np.eye(T.shape[0], dtype=complex)
    log_scale = 0.0
    for k in range(1, k_max + 1):
        P = P @ T
        n = opnorm(P)
        if n == 0:
            out[k - 1:] = 0.0
            break
        log_scale += np.log(n)
        P = P / n
        out[k - 1] = np.exp(log_scale / k)
    return out


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    eigenvalues: np.ndarray
    spectral_radius: float
    cyclic_closure: np.ndarray
    predicted_in_sigma_bar: np.ndarray
    gelfand_sequence: np.ndarray
    condition: float
    k_max: int = 64
    label: str = PREDICTED_LABEL

    def to_dict(self) -> dict:
        from .io import encode_array

        return {
            "eigenvalues": encode_array(self.eigenvalues),
            "spectral_radius": float(self.spectral_radius),
            "cyclic_closure": encode_array(self.cyclic_closure),
            "predicted_in_sigma_bar": {"label": self.label,
                                       "points": encode_array(self.predicted_in_sigma_bar)},
            "gelfand_sequence": [float(v) for v in self.gelfand_sequence],
            "eigenvector_condition": float(self.condition) if np.isfinite(self.condition) else None,
            "k_max": self.k_max,
        }

    def gelfand_csv(self) -> str:
        rows = ["k,norm_root"] + [f"{k},{float(v)!r}" for k, v in enumerate(self.gelfand_sequence, 1)]
        return "\n".join(rows) + "\n"


def matrix_spectrum(T, k_max: int = 64, gelfand_k: int = 64) -> SpectrumReport:
    T = _square(T)
    lam, V = np.linalg.eig(T)
    lam = _sorted_points(lam)
    with np.errstate(all="ignore"):
        cond = float(np.linalg.cond(V))
    closure = cyclic_closure(lam, k_max)
    predicted = dedup(np.concatenate([lam, np.abs(lam).astype(complex), closure]))
    return SpectrumReport(lam, float(np.max(np.abs(lam))), closure, predicted,
                          gelfand_radius(T, gelfand_k), cond, k_max)


# -- rotations M_theta ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MThetaPrediction:
    points: np.ndarray
    n: Optional[int]
    dense_in_circle: bool
    witnesses: dict = field(default_factory=dict)  # eigenvalue key -> (kind, element)
    label: str = PREDICTED_LABEL


def _key(c) -> tuple:
    return (round(float(np.real(c)), 9) + 0.0, round(float(np.imag(c)), 9) + 0.0)


def m_theta_predicted_spectrum(t: Union[Fraction, int, str], space: NormedSpace,
                               z=None) -> MThetaPrediction:
    """Predicted spectrum of the induced hom of ``M_theta = e^{i theta} Id``, ``theta = 2 pi t``.

    For rational ``t`` with reduced denominator ``n`` the prediction is the
    ``n``-th roots of unity; ``t = "irrational"`` flags the dense circle.
    Witnesses: ``delta_E(z)`` for ``e^{i theta}``, ``|delta_E(z)|`` for ``1``;
    the remaining roots are reported as formal.
    """
    if not space.is_complex:
        raise ValueError("M_theta needs a complex space")
    z = np.eye(space.dim, dtype=complex)[0] if z is None else np.asarray(z, dtype=complex)
    d = delta_embed(space, z)
    fixed = d.abs()
    if t == "irrational":
        return MThetaPrediction(np.zeros(0, dtype=complex), None, True,
                                {"fixed_point": ("witness", fixed)})
    t = Fraction(t) % 1
    n = t.denominator
    pts = _sorted_points(np.exp(2j * np.pi * np.arange(n) / n))
    pts.imag[np.abs(pts.imag) < 1e-12] = 0.0
    pts.real[np.abs(pts.real) < 1e-12] = 0.0
    wit = {}
    for p in pts:
        wit[_key(p)] = ("formal", None)
    wit[_key(np.exp(2j * np.pi * float(t)))] = ("witness", d)
    wit[_key(1.0)] = ("witness", fixed)
    return MThetaPrediction(pts, n, False, wit)


def m_theta(theta: float, space: NormedSpace) -> InducedHom:
    return InducedHom(np.exp(1j * theta) * np.eye(space.dim), space, space)


# -- witness checks ------------------------------------------------------------------------


@dataclass(frozen=True)
class WitnessReport:
    max_defect: float
    scale: float
    samples: int
    tol: float

    @property
    def ok(self) -> bool:
        return self.max_defect <= self.tol * self.scale

    def __bool__(self):
        return self.ok


def eigen_witness_check(T, lam: complex, h: ComplexLatticeElem, space: NormedSpace = None,
                        samples: int = 1000, seed: int = DEFAULT_SEED, tol=1e-9) -> WitnessReport:
    """``T-bar h = lam h`` pointwise on sampled functionals (relative ``tol``)."""
    if not isinstance(T, InducedHom):
        T = _square(T)
        T = InducedHom(T, space or lp(T.shape[0]), space or lp(T.shape[0]))
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(samples, T.target.real_dim))
    ref = h.eval(X)
    if not np.any(np.abs(ref) > 0):
        raise ValueError("witness vanishes on the sample grid")
    lhs = apply_hom_subst(T, h).eval(X)
    rhs = h.scale(lam).eval(X)
    scale = max(1.0, float(np.max(np.abs(rhs))), float(np.max(np.abs(ref))))
    return WitnessReport(float(np.max(np.abs(lhs - rhs))), scale, samples, tol)


def eigenpair_witnesses(T, space: NormedSpace = None, **kw):
    """``eigen_witness_check(T, lam, delta_E(z))`` for every computed eigenpair."""
    T = _square(T)
    space = space or lp(T.shape[0])
    lam, V = np.linalg.eig(T)
    return [(complex(l), eigen_witness_check(T, l, delta_embed(space, V[:, j]), space, **kw))
            for j, l in enumerate(lam)]


def fixed_point_check(theta: float, space: NormedSpace, z, samples: int = 1000,
                      seed: int = DEFAULT_SEED, tol=1e-12) -> WitnessReport:
    """``|delta_E(z)|`` is fixed by the induced hom of ``e^{i theta} Id``."""
    h = delta_embed(space, z).abs()
    return eigen_witness_check(m_theta(theta, space), 1.0, h, samples=samples, seed=seed, tol=tol)


@dataclass(frozen=True)
class ResidualReport:
    lam: float
    eigen_residual: float
    max_residual: float
    trials: int
    tol: float

    @property
    def ok(self) -> bool:
        return self.max_residual <= self.tol

    def __bool__(self):
        return self.ok


def left_eigenvector(T, lam: complex) -> np.ndarray:
    """Coefficients ``c`` with ``c T = lam c``, i.e. an eigenfunctional of the adjoint."""
    T = _square(T)
    w, V = np.linalg.eig(T.T)
    j = int(np.argmin(np.abs(w - lam)))
    c = V[:, j]
    return c / np.max(np.abs(c))


def residual_direction_check(T, lam: float, space: NormedSpace = None, zstar=None,
                             trials: int = 100, seed: int = DEFAULT_SEED, tol=1e-9,
                             depth: int = 3) -> ResidualReport:
    """``(lam f - T-bar f)(Re z*) = 0`` for random ``f`` and ``T* z* = lam z*`` with ``lam >= 0``."""
    T = _square(T)
    lam_r = float(np.real(lam))
    if abs(np.imag(lam)) > 0 or lam_r < 0:
        raise ValueError("the residual check needs a nonnegative eigenvalue")
    space = space or lp(T.shape[0])
    c = left_eigenvector(T, lam_r) if zstar is None else np.asarray(zstar, dtype=complex)
    hom = InducedHom(T, space, space)
    eig_res = float(np.max(np.abs(hom.adjoint_coeffs(c) - lam_r * c)))
    if eig_res > tol * max(1.0, float(np.max(np.abs(c))) * max(1.0, np.abs(T).max())):
        raise ValueError(f"z* is not an eigenfunctional of T* for {lam_r} (residual {eig_res:.2e})")
    x = space.realify(c)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        f = random_complex_elem(rng, space.real_dim, depth)
        a = lam_r * f.eval(x[None, :])[0]
        b = apply_hom_subst(hom, f).eval(x[None, :])[0]
        worst = max(worst, abs(a - b) / (1.0 + abs(a)))
    return ResidualReport(lam_r, eig_res, worst, trials, tol)


# -- ensembles --------------------------------------------------------------------------------


def random_radius_matrix(rng, n: int = 3, r_range=(0.5, 2.0)) -> np.ndarray:
    """Complex Ginibre matrix rescaled to a spectral radius drawn uniformly from ``r_range``."""
    G = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    r = rng.uniform(*r_range)
    return G * (r / np.max(np.abs(np.linalg.eigvals(G))))


def random_positive_triangular(rng, n: int = 3) -> np.ndarray:
    """Upper-triangular with positive real diagonal: every eigenvalue is nonnegative."""
    T = np.triu(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)), 1)
    return T + np.diag(rng.uniform(0.2, 3.0, size=n))


def gelfand_error(T, k: int = 64) -> float:
    T = _square(T)
    return abs(gelfand_radius(T, k)[-1] - np.max(np.abs(np.linalg.eigvals(T))))


__all__ = [
    "SpectrumReport", "MThetaPrediction", "WitnessReport", "ResidualReport", "PREDICTED_LABEL",
    "matrix_spectrum", "cyclic_closure", "gelfand_radius", "m_theta_predicted_spectrum", "m_theta",
    "eigen_witness_check", "eigenpair_witnesses", "fixed_point_check", "residual_direction_check",
    "left_eigenvector", "random_radius_matrix", "random_positive_triangular", "gelfand_error",
    "dedup",
]
