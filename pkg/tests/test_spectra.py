from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fbl_lab.lattice_expr import delta_embed
from fbl_lab.spaces import lp
from fbl_lab.spectra import (PREDICTED_LABEL, cyclic_closure, dedup, eigen_witness_check,
                             eigenpair_witnesses, fixed_point_check, gelfand_radius,
                             left_eigenvector, m_theta, m_theta_predicted_spectrum,
                             matrix_spectrum, random_positive_triangular, random_radius_matrix,
                             residual_direction_check)

from conftest import seeds


def test_gelfand_diagonal_frozen():
    g = gelfand_radius(np.diag([2.0, 1 + 1j]), 64)
    assert np.allclose(g, 2.0, rtol=0, atol=1e-12)


def test_gelfand_nilpotent_and_zero():
    N = np.array([[0.0, 1.0], [0.0, 0.0]])
    g = gelfand_radius(N, 8)
    assert g[0] == pytest.approx(1.0) and np.all(g[1:] == 0)


def test_gelfand_running_normalization_no_overflow():
    g = gelfand_radius(1e3 * np.eye(2), 200)
    assert np.all(np.isfinite(g)) and g[-1] == pytest.approx(1e3)


def test_gelfand_other_norms_same_limit():
    T = np.array([[0.5, 2.0], [0.0, 0.9]])
    a = gelfand_radius(T, 400)[-1]
    b = gelfand_radius(T, 400, space=lp(2, 1.0))[-1]
    assert abs(a - 0.9) < 2e-2 and abs(b - 0.9) < 2e-2


@given(seeds)
def test_gelfand_upper_bounds_radius(seed):
    T = random_radius_matrix(np.random.default_rng(seed), 3)
    r = np.max(np.abs(np.linalg.eigvals(T)))
    g = gelfand_radius(T, 32)
    # ||T^k||^{1/k} >= r(T) for every k
    assert np.all(g >= r * (1 - 1e-9))


def test_cyclic_closure_roots_of_unity():
    lam = np.exp(2j * np.pi / 3)
    pts = cyclic_closure([lam], 64)
    expect = np.exp(2j * np.pi * np.arange(3) / 3)
    assert len(pts) == 3
    assert all(np.min(np.abs(pts - e)) < 1e-9 for e in expect)


def test_cyclic_closure_contains_modulus_and_zero():
    pts = cyclic_closure([0.0, -2.0], 4)
    assert set(np.round(pts, 12)) == {0, 2, -2}


@given(st.lists(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=4))
@settings(max_examples=25)
def test_cyclic_closure_is_closed(points):
    pts = cyclic_closure(points, 8)
    for p in points:
        assert np.min(np.abs(pts - abs(p))) <= 1e-9 * (1 + abs(p))
        assert np.min(np.abs(pts - p)) <= 1e-8 * (1 + abs(p))


def test_dedup():
    out = dedup([1, 1 + 1e-12, 2j, 2j])
    assert len(out) == 2


def test_matrix_spectrum_report():
    T = np.array([[0, -1], [1, 0]], dtype=float)
    rep = matrix_spectrum(T, k_max=8)
    assert rep.spectral_radius == pytest.approx(1.0)
    d = rep.to_dict()
    assert d["predicted_in_sigma_bar"]["label"] == PREDICTED_LABEL
    # eigenvalues +-i generate the 4th roots of unity and the modulus 1
    pts = np.array([complex(*p) for p in d["predicted_in_sigma_bar"]["points"]])
    for e in (1, 1j, -1, -1j):
        assert np.min(np.abs(pts - e)) < 1e-9
    assert rep.gelfand_csv().splitlines()[0] == "k,norm_root"
    with pytest.raises(ValueError):
        matrix_spectrum(np.ones((2, 3)))


@pytest.mark.parametrize("t,n", [(Fraction(1, 2), 2), (Fraction(1, 3), 3), (Fraction(2, 5), 5),
                                 (0, 1), (Fraction(7, 4), 4)])
def test_m_theta_prediction(t, n):
    pred = m_theta_predicted_spectrum(t, lp(2))
    assert pred.n == n and len(pred.points) == n
    assert np.allclose(np.abs(pred.points), 1)
    assert np.allclose(pred.points ** n, 1)
    kinds = [k for k, _ in pred.witnesses.values()]
    assert kinds.count("witness") == (1 if n == 1 else 2)


def test_m_theta_irrational():
    pred = m_theta_predicted_spectrum("irrational", lp(1))
    assert pred.dense_in_circle and pred.n is None


def test_m_theta_witness_elements_are_eigen():
    E = lp(2, 3.0)
    t = Fraction(1, 5)
    pred = m_theta_predicted_spectrum(t, E, z=np.array([1 + 1j, -0.5]))
    theta = 2 * np.pi * float(t)
    for key, (kind, h) in pred.witnesses.items():
        if kind == "witness":
            assert eigen_witness_check(m_theta(theta, E), complex(*key), h, tol=1e-9)


@pytest.mark.parametrize("theta", [np.pi, 2 * np.pi / 3, 2 * np.pi / 5])
def test_fixed_points(theta):
    assert fixed_point_check(theta, lp(2), np.array([1 - 2j, 0.5j])).ok


def test_delta_is_not_fixed_by_rotation():
    E = lp(1)
    h = delta_embed(E, np.array([1.0 + 0j]))
    assert not eigen_witness_check(m_theta(np.pi / 2, E), 1.0, h)


@given(seeds, st.integers(1, 3))
@settings(max_examples=20)
def test_eigenpairs_are_witnessed(seed, n):
    T = random_radius_matrix(np.random.default_rng(seed), n)
    assert all(r.ok for _, r in eigenpair_witnesses(T, lp(n, 3.0)))


def test_witness_rejects_zero():
    with pytest.raises(ValueError):
        eigen_witness_check(np.eye(1), 1.0, delta_embed(lp(1), np.zeros(1)))


@given(seeds, st.integers(1, 3))
@settings(max_examples=10)
def test_residual_direction(seed, n):
    T = random_positive_triangular(np.random.default_rng(seed), n)
    for lam in np.linalg.eigvals(T):
        assert residual_direction_check(T, float(lam.real), trials=20, seed=seed).ok


def test_residual_rejects_bad_eigenvalues():
    T = np.diag([2.0, -1.0])
    with pytest.raises(ValueError):
        residual_direction_check(T, -1.0)
    with pytest.raises(ValueError):
        residual_direction_check(T, 1j)
    with pytest.raises(ValueError):
        residual_direction_check(T, 2.0, zstar=np.array([0.0, 1.0]))


def test_left_eigenvector():
    T = np.array([[2.0, 1.0], [0.0, 3.0]])
    c = left_eigenvector(T, 2.0)
    assert np.allclose(c @ T, 2.0 * c)


@given(seeds, st.integers(1, 4))
@settings(max_examples=20)
def test_predicted_contains_moduli(seed, n):
    T = random_radius_matrix(np.random.default_rng(seed), n)
    rep = matrix_spectrum(T, k_max=16, gelfand_k=4)
    for lam in rep.eigenvalues:
        assert np.min(np.abs(rep.predicted_in_sigma_bar - abs(lam))) <= 1e-9
        assert np.min(np.abs(rep.predicted_in_sigma_bar - lam)) <= 1e-9
