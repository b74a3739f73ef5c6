import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fbl_lab import functionals as fn
from fbl_lab.spaces import DimensionError, NormedSpace, lp, space_from_spec

from conftest import P_VALUES, spaces, tuples, vectors


def test_lp_norm_values():
    z = np.array([3.0, -4.0])
    assert lp(2, 1, "real").norm(z) == pytest.approx(7.0)
    assert lp(2, 2, "real").norm(z) == pytest.approx(5.0)
    assert lp(2, np.inf, "real").norm(z) == pytest.approx(4.0)
    assert lp(2, 3, "real").norm(z) == pytest.approx(91 ** (1 / 3))


def test_weighted_dual_norm():
    E = NormedSpace(2, "real", "weighted_lp", p=2.0, weights=(4.0, 1.0))
    # ||x|| = sqrt(4 x1^2 + x2^2), dual uses weights 1/4
    assert E.dual_norm(np.array([1.0, 0.0])) == pytest.approx(0.5)


def test_l3_dual_norm_frozen():
    assert lp(2, 3, "real").dual_norm(np.ones(2)) == pytest.approx(2 ** (2 / 3), abs=1e-12)


def test_polytope_norm_and_dual():
    E = NormedSpace(2, "real", "polytope", facets=((1, 0), (0, 1), (1, 1)))
    assert E.norm(np.array([1.0, 1.0])) == pytest.approx(2.0)
    # unit ball vertices are (+-1, 0), (0, +-1), (1, -1), (-1, 1)
    assert E.dual_norm(np.array([1.0, -1.0])) == pytest.approx(2.0)


def test_polytope_high_dim_uses_linprog():
    phi = np.eye(4)
    E = NormedSpace(4, "real", "polytope", facets=tuple(map(tuple, phi)))
    assert E.dual_norm_method == "linprog"
    assert E.dual_norm(np.array([1.0, -2.0, 0.5, 0.0])) == pytest.approx(3.5)


def test_invalid_spaces():
    with pytest.raises(ValueError):
        NormedSpace(2, "complex", "polytope", facets=((1, 0), (0, 1)))
    with pytest.raises(ValueError):
        lp(2, 0.5)
    with pytest.raises(ValueError):
        NormedSpace(0)
    with pytest.raises(ValueError):
        NormedSpace(2, "real", conjugate=True)
    with pytest.raises(ValueError):
        NormedSpace(2, "real", "polytope", facets=((1, 0),))
    with pytest.raises(DimensionError):
        lp(2).norm(np.ones(3))


def test_space_from_spec():
    E = space_from_spec({"dim": 2, "field": "complex", "norm": {"lp": "inf"}})
    assert E.p == np.inf and E.is_complex
    W = space_from_spec({"dim": 1, "norm": {"weighted_lp": {"p": 3, "weights": [2]}}})
    assert W.weights == (2.0,)
    assert space_from_spec(E.describe()).describe() == E.describe()
    for bad in ({"dim": 2, "bogus": 1}, {"dim": "2"}, {"dim": 2, "norm": {"lq": 2}}, []):
        with pytest.raises(ValueError):
            space_from_spec(bad)


def test_conjugate_space_coordinates():
    E = lp(2, 2.0)
    Ec = E.conjugate_space()
    z = np.array([1 + 2j, -0.5j])
    assert np.allclose(Ec.mul_i(z), -1j * z)
    c = np.array([0.3 - 1j, 2.0 + 0.1j])
    # realify / complexify are inverse on both spaces
    for S in (E, Ec):
        assert np.allclose(S.complexify(S.realify(c)), c)
        assert S.pair(c, z).real == pytest.approx(S.realify(c) @ S.to_real(z))


@given(spaces(), st.data())
def test_realify_matches_real_part(E, data):
    c = data.draw(vectors(E))
    z = data.draw(vectors(E))
    assert np.real(E.pair(c, z)) == pytest.approx(E.realify(c) @ E.to_real(z), abs=1e-9)
    assert np.allclose(E.complexify(E.realify(c)), c)


@given(spaces(), st.data())
def test_support_point_attains_dual_norm(E, data):
    c = data.draw(vectors(E, nonzero=True))
    z = E.support_point(c)
    assert E.norm(z) == pytest.approx(1.0, rel=1e-9)
    assert np.real(E.pair(c, z)) == pytest.approx(E.dual_norm(c), rel=1e-9)


@given(spaces(), st.data())
def test_norming_functional(E, data):
    z = data.draw(vectors(E, nonzero=True))
    c = E.norming_functional(z)
    assert E.dual_norm(c) == pytest.approx(1.0, rel=1e-9)
    assert np.real(E.pair(c, z)) == pytest.approx(E.norm(z), rel=1e-9)


@given(spaces(), st.data())
def test_holder_inequality(E, data):
    c = data.draw(vectors(E))
    z = data.draw(vectors(E))
    assert abs(E.pair(c, z)) <= E.dual_norm(c) * E.norm(z) * (1 + 1e-12) + 1e-12


@given(spaces(fields=("complex",)), st.data())
def test_complex_norm_is_circled(E, data):
    z = data.draw(vectors(E))
    t = data.draw(st.floats(0, 2 * np.pi))
    assert E.norm(np.exp(1j * t) * z) == pytest.approx(E.norm(z), rel=1e-12, abs=1e-12)


# -- functionals ------------------------------------------------------------------------------


def test_complex_functional_roundtrip():
    f = fn.ComplexFunctional(np.array([1 - 1j, 2j]))
    x = fn.realify(f)
    assert fn.complexify(x) == f
    g = fn.conjugate_functional(f)
    z = np.array([0.3 + 0.2j, -1 + 1j])
    assert g.on_conjugate
    assert g(z) == pytest.approx(np.conj(f(z)))
    with pytest.raises(ValueError):
        fn.complexify(np.ones(3))


def test_one_weak_frozen_l2():
    # independent phase-oracle value for this tuple over complex l2^2
    E = lp(2, 2.0)
    C = np.array([[1, 1j], [2, -1], [0.5j, 1 + 1j]])
    v = fn.one_weak_norm(E, C, "best").value
    assert v == pytest.approx(3.998228970935769, abs=1e-6)


def test_one_weak_real_l1_exact():
    # dual is l_inf: sup over signs of ||sum eps_j c_j||_inf = sum_j max_k |c_jk|... per coordinate
    E = lp(2, 1.0, "real")
    C = np.array([[1.0, -2.0], [3.0, 1.0]])
    # max over eps of max_k |eps . C[:, k]| = max(1+3, 2+1)
    assert fn.one_weak_norm(E, C, "sign_formula").value == pytest.approx(4.0)
    assert fn.one_weak_norm(E, C, "ball_sup").value == pytest.approx(4.0, abs=1e-9)


@pytest.mark.parametrize("p", P_VALUES)
def test_single_functional_is_dual_norm(p):
    E = lp(3, p)
    c = np.array([1 + 1j, -2, 0.5j])
    assert fn.one_weak_norm(E, c[None], "best").value == pytest.approx(E.dual_norm(c), rel=1e-9)


@given(spaces(dims=(1, 2)), st.data())
def test_one_weak_routes_agree(E, data):
    C = data.draw(tuples(E, max_m=3))
    a = fn.one_weak_norm(E, C, "ball_sup").value
    b = fn.one_weak_norm(E, C, "sign_formula").value
    assert a == pytest.approx(b, abs=1e-6 * (1 + a))


@given(spaces(dims=(1, 2)), st.data())
def test_one_weak_bounds(E, data):
    C = data.draw(tuples(E, max_m=3))
    v = fn.one_weak_norm(E, C, "best").value
    norms = E.dual_norm(C)
    assert v >= norms.max() - 1e-9 * (1 + v)
    assert v <= norms.sum() + 1e-9 * (1 + v)


def test_weak_p_norm_limits():
    E = lp(2, 2.0)
    C = np.array([[1, 0], [0, 2j]])
    assert fn.weak_p_norm(E, C, np.inf).value == pytest.approx(2.0)
    # sup_{|z|=1} (|z1|^2 + 4|z2|^2)^{1/2} = 2
    assert fn.weak_p_norm(E, C, 2.0).value == pytest.approx(2.0, abs=1e-9)
    with pytest.raises(ValueError):
        fn.weak_p_norm(E, C, 0.5)


def test_empty_tuple_rejected():
    with pytest.raises(ValueError):
        fn.one_weak_norm(lp(2), np.zeros((0, 2)))


@given(spaces(fields=("complex",), dims=(1, 2)), st.data())
def test_realified_dual_isometry(E, data):
    c = data.draw(vectors(E, nonzero=True))
    # ball ascent on E_R vs the closed-form dual norm
    v = fn.realified_dual_norm(E, E.realify(c))
    assert v == pytest.approx(float(E.dual_norm(c)), rel=1e-9)


@given(spaces(dims=(1, 2)), st.data(), st.floats(0.01, 100))
def test_one_weak_homogeneous(E, data, t):
    C = data.draw(tuples(E, max_m=3))
    a = fn.one_weak_norm(E, C, "sign_formula").value
    b = fn.one_weak_norm(E, t * C, "sign_formula").value
    assert b == pytest.approx(t * a, rel=1e-12, abs=1e-300)


@given(spaces(fields=("complex",), dims=(1, 2)), st.data())
def test_conjugation_preserves_one_weak(E, data):
    C = data.draw(tuples(E, max_m=3))
    a = fn.one_weak_norm(E, C, "best").value
    b = fn.one_weak_norm(E.conjugate_space(), fn.conjugate_tuple(C), "best").value
    assert b == pytest.approx(a, rel=1e-9, abs=1e-12)
