import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fbl_lab.fbl_norm import (certify, complex_free_norm, conjugate_invariance_check,
                              dim1_complex_oracle, dim1_real_oracle, norm_equivalence_check,
                              objective, p_free_norm, real_free_norm)
from fbl_lab.functionals import one_weak_norm
from fbl_lab.lattice_expr import (ComplexLatticeElem, Gen, Inf, Scale, Sup, delta_embed,
                                  random_complex_elem, random_expr)
from fbl_lab.spaces import NormedSpace, lp

from conftest import seeds

FAST = dict(m_max=2, budget=120, restarts=2)


def _frozen_elem():
    re = Sup((Gen([1.0, 0.0]), Gen([0.0, 1.0])))
    im = Inf((Gen([1.0, 1.0]), Scale(-1.0, Gen([2.0, -1.0]))))
    return ComplexLatticeElem(re, im)


def test_dim1_oracle_frozen():
    # brute force on 2^22 angles gives 1 + sqrt(2)
    orc = dim1_complex_oracle(_frozen_elem(), lp(1, 2.0))
    assert orc.value == pytest.approx(1 + np.sqrt(2), abs=1e-9)
    assert orc.grid_value <= orc.value <= orc.grid_value + orc.error_bound


def test_dim1_oracle_scales_with_weight():
    h = _frozen_elem()
    W = NormedSpace(1, "complex", "weighted_lp", p=2.0, weights=(4.0,))
    # ||c||_* = |c| / 2, so the norm doubles
    assert dim1_complex_oracle(h, W).value == pytest.approx(2 * (1 + np.sqrt(2)), abs=1e-9)


def test_dim1_oracle_rejects_wrong_space():
    with pytest.raises(ValueError):
        dim1_complex_oracle(_frozen_elem(), lp(2, 2.0))


def test_real_dim1_oracle_frozen():
    f = Sup((Scale(2.0, Gen([1.0])), Scale(-3.0, Gen([1.0]))))
    E = lp(1, 2.0, "real")
    assert dim1_real_oracle(f, E) == 3.0
    est = real_free_norm(f, E, **FAST)
    assert est.exact == 3.0
    assert est.lower_bound == pytest.approx(3.0, abs=1e-9)


def test_estimator_reaches_frozen_oracle():
    est = complex_free_norm(_frozen_elem(), lp(1, 2.0), m_max=2, budget=200, restarts=3)
    assert est.lower_bound == pytest.approx(1 + np.sqrt(2), rel=1e-6)
    assert est.exact == pytest.approx(1 + np.sqrt(2), abs=1e-9)
    assert est.variant == "complex_free"


@pytest.mark.parametrize("p", [1.0, 2.0, 3.0, np.inf])
def test_delta_isometry(p):
    E = lp(2, p)
    z = np.array([1 - 2j, 0.5j])
    est = complex_free_norm(delta_embed(E, z), E, m_max=1, budget=120, restarts=2)
    assert est.lower_bound == pytest.approx(float(E.norm(z)), abs=1e-6)


def test_witness_is_feasible():
    rng = np.random.default_rng(5)
    E = lp(2, 3.0)
    h = random_complex_elem(rng, 4, depth=2)
    est = complex_free_norm(h, E, **FAST)
    w = one_weak_norm(E, est.witness, "best").value
    assert w <= 1 + 1e-6
    assert objective(h, E, est.witness) == pytest.approx(est.lower_bound, rel=1e-9)
    # the reported value is the best certified value over m
    assert est.lower_bound == pytest.approx(max(est.per_m), rel=1e-12)


def test_certify_rescales():
    E = lp(2, 2.0)
    h = delta_embed(E, np.array([1.0, 1j]))
    C = np.array([[3.0, 0.0], [0.0, 4j]])
    c = certify(h, E, C)
    assert c.weak == pytest.approx(one_weak_norm(E, C, "best").value, rel=1e-9)
    assert np.allclose(c.witness * c.weak, C)
    assert certify(h, E, np.zeros((1, 2))).value == 0.0


@given(seeds, st.integers(1, 2), st.sampled_from([1.0, 2.0, np.inf]))
@settings(max_examples=10)
def test_lower_bound_never_exceeds_lipschitz(seed, n, p):
    from fbl_lab.lattice_expr import lipschitz_bound

    rng = np.random.default_rng(seed)
    E = lp(n, p)
    h = random_complex_elem(rng, 2 * n, depth=2)
    est = complex_free_norm(h, E, m_max=1, budget=60, restarts=1, seed=seed)
    # |h(x)| <= L |x|_2, and a weak-unit tuple has sum_j |c_j|_2 <= sum_k sum_j |c_jk| <= n
    L = lipschitz_bound(h) * n
    assert 0 <= est.lower_bound <= L + 1e-9


@given(seeds)
@settings(max_examples=8)
def test_dim1_estimate_below_oracle(seed):
    rng = np.random.default_rng(seed)
    E = lp(1, 2.0)
    h = random_complex_elem(rng, 2, depth=3)
    orc = dim1_complex_oracle(h, E)
    est = complex_free_norm(h, E, m_max=2, budget=80, restarts=2, seed=seed)
    assert est.lower_bound <= orc.value + orc.error_bound + 1e-9


def test_p_norms_nonincreasing_in_p():
    rng = np.random.default_rng(11)
    E = lp(2, 2.0)
    h = random_complex_elem(rng, 4, depth=2)
    vals = [p_free_norm(h, E, p, **FAST).lower_bound for p in (1.0, 2.0, np.inf)]
    # p-convex norms are dominated by the plain free norm; the p = inf one is sup |h|
    assert vals[2] <= vals[0] + 1e-6


def test_argument_validation():
    E = lp(1, 2.0)
    h = _frozen_elem()
    with pytest.raises(ValueError):
        p_free_norm(h, E, 0.5)
    with pytest.raises(ValueError):
        complex_free_norm(h, E, m_max=0)
    with pytest.raises(ValueError):
        complex_free_norm(h, E, budget=0)
    with pytest.raises(ValueError):
        complex_free_norm(h, lp(1, 2.0, "real"))
    with pytest.raises(ValueError):
        complex_free_norm(h, lp(2, 2.0))


def test_estimates_are_deterministic():
    rng = np.random.default_rng(2)
    h = random_complex_elem(rng, 4, depth=2)
    a = complex_free_norm(h, lp(2, 3.0), seed=9, **FAST)
    b = complex_free_norm(h, lp(2, 3.0), seed=9, **FAST)
    assert a.lower_bound == b.lower_bound
    assert np.array_equal(a.witness, b.witness)


def test_sandwich_dim1_and_dim2():
    rng = np.random.default_rng(4)
    for n in (1, 2):
        f = random_expr(rng, 2 * n, depth=2)
        r = norm_equivalence_check(f, lp(n, 2.0), **FAST)
        assert r.ok, r
        if n == 1:
            assert r.oracle_ok


def test_conjugate_invariance():
    rng = np.random.default_rng(8)
    h = random_complex_elem(rng, 2, depth=3)
    r = conjugate_invariance_check(h, lp(1, 3.0), **FAST)
    assert r.ok
    assert r.oracle_E == r.oracle_conj
    assert abs(r.over_E.lower_bound - r.over_conj.lower_bound) <= 1e-6


def test_to_dict_shape():
    est = complex_free_norm(_frozen_elem(), lp(1, 2.0), **FAST)
    d = est.to_dict()
    assert d["runtime_ms"] is None
    assert d["variant"] == "complex_free" and d["p"] == 1.0
    assert d["m_max"] == 2 and "exact" in d
    assert len(d["per_m"]) == 2


def test_monotone_in_modulus():
    rng = np.random.default_rng(21)
    E = lp(2, 2.0)
    h = random_complex_elem(rng, 4, depth=2)
    g = random_complex_elem(rng, 4, depth=2)
    # |h| <= |h| + |g| pointwise
    big = h.abs() + g.abs()
    a = complex_free_norm(h.abs(), E, seed=3, **FAST)
    b = complex_free_norm(big, E, seed=3, warm_start=(a.witness,), **FAST)
    assert a.lower_bound <= b.lower_bound + 1e-9


@given(seeds, st.floats(0.1, 10))
@settings(max_examples=10)
def test_estimate_homogeneity(seed, c):
    rng = np.random.default_rng(seed)
    E = lp(2, 3.0)
    h = random_complex_elem(rng, 4, depth=2)
    est = complex_free_norm(h, E, m_max=1, budget=60, restarts=1, seed=seed)
    W = est.witness
    assert objective(h.scale(c), E, W) == pytest.approx(c * est.lower_bound, rel=1e-12)
    est_c = complex_free_norm(h.scale(c), E, m_max=1, budget=60, restarts=1, seed=seed,
                              warm_start=(W,))
    assert est_c.lower_bound >= c * est.lower_bound * (1 - 1e-9)


@given(seeds, st.integers(1, 4))
def test_triangle_inequality_on_shared_witness(seed, m):
    rng = np.random.default_rng(seed)
    E = lp(2, 2.0)
    h, g = random_complex_elem(rng, 4, depth=3), random_complex_elem(rng, 4, depth=3)
    W = rng.normal(size=(m, 2)) + 1j * rng.normal(size=(m, 2))
    assert objective(h + g, E, W) <= objective(h, E, W) + objective(g, E, W) + 1e-12


def test_zero_has_zero_norm():
    from fbl_lab.lattice_expr import real_elem, zero

    est = complex_free_norm(real_elem(zero(2)), lp(1, 2.0), **FAST)
    assert est.lower_bound == 0.0 and est.exact == 0.0
