import json

import numpy as np
import pytest
from hypothesis import given

from fbl_lab.io import (config_hash, decode_matrix, decode_vector, dumps, elem_from_json,
                        elem_to_json, encode_array, expr_from_json, expr_to_json, load_json,
                        write_atomic)
from fbl_lab.lattice_expr import delta_embed, random_complex_elem
from fbl_lab.spaces import lp

from conftest import seeds


def test_encode_complex_and_negative_zero():
    assert encode_array(np.array([1 + 2j, -0.0 - 0.0j])) == [[1.0, 2.0], [0.0, 0.0]]
    assert encode_array(np.array([[-0.0, 3.0]])) == [[0.0, 3.0]]
    assert json.dumps(encode_array(-0.0)) == "0.0"


def test_decode_vector_and_matrix():
    assert np.array_equal(decode_vector([1, 2.5]), [1.0, 2.5])
    assert np.array_equal(decode_vector([[1, 2], [0, -1]]), [1 + 2j, -1j])
    M = decode_matrix([[1, [0, 1]], [[2, -1], 0]])
    assert np.array_equal(M, [[1, 1j], [2 - 1j, 0]])
    for bad in ([], [[]], [[1, 2], [3]], [["a"]], [[True]]):
        with pytest.raises(ValueError):
            decode_matrix(bad)
    for bad in ([], [[1, 2], 3], ["x"], None):
        with pytest.raises(ValueError):
            decode_vector(bad)


def test_expression_grammar():
    E = lp(1, 2.0)
    obj = {"re": {"sup": [{"gen": [1, 0]}, {"scale": [-2, {"gen": [0, 1]}]}]},
           "im": {"add": [{"gen": [[1, 0]]}, {"inf": [{"gen": [0, 1]}, {"gen": [1, 1]}]}]}}
    h = elem_from_json(obj, E)
    X = np.array([[1.0, 2.0]])
    # complex generator [[1, 0]] is z = 1, realified to (1, 0)
    assert h(X)[0] == pytest.approx(1.0 + 1j * (1.0 + 2.0))


def test_delta_and_mod_nodes():
    E = lp(2, 2.0)
    h = elem_from_json({"delta": [[1, 0], [0, 1]]}, E)
    ref = delta_embed(E, np.array([1, 1j]))
    X = np.random.default_rng(0).normal(size=(10, 4))
    assert np.allclose(h(X), ref(X))
    m = elem_from_json({"mod": {"delta": [[1, 0], [0, 1]]}}, E)
    assert np.allclose(m(X), np.abs(ref(X)))
    assert np.allclose(elem_from_json({"re": {"gen": [1, 0, 0, 0]}}, E)(X), X[:, 0])


def test_bad_expressions():
    for bad in ({"gen": [1], "add": []}, {"foo": 1}, {"scale": [1]}, {"add": []}, [1, 2]):
        with pytest.raises(ValueError):
            expr_from_json(bad)
    with pytest.raises(ValueError):
        expr_from_json({"gen": [[1, 0]]}, lp(1, 2, "real"))
    with pytest.raises(ValueError):
        elem_from_json({"delta": [1]})


@given(seeds)
def test_roundtrip(seed):
    rng = np.random.default_rng(seed)
    h = random_complex_elem(rng, 3, depth=3)
    h2 = elem_from_json(json.loads(json.dumps(elem_to_json(h))))
    X = rng.normal(size=(20, 3))
    assert np.array_equal(h(X), h2(X))
    assert expr_to_json(h2.re) == expr_to_json(h.re)


def test_dumps_is_canonical():
    a = dumps({"b": 1, "a": [1.5, None]})
    assert a == dumps({"a": [1.5, None], "b": 1})
    assert a.endswith("\n")
    with pytest.raises(ValueError):
        dumps({"x": float("nan")})


def test_config_hash_order_independent():
    assert config_hash({"a": 1, "b": [2]}) == config_hash({"b": [2], "a": 1})
    assert config_hash({"a": 1}) != config_hash({"a": 2})


def test_write_atomic_and_load(tmp_path):
    p = tmp_path / "sub" / "r.json"
    write_atomic(p, dumps({"x": 1}))
    assert load_json(p) == {"x": 1}
    assert [f.name for f in p.parent.iterdir()] == ["r.json"]
    empty = tmp_path / "e.json"
    empty.write_text("  \n")
    with pytest.raises(ValueError):
        load_json(empty)
