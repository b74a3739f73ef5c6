"""JSON (de)serialization of vectors, matrices, expressions and reports."""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .lattice_expr import (Add, ComplexLatticeElem, Gen, Inf, LatticeExpr, Modulus, Scale, Sup,
                           delta_embed, real_elem)


def _num(v) -> float:
    v = float(v)
    return 0.0 if v == 0 else v  # drop negative zeros so reports are stable


def encode_complex(c):
    return [_num(np.real(c)), _num(np.imag(c))]


def encode_array(a):
    """Nested lists; complex entries become ``[re, im]`` pairs."""
    a = np.asarray(a)
    if np.iscomplexobj(a):
        if a.ndim == 0:
            return encode_complex(a)
        return [encode_array(r) for r in a]
    if a.ndim == 0:
        return _num(a)
    return [encode_array(r) for r in a]


def _is_pair(v) -> bool:
    return isinstance(v, (list, tuple)) and len(v) == 2 and all(
        isinstance(t, (int, float)) and not isinstance(t, bool) for t in v)


def decode_vector(v, complex_pairs: bool | None = None) -> np.ndarray:
    """A flat list of numbers, or a list of ``[re, im]`` pairs."""
    if not isinstance(v, (list, tuple)) or not v:
        raise ValueError("expected a non-empty list of coordinates")
    pairs = all(_is_pair(t) for t in v) if complex_pairs is None else complex_pairs
    if pairs:
        if not all(_is_pair(t) for t in v):
            raise ValueError("complex coordinates must be [re, im] pairs")
        return np.array([complex(a, b) for a, b in v])
    if not all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in v):
        raise ValueError("coordinates must be numbers")
    return np.array(v, dtype=float)


def decode_matrix(rows) -> np.ndarray:
    """Row-major nested arrays; entries are numbers or ``[re, im]`` pairs."""
    if not isinstance(rows, (list, tuple)) or not rows:
        raise ValueError("matrix must be a non-empty list of rows")
    out = []
    for r in rows:
        if not isinstance(r, (list, tuple)) or not r:
            raise ValueError("matrix rows must be non-empty lists")
        out.append([complex(*t) if _is_pair(t) else complex(_scalar(t)) for t in r])
    if len({len(r) for r in out}) != 1:
        raise ValueError("matrix rows have different lengths")
    return np.array(out, dtype=complex)


def _scalar(t):
    if isinstance(t, bool) or not isinstance(t, (int, float)):
        raise ValueError(f"bad matrix entry {t!r}")
    return t


# -- expressions ----------------------------------------------------------------


def _gen_coords(v, space):
    x = decode_vector(v)
    if np.iscomplexobj(x):
        if space is None or not space.is_complex:
            raise ValueError("complex generator payload needs a complex space")
        return space.to_real(x)
    return x


def expr_from_json(obj, space=None) -> LatticeExpr:
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ValueError(f"expression node must be an object with one key, got {obj!r}")
    (k, v), = obj.items()
    if k == "gen":
        return Gen(_gen_coords(v, space))
    if k == "scale":
        if not isinstance(v, (list, tuple)) or len(v) != 2:
            raise ValueError("scale takes [c, expr]")
        return Scale(float(_scalar(v[0])), expr_from_json(v[1], space))
    if k in ("add", "sup", "inf"):
        if not isinstance(v, (list, tuple)) or not v:
            raise ValueError(f"{k} needs a non-empty list")
        kids = tuple(expr_from_json(e, space) for e in v)
        return {"add": Add, "sup": Sup, "inf": Inf}[k](kids)
    if k == "mod":
        return Modulus(elem_from_json(v, space))
    raise ValueError(f"unknown expression node {k!r}")


def elem_from_json(obj, space=None) -> ComplexLatticeElem:
    """``{"re": e, "im": e}``, ``{"delta": z}``, or a bare real expression."""
    if isinstance(obj, dict) and set(obj) == {"re", "im"}:
        return ComplexLatticeElem(expr_from_json(obj["re"], space), expr_from_json(obj["im"], space))
    if isinstance(obj, dict) and set(obj) == {"re"}:
        return real_elem(expr_from_json(obj["re"], space))
    if isinstance(obj, dict) and set(obj) == {"delta"}:
        if space is None:
            raise ValueError("delta needs a space")
        z = decode_vector(obj["delta"])
        return delta_embed(space, z.astype(complex))
    return real_elem(expr_from_json(obj, space))


def expr_to_json(e: LatticeExpr):
    if isinstance(e, Gen):
        return {"gen": encode_array(e.x)}
    if isinstance(e, Scale):
        return {"scale": [_num(e.c), expr_to_json(e.child)]}
    if isinstance(e, (Add, Sup, Inf)):
        key = {Add: "add", Sup: "sup", Inf: "inf"}[type(e)]
        return {key: [expr_to_json(k) for k in e.children]}
    if isinstance(e, Modulus):
        return {"mod": elem_to_json(e.elem)}
    raise TypeError(type(e))


def elem_to_json(h: ComplexLatticeElem):
    return {"re": expr_to_json(h.re), "im": expr_to_json(h.im)}


def load_json(path):
    text = Path(path).read_text()
    if not text.strip():
        raise ValueError(f"{path} is empty")
    return json.loads(text)


# -- reports ----------------------------------------------------------------------


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()


def write_atomic(path, text: str) -> None:
    """Write via a temp file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
