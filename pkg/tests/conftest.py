import sys
import hypothesis
import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis.extra.numpy import arrays

from fbl_lab.spaces import NormedSpace, lp

hypothesis.settings.register_profile("default", max_examples=40, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=8, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=300, deadline=None)
hypothesis.settings.load_profile("default")

P_VALUES = (1.0, 2.0, 3.0, np.inf)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@st.composite
def spaces(draw, fields=("complex", "real"), ps=P_VALUES, dims=(1, 2, 3), weighted=True):
    dim = draw(st.sampled_from(dims))
    fld = draw(st.sampled_from(fields))
    p = draw(st.sampled_from(ps))
    if weighted and draw(st.booleans()):
        w = draw(st.lists(st.floats(0.25, 4), min_size=dim, max_size=dim))
        return NormedSpace(dim, fld, "weighted_lp", p=p, weights=tuple(w))
    return lp(dim, p, fld)


@st.composite
def vectors(draw, space, nonzero=False):
    n = space.dim
    re = draw(arrays(float, n, elements=finite))
    v = re + 1j * draw(arrays(float, n, elements=finite)) if space.is_complex else re
    if nonzero:
        hypothesis.assume(np.max(np.abs(v)) > 1e-3)
    return v


@st.composite
def tuples(draw, space, max_m=4):
    m = draw(st.integers(1, max_m))
    return np.array([draw(vectors(space)) for _ in range(m)])


seeds = st.integers(0, 2**32 - 1)


@pytest.fixture
def rng():
    return np.random.default_rng(0x5EED)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        terminalreporter.write_line(results[k])
