import numpy as np
import pytest
from hypothesis import settings, strategies as st

from scaledquat.core import AlgebraContext, HtScalar
from scaledquat.matrix import HtMatrix

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

finite = st.floats(-3.0, 3.0, allow_nan=False, allow_infinity=False)
scale_t = st.sampled_from([-2.0, -1.0, -0.5, 0.5, 1.0, 3.0])


@st.composite
def scalars(draw, elems=finite):
    return HtScalar.from_quad([draw(elems) for _ in range(4)])


@st.composite
def contexts(draw):
    return AlgebraContext(draw(scale_t))


@st.composite
def matrices(draw, n, m, ctx):
    X = np.array([draw(finite) for _ in range(n * m * 4)]).reshape(n, m, 4)
    return HtMatrix.from_quads(X, ctx)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_scalar(rng, scale=1.0):
    return HtScalar.from_quad(rng.normal(size=4) * scale)


def random_matrix(rng, n, m, ctx, scale=1.0):
    return HtMatrix.from_quads(rng.normal(size=(n, m, 4)) * scale, ctx)
