import random
from fractions import Fraction

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from tropabp.poly import TropPoly
from tropabp.semiring import INF, Mode

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return random.Random(12345)


def finite_values(nonneg=False):
    lo = 0 if nonneg else -30
    ints = st.integers(lo, 30)
    fracs = st.fractions(min_value=lo, max_value=30, max_denominator=6)
    return st.one_of(ints, fracs.map(lambda f: int(f) if f.denominator == 1 else f))


def trop_values(nonneg=False):
    return st.one_of(st.just(INF), finite_values(nonneg))


modes = st.sampled_from([Mode.R, Mode.RPLUS])


@st.composite
def polys(draw, mode=None, arity=None, max_degree=4, max_terms=6):
    mode = draw(modes) if mode is None else mode
    n = draw(st.integers(1, 3)) if arity is None else arity
    k = draw(st.integers(0, max_terms))
    lo = 0 if mode is Mode.RPLUS else -5
    terms = {}
    for _ in range(k):
        exp = tuple(draw(st.lists(st.integers(0, max_degree), min_size=n, max_size=n)))
        terms[exp] = draw(st.integers(lo, 5))
    return TropPoly(mode, n, terms)


@st.composite
def points(draw, mode, arity):
    lo = 0 if mode is Mode.RPLUS else -10
    return tuple(draw(st.lists(st.one_of(st.integers(lo, 10), st.just(INF)), min_size=arity, max_size=arity)))


__all__ = ["finite_values", "trop_values", "modes", "polys", "points", "Fraction"]
