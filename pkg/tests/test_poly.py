import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qmc.errors import FormatError
from qmc.gf import build_tower
from qmc.poly import (NEG_INF, MultiPoly, eval_many, exps_below, exps_leq, exps_of_weight,
                      from_text, graded_lex_exp, graded_lex_index, random_poly, to_text,
                      uni_eval, uni_from_multi, uni_mul, uni_to_multi)

F13 = build_tower(13)


def test_graded_lex_listing():
    assert exps_below(2, 3) == ((0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0))
    assert len(exps_below(3, 4)) == 20
    for i, g in enumerate(exps_below(3, 5)):
        assert graded_lex_index(g, 5) == i
        assert graded_lex_exp(i, 3, 5) == g
    with pytest.raises(ValueError):
        graded_lex_index((2, 1), 3)
    assert exps_leq((1, 1)) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert exps_of_weight(3, 0) == [(0, 0, 0)]


def test_zero_polynomial_degree():
    assert MultiPoly.zero(F13, 2).total_degree() == NEG_INF


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), st.integers(1, 5), st.integers(0, 10**6))
def test_text_round_trip(m, k, seed):
    f = random_poly(F13, m, k, seed)
    assert from_text(F13, to_text(f)) == f


@pytest.mark.parametrize("bad", ["", "x=2; 1@0,0", "m=2; 1@0", "m=1; 5000@1",
                                 "m=1; 1@1; 2@1", "m=1; a@1"])
def test_text_rejects(bad):
    with pytest.raises(FormatError):
        from_text(F13, bad)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_ring_laws_and_evaluation(seed):
    rng = random.Random(seed)
    f, g, h = (random_poly(F13, 2, 4, rng) for _ in range(3))
    assert f * (g + h) == f * g + f * h
    assert (f - f).is_zero()
    pt = (rng.randrange(F13.size), rng.randrange(F13.size))
    assert (f * g).eval(pt) == F13.mul(f.eval(pt), g.eval(pt))
    assert (f + g).eval(pt) == F13.add(f.eval(pt), g.eval(pt))
    c = (rng.randrange(1, F13.size), rng.randrange(1, F13.size))
    assert f.scale_vars(c).eval(pt) == f.eval(tuple(F13.mul(x, y) for x, y in zip(c, pt)))
    assert f.eval_prefix(pt[:1]).eval(pt[1:]) == f.eval(pt)


def test_eval_many_matches_eval():
    rng = np.random.default_rng(3)
    f = random_poly(F13, 3, 5, 11)
    pts = rng.integers(0, F13.size, (50, 3))
    pts[:5, 1] = 0
    assert eval_many(f, pts).tolist() == [f.eval(tuple(map(int, p))) for p in pts]


def test_univariate_helpers():
    a = [1, 2, 3]
    b = [0, 1]
    assert uni_mul(F13, a, b) == [0, 1, 2, 3]
    assert uni_from_multi(uni_to_multi(F13, a)) == a
    assert uni_eval(F13, a, 2) == uni_to_multi(F13, a).eval((2,))
