import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qmc.errors import FormatError
from qmc.gf import build_tower, is_prime, parse_header, prime_factors


def test_canonical_headers(F4, F13):
    # frozen from an independent brute-force search of the lowest-encoding moduli
    assert F4.header() == "QMC1 p=2 e=2 fqmod=1,1,1 kmod=2,0,0,1 Q=5"
    assert F13.header() == "QMC1 p=13 e=1 fqmod=0,1 kmod=2,0,0,1 Q=15"
    assert F4.bracket3 == 21 and F13.bracket3 == 183


def test_header_round_trip_and_rejection(F13):
    assert parse_header(F13.header()) is F13
    with pytest.raises(FormatError):
        parse_header("QMC1 p=13 e=1 fqmod=0,1 kmod=3,0,0,1 Q=15")
    with pytest.raises(FormatError):
        parse_header("QMC2 nonsense")


def test_small_number_theory():
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]
    assert prime_factors(2196) == [2, 3, 61]


def test_generator_order_and_subfield(F4):
    Q = F4.q_gen
    seen = {F4.pow(Q, t) for t in range(F4.order)}
    assert len(seen) == F4.order
    # Q^[3]_q is the norm of Q, so it lies in F_q; no smaller power does
    assert F4.in_subfield(F4.pow(Q, 21))
    assert not any(F4.in_subfield(F4.pow(Q, t)) for t in range(1, 21))


def test_subfield_is_the_small_encodings(F4, F13):
    for F in (F4, F13):
        assert [x for x in range(F.size) if F.in_subfield(x)] == list(range(F.q))
        for a in range(F.q):
            for b in range(F.q):
                assert F.embed(F.fq_mul(a, b)) == F.mul(a, b)
                assert F.embed(F.fq_add(a, b)) == F.add(a, b)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([(2, 2), (13, 1), (5, 1)]), st.data())
def test_field_axioms(pe, data):
    F = build_tower(*pe)
    x, y, z = (data.draw(st.integers(0, F.size - 1)) for _ in range(3))
    assert F.mul(x, F.add(y, z)) == F.add(F.mul(x, y), F.mul(x, z))
    assert F.mul(F.mul(x, y), z) == F.mul(x, F.mul(y, z))
    assert F.add(F.add(x, y), z) == F.add(x, F.add(y, z))
    assert F.add(x, F.neg(x)) == 0
    if x:
        assert F.mul(x, F.inv(x)) == 1


def test_vector_ops_match_scalar(F13, F4):
    rng = np.random.default_rng(0)
    for F in (F13, F4):
        a = rng.integers(0, F.size, 200)
        b = rng.integers(0, F.size, 200)
        assert F.vmul(a, b).tolist() == [F.mul(int(x), int(y)) for x, y in zip(a, b)]
        assert F.vadd(a, b).tolist() == [F.add(int(x), int(y)) for x, y in zip(a, b)]
        M = rng.integers(0, F.size, (6, 4))
        N = rng.integers(0, F.size, (4, 3))
        ref = [[F.sum(F.mul(int(M[i, t]), int(N[t, j])) for t in range(4)) for j in range(3)]
               for i in range(6)]
        assert F.vmatmul(M, N).tolist() == ref


def test_large_field_without_tables():
    F = build_tower(17)
    assert F.size > 4096
    a = np.array([1, 5, 100, 4912])
    b = np.array([7, 0, 3, 4911])
    assert F.vmul(a, b).tolist() == [F.mul(int(x), int(y)) for x, y in zip(a, b)]
    assert F.vadd(a, b).tolist() == [F.add(int(x), int(y)) for x, y in zip(a, b)]
