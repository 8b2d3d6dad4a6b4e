import random

import pytest
from hypothesis import given, settings, strategies as st

from qmc.gf import build_tower
from qmc.poly import MultiPoly, exps_leq, random_poly, uni_to_multi
from qmc.qcalc import (derivative_at, derivative_matrix, nu_entry_gaussian, nu_entry_printed,
                       nu_matrix, nu_uni, nu_xi, q_binom, q_binom_multi, q_binom_pascal,
                       q_bracket, q_derive_multi, q_derive_uni_iter, q_factorial,
                       q_factorial_multi, q_pochhammer, q_taylor_coeffs, q_taylor_reconstruct,
                       xi_matrix)

F4 = build_tower(2, 2)
F13 = build_tower(13)
TOWERS = [F4, F13]


def _difference_quotient(F, f, t):
    """D^t f as a callable, straight from (g(Qx) - g(x)) / ((Q - 1) x)."""
    Q = F.q_gen
    g = lambda x: f.eval((x,))
    for _ in range(t):
        g = (lambda h: lambda x: F.div(F.sub(h(F.mul(Q, x)), h(x)),
                                       F.mul(F.sub(Q, 1), x)))(g)
    return g


@pytest.mark.parametrize("F", TOWERS, ids=["q4", "q13"])
def test_derivative_matches_difference_quotient(F):
    rng = random.Random(5)
    for _ in range(30):
        k = rng.randrange(8)
        t = rng.randrange(4)
        f = MultiPoly.monomial(F, (k,))
        x = rng.randrange(1, F.size)
        assert q_derive_multi(f, (t,)).eval((x,)) == _difference_quotient(F, f, t)(x)


def test_brackets_and_factorials(F13):
    Q = F13.q_gen
    assert q_bracket(F13, 0) == 0 and q_bracket(F13, 1) == 1
    assert q_bracket(F13, 3) == F13.add(F13.add(1, Q), F13.mul(Q, Q))
    assert q_factorial(F13, 0) == 1
    assert q_factorial(F13, 3) == F13.mul(q_bracket(F13, 2), q_bracket(F13, 3))
    assert q_factorial(F13, -1) == 0
    with pytest.raises(ValueError):
        q_factorial(F4, F4.order)


@pytest.mark.parametrize("F", TOWERS, ids=["q4", "q13"])
def test_gaussian_binomial_theorem(F):
    # prod_{i<n} (1 + Q^i t) = sum_k Q^C(k,2) qbinom(n,k) t^k
    for n in range(9):
        lhs = [1]
        for i in range(n):
            nxt = [0] * (len(lhs) + 1)
            for j, c in enumerate(lhs):
                nxt[j] = F.add(nxt[j], c)
                nxt[j + 1] = F.add(nxt[j + 1], F.mul(c, F.q_power(i)))
            lhs = nxt
        rhs = [F.mul(F.q_power(k * (k - 1) // 2), q_binom(F, n, k)) for k in range(n + 1)]
        assert lhs == rhs
        assert all(q_binom(F, n, k) == q_binom_pascal(F, n, k) == q_binom(F, n, n - k)
                   for k in range(n + 1))


def _product_rule_sides(F, f, g, alpha):
    """The two expansions of D^alpha(fg): shifting f or shifting g."""
    left = MultiPoly.zero(F, f.m)
    right = MultiPoly.zero(F, f.m)
    for beta in exps_leq(alpha):
        rest = tuple(a - b for a, b in zip(alpha, beta))
        c = q_binom_multi(F, alpha, beta)
        sh_b = tuple(F.q_power(b) for b in beta)
        sh_r = tuple(F.q_power(r) for r in rest)
        left = left + (q_derive_multi(f, rest).scale_vars(sh_b) * q_derive_multi(g, beta)).scale(c)
        right = right + (q_derive_multi(f, rest) * q_derive_multi(g, beta).scale_vars(sh_r)).scale(c)
    return left, right


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([0, 1]), st.integers(1, 2), st.integers(0, 10**6))
def test_product_rule(fi, m, seed):
    F = TOWERS[fi]
    rng = random.Random(seed)
    f = random_poly(F, m, 4, rng)
    g = random_poly(F, m, 4, rng)
    alpha = tuple(rng.randrange(3) for _ in range(m))
    target = q_derive_multi(f * g, alpha)
    left, right = _product_rule_sides(F, f, g, alpha)
    assert left == target and right == target


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(0, 10**6))
def test_linearity_composition_scaling(m, seed):
    F = F13
    rng = random.Random(seed)
    f = random_poly(F, m, 5, rng)
    g = random_poly(F, m, 5, rng)
    c = rng.randrange(F.size)
    al = tuple(rng.randrange(3) for _ in range(m))
    be = tuple(rng.randrange(3) for _ in range(m))
    assert q_derive_multi(f + g.scale(c), al) == q_derive_multi(f, al) + q_derive_multi(g, al).scale(c)
    both = tuple(x + y for x, y in zip(al, be))
    assert q_derive_multi(q_derive_multi(f, al), be) == q_derive_multi(f, both)
    # D^b (f o a)(X) = a^b (D^b f)(aX), a a point of nonzero coordinates
    a = tuple(rng.randrange(1, F.size) for _ in range(m))
    ab = 1
    for x, b in zip(a, be):
        ab = F.mul(ab, F.pow(x, b))
    assert q_derive_multi(f.scale_vars(a), be) == q_derive_multi(f, be).scale_vars(a).scale(ab)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(0, 10**6))
def test_degree_law_and_hasse_consistency(m, seed):
    F = F13
    rng = random.Random(seed)
    f = random_poly(F, m, 6, rng)
    al = tuple(rng.randrange(3) for _ in range(m))
    d = q_derive_multi(f, al)
    assert d.is_zero() or d.total_degree() <= f.total_degree() - sum(al)
    mono = tuple(x + rng.randrange(3) for x in al)
    dm = q_derive_multi(MultiPoly.monomial(F, mono), al)
    assert dm.total_degree() == sum(mono) - sum(al)
    zero = (0,) * m
    assert derivative_at(f, al, zero) == F.mul(q_factorial_multi(F, al), f.coeff(al))


def test_univariate_iterate_agrees(F13):
    f = [3, 1, 4, 1, 5, 9, 2, 6]
    for t in range(5):
        assert uni_to_multi(F13, q_derive_uni_iter(F13, list(f), t)) == \
            q_derive_multi(uni_to_multi(F13, f), (t,))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([0, 1]), st.integers(1, 3), st.integers(0, 10**6))
def test_taylor_round_trip(fi, m, seed):
    F = TOWERS[fi]
    rng = random.Random(seed)
    f = random_poly(F, m, 5, rng)
    beta = tuple(rng.randrange(6) for _ in range(m))
    coeffs = q_taylor_coeffs(f, beta)
    assert q_taylor_reconstruct(F, coeffs, beta) == f
    pt = tuple(F.q_power(b) for b in beta)
    assert all(v == derivative_at(f, a, pt) for a, v in coeffs.items())


def test_taylor_degree_guard(F4):
    with pytest.raises(ValueError):
        q_taylor_coeffs(MultiPoly.monomial(F4, (F4.bracket3,)), (0,))


def test_pochhammer_roots(F13):
    c = 7
    poly = q_pochhammer(F13, (c,), (4,))
    assert poly.total_degree() == 4
    for t in range(4):
        assert poly.eval((F13.mul(F13.q_power(t), c),)) == 0
    assert poly.eval((F13.mul(F13.q_power(4), c),)) != 0


def test_nu_xi_two_by_two(F13):
    F = F13
    qm1 = F.sub(F.q_gen, 1)
    for a in (1, 2, 5, 100):
        inv = F.inv(F.mul(qm1, a))
        assert nu_uni(F, a, 2) == [[1, 0], [F.neg(inv), inv]]
        assert xi_matrix(F, (a,), 2).rows == [[1, 0], [1, F.mul(qm1, a)]]


@pytest.mark.parametrize("F", TOWERS, ids=["q4", "q13"])
def test_nu_maps_evaluations_to_derivatives(F):
    rng = random.Random(9)
    for m, s in ((1, 4), (2, 3), (3, 2)):
        f = random_poly(F, m, 6, rng)
        a = tuple(rng.randrange(1, F.size) for _ in range(m))
        nu, xi = nu_xi(F, a, s)
        evals = [f.eval(tuple(F.mul(F.q_power(x), y) for x, y in zip(g, a))) for g in nu.exps]
        ders = [derivative_at(f, g, a) for g in nu.exps]
        assert nu.apply(F, evals) == ders
        assert xi.apply(F, ders) == evals
        assert nu_matrix(F, a, s).rows == nu.rows


def test_nu_closed_forms(F13):
    F = F13
    for x in (1, 3, 77):
        rows = nu_uni(F, x, 6)
        for k in range(6):
            for t in range(k + 1):
                assert nu_entry_gaussian(F, k, t, x) == rows[k][t]
    # the ordinary-binomial form gets the sign of the first row wrong in odd characteristic
    assert nu_entry_printed(F, 1, 0, 1) != nu_uni(F, 1, 2)[1][0]


def test_nu_rejects_zero_coordinate(F13):
    with pytest.raises(ValueError):
        nu_xi(F13, (0, 1), 2)


def test_derivative_matrix_matches_symbolic(F13):
    exps = [(i, j) for i in range(4) for j in range(4)]
    rhos = [(0, 0), (1, 0), (0, 2), (2, 1)]
    for point in ((3, 5), (0, 7), (0, 0)):
        M = derivative_matrix(F13, exps, rhos, point)
        for i, r in enumerate(rhos):
            for j, e in enumerate(exps):
                assert int(M[i, j]) == derivative_at(MultiPoly.monomial(F13, e), r, point)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 20), st.integers(0, 10**6))
def test_univariate_degree_drops_exactly(deg, seed):
    rng = random.Random(seed)
    F = F13
    coeffs = [rng.randrange(F.size) for _ in range(deg)] + [rng.randrange(1, F.size)]
    f = uni_to_multi(F, coeffs)
    t = rng.randrange(deg + 1)
    assert q_derive_multi(f, (t,)).total_degree() == deg - t
    assert q_derive_multi(MultiPoly.constant(F, 1, 5), (1,)).is_zero()
