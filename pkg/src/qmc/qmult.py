"""Q-multiplicity, zero counting over grids, and the grid vanishing-ideal
generators."""
from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field
from typing import NamedTuple

from .poly import NEG_INF, MultiPoly, exps_of_weight, leq, uni_mul, uni_to_multi
from .qcalc import bracket_table, q_derive_multi


def derivative_value(f, gamma, point, powers=None):
    """D^gamma f(point) straight from the terms, without building D^gamma f."""
    F = f.F
    T = bracket_table(F)
    pw = powers if powers is not None else f._powers(point)
    acc = 0
    for ex, c in f.terms.items():
        if not leq(gamma, ex):
            continue
        v = c
        for i, (x, g) in enumerate(zip(ex, gamma)):
            if g:
                v = F.mul(v, T.falling(x, g))
            if x - g:
                v = F.mul(v, pw[i][x - g])
        acc = F.add(acc, v)
    return acc


def q_multiplicity(f, a):
    """Least |g| with D^g f(a) != 0; -inf for the zero polynomial."""
    if f.is_zero():
        return NEG_INF
    pw = f._powers(a)
    for w in range(f.total_degree() + 1):
        for g in exps_of_weight(f.m, w):
            if derivative_value(f, g, a, pw):
                return w
    raise ArithmeticError("every derivative up to the degree vanished; degree exceeds the bracket range")


@dataclass
class MultiplicityReport:
    degree: int
    m: int
    grid_size: int
    values: dict = field(default_factory=dict)

    @property
    def total(self):
        return sum(self.values.values())

    @property
    def bound(self):
        return self.degree * self.grid_size ** (self.m - 1)

    def count_at_least(self, s):
        return sum(1 for v in self.values.values() if v >= s)

    def total_ok(self):
        return self.total <= self.bound

    def count_ok(self, s):
        return self.count_at_least(s) <= self.bound // s

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["point", "multiplicity"])
        for pt, v in self.values.items():
            w.writerow([" ".join(map(str, pt)), v])
        buf.write(f"# total={self.total} bound={self.bound} ok={self.total_ok()}\n")
        return buf.getvalue()


def _check_grid(F, A):
    if not A:
        raise ValueError("A must be nonempty")
    if len(set(A)) != len(A):
        raise ValueError("A must have distinct elements")
    for a in A:
        if not 0 < a < F.q:
            raise ValueError(f"{a} is not a nonzero element of F_q")


def grid_multiplicity_report(f, A, m):
    F = f.F
    _check_grid(F, A)
    if f.is_zero():
        raise ValueError("zero polynomial")
    if f.m != m:
        raise ValueError("arity mismatch")
    if f.total_degree() >= F.bracket3:
        raise ValueError("degree must be below [3]_q")
    rep = MultiplicityReport(f.total_degree(), m, len(A))
    for pt in itertools.product(A, repeat=m):
        rep.values[pt] = q_multiplicity(f, pt)
    return rep


def grobner_generators(F, A, m, s):
    """prod_i prod_{t < g_i} prod_{a in A} (X_i - Q^t a) for every |g| = s."""
    _check_grid(F, A)
    if s < 1:
        raise ValueError("s must be >= 1")
    layers = [[1]]
    for t in range(s):
        poly = layers[-1]
        for a in A:
            poly = uni_mul(F, poly, [F.neg(F.mul(F.q_power(t), a)), 1])
        layers.append(poly)
    out = []
    for g in exps_of_weight(m, s):
        gen = MultiPoly.constant(F, m, 1)
        for i, gi in enumerate(g):
            u = uni_to_multi(F, layers[gi])
            terms = {}
            for (k,), c in u.terms.items():
                ex = [0] * m
                ex[i] = k
                terms[tuple(ex)] = c
            gen = gen * MultiPoly(F, m, terms)
        out.append(gen)
    return out


class MultiplicityCheck(NamedTuple):
    a: bool
    b: bool
    detail: str


def derivative_multiplicity_checks(f, a, gamma):
    """(a) mu(D^g f, a) >= mu(f, a) - |g|;
    (b) mu(D^g f, a) <= mu of D^g f restricted to the line through a along X_m."""
    if f.is_zero():
        raise ValueError("zero polynomial")
    mu = q_multiplicity(f, a)
    g = q_derive_multi(f, gamma)
    mug = q_multiplicity(g, a)
    # a vanishing derivative has multiplicity -inf but satisfies the claim vacuously
    ok_a = g.is_zero() or sum(gamma) > mu or mug >= mu - sum(gamma)
    restricted = g.eval_prefix(a[:-1])
    if restricted.is_zero():
        ok_b, mur = True, None
    else:
        mur = q_multiplicity(restricted, a[-1:])
        ok_b = mug <= mur
    detail = f"mu(f)={mu} mu(D^g f)={mug} mu(restriction)={mur}"
    return MultiplicityCheck(ok_a, ok_b, detail)
