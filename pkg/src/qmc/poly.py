"""Sparse multivariate and dense univariate polynomials over K.

Exponent vectors are tuples of ints.  The single canonical order everywhere
is graded-lex: ascending total weight, ties broken lexicographically on
(e_1, ..., e_m).
"""
from __future__ import annotations

import functools
import itertools
import math
import random

from .errors import FormatError

NEG_INF = -math.inf


# --- exponent vectors ------------------------------------------------------

def weight(a):
    return sum(a)


def grlex_key(a):
    return (sum(a), a)


def leq(a, b):
    """Componentwise partial order."""
    return all(x <= y for x, y in zip(a, b))


def exps_of_weight(m, w):
    """All exponent vectors of total weight w, in lexicographic order."""
    if m == 0:
        return [()] if w == 0 else []
    if m == 1:
        return [(w,)]
    out = []
    for first in range(w + 1):
        for rest in exps_of_weight(m - 1, w - first):
            out.append((first,) + rest)
    return out


@functools.lru_cache(maxsize=None)
def exps_below(m, s):
    """{g : |g| < s} in graded-lex order."""
    out = []
    for w in range(s):
        out.extend(exps_of_weight(m, w))
    return tuple(out)


@functools.lru_cache(maxsize=None)
def _grlex_positions(m, s):
    return {g: i for i, g in enumerate(exps_below(m, s))}


def graded_lex_index(a, s):
    """Position of a in the graded-lex listing of {g : |g| < s}."""
    a = tuple(a)
    if sum(a) >= s:
        raise ValueError(f"|{a}| >= {s}")
    return _grlex_positions(len(a), s)[a]


def graded_lex_exp(index, m, s):
    exps = exps_below(m, s)
    if not 0 <= index < len(exps):
        raise ValueError(f"index {index} out of range for m={m}, s={s}")
    return exps[index]


def exps_leq(a):
    """All b <= a componentwise, in graded-lex order."""
    out = list(itertools.product(*(range(x + 1) for x in a)))
    out.sort(key=grlex_key)
    return out


# --- sparse multivariate polynomials ---------------------------------------

class MultiPoly:
    """m-variate polynomial over K stored as {exponent tuple: nonzero coeff}."""

    __slots__ = ("F", "m", "terms")

    def __init__(self, F, m, terms=None):
        self.F = F
        self.m = m
        self.terms = {}
        if terms:
            for ex, c in terms.items():
                if c:
                    if len(ex) != m:
                        raise ValueError(f"exponent {ex} has wrong arity for m={m}")
                    self.terms[tuple(ex)] = c

    @classmethod
    def _raw(cls, F, m, terms):
        obj = cls.__new__(cls)
        obj.F = F
        obj.m = m
        obj.terms = terms
        return obj

    @classmethod
    def zero(cls, F, m):
        return cls._raw(F, m, {})

    @classmethod
    def constant(cls, F, m, c):
        return cls._raw(F, m, {(0,) * m: c} if c else {})

    @classmethod
    def monomial(cls, F, ex, c=1):
        ex = tuple(ex)
        return cls._raw(F, len(ex), {ex: c} if c else {})

    @classmethod
    def var(cls, F, m, i):
        ex = [0] * m
        ex[i] = 1
        return cls._raw(F, m, {tuple(ex): 1})

    # -- basic queries ---------------------------------------------------

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def total_degree(self):
        if not self.terms:
            return NEG_INF
        return max(sum(ex) for ex in self.terms)

    def degree_in(self, i):
        if not self.terms:
            return NEG_INF
        return max(ex[i] for ex in self.terms)

    def coeff(self, ex):
        return self.terms.get(tuple(ex), 0)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]))

    def leading_exp(self):
        return max(self.terms, key=grlex_key)

    def constant_term(self):
        return self.terms.get((0,) * self.m, 0)

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.m == other.m and self.terms == other.terms
        if isinstance(other, int) and other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.m, frozenset(self.terms.items())))

    def __repr__(self):
        return f"MultiPoly({to_text(self)})"

    # -- ring operations -------------------------------------------------

    def _check(self, other):
        if self.m != other.m:
            raise ValueError(f"arity mismatch: {self.m} vs {other.m}")

    def __add__(self, other):
        self._check(other)
        add = self.F.add
        out = dict(self.terms)
        for ex, c in other.terms.items():
            v = add(out.get(ex, 0), c)
            if v:
                out[ex] = v
            else:
                out.pop(ex, None)
        return MultiPoly._raw(self.F, self.m, out)

    def __neg__(self):
        neg = self.F.neg
        return MultiPoly._raw(self.F, self.m, {ex: neg(c) for ex, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        self._check(other)
        F = self.F
        mul, add = F.mul, F.add
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                ex = tuple(x + y for x, y in zip(e1, e2))
                out[ex] = add(out.get(ex, 0), mul(c1, c2))
        return MultiPoly._raw(F, self.m, {ex: c for ex, c in out.items() if c})

    __rmul__ = __mul__

    def scale(self, c):
        if not c:
            return MultiPoly.zero(self.F, self.m)
        mul = self.F.mul
        return MultiPoly._raw(self.F, self.m, {ex: mul(v, c) for ex, v in self.terms.items()})

    def shift(self, ex):
        """Multiply by the monomial X^ex."""
        return MultiPoly._raw(self.F, self.m, {
            tuple(x + y for x, y in zip(e, ex)): c for e, c in self.terms.items()})

    def __pow__(self, t):
        out = MultiPoly.constant(self.F, self.m, 1)
        for _ in range(t):
            out = out * self
        return out

    # -- evaluation and substitution -------------------------------------

    def _powers(self, point):
        F = self.F
        tables = []
        for i, a in enumerate(point):
            top = max((ex[i] for ex in self.terms), default=0)
            row = [1]
            for _ in range(top):
                row.append(F.mul(row[-1], a))
            tables.append(row)
        return tables

    def eval(self, point):
        if len(point) != self.m:
            raise ValueError(f"point has {len(point)} coordinates, need {self.m}")
        F = self.F
        mul, add = F.mul, F.add
        pw = self._powers(point)
        acc = 0
        for ex, c in self.terms.items():
            v = c
            for i, x in enumerate(ex):
                if x:
                    v = mul(v, pw[i][x])
            acc = add(acc, v)
        return acc

    def eval_prefix(self, values):
        """Substitute the first len(values) variables; returns a polynomial in
        the remaining ones."""
        j = len(values)
        F = self.F
        mul, add = F.mul, F.add
        pw = self._powers(list(values) + [1] * (self.m - j))
        out = {}
        for ex, c in self.terms.items():
            v = c
            for i in range(j):
                if ex[i]:
                    v = mul(v, pw[i][ex[i]])
            rest = ex[j:]
            out[rest] = add(out.get(rest, 0), v)
        return MultiPoly._raw(F, self.m - j, {ex: c for ex, c in out.items() if c})

    def scale_vars(self, c):
        """f(c_1 X_1, ..., c_m X_m)."""
        if len(c) != self.m:
            raise ValueError("scale vector has wrong arity")
        if any(x == 0 for x in c):
            raise ValueError("scale_vars needs nonzero scale factors")
        F = self.F
        pw = self._powers(c)
        mul = F.mul
        out = {}
        for ex, v in self.terms.items():
            for i, x in enumerate(ex):
                if x:
                    v = mul(v, pw[i][x])
            out[ex] = v
        return MultiPoly._raw(F, self.m, out)

    def pad(self, extra):
        """View as a polynomial in m + extra variables (new ones appended)."""
        z = (0,) * extra
        return MultiPoly._raw(self.F, self.m + extra,
                              {ex + z: c for ex, c in self.terms.items()})


def scale_vars(f, c):
    return f.scale_vars(c)


def random_poly(F, m, k, seed):
    """Uniformly random coefficients on every monomial of weight < k."""
    if k < 1:
        raise ValueError("degree bound k must be >= 1")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    terms = {}
    for ex in exps_below(m, k):
        c = rng.randrange(F.size)
        if c:
            terms[ex] = c
    return MultiPoly._raw(F, m, terms)


def to_text(f):
    parts = [f"m={f.m}"]
    for ex, c in f.sorted_terms():
        parts.append(f"{c}@{','.join(map(str, ex))}")
    return "; ".join(parts)


def from_text(F, text):
    chunks = [c.strip() for c in text.strip().split(";") if c.strip()]
    if not chunks or not chunks[0].startswith("m="):
        raise FormatError(f"polynomial text must start with 'm=': {text!r}")
    try:
        m = int(chunks[0][2:])
        terms = {}
        for ch in chunks[1:]:
            cs, es = ch.split("@")
            ex = tuple(int(x) for x in es.split(",")) if es.strip() else ()
            c = int(cs)
            if len(ex) != m or min(ex, default=0) < 0:
                raise FormatError(f"bad exponent {es!r}")
            if not 0 <= c < F.size:
                raise FormatError(f"coefficient {c} outside K")
            if ex in terms:
                raise FormatError(f"repeated exponent {ex}")
            terms[ex] = c
    except (ValueError, IndexError) as exc:
        raise FormatError(f"malformed polynomial text: {text!r}") from exc
    return MultiPoly(F, m, terms)


# --- dense univariate polynomials (lists, low degree first) ----------------

def uni_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def uni_degree(a):
    return len(a) - 1 if a else NEG_INF


def uni_add(F, a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = F.add(out[i], c)
    return uni_trim(out)


def uni_sub(F, a, b):
    return uni_add(F, a, [F.neg(c) for c in b])


def uni_scale(F, a, c):
    if not c:
        return []
    return [F.mul(x, c) for x in a]


def uni_mul(F, a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    mul, add = F.mul, F.add
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = add(out[i + j], mul(x, y))
    return uni_trim(out)


def uni_eval(F, a, x):
    acc = 0
    for c in reversed(a):
        acc = F.add(F.mul(acc, x), c)
    return acc


def uni_from_multi(f):
    if f.m != 1:
        raise ValueError("not univariate")
    if not f.terms:
        return []
    out = [0] * (f.total_degree() + 1)
    for (k,), c in f.terms.items():
        out[k] = c
    return out


def uni_to_multi(F, a):
    return MultiPoly(F, 1, {(k,): c for k, c in enumerate(a) if c})


def eval_many(f, coords):
    """Evaluate f at every row of an (npts, m) integer array of K elements."""
    import numpy as np
    F = f.F
    coords = np.asarray(coords, dtype=np.int64).reshape(-1, f.m)
    if not f.terms:
        return np.zeros(len(coords), dtype=np.int64)
    exps = np.array(list(f.terms), dtype=np.int64).reshape(-1, f.m)
    logc = F._np_log[np.array(list(f.terms.values()), dtype=np.int64)]
    lx = F._np_log[coords]
    s = (lx @ exps.T + logc[None, :]) % F.order
    vals = F._np_exp[s]
    # a zero coordinate kills every term that uses that variable
    zero = (coords == 0).astype(np.int64) @ (exps > 0).T.astype(np.int64)
    vals = np.where(zero > 0, 0, vals)
    return F.vsum(vals, axis=1)
