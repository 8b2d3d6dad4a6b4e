"""The field tower F_q < K = F_{q^3} and its canonical generator Q.

Elements are plain Python ints.  An element of F_q is encoded by the base-p
digits of its coefficients in the polynomial basis over F_p; an element of K
by the base-q digits of its coefficients in the polynomial basis over F_q.
Hence F_q sits inside K as the integers ``0 .. q-1`` and ``embed`` is the
identity on encodings.

Multiplication in K goes through discrete-log tables built once per tower;
vectorised (numpy) variants of the basic operations are provided for the
bulk linear algebra in the decoders.
"""
from __future__ import annotations

import functools
import re

import numpy as np

from .errors import FormatError

# full numpy operation tables are built up to this field size
_TABLE_LIMIT = 4096


def is_prime(n):
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def prime_factors(n):
    """Distinct prime factors of ``n`` by trial division."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _digits(x, base, width):
    out = []
    for _ in range(width):
        x, r = divmod(x, base)
        out.append(r)
    return out


def _undigits(ds, base):
    x = 0
    for d in reversed(ds):
        x = x * base + d
    return x


# --- polynomials over F_p (coefficient lists, low degree first) -------------

def _fp_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _fp_mod(a, mod, p):
    a = [c % p for c in a]
    _fp_trim(a)
    dm = len(mod) - 1
    inv_lead = pow(mod[-1], p - 2, p)
    while len(a) - 1 >= dm:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, mc in enumerate(mod):
            a[shift + i] = (a[shift + i] - c * mc) % p
        _fp_trim(a)
    return a


def _fp_irreducible(f, p):
    """Trial-factor search: no monic factor of degree 1..deg/2."""
    deg = len(f) - 1
    for d in range(1, deg // 2 + 1):
        for code in range(p ** d):
            g = _digits(code, p, d) + [1]
            if not _fp_mod(list(f), g, p):
                return False
    return True


class FieldTower:
    """F_q = F_p[x]/(fq_modulus) inside K = F_q[y]/(k_modulus), with the
    multiplicative generator ``q_gen`` of K^x."""

    def __init__(self, p, e):
        if not is_prime(p):
            raise ValueError(f"p={p} is not prime")
        if e < 1 or p ** e < 4:
            raise ValueError("need p^e >= 4")
        self.p = p
        self.e = e
        self.q = q = p ** e
        self.size = q ** 3
        self.order = n = q ** 3 - 1
        self.bracket3 = 1 + q + q * q

        self.fq_modulus = self._find_fq_modulus()
        self._build_fq_tables()
        self.k_modulus = self._find_k_modulus()
        self.q_gen = self._find_generator()
        self._build_k_tables()
        assert self._exp[n] == 1 and len(set(self._exp[:n])) == n

    # -- construction ----------------------------------------------------

    def _find_fq_modulus(self):
        p, e = self.p, self.e
        for code in range(p ** e):
            f = _digits(code, p, e) + [1]
            if _fp_irreducible(f, p):
                return tuple(f)
        raise RuntimeError("no irreducible F_q modulus found")

    def _build_fq_tables(self):
        p, e, q = self.p, self.e, self.q
        mod = list(self.fq_modulus)
        polys = [_digits(x, p, e) for x in range(q)]
        add = [[0] * q for _ in range(q)]
        mul = [[0] * q for _ in range(q)]
        for a in range(q):
            pa = polys[a]
            for b in range(q):
                pb = polys[b]
                add[a][b] = _undigits([(x + y) % p for x, y in zip(pa, pb)], p)
                prod = [0] * (2 * e - 1)
                for i, x in enumerate(pa):
                    if x:
                        for j, y in enumerate(pb):
                            prod[i + j] += x * y
                r = _fp_mod(prod, mod, p)
                mul[a][b] = _undigits(r + [0] * (e - len(r)), p)
        self._fq_add = add
        self._fq_mul = mul
        self._fq_neg = [add[a].index(0) for a in range(q)]
        self._fq_inv = [0] + [mul[a].index(1) for a in range(1, q)]

    def _find_k_modulus(self):
        q = self.q
        add, mul = self._fq_add, self._fq_mul
        for code in range(q ** 3):
            c = _digits(code, q, 3)
            has_root = False
            for x in range(q):
                x2 = mul[x][x]
                v = add[add[c[0]][mul[c[1]][x]]][add[mul[c[2]][x2]][mul[x2][x]]]
                if v == 0:
                    has_root = True
                    break
            if not has_root:
                return tuple(c + [1])
        raise RuntimeError("no irreducible K modulus found")

    def _kmul_slow(self, a, b):
        q = self.q
        add, mul, neg = self._fq_add, self._fq_mul, self._fq_neg
        x = _digits(a, q, 3)
        y = _digits(b, q, 3)
        prod = [0] * 5
        for i in range(3):
            if x[i]:
                for j in range(3):
                    prod[i + j] = add[prod[i + j]][mul[x[i]][y[j]]]
        m = self.k_modulus
        for top in (4, 3):
            c = prod[top]
            if c:
                prod[top] = 0
                for i in range(3):
                    prod[top - 3 + i] = add[prod[top - 3 + i]][neg[mul[c][m[i]]]]
        return _undigits(prod[:3], q)

    def _kpow_slow(self, a, t):
        r = 1
        while t:
            if t & 1:
                r = self._kmul_slow(r, a)
            a = self._kmul_slow(a, a)
            t >>= 1
        return r

    def _find_generator(self):
        n = self.order
        factors = prime_factors(n)
        for g in range(1, self.size):
            if all(self._kpow_slow(g, n // ell) != 1 for ell in factors):
                return g
        raise RuntimeError("no generator found")

    def _build_k_tables(self):
        n, p = self.order, self.p
        exp = [0] * (2 * n)
        x = 1
        for i in range(n):
            exp[i] = x
            x = self._kmul_slow(x, self.q_gen)
        exp[n:] = exp[:n]
        log = [-1] * self.size
        for i in range(n):
            log[exp[i]] = i
        self._exp = exp
        self._log = log

        width = 3 * self.e
        dig = np.array([_digits(x, p, width) for x in range(self.size)], dtype=np.int64)
        self._dig = dig
        self._pw = p ** np.arange(width, dtype=np.int64)
        neg = ((-dig) % p) @ self._pw
        self._neg = [int(v) for v in neg]
        # zech[d] = log(1 + Q^d), -1 when 1 + Q^d = 0
        one_plus = ((dig[np.array(exp[:n])] + dig[1]) % p) @ self._pw
        self._zech = [log[int(v)] for v in one_plus]

        self._np_exp = np.array(exp, dtype=np.int64)
        self._np_log = np.array([max(v, 0) for v in log], dtype=np.int64)
        self._np_neg = neg.astype(np.int64)
        self._np_inv = np.array([0] + [exp[(n - log[a]) % n] for a in range(1, self.size)],
                                dtype=np.int64)
        self._mul_table = None
        self._add_table = None
        self._mmat = None
        if self.size <= _TABLE_LIMIT:
            lg = self._np_log
            tab = self._np_exp[(lg[:, None] + lg[None, :]) % n]
            tab[0, :] = 0
            tab[:, 0] = 0
            self._mul_table = tab
            if p != 2:
                self._add_table = ((dig[:, None, :] + dig[None, :, :]) % p) @ self._pw

    # -- scalar arithmetic on K ------------------------------------------

    def add(self, a, b):
        if self.p == 2:
            return a ^ b
        if not a:
            return b
        if not b:
            return a
        la = self._log[a]
        z = self._zech[(self._log[b] - la) % self.order]
        return 0 if z < 0 else self._exp[la + z]

    def neg(self, a):
        return self._neg[a]

    def sub(self, a, b):
        return self.add(a, self._neg[b])

    def mul(self, a, b):
        if not a or not b:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero in K")
        return self._exp[self.order - self._log[a]]

    def div(self, a, b):
        if not b:
            raise ZeroDivisionError("division by zero in K")
        if not a:
            return 0
        return self._exp[self._log[a] - self._log[b] + self.order]

    def pow(self, a, t):
        if not a:
            if t < 0:
                raise ZeroDivisionError("negative power of zero")
            return 1 if t == 0 else 0
        return self._exp[(self._log[a] * t) % self.order]

    def log(self, a):
        if not a:
            raise ValueError("log of zero")
        return self._log[a]

    def q_power(self, t):
        """Q^t for any integer t."""
        return self._exp[t % self.order]

    def sum(self, values):
        acc = 0
        for v in values:
            acc = self.add(acc, v)
        return acc

    # -- F_q and the embedding -------------------------------------------

    def fq_add(self, a, b):
        return self._fq_add[a][b]

    def fq_sub(self, a, b):
        return self._fq_add[a][self._fq_neg[b]]

    def fq_mul(self, a, b):
        return self._fq_mul[a][b]

    def fq_inv(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero in F_q")
        return self._fq_inv[a]

    def embed(self, a):
        if not 0 <= a < self.q:
            raise ValueError(f"{a} is not an F_q encoding")
        return a

    def in_subfield(self, x):
        """True iff x lies in F_q, tested as x^q == x."""
        return self.pow(x, self.q) == x

    def coords(self, x):
        """Coordinates of x over F_q (low degree first)."""
        return tuple(_digits(x, self.q, 3))

    # -- vectorised arithmetic (numpy int64 arrays of encodings) ---------

    def vmul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self._mul_table is not None:
            return self._mul_table[a, b]
        r = self._np_exp[(self._np_log[a] + self._np_log[b]) % self.order]
        return np.where((a == 0) | (b == 0), 0, r)

    def vadd(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.p == 2:
            return a ^ b
        if self._add_table is not None:
            return self._add_table[a, b]
        return ((self._dig[a] + self._dig[b]) % self.p) @ self._pw

    def vneg(self, a):
        return self._np_neg[np.asarray(a, dtype=np.int64)]

    def vsub(self, a, b):
        return self.vadd(a, self.vneg(b))

    def vinv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero in K")
        return self._np_inv[a]

    def vsum(self, a, axis=0):
        """K-sum of an array along ``axis``."""
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return np.bitwise_xor.reduce(a, axis=axis)
        if a.shape[axis] == 0:
            shape = list(a.shape)
            del shape[axis]
            return np.zeros(shape, dtype=np.int64)
        s = self._dig[a].sum(axis=axis) % self.p
        return s @ self._pw

    def _mult_matrices(self):
        """(size, D, D) array: column i of entry x holds the digits of x * p^i."""
        if self._mmat is None:
            D = 3 * self.e
            elems = np.arange(self.size, dtype=np.int64)
            cols = [self._dig[self.vmul(elems, self.p ** i)] for i in range(D)]
            self._mmat = np.stack(cols, axis=2)
        return self._mmat

    def vmatmul(self, a, b):
        """Matrix product over K of 2-d arrays.

        Multiplication by a fixed element is F_p-linear on base-p digits, so
        the product becomes one integer matrix product (done in float64,
        exact while the accumulated sums stay below 2^53) followed by mod p.
        """
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        r, c = a.shape
        c2, n = b.shape
        if c != c2:
            raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
        D = 3 * self.e
        if r == 0 or n == 0 or c == 0:
            return np.zeros((r, n), dtype=np.int64)
        if c * D * (self.p - 1) ** 2 >= 2 ** 53:
            out = np.zeros((r, n), dtype=np.int64)
            for t in range(c):
                out = self.vadd(out, self.vmul(a[:, t:t + 1], b[t:t + 1, :]))
            return out
        big = self._mult_matrices()[a].transpose(0, 2, 1, 3).reshape(r * D, c * D)
        digs = self._dig[b].transpose(0, 2, 1).reshape(c * D, n)
        prod = np.rint(big.astype(np.float64) @ digs.astype(np.float64)).astype(np.int64)
        prod = (prod % self.p).reshape(r, D, n).transpose(0, 2, 1)
        return prod @ self._pw

    # -- serialization ---------------------------------------------------

    def header(self):
        return ("QMC1 p={} e={} fqmod={} kmod={} Q={}".format(
            self.p, self.e,
            ",".join(map(str, self.fq_modulus)),
            ",".join(map(str, self.k_modulus)),
            self.q_gen))

    def __repr__(self):
        return f"FieldTower(p={self.p}, e={self.e})"


def build_tower(p, e=1):
    """The canonical tower for (p, e); one shared instance per pair."""
    return _cached_tower(int(p), int(e))


@functools.lru_cache(maxsize=None)
def _cached_tower(p, e):
    return FieldTower(p, e)


_HEADER_RE = re.compile(
    r"^QMC1 p=(\d+) e=(\d+) fqmod=([\d,]+) kmod=([\d,]+) Q=(\d+)\s*$")


def parse_header(line):
    """Rebuild the tower named by a header line, checking it is canonical."""
    mt = _HEADER_RE.match(line.strip())
    if not mt:
        raise FormatError(f"bad tower header: {line.strip()!r}")
    p, e = int(mt.group(1)), int(mt.group(2))
    try:
        F = build_tower(p, e)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
    if F.header() != line.strip():
        raise FormatError("tower header does not match the canonical tower "
                          f"for p={p} e={e}")
    return F
