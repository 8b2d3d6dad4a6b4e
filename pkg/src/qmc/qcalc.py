"""Q-brackets, Gaussian binomials, Q-derivatives, Q-Pochhammer products,
Q-Taylor expansions and the nu/xi change-of-basis matrices.

D_Q f(X) = (f(QX) - f(X)) / ((Q - 1) X); on monomials D_Q X^k = [k]_Q X^(k-1),
so every derivative is computed coefficientwise.
"""
from __future__ import annotations

import functools

import numpy as np
from dataclasses import dataclass

from .poly import MultiPoly, exps_below, exps_of_weight, leq, uni_trim


class BracketTable:
    """Lazily extended cache of [n]_Q and [n]_Q! for one tower."""

    def __init__(self, F):
        self.F = F
        self.brackets = [0]
        self.factorials = [1]

    def _extend(self, n):
        F = self.F
        while len(self.brackets) <= n:
            k = len(self.brackets)
            self.brackets.append(F.add(self.brackets[-1], F.q_power(k - 1)))
            self.factorials.append(F.mul(self.factorials[-1], self.brackets[-1]))

    def bracket(self, n):
        if n < 0:
            raise ValueError("bracket of a negative integer")
        self._extend(n)
        return self.brackets[n]

    def factorial(self, n):
        if n < 0:
            return 0
        if n >= self.F.order:
            raise ValueError(f"[{n}]_Q! vanishes: n >= q^3 - 1 = {self.F.order}")
        self._extend(n)
        return self.factorials[n]

    def falling(self, k, t):
        """[k]_Q [k-1]_Q ... [k-t+1]_Q, i.e. the factor in D^t X^k."""
        if t > k:
            return 0
        self._extend(k)
        F = self.F
        v = 1
        for j in range(k - t + 1, k + 1):
            v = F.mul(v, self.brackets[j])
        return v


@functools.lru_cache(maxsize=None)
def bracket_table(F):
    return BracketTable(F)


def q_bracket(F, n):
    return bracket_table(F).bracket(n)


def q_factorial(F, n):
    return bracket_table(F).factorial(n)


def q_binom(F, n, k):
    """Gaussian binomial via the factorial quotient."""
    if k < 0 or k > n:
        return 0
    T = bracket_table(F)
    return F.div(T.factorial(n), F.mul(T.factorial(k), T.factorial(n - k)))


@functools.lru_cache(maxsize=None)
def _pascal_row(F, n):
    if n == 0:
        return (1,)
    prev = _pascal_row(F, n - 1)
    row = [1]
    for k in range(1, n):
        row.append(F.add(prev[k - 1], F.mul(F.q_power(k), prev[k])))
    row.append(1)
    return tuple(row)


def q_binom_pascal(F, n, k):
    """Gaussian binomial via qbinom(n,k) = qbinom(n-1,k-1) + Q^k qbinom(n-1,k)."""
    if k < 0 or k > n:
        return 0
    return _pascal_row(F, n)[k]


def q_binom_multi(F, a, b):
    v = 1
    for x, y in zip(a, b):
        v = F.mul(v, q_binom(F, x, y))
    return v


def q_factorial_multi(F, a):
    v = 1
    for x in a:
        v = F.mul(v, q_factorial(F, x))
    return v


# --- derivatives -----------------------------------------------------------

def q_derive_uni(F, f):
    """D_Q of a dense univariate polynomial."""
    T = bracket_table(F)
    return uni_trim([F.mul(T.bracket(k), c) for k, c in enumerate(f)][1:])


def q_derive_uni_iter(F, f, t):
    for _ in range(t):
        f = q_derive_uni(F, f)
    return f


def q_derive_var(f, i, t=1):
    """D_Q^t in the single variable X_i."""
    if t == 0:
        return f
    F = f.F
    T = bracket_table(F)
    out = {}
    for ex, c in f.terms.items():
        if ex[i] >= t:
            v = F.mul(c, T.falling(ex[i], t))
            if v:
                ne = list(ex)
                ne[i] -= t
                out[tuple(ne)] = v
    return MultiPoly._raw(F, f.m, out)


def q_derive_multi(f, alpha):
    """D^alpha f.  A shorter alpha acts on the leading variables only, which
    is how X-derivatives are taken of polynomials that also carry Z."""
    alpha = tuple(alpha)
    if len(alpha) > f.m:
        raise ValueError("derivative order has more entries than variables")
    if not any(alpha):
        return f
    F = f.F
    T = bracket_table(F)
    out = {}
    n = len(alpha)
    for ex, c in f.terms.items():
        v = c
        for i in range(n):
            if ex[i] < alpha[i]:
                v = 0
                break
            if alpha[i]:
                v = F.mul(v, T.falling(ex[i], alpha[i]))
        if v:
            out[tuple(x - a for x, a in zip(ex[:n], alpha)) + ex[n:]] = v
    return MultiPoly._raw(F, f.m, out)


def derivative_at(f, gamma, point):
    """D^gamma f evaluated at ``point`` (coordinates for all variables)."""
    return q_derive_multi(f, gamma).eval(point)


# --- Pochhammer products and Taylor expansion ------------------------------

def q_pochhammer_uni(F, c, k):
    """(X - c)(X - Qc)...(X - Q^(k-1) c) as a dense list."""
    out = [1]
    for t in range(k):
        root = F.mul(F.q_power(t), c)
        nxt = [0] * (len(out) + 1)
        for i, v in enumerate(out):
            nxt[i + 1] = F.add(nxt[i + 1], v)
            nxt[i] = F.sub(nxt[i], F.mul(v, root))
        out = nxt
    return uni_trim(out)


def _product_of_univariates(F, polys):
    terms = {(): 1}
    for g in polys:
        nt = {}
        for ex, c in terms.items():
            for k, v in enumerate(g):
                if v:
                    nt[ex + (k,)] = F.mul(c, v)
        terms = nt
    return terms


def q_pochhammer(F, center, alpha):
    """prod_i (X_i - c_i)_Q^(alpha_i)."""
    polys = [q_pochhammer_uni(F, c, a) for c, a in zip(center, alpha)]
    return MultiPoly(F, len(alpha), _product_of_univariates(F, polys))


def _check_taylor_degree(f):
    if f.total_degree() > f.F.bracket3 - 1:
        raise ValueError("degree too large: bracket factorials are not invertible")


def q_taylor_coeffs(f, beta):
    """{alpha: D^alpha f(Q^beta)} over all alpha with a nonzero value."""
    _check_taylor_degree(f)
    F = f.F
    point = tuple(F.q_power(b) for b in beta)
    T = bracket_table(F)
    pw = f._powers(point)
    out = {}
    if not f.terms:
        return out
    deg = f.total_degree()
    for w in range(deg + 1):
        for alpha in exps_of_weight(f.m, w):
            acc = 0
            for ex, c in f.terms.items():
                if leq(alpha, ex):
                    v = c
                    for i, (x, a) in enumerate(zip(ex, alpha)):
                        if a:
                            v = F.mul(v, T.falling(x, a))
                        if x - a:
                            v = F.mul(v, pw[i][x - a])
                    acc = F.add(acc, v)
            if acc:
                out[alpha] = acc
    return out


def q_taylor_reconstruct(F, coeffs, beta):
    """sum_alpha coeffs[alpha] (X - Q^beta)_Q^(alpha) / [alpha]_Q!."""
    m = len(beta)
    center = [F.q_power(b) for b in beta]
    cache = {}
    out = {}
    for alpha, c in coeffs.items():
        if not c:
            continue
        scale = F.div(c, q_factorial_multi(F, alpha))
        polys = []
        for i, a in enumerate(alpha):
            key = (i, a)
            if key not in cache:
                cache[key] = q_pochhammer_uni(F, center[i], a)
            polys.append(cache[key])
        for ex, v in _product_of_univariates(F, polys).items():
            out[ex] = F.add(out.get(ex, 0), F.mul(v, scale))
    return MultiPoly(F, m, out)


# --- change of basis -------------------------------------------------------

@dataclass
class NuXiMatrix:
    """Square matrix indexed by {g : |g| < s} in graded-lex order.

    direction 'nu' maps evaluation blocks [f(Q^g a)] to derivative blocks
    [D^g f(a)]; 'xi' is the inverse map.
    """
    point: tuple
    s: int
    direction: str
    exps: tuple
    rows: list

    def apply(self, F, vec):
        return [F.sum(F.mul(x, y) for x, y in zip(row, vec)) for row in self.rows]


@functools.lru_cache(maxsize=None)
def _kappa(F, s):
    """Univariate nu coefficients at the point 1: D^k f(x) =
    sum_t kappa[k][t] x^(-k) f(Q^t x), from iterating the difference quotient."""
    inv_qm1 = F.inv(F.sub(F.q_gen, 1))
    rows = [[1]]
    for k in range(s - 1):
        prev = rows[-1] + [0]
        shift = F.q_power(-k)
        row = []
        for t in range(k + 2):
            left = F.mul(prev[t - 1], shift) if t else 0
            row.append(F.mul(F.sub(left, prev[t]), inv_qm1))
        rows.append(row)
    return tuple(tuple(r) for r in rows)


def nu_uni(F, a, s):
    """s x s matrix with D^k f(a) = sum_t nu[k][t] f(Q^t a)."""
    if not a:
        raise ValueError("nu is undefined at a zero coordinate")
    kap = _kappa(F, s)
    out = []
    for k in range(s):
        ak = F.pow(a, -k)
        out.append([F.mul(kap[k][t], ak) if t <= k else 0 for t in range(s)])
    return out


def nu_matrix(F, a, s):
    a = tuple(a)
    if any(x == 0 for x in a):
        raise ValueError("nu is undefined at a point with a zero coordinate")
    m = len(a)
    exps = exps_below(m, s)
    unis = [nu_uni(F, x, s) for x in a]
    rows = []
    for al in exps:
        row = []
        for be in exps:
            v = 1
            for i in range(m):
                if be[i] > al[i]:
                    v = 0
                    break
                v = F.mul(v, unis[i][al[i]][be[i]])
            row.append(v)
        rows.append(row)
    return NuXiMatrix(a, s, "nu", exps, rows)


def _invert_lower(F, L):
    n = len(L)
    X = [[0] * n for _ in range(n)]
    for i in range(n):
        d = F.inv(L[i][i])
        X[i][i] = d
        for j in range(i):
            acc = 0
            for l in range(j, i):
                if L[i][l] and X[l][j]:
                    acc = F.add(acc, F.mul(L[i][l], X[l][j]))
            X[i][j] = F.neg(F.mul(acc, d))
    return X


def _is_identity_product(F, A, B):
    n = len(A)
    for i in range(n):
        for j in range(n):
            v = F.sum(F.mul(A[i][l], B[l][j]) for l in range(n))
            if v != (1 if i == j else 0):
                return False
    return True


@functools.lru_cache(maxsize=4096)
def _nu_xi_pair(F, a, s):
    nu = nu_matrix(F, a, s)
    xi_rows = _invert_lower(F, nu.rows)
    if not _is_identity_product(F, nu.rows, xi_rows):
        raise ArithmeticError("nu * xi != I")
    return nu, NuXiMatrix(nu.point, s, "xi", nu.exps, xi_rows)


def xi_matrix(F, a, s):
    if any(x == 0 for x in a):
        raise ValueError("xi is undefined at a point with a zero coordinate")
    return _nu_xi_pair(F, tuple(a), s)[1]


def nu_xi(F, a, s):
    if any(x == 0 for x in a):
        raise ValueError("nu is undefined at a point with a zero coordinate")
    return _nu_xi_pair(F, tuple(a), s)


def nu_entry_printed(F, k, t, x):
    """The closed form (-1)^t Q^(C(t,2)-(k-1)t) C(k,t) / ((Q-1)^k x^k) with an
    ordinary binomial, kept only to be compared against the definition."""
    from math import comb
    c = comb(k, t) % F.p
    v = F.mul(F.q_power(t * (t - 1) // 2 - (k - 1) * t), c)
    v = F.div(v, F.mul(F.pow(F.sub(F.q_gen, 1), k), F.pow(x, k)))
    return F.neg(v) if t % 2 else v


def nu_entry_gaussian(F, k, t, x):
    """(-1)^(k-t) qbinom(k,t) Q^(C(k-t,2) - C(k,2)) / ((Q-1)^k x^k)."""
    j = k - t
    v = F.mul(q_binom(F, k, t), F.q_power(j * (j - 1) // 2 - k * (k - 1) // 2))
    v = F.div(v, F.mul(F.pow(F.sub(F.q_gen, 1), k), F.pow(x, k)))
    return F.neg(v) if j % 2 else v


# --- vectorised monomial derivatives ---------------------------------------

_FALLING = {}


def falling_array(F, kmax):
    """numpy table FT[k, t] = [k]_Q [k-1]_Q ... [k-t+1]_Q (zero for t > k)."""
    cached = _FALLING.get(F)
    if cached is not None and cached.shape[0] > kmax:
        return cached
    size = max(kmax + 1, 2 * (cached.shape[0] if cached is not None else 8))
    T = bracket_table(F)
    ft = np.zeros((size, size), dtype=np.int64)
    for k in range(size):
        v = 1
        ft[k, 0] = 1
        for t in range(1, k + 1):
            v = F.mul(v, T.bracket(k - t + 1))
            ft[k, t] = v
    _FALLING[F] = ft
    return ft


def derivative_matrix(F, exps, rhos, point):
    """M[i, j] = coefficient-free value of D^rho_i X^mu_j at ``point``,
    i.e. falling(mu, rho) * point^(mu - rho), zero unless rho <= mu."""
    exps = np.asarray(exps, dtype=np.int64).reshape(-1, len(point))
    rhos = np.asarray(rhos, dtype=np.int64).reshape(-1, len(point))
    R, T = len(rhos), len(exps)
    if R == 0 or T == 0:
        return np.zeros((R, T), dtype=np.int64)
    ft = falling_array(F, int(max(exps.max(initial=0), rhos.max(initial=0))))
    diff = exps[None, :, :] - rhos[:, None, :]
    valid = (diff >= 0).all(axis=2)
    dpos = np.where(diff >= 0, diff, 0)
    out = np.ones((R, T), dtype=np.int64)
    logsum = np.zeros((R, T), dtype=np.int64)
    for i, x in enumerate(point):
        fall = ft[exps[None, :, i], np.minimum(rhos[:, None, i], ft.shape[1] - 1)]
        out = F.vmul(out, fall)
        if x == 0:
            valid &= dpos[:, :, i] == 0
        else:
            logsum = (logsum + dpos[:, :, i] * F.log(x)) % F.order
    out = F.vmul(out, F._np_exp[logsum])
    return np.where(valid, out, 0)
