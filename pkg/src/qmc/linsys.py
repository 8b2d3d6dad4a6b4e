"""Exact linear algebra over K, and nullspace computation for matrices whose
entries are polynomials in auxiliary variables Z.

Matrices over K are numpy int64 arrays of field encodings.  A polynomial
matrix is stored in layers: {Z-exponent: array of coefficients}, which keeps
every elementary operation a handful of vectorised table lookups.
"""
from __future__ import annotations

import functools
import math

import numpy as np

from .errors import SolverError
from .poly import MultiPoly, exps_below, graded_lex_index


# --- matrices over K -------------------------------------------------------

def rref(F, M):
    """Reduced row echelon form; returns (R, pivot columns)."""
    M = np.array(M, dtype=np.int64, copy=True)
    if M.ndim != 2:
        raise ValueError("rref needs a 2-d matrix")
    rows, cols = M.shape
    pivots = []
    row = 0
    for c in range(cols):
        if row == rows:
            break
        nz = np.nonzero(M[row:, c])[0]
        if len(nz) == 0:
            continue
        r = row + int(nz[0])
        if r != row:
            M[[row, r]] = M[[r, row]]
        M[row] = F.vmul(M[row], F.inv(int(M[row, c])))
        f = M[:, c].copy()
        f[row] = 0
        if f.any():
            M = F.vsub(M, F.vmul(f[:, None], M[row][None, :]))
        pivots.append(c)
        row += 1
    return M, pivots


def rank(F, M):
    M = np.asarray(M, dtype=np.int64)
    if M.size == 0:
        return 0
    return len(rref(F, M)[1])


def nullspace_k(F, M, cols=None):
    """A nonzero kernel vector (first free column set to 1, other free
    columns 0), or None when the kernel is trivial."""
    M = np.asarray(M, dtype=np.int64)
    if M.ndim != 2 or (M.shape[0] == 0 and cols is not None):
        M = np.zeros((0, cols), dtype=np.int64)
    n = M.shape[1]
    R, pivots = rref(F, M)
    free = [c for c in range(n) if c not in set(pivots)]
    if not free:
        return None
    f = free[0]
    v = np.zeros(n, dtype=np.int64)
    v[f] = 1
    for i, c in enumerate(pivots):
        v[c] = F.neg(int(R[i, f]))
    return v


def solve_affine(F, A, b):
    """All x with A x = b as (particular, basis), or None if inconsistent."""
    A = np.asarray(A, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64).reshape(-1, 1)
    n = A.shape[1]
    if A.shape[0] == 0:
        basis = [np.eye(1, n, i, dtype=np.int64)[0] for i in range(n)]
        return np.zeros(n, dtype=np.int64), basis
    R, pivots = rref(F, np.hstack([A, b]))
    if n in pivots:
        return None
    x0 = np.zeros(n, dtype=np.int64)
    for i, c in enumerate(pivots):
        x0[c] = int(R[i, n])
    basis = []
    pset = set(pivots)
    for f in range(n):
        if f in pset:
            continue
        v = np.zeros(n, dtype=np.int64)
        v[f] = 1
        for i, c in enumerate(pivots):
            v[c] = F.neg(int(R[i, f]))
        basis.append(v)
    return x0, basis


def matvec(F, M, v):
    M = np.asarray(M, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    if M.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    return F.vsum(F.vmul(M, v[None, :]), axis=1)


# --- layered polynomial matrices -------------------------------------------

class PolyZMatrix:
    """rows x cols matrix over K[Z_1..Z_nz] stored as {exponent: array}."""

    def __init__(self, F, nz, shape, layers=None):
        self.F = F
        self.nz = nz
        self.shape = tuple(shape)
        self.layers = {}
        for e, arr in (layers or {}).items():
            arr = np.asarray(arr, dtype=np.int64)
            if arr.shape != self.shape:
                raise ValueError("layer shape mismatch")
            if arr.any():
                self.layers[tuple(e)] = arr

    @classmethod
    def from_entries(cls, F, nz, rows):
        rows = [list(r) for r in rows]
        shape = (len(rows), len(rows[0]) if rows else 0)
        layers = {}
        for i, row in enumerate(rows):
            if len(row) != shape[1]:
                raise ValueError("ragged matrix")
            for j, ent in enumerate(row):
                if isinstance(ent, int):
                    ent = MultiPoly.constant(F, nz, ent)
                if ent.m != nz:
                    raise ValueError("entry arity mismatch")
                for e, c in ent.terms.items():
                    if e not in layers:
                        layers[e] = np.zeros(shape, dtype=np.int64)
                    layers[e][i, j] = c
        return cls(F, nz, shape, layers)

    def entry(self, i, j):
        return MultiPoly(self.F, self.nz, {e: int(a[i, j]) for e, a in self.layers.items()})

    def to_entries(self):
        return [[self.entry(i, j) for j in range(self.shape[1])] for i in range(self.shape[0])]


def _prune(L):
    return {e: a for e, a in L.items() if a.any()}


def _eadd(e1, e2):
    return tuple(x + y for x, y in zip(e1, e2))


def _acc(F, out, e, arr, subtract=False):
    if e in out:
        out[e] = F.vsub(out[e], arr) if subtract else F.vadd(out[e], arr)
    else:
        out[e] = F.vneg(arr) if subtract else arr


# --- dense monomial stacks -------------------------------------------------
# A polynomial matrix can also be held as an array (n, ...) whose leading axis
# runs over all Z-monomials of degree <= D in graded-lex order; the listing for
# a smaller degree is a prefix of the listing for a larger one.

@functools.lru_cache(maxsize=None)
def _listing(nz, D):
    return exps_below(nz, D + 1)


def _n_listing(nz, D):
    return math.comb(nz + D, nz)


@functools.lru_cache(maxsize=None)
def _listing_degrees(nz, D):
    return np.array([sum(e) for e in _listing(nz, D)], dtype=np.int64)


@functools.lru_cache(maxsize=None)
def _sum_table(nz, D1, D2):
    """T[i, j] = position of e_i + e_j in the listing of degree D1 + D2."""
    pos = {e: i for i, e in enumerate(_listing(nz, D1 + D2))}
    return np.array([[pos[_eadd(x, y)] for y in _listing(nz, D2)]
                     for x in _listing(nz, D1)], dtype=np.int64).reshape(
                         _n_listing(nz, D1), _n_listing(nz, D2))


def _pad(A, n):
    if A.shape[0] >= n:
        return A
    return np.concatenate([A, np.zeros((n - A.shape[0],) + A.shape[1:], dtype=np.int64)])


def _to_dense(nz, L, shape):
    if not L:
        return None, 0
    D = max(sum(e) for e in L)
    out = np.zeros((_n_listing(nz, D),) + tuple(shape), dtype=np.int64)
    for e, a in L.items():
        out[graded_lex_index(e, D + 1)] = a
    return out, D


def _trim(nz, A, D):
    """Drop trailing all-zero monomials; (None, 0) for the zero stack."""
    flat = A.reshape(A.shape[0], -1)
    nzrows = np.nonzero(flat.any(axis=1))[0]
    if len(nzrows) == 0:
        return None, 0
    top = int(_listing_degrees(nz, D)[nzrows[-1]])
    return A[:_n_listing(nz, top)], top


def _conv_matrix(nz, coeffs, Da, Db):
    """K-matrix sending a stack of degree <= Db to its product with the
    polynomial ``coeffs`` (degree <= Da)."""
    T = _sum_table(nz, Da, Db)
    na, nb = T.shape
    out = np.zeros((_n_listing(nz, Da + Db), nb), dtype=np.int64)
    c = np.zeros(na, dtype=np.int64)
    c[:len(coeffs)] = coeffs[:na]
    out[T, np.arange(nb)[None, :]] = c[:, None]
    return out


def _grouped_poly_sum(F, nz, prod, Da, Db):
    """prod[i, j, ...]: products of monomial i (degree <= Da) and j (<= Db);
    returns the K-sum grouped by e_i + e_j and over all trailing axes."""
    T = _sum_table(nz, Da, Db)[:prod.shape[0], :prod.shape[1]]
    n = _n_listing(nz, Da + Db)
    dig = F._dig[prod]
    dig = dig.reshape(prod.shape[0], prod.shape[1], -1, dig.shape[-1]).sum(axis=2)
    idx = T.ravel()
    out = np.stack([np.bincount(idx, weights=dig[..., k].ravel(), minlength=n)
                    for k in range(dig.shape[-1])], axis=1)
    return (np.rint(out).astype(np.int64) % F.p) @ F._pw, Da + Db


def _dense_divide(F, nz, N, DN, d, Dd):
    """Exact quotient of the stack N (degree <= DN) by the polynomial d."""
    nzd = np.nonzero(d)[0]
    lead = int(nzd[-1])
    Dd = int(_listing_degrees(nz, Dd)[lead])
    Dq = DN - Dd
    if Dq < 0:
        if N.any():
            raise SolverError("inexact division in fraction-free elimination")
        return np.zeros((1,) + N.shape[1:], dtype=np.int64), 0
    T = _sum_table(nz, Dd, Dq)
    N = _pad(N.copy(), _n_listing(nz, DN))
    inv_lc = F.inv(int(d[lead]))
    dv = d[nzd]
    nq = _n_listing(nz, Dq)
    q = np.zeros((nq,) + N.shape[1:], dtype=np.int64)
    for k in range(nq - 1, -1, -1):
        top = N[T[lead, k]]
        if not top.any():
            continue
        qa = F.vmul(top, inv_lc)
        q[k] = qa
        tgt = T[nzd, k]
        N[tgt] = F.vsub(N[tgt], F.vmul(dv.reshape((-1,) + (1,) * qa.ndim), qa[None]))
    if N.any():
        raise SolverError("inexact division in fraction-free elimination")
    return q, Dq


def _layers_to_poly(F, nz, L, idx):
    return MultiPoly(F, nz, {e: int(a[idx]) for e, a in L.items()})


class NullspaceResult:
    def __init__(self, vector, z_degree, unit_pivots, fraction_free_pivots):
        self.vector = vector
        self.z_degree = z_degree
        self.unit_pivots = unit_pivots
        self.fraction_free_pivots = fraction_free_pivots


def nullspace_polyz(M):
    """Nonzero v with M v = 0 identically in Z, entries polynomial in Z.

    Constant pivots are units of K[Z] and are eliminated Gauss-Jordan style.
    Whatever is left (no constant entries) goes through Bareiss elimination
    with exact divisions by the previous pivot, choosing the pivot of least
    Z-degree, then leftmost column, then topmost row.  Back substitution
    fixes the free coordinate to the last Bareiss pivot so all divisions are
    exact.  Returns None when the kernel is trivial.
    """
    F, nz = M.F, M.nz
    R, C = M.shape
    L = {e: a.copy() for e, a in M.layers.items()}
    zero_e = (0,) * nz
    row_free = np.ones(R, dtype=bool)
    col_free = np.ones(C, dtype=bool)
    unit = []  # (row, col)

    # phase 1: Gauss-Jordan on constant pivots
    while True:
        const = L.get(zero_e)
        if const is None:
            break
        nonconst = np.zeros((R, C), dtype=bool)
        for e, a in L.items():
            if e != zero_e:
                nonconst |= a != 0
        cand = (const != 0) & ~nonconst & row_free[:, None] & col_free[None, :]
        if not cand.any():
            break
        c = int(np.nonzero(cand.any(axis=0))[0][0])
        r = int(np.nonzero(cand[:, c])[0][0])
        inv = F.inv(int(const[r, c]))
        for e in L:
            L[e][r] = F.vmul(L[e][r], inv)
        colL = {}
        for e, a in L.items():
            col = a[:, c].copy()
            col[r] = 0
            if col.any():
                colL[e] = col
        rowL = {e: a[r].copy() for e, a in L.items() if a[r].any()}
        for ec, col in colL.items():
            for er, row in rowL.items():
                _acc(F, L, _eadd(ec, er), F.vmul(col[:, None], row[None, :]), subtract=True)
        L = _prune(L)
        row_free[r] = False
        col_free[c] = False
        unit.append((r, c))

    # phase 2: Bareiss on the remaining block, on dense monomial stacks
    rows = np.nonzero(row_free)[0]
    cols = list(np.nonzero(col_free)[0])
    S, DS = _to_dense(nz, {e: a[np.ix_(rows, cols)] for e, a in L.items()},
                      (len(rows), len(cols)))
    prev, Dprev = np.ones(1, dtype=np.int64), 0
    upper = []  # (pivot col, dense row over original columns, its degree, pivot, degree)
    colidx = list(cols)
    while S is not None and S.shape[1] and S.shape[2]:
        degs = _listing_degrees(nz, DS)
        deg = np.where(S != 0, degs[:, None, None], -1).max(axis=0)
        if (deg < 0).all():
            break
        dmin = deg[deg >= 0].min()
        mask = deg == dmin
        c = int(np.nonzero(mask.any(axis=0))[0][0])
        r = int(np.nonzero(mask[:, c])[0][0])
        if r:
            S[:, [0, r]] = S[:, [r, 0]]
        if c:
            S[:, :, [0, c]] = S[:, :, [c, 0]]
        colidx[0], colidx[c] = colidx[c], colidx[0]
        pivot = S[:_n_listing(nz, dmin), 0, 0].copy()
        urow = np.zeros((S.shape[0], C), dtype=np.int64)
        urow[:, colidx] = S[:, 0, :]
        upper.append((colidx[0], urow, DS, pivot, int(dmin)))
        Rr, Cc = S.shape[1] - 1, S.shape[2] - 1
        if Rr == 0 or Cc == 0:
            prev, Dprev = pivot, int(dmin)
            colidx = colidx[1:]
            break
        Dout = 2 * DS
        n_out = _n_listing(nz, Dout)
        blk = S[:, 1:, 1:].reshape(S.shape[0], -1)
        N = _pad(F.vmatmul(_conv_matrix(nz, pivot, int(dmin), DS), blk), n_out)
        col = S[:, 1:, 0]
        row = S[:, 0, 1:]
        N = N.reshape(n_out, Rr, Cc)
        for i in range(Rr):
            if col[:, i].any():
                N[:, i, :] = F.vsub(N[:, i, :],
                                    F.vmatmul(_conv_matrix(nz, col[:, i], DS, DS), row))
        N = N.reshape(n_out, -1)
        if Dprev or len(upper) > 1:
            N, Dq = _dense_divide(F, nz, N, Dout, prev, Dprev)
        else:
            Dq = Dout
        S, DS = _trim(nz, N.reshape(-1, Rr, Cc), Dq)
        prev, Dprev = pivot, int(dmin)
        colidx = colidx[1:]
        if not colidx:
            break

    pivot_cols = {c for _, c in unit} | {u[0] for u in upper}
    free = [c for c in range(C) if c not in pivot_cols]
    if not free:
        return None
    f = free[0]
    X = np.zeros((len(prev), C), dtype=np.int64)
    X[:, f] = prev
    DX = Dprev
    for pc, urow, DU, pv, Dpv in reversed(upper):
        prod = F.vmul(urow[:, None, :], X[None, :, :])
        prod[:, :, pc] = 0
        num, Dn = _grouped_poly_sum(F, nz, prod, DU, DX)
        if not num.any():
            continue
        q, Dq = _dense_divide(F, nz, F.vneg(num)[:, None], Dn, pv, Dpv)
        q, Dq = _trim(nz, q, Dq)
        if q is None:
            continue
        if Dq > DX:
            X, DX = _pad(X, len(q)), Dq
        X[:len(q), pc] = q[:, 0]
    X = {e: X[i] for i, e in enumerate(_listing(nz, DX)) if X[i].any()}

    if unit:
        urows = np.array([r for r, _ in unit])
        ucols = np.array([c for _, c in unit])
        mask = np.ones(C, dtype=bool)
        mask[ucols] = False
        acc = {}
        for eu, a in L.items():
            blk = a[urows][:, mask]
            if not blk.any():
                continue
            for ex, x in X.items():
                xv = x[mask]
                if not xv.any():
                    continue
                val = F.vsum(F.vmul(blk, xv[None, :]), axis=1)
                if val.any():
                    _acc(F, acc, _eadd(eu, ex), val)
        for e, val in acc.items():
            if e not in X:
                X[e] = np.zeros(C, dtype=np.int64)
            X[e][ucols] = F.vneg(val)

    X = _prune(X)
    vec = [_layers_to_poly(F, nz, X, j) for j in range(C)]
    zdeg = max((v.total_degree() for v in vec if v), default=0)
    return NullspaceResult(vec, int(zdeg), len(unit), len(upper))
