"""Interpolating polynomials P = P~(X) + sum_g C_g(X) Y_g, the Delta
operators on them, and the interpolation step of both decoders.

Coefficients of P may themselves depend on auxiliary variables Z_1..Z_nz
(nz = 0 for the univariate decoder, nz = m for the multivariate one); such
coefficients are stored as polynomials in m + nz variables, X first.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import SolverError
from ..linsys import PolyZMatrix, nullspace_k, nullspace_polyz
from ..poly import MultiPoly, exps_below, exps_leq, exps_of_weight
from ..qcalc import derivative_matrix, q_binom_multi, q_derive_multi


def scale_x(C, m, beta):
    """C(Q^beta X, Z) for a polynomial whose first m variables are X."""
    if not any(beta):
        return C
    F = C.F
    out = {}
    for ex, c in C.terms.items():
        t = sum(b * e for b, e in zip(beta, ex[:m]))
        out[ex] = F.mul(c, F.q_power(t))
    return MultiPoly._raw(F, C.m, out)


@dataclass
class InterpPoly:
    m: int
    nz: int
    s: int
    tilde: MultiPoly
    ycoef: dict
    parts: list | None = None
    r: int | None = None
    d: int | None = None
    k: int | None = None
    info: dict = field(default_factory=dict)

    @property
    def arity(self):
        return self.m + self.nz

    def is_zero(self):
        return self.tilde.is_zero() and not any(self.ycoef.values())

    def y_window(self):
        """Largest |g| + 1 over Y_g with a nonzero coefficient (0 if none)."""
        return max((sum(g) + 1 for g, c in self.ycoef.items() if c), default=0)

    def z_degree(self):
        """Total degree in Z of the whole polynomial, gluing monomials included."""
        m = self.m
        best = 0
        for poly in [self.tilde, *self.ycoef.values()]:
            for ex in poly.terms:
                best = max(best, sum(ex[m:]))
        return best

    def substitute(self, f):
        """P^[f]: replace every Y_g by D^g f."""
        if f.m != self.m:
            raise ValueError("message arity mismatch")
        fp = f.pad(self.nz)
        out = self.tilde
        for g, C in self.ycoef.items():
            if C:
                out = out + C * q_derive_multi(fp, g)
        return out

    def evaluate(self, a, w_block, exps):
        """P(a, w) as a polynomial in Z; w_block is indexed like ``exps``."""
        pos = {g: i for i, g in enumerate(exps)}
        out = self.tilde.eval_prefix(a)
        for g, C in self.ycoef.items():
            if C and g in pos:
                v = int(w_block[pos[g]])
                if v:
                    out = out + C.eval_prefix(a).scale(v)
        return out


def delta_uni(P):
    """D_Q P~ + sum_j (D_Q P_j Y_j + P_j(QX) Y_(j+1)), with Y_s = 0."""
    if P.m != 1:
        raise ValueError("delta_uni needs m = 1")
    before = P.y_window()
    ycoef = {}

    def put(g, C):
        if g[0] >= P.s or not C:
            return
        ycoef[g] = ycoef[g] + C if g in ycoef else C

    for (j,), C in P.ycoef.items():
        put((j,), q_derive_multi(C, (1,)))
        put((j + 1,), scale_x(C, 1, (1,)))
    ycoef = {g: c for g, c in ycoef.items() if c}
    out = InterpPoly(1, P.nz, P.s, q_derive_multi(P.tilde, (1,)), ycoef)
    if out.y_window() > before + 1:
        raise SolverError("Delta widened the Y window by more than one")
    return out


def delta_multi(P, alpha):
    """sum over beta <= alpha of qbinom(alpha, beta) (D^(alpha-beta) C_g)(Q^beta X)
    Y_(beta+g), with Y_g = 0 for |g| >= s, plus D^alpha P~."""
    alpha = tuple(alpha)
    if len(alpha) != P.m:
        raise ValueError("alpha arity mismatch")
    F = P.tilde.F
    before = P.y_window()
    ycoef = {}
    betas = exps_leq(alpha)
    for g, C in P.ycoef.items():
        if not C:
            continue
        for beta in betas:
            eta = tuple(b + x for b, x in zip(beta, g))
            if sum(eta) >= P.s:
                continue
            rest = tuple(a - b for a, b in zip(alpha, beta))
            term = scale_x(q_derive_multi(C, rest), P.m, beta)
            c = q_binom_multi(F, alpha, beta)
            if c != 1:
                term = term.scale(c)
            if term:
                ycoef[eta] = ycoef[eta] + term if eta in ycoef else term
    ycoef = {g: c for g, c in ycoef.items() if c}
    out = InterpPoly(P.m, P.nz, P.s, q_derive_multi(P.tilde, alpha), ycoef)
    if before and out.y_window() > before + sum(alpha):
        raise SolverError("Delta widened the Y window beyond |alpha|")
    return out


# --- interpolation ---------------------------------------------------------

def _layout(m, d, k, r):
    tilde_exps = exps_below(m, d + k)
    part_exps = exps_below(m, d + 1)
    return tilde_exps, part_exps


def constraint_matrix(w, params, config, glued):
    """Layered constraint matrix for the unknown coefficients of P.

    Columns: coefficients of P~ (|mu| <= d+k-1) then of P_0..P_(r-1)
    (|mu| <= d).  Rows: (grid point a, alpha) with |alpha| <= s - r.  The
    entry for X^mu in P_j at row (a, alpha) is
        sum_{|g|=j} Z^g sum_{beta<=alpha} qbinom(alpha,beta)
            falling(mu, alpha-beta) (Q^beta a)^(mu-alpha+beta) w_a[beta+g].
    """
    F = params.tower
    m, s = params.m, params.s
    r, d, k = config.r, config.d, config.k
    nz = m if glued else 0
    tilde_exps, part_exps = _layout(m, d, k, r)
    nt, npart = len(tilde_exps), len(part_exps)
    cols = nt + r * npart
    alphas = exps_below(m, s - r + 1)
    pos = {g: i for i, g in enumerate(params.exps)}
    rows = len(params.grid) * len(alphas)
    zero_e = (0,) * nz
    layers = {zero_e: np.zeros((rows, cols), dtype=np.int64)}
    data = w.data
    row = 0
    for ai, a in enumerate(params.grid):
        block = data[ai]
        for alpha in alphas:
            layers[zero_e][row, :nt] = derivative_matrix(F, tilde_exps, [alpha], a)[0]
            betas = exps_leq(alpha)
            vecs = []
            for beta in betas:
                pt = tuple(F.mul(F.q_power(b), x) for b, x in zip(beta, a))
                rest = tuple(x - b for x, b in zip(alpha, beta))
                v = derivative_matrix(F, part_exps, [rest], pt)[0]
                c = q_binom_multi(F, alpha, beta)
                vecs.append(F.vmul(v, c))
            for j in range(r):
                off = nt + j * npart
                for g in exps_of_weight(m, j):
                    acc = np.zeros(npart, dtype=np.int64)
                    for beta, v in zip(betas, vecs):
                        eta = tuple(b + x for b, x in zip(beta, g))
                        if sum(eta) >= s:
                            continue
                        wv = int(block[pos[eta]])
                        if wv:
                            acc = F.vadd(acc, F.vmul(v, wv))
                    ze = g if glued else ()
                    if ze not in layers:
                        layers[ze] = np.zeros((rows, cols), dtype=np.int64)
                    L = layers[ze]
                    L[row, off:off + npart] = F.vadd(L[row, off:off + npart], acc)
            row += 1
    return PolyZMatrix(F, nz, (rows, cols), layers)


def _assemble(F, m, nz, s, config, vec, glued):
    """Turn a kernel vector (entries: polynomials in Z) into an InterpPoly."""
    r, d, k = config.r, config.d, config.k
    tilde_exps, part_exps = _layout(m, d, k, r)

    def build(exps, entries):
        terms = {}
        for mu, ent in zip(exps, entries):
            for ez, c in ent.terms.items():
                terms[mu + ez] = c
        return MultiPoly(F, m + nz, terms)

    nt, npart = len(tilde_exps), len(part_exps)
    tilde = build(tilde_exps, vec[:nt])
    parts = [build(part_exps, vec[nt + j * npart: nt + (j + 1) * npart]) for j in range(r)]
    ycoef = {}
    for j, Pj in enumerate(parts):
        if not Pj:
            continue
        for g in exps_of_weight(m, j):
            key = g
            if glued:
                ycoef[key] = Pj.shift((0,) * m + g)
            else:
                ycoef[key] = Pj
    return InterpPoly(m, nz, s, tilde, ycoef, parts, r, d, k)


def interpolate(w, params, config, glued):
    F = params.tower
    if w.code != "qmult":
        raise ValueError("interpolation expects derivative (qmult) blocks")
    M = constraint_matrix(w, params, config, glued)
    m = params.m
    if not glued:
        arr = M.layers.get((), np.zeros(M.shape, dtype=np.int64))
        v = nullspace_k(F, arr)
        if v is None:
            raise SolverError("interpolation system has only the zero solution")
        vec = [MultiPoly.constant(F, 0, int(x)) for x in v]
        P = _assemble(F, m, 0, params.s, config, vec, False)
        P.info["coefficient_z_degree"] = 0
    else:
        res = nullspace_polyz(M)
        if res is None:
            raise SolverError("interpolation system has only the zero solution")
        P = _assemble(F, m, m, params.s, config, res.vector, True)
        P.info["coefficient_z_degree"] = res.z_degree
        P.info["unit_pivots"] = res.unit_pivots
        P.info["fraction_free_pivots"] = res.fraction_free_pivots
    P.info["z_degree"] = P.z_degree()
    P.info["rows"], P.info["cols"] = M.shape
    if P.is_zero():
        raise SolverError("interpolation returned the zero polynomial")
    return P


def interpolate_uni(w, params, config):
    if params.m != 1:
        raise ValueError("interpolate_uni needs m = 1")
    return interpolate(w, params, config, glued=False)


def interpolate_multi(w, params, config):
    return interpolate(w, params, config, glued=True)


def interpolation_residuals(P, w, params, config):
    """(Delta^(alpha) P)(a, w_a) for every a and |alpha| <= s - r, computed
    through the Delta operators; every entry must be the zero polynomial."""
    out = {}
    alphas = exps_below(params.m, params.s - config.r + 1)
    for alpha in alphas:
        if P.m == 1 and P.nz == 0:
            D = P
            for _ in range(alpha[0]):
                D = delta_uni(D)
        else:
            D = delta_multi(P, alpha)
        for ai, a in enumerate(params.grid):
            out[(a, alpha)] = D.evaluate(a, w.data[ai], params.exps)
    return out
