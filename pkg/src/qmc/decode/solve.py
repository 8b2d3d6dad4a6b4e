"""Recovering every message f with P^[f] = 0 as an affine space.

Work in the Newton basis (X - Q^beta)_Q^(delta) / [delta]_Q! around a centre
Q^beta where the top nonzero P_(r'-1) does not vanish at any Q^(alpha+beta).
The Newton coefficients f_delta = D^delta f(Q^beta) of weight <= r'-2 are free
parameters; every other one is an affine function of them, produced one
weight at a time from

    P_(r'-1)(Q^(alpha+beta)) * sum_{|g| = r'-1} f_(alpha+g) Z^g = -(rest),

where the right side collects P~ and all lower-order contributions.  Each
Z-monomial of that identity is one scalar equation: the ones indexed by
lead(c) + g determine the new coefficients, the others become constraints on
the parameters.  Without Z (univariate decoder) there is a single equation
per alpha.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import RegimeError, SolverError
from ..linsys import rank, solve_affine
from ..poly import MultiPoly, exps_below, exps_leq, exps_of_weight, grlex_key
from ..qcalc import derivative_matrix, q_binom_multi, q_taylor_reconstruct


@dataclass
class AffineSpace:
    """base + span(basis) of polynomials in m variables; empty when base is None."""
    m: int
    base: MultiPoly | None
    basis: list = field(default_factory=list)

    @property
    def dim(self):
        return len(self.basis) if self.base is not None else -1

    @property
    def is_empty(self):
        return self.base is None

    def member(self, coeffs):
        f = self.base
        for c, b in zip(coeffs, self.basis):
            f = f + b.scale(c)
        return f

    def contains(self, f, k):
        """Membership via linear algebra on coefficients of weight < k."""
        if self.base is None:
            return False
        F = f.F
        exps = exps_below(self.m, k)
        if f.total_degree() >= k:
            return False
        target = np.array([F.sub(f.coeff(e), self.base.coeff(e)) for e in exps], dtype=np.int64)
        if not self.basis:
            return not target.any()
        A = np.array([[b.coeff(e) for b in self.basis] for e in exps], dtype=np.int64)
        return solve_affine(F, A, target) is not None


class _ZIndex:
    """Compact index for the Z-monomials that can occur."""

    def __init__(self, mons):
        self.mons = sorted(set(mons), key=grlex_key)
        self.pos = {e: i for i, e in enumerate(self.mons)}

    def __len__(self):
        return len(self.mons)


def _split(poly, m):
    """{X-exponent: {Z-exponent: coeff}} for a polynomial in X then Z."""
    out = {}
    for ex, c in poly.terms.items():
        out.setdefault(ex[:m], {})[ex[m:]] = c
    return out


class _Part:
    """One coefficient polynomial (P~ or some P_j) as a dense matrix:
    rows = its X-monomials, columns = the shared coefficient Z-index."""

    def __init__(self, poly, m, zidx):
        split = _split(poly, m)
        self.xexps = sorted(split, key=grlex_key)
        self.coef = np.zeros((len(self.xexps), len(zidx)), dtype=np.int64)
        for i, x in enumerate(self.xexps):
            for ez, c in split[x].items():
                self.coef[i, zidx.pos[ez]] = c
        self.deg = max((sum(x) for x in self.xexps), default=-1)

    def taylor(self, F, rhos, centre):
        """rows: D^rho (this)(centre) as vectors over the Z-index."""
        if not self.xexps:
            return np.zeros((len(rhos), self.coef.shape[1]), dtype=np.int64)
        M = derivative_matrix(F, self.xexps, rhos, centre)
        return F.vmatmul(M, self.coef)


def _glue(g, glued):
    return g if glued else ()


def _find_centre(F, top, m, reach, limit=20000):
    """First beta (graded-lex) with top(Q^(alpha+beta)) != 0 for all |alpha| <= reach."""
    alphas = np.array(exps_below(m, reach + 1), dtype=np.int64).reshape(-1, m)
    tried = 0
    w = 0
    while True:
        for beta in exps_of_weight(m, w):
            if any(b >= F.order for b in beta):
                continue
            tried += 1
            pts = F._np_exp[(alphas + np.array(beta)) % F.order]
            vals = F.vmatmul(_power_matrix(F, pts, top.xexps), top.coef)
            if (vals != 0).any(axis=1).all():
                return beta
            if tried >= limit:
                raise RegimeError("no valid centre found for the Newton expansion")
        w += 1
        if w > m * (F.order - 1):
            raise RegimeError("no valid centre found for the Newton expansion")


def _power_matrix(F, pts, xexps):
    """E[i, j] = pts[i] ** xexps[j] for nonzero points."""
    ex = np.array(xexps, dtype=np.int64).reshape(-1, pts.shape[1])
    lg = F._np_log[pts]
    return F._np_exp[(lg @ ex.T) % F.order]


@dataclass
class SolveReport:
    space: AffineSpace
    r_eff: int
    centre: tuple
    n_params: int
    n_constraints: int
    paths_agree: bool | None = None
    hitting_set_size: int | None = None


def solve(P, params, config, glued, check_paths=False):
    F = params.tower
    m, k = params.m, config.k
    d = config.d
    if P.parts is None:
        raise ValueError("solve needs the structured form produced by interpolation")
    rp = 0
    for j, Pj in enumerate(P.parts):
        if Pj:
            rp = j + 1
    if rp == 0:
        if P.tilde.is_zero():
            raise SolverError("the interpolating polynomial is zero")
        return SolveReport(AffineSpace(m, None), 0, (), 0, 0, True if check_paths else None)

    nz = m if glued else 0
    reach = d + k - 1
    coeff_mons = set()
    for poly in [P.tilde, *P.parts[:rp]]:
        for ex in poly.terms:
            coeff_mons.add(ex[m:])
    if not coeff_mons:
        coeff_mons.add((0,) * nz)
    pidx = _ZIndex(coeff_mons)
    glues = {_glue(g, glued) for j in range(rp) for g in exps_of_weight(m, j)}
    zidx = _ZIndex(tuple(x + y for x, y in zip(e, g)) for e in pidx.mons for g in glues)
    shift = {g: np.array([zidx.pos[tuple(x + y for x, y in zip(e, g))] for e in pidx.mons])
             for g in glues}

    tilde = _Part(P.tilde, m, pidx)
    parts = [_Part(Pj, m, pidx) for Pj in P.parts[:rp]]
    top = parts[rp - 1]
    beta = _find_centre(F, top, m, reach)

    centres = exps_below(m, reach + 1)
    qb = [F.q_power(b) for b in beta]
    tay_tilde = tilde.taylor(F, centres, tuple(qb))
    tay_tilde = {a: tay_tilde[i] for i, a in enumerate(centres)}
    tay = []
    for part in parts:
        rhos = exps_below(m, max(part.deg, 0) + 1)
        rpos = {rh: i for i, rh in enumerate(rhos)}
        table = {}
        for th in centres:
            pt = tuple(F.mul(F.q_power(t), x) for t, x in zip(th, qb))
            table[th] = part.taylor(F, rhos, pt)
        tay.append((rpos, table))

    free = exps_below(m, rp - 1)
    npar = len(free)
    width = npar + 1
    forms = {}
    constraints = []
    for i, delta in enumerate(free):
        v = np.zeros(width, dtype=np.int64)
        v[i + 1] = 1
        forms[delta] = v
        if sum(delta) >= k:
            constraints.append(v.copy())
    zero = np.zeros(width, dtype=np.int64)

    def get(delta):
        if delta in forms:
            return forms[delta]
        if sum(delta) >= k:
            return zero
        raise SolverError(f"Newton coefficient {delta} used before it is determined")

    unknown_g = sorted(exps_of_weight(m, rp - 1), key=grlex_key, reverse=True)
    nZ = len(zidx)
    for alpha in centres:
        rhs = np.zeros((nZ, width), dtype=np.int64)
        rhs[shift[(0,) * nz], 0] = tay_tilde[alpha]
        for j in range(rp):
            rpos, table = tay[j]
            for th in exps_leq(alpha):
                if j == rp - 1 and th == alpha:
                    continue
                rho = tuple(a - t for a, t in zip(alpha, th))
                if rho not in rpos:
                    continue
                vec = table[th][rpos[rho]]
                if not vec.any():
                    continue
                c = q_binom_multi(F, alpha, th)
                if c != 1:
                    vec = F.vmul(vec, c)
                for g in exps_of_weight(m, j):
                    form = get(tuple(x + y for x, y in zip(th, g)))
                    if not form.any():
                        continue
                    idx = shift[_glue(g, glued)]
                    rhs[idx] = F.vadd(rhs[idx], F.vmul(vec[:, None], form[None, :]))
        rpos, table = tay[rp - 1]
        cvec = table[alpha][rpos[(0,) * m]]
        nzc = np.nonzero(cvec)[0]
        if len(nzc) == 0:
            raise SolverError("leading coefficient vanished at a checked centre point")
        lead = pidx.mons[int(nzc[-1])]
        inv_lc = F.inv(int(cvec[nzc[-1]]))
        xs = {}
        for g in unknown_g:
            delta = tuple(a + x for a, x in zip(alpha, g))
            if delta in forms or sum(delta) >= k:
                xs[g] = get(delta)
                continue
            mu = tuple(x + y for x, y in zip(lead, _glue(g, glued)))
            acc = F.vneg(rhs[zidx.pos[mu]])
            for g2, x2 in xs.items():
                e = tuple(a - b for a, b in zip(mu, _glue(g2, glued)))
                if e in pidx.pos and cvec[pidx.pos[e]]:
                    acc = F.vsub(acc, F.vmul(x2, int(cvec[pidx.pos[e]])))
            x = F.vmul(acc, inv_lc)
            xs[g] = x
            forms[delta] = x
        full = rhs
        for g, x in xs.items():
            if x.any():
                idx = shift[_glue(g, glued)]
                full[idx] = F.vadd(full[idx], F.vmul(cvec[:, None], x[None, :]))
        for row in full:
            if row.any():
                constraints.append(row)

    if constraints:
        C = np.array(constraints, dtype=np.int64)
        sol = solve_affine(F, C[:, 1:], F.vneg(C[:, 0]))
    else:
        sol = (np.zeros(npar, dtype=np.int64),
               [np.eye(1, npar, i, dtype=np.int64)[0] for i in range(npar)])
    report = SolveReport(None, rp, beta, npar, len(constraints))
    if sol is None:
        report.space = AffineSpace(m, None)
        report.paths_agree = True if check_paths else None
        return report
    t0, tbasis = sol
    low = [dl for dl in forms if sum(dl) < k]

    def newton(t, with_const):
        out = {}
        for dl in low:
            form = forms[dl]
            v = int(F.vsum(F.vmul(form[1:], t))) if npar else 0
            if with_const:
                v = F.add(v, int(form[0]))
            if v:
                out[dl] = v
        return out

    base = q_taylor_reconstruct(F, newton(t0, True), beta)
    basis = [q_taylor_reconstruct(F, newton(tb, False), beta) for tb in tbasis]
    report.space = AffineSpace(m, base, basis)

    if check_paths:
        agree = True
        ts = [t0] + [F.vadd(t0, tb) for tb in tbasis]
        hs = _HittingSet(F, P, parts, tilde, tay, tay_tilde, pidx, zidx, m, rp, k, glued)
        report.hitting_set_size = hs.size
        for t in ts:
            vals = hs.run(centres, free, t)
            if vals is None or any(vals.get(dl, 0) != v for dl, v in _full_newton(forms, t, low, F).items()):
                agree = False
                break
            for dl, v in vals.items():
                if sum(dl) < k and v != _value(forms[dl], t, F):
                    agree = False
        report.paths_agree = agree
    return report


def _value(form, t, F):
    v = int(form[0])
    if len(form) > 1:
        v = F.add(v, int(F.vsum(F.vmul(form[1:], t))))
    return v


def _full_newton(forms, t, low, F):
    return {dl: _value(forms[dl], t, F) for dl in low}


class _HittingSet:
    """Replays the recursion with concrete parameter values, recovering each
    new batch of Newton coefficients by evaluating the Z-identity at points of
    a grid S^nz, |S| = (largest Z-degree occurring) + 1."""

    def __init__(self, F, P, parts, tilde, tay, tay_tilde, pidx, zidx, m, rp, k, glued):
        self.F, self.m, self.rp, self.k, self.glued = F, m, rp, k, glued
        self.tay, self.tay_tilde = tay, tay_tilde
        self.pidx = pidx
        self.nz = m if glued else 0
        top = max((sum(e) for e in zidx.mons), default=0)
        self.size = top + 1
        if self.size > F.size:
            raise SolverError("Z-degree too large for a hitting set inside K")
        self.S = list(range(self.size))
        self._cache = {}

    def _point(self, z):
        """Values of the coefficient Z-monomials at z."""
        if z in self._cache:
            return self._cache[z]
        F = self.F
        vals = np.array([_mono(F, e, z) for e in self.pidx.mons], dtype=np.int64)
        self._cache[z] = vals
        return vals

    def _dot(self, vec, zp):
        return int(self.F.vsum(self.F.vmul(vec, zp)))

    def run(self, centres, free, t):
        F, m, rp, k = self.F, self.m, self.rp, self.k
        vals = {dl: int(t[i]) for i, dl in enumerate(free)}
        for dl in free:
            if sum(dl) >= k and vals[dl]:
                return None
        gs = exps_of_weight(m, rp - 1)
        points = list(itertools.product(self.S, repeat=self.nz))

        def get(dl):
            if dl in vals:
                return vals[dl]
            if sum(dl) >= k:
                return 0
            raise SolverError("hitting-set replay used an undetermined coefficient")

        for alpha in centres:
            rows, rhs = [], []
            for z in points:
                zp = self._point(z)
                total = self._dot(self.tay_tilde[alpha], zp)
                for j in range(rp):
                    rpos, table = self.tay[j]
                    for th in exps_leq(alpha):
                        if j == rp - 1 and th == alpha:
                            continue
                        rho = tuple(a - b for a, b in zip(alpha, th))
                        if rho not in rpos:
                            continue
                        cz = self._dot(table[th][rpos[rho]], zp)
                        if not cz:
                            continue
                        cz = F.mul(cz, q_binom_multi(F, alpha, th))
                        for g in exps_of_weight(m, j):
                            fv = get(tuple(a + b for a, b in zip(th, g)))
                            if fv:
                                total = F.add(total, F.mul(cz, F.mul(fv, _mono(F, _glue(g, self.glued), z))))
                rpos, table = self.tay[rp - 1]
                cz = self._dot(table[alpha][rpos[(0,) * m]], zp)
                rows.append([F.mul(cz, _mono(F, _glue(g, self.glued), z)) for g in gs])
                rhs.append(F.neg(total))
                if len(rows) >= len(gs) and rank(F, np.array(rows)) == len(gs):
                    break
            A = np.array(rows, dtype=np.int64)
            if rank(F, A) < len(gs):
                return None
            sol = solve_affine(F, A, np.array(rhs, dtype=np.int64))
            if sol is None or sol[1]:
                return None
            x = sol[0]
            for g, v in zip(gs, x):
                dl = tuple(a + b for a, b in zip(alpha, g))
                v = int(v)
                if dl in vals or sum(dl) >= k:
                    if get(dl) != v:
                        return None
                else:
                    vals[dl] = v
        return vals


def _mono(F, e, z):
    v = 1
    for x, y in zip(e, z):
        if x:
            v = F.mul(v, F.pow(y, x))
    return v


def solve_uni(P, params, config, check_paths=False):
    if params.m != 1:
        raise ValueError("solve_uni needs m = 1")
    return solve(P, params, config, glued=False, check_paths=check_paths)


def solve_multi(P, params, config, check_paths=False):
    return solve(P, params, config, glued=True, check_paths=check_paths)


def dim_bound(m, r_eff):
    return math.comb(m + r_eff - 2, m) if r_eff >= 2 else 0
