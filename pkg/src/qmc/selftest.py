"""Quick invariant checks across all modules, for `qmc selftest`."""
from __future__ import annotations

import random

import numpy as np

from .codes import (CodeParams, basis_change, dimension, encode_frm, encode_qmult,
                    read_codeword, write_codeword)
from .decode import choose_config, interpolation_residuals, list_decode
from .gf import build_tower, parse_header
from .linsys import PolyZMatrix, nullspace_k, nullspace_polyz
from .poly import MultiPoly, from_text, random_poly, to_text
from .qcalc import (derivative_at, nu_xi, q_binom, q_binom_pascal, q_derive_multi,
                    q_taylor_coeffs, q_taylor_reconstruct)
from .qmult import grid_multiplicity_report, grobner_generators


def _tower_checks():
    F = build_tower(2, 2)
    G = build_tower(13)
    return (F.header() == "QMC1 p=2 e=2 fqmod=1,1,1 kmod=2,0,0,1 Q=5"
            and G.header() == "QMC1 p=13 e=1 fqmod=0,1 kmod=2,0,0,1 Q=15"
            and parse_header(G.header()) is G
            and all(F.mul(a, F.inv(a)) == 1 for a in range(1, F.size)))


def _poly_checks():
    F = build_tower(13)
    rng = random.Random(1)
    for _ in range(10):
        f = random_poly(F, 2, 5, rng)
        if from_text(F, to_text(f)) != f:
            return False
    return True


def _qcalc_checks():
    F = build_tower(13)
    rng = random.Random(2)
    if any(q_binom(F, n, k) != q_binom_pascal(F, n, k) for n in range(9) for k in range(n + 1)):
        return False
    for _ in range(10):
        f = random_poly(F, 2, 6, rng)
        beta = (rng.randrange(5), rng.randrange(5))
        if q_taylor_reconstruct(F, q_taylor_coeffs(f, beta), beta) != f:
            return False
        a = (rng.randrange(1, F.size), rng.randrange(1, F.size))
        nu, _ = nu_xi(F, a, 4)
        evals = [f.eval(tuple(F.mul(F.q_power(g), x) for g, x in zip(gam, a))) for gam in nu.exps]
        if nu.apply(F, evals) != [derivative_at(f, gam, a) for gam in nu.exps]:
            return False
        if q_derive_multi(q_derive_multi(f, (1, 0)), (0, 1)) != q_derive_multi(f, (1, 1)):
            return False
    return True


def _qmult_checks():
    F = build_tower(2, 2)
    for gen in grobner_generators(F, [1, 2, 3], 2, 2):
        if min(grid_multiplicity_report(gen, [1, 2, 3], 2).values.values()) < 2:
            return False
    f = random_poly(F, 2, 5, 7)
    return grid_multiplicity_report(f, [1, 2, 3], 2).total_ok()


def _codes_checks():
    F = build_tower(13)
    P = CodeParams(F, 2, 3, 4, (1, 2, 3))
    f = random_poly(F, 2, 4, 3)
    cw = encode_qmult(f, P)
    return (basis_change(encode_frm(f, P), "nu") == cw
            and read_codeword(write_codeword(cw)) == cw
            and dimension(CodeParams(F, 2, 6, 4, (1, 2, 3, 4))) == 10)


def _linsys_checks():
    F = build_tower(13)
    v = nullspace_k(F, np.array([[1, 2, 3]]))
    Z = MultiPoly.var(F, 1, 0)
    res = nullspace_polyz(PolyZMatrix.from_entries(F, 1, [[Z, MultiPoly.constant(F, 1, F.neg(1))]]))
    return (F.sum(F.mul(a, int(b)) for a, b in zip([1, 2, 3], v)) == 0
            and res.vector == [MultiPoly.constant(F, 1, 1), Z])


def _decode_checks():
    F = build_tower(13)
    rng = random.Random(4)
    P = CodeParams(F, 1, 6, 12, tuple(range(1, 13)))
    f = random_poly(F, 1, 12, rng)
    w = encode_qmult(f, P)
    for i in rng.sample(range(12), 5):
        w.data[i] = [rng.randrange(F.size) for _ in range(6)]
    res = list_decode(w, P, 2, check_paths=True)
    if f not in res.messages() or not res.paths_agree:
        return False
    cfg = choose_config(P, 2)
    if not all(v.is_zero() for v in interpolation_residuals(res.interp, w, P, cfg).values()):
        return False
    P2 = CodeParams(F, 2, 3, 3, (1, 2, 3))
    g = random_poly(F, 2, 3, rng)
    res2 = list_decode(encode_qmult(g, P2), P2, 2, check_paths=True)
    return g in res2.messages() and res2.paths_agree


CHECKS = [
    ("gf", _tower_checks),
    ("poly", _poly_checks),
    ("qcalc", _qcalc_checks),
    ("qmult", _qmult_checks),
    ("codes", _codes_checks),
    ("linsys", _linsys_checks),
    ("decode", _decode_checks),
]


def run_all(report=print):
    ok = True
    for name, fn in CHECKS:
        try:
            passed = bool(fn())
        except Exception as exc:  # a crash is reported as a failed check
            passed = False
            report(f"{name}: error {exc!r}")
        report(f"{name}: {'pass' if passed else 'FAIL'}")
        ok &= passed
    return ok
