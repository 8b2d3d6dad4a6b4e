"""Q-multiplicity codes and folded Reed-Muller codes: parameters, encoders,
the per-block change of basis between them, and codeword files."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import FormatError, RegimeError
from .gf import parse_header
from .poly import eval_many, exps_below
from .qcalc import nu_xi, q_derive_multi

CODES = ("qmult", "frm")


@dataclass(frozen=True)
class CodeParams:
    tower: object
    m: int
    s: int
    k: int
    A: tuple

    def __post_init__(self):
        F = self.tower
        object.__setattr__(self, "A", tuple(int(a) for a in self.A))
        if self.m < 1:
            raise RegimeError("m >= 1 required")
        if self.s < 1:
            raise RegimeError("s >= 1 required")
        if self.s > F.q:
            raise RegimeError(f"s ≤ q required (s={self.s}, q={F.q})")
        if not self.A:
            raise RegimeError("A must be nonempty")
        if len(set(self.A)) != len(self.A):
            raise RegimeError("A must consist of distinct elements")
        if any(not 0 < a < F.q for a in self.A):
            raise RegimeError("A must consist of nonzero elements of F_q")
        if not 1 <= self.k <= self.s * len(self.A):
            raise RegimeError(f"1 <= k <= s|A| = {self.s * len(self.A)} required")
        if self.s * F.q - 1 >= F.bracket3:
            raise RegimeError("s*q - 1 < [3]_q required")
        pts = self.point_matrix().reshape(-1, self.m)
        if len({tuple(r) for r in pts.tolist()}) != len(pts):
            raise RegimeError("evaluation points Q^g a are not distinct")

    @property
    def n(self):
        return len(self.A)

    @property
    def N(self):
        return len(self.A) ** self.m

    @property
    def block_size(self):
        return math.comb(self.m + self.s - 1, self.m)

    @property
    def exps(self):
        return exps_below(self.m, self.s)

    @property
    def grid(self):
        return list(itertools.product(self.A, repeat=self.m))

    def point_matrix(self):
        """(N, block_size, m) array of the points Q^g a."""
        F = self.tower
        grid = np.array(self.grid, dtype=np.int64).reshape(-1, self.m)
        ex = np.array(self.exps, dtype=np.int64).reshape(-1, self.m)
        qpow = F._np_exp[ex % F.order]
        return F.vmul(grid[:, None, :], qpow[None, :, :])

    def params_line(self, code=None):
        line = f"params m={self.m} s={self.s} k={self.k} A={','.join(map(str, self.A))}"
        return line + (f" code={code}" if code else "")


@dataclass
class Codeword:
    params: CodeParams
    data: np.ndarray
    code: str = "qmult"

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.int64)
        shape = (self.params.N, self.params.block_size)
        if self.data.shape != shape:
            raise ValueError(f"codeword shape {self.data.shape} != {shape}")

    def __eq__(self, other):
        return (isinstance(other, Codeword) and self.params == other.params
                and self.code == other.code and np.array_equal(self.data, other.data))

    def copy(self):
        return Codeword(self.params, self.data.copy(), self.code)


def _check_message(f, params):
    if f.m != params.m:
        raise ValueError(f"message has {f.m} variables, code has m={params.m}")
    if f.total_degree() >= params.k:
        raise ValueError(f"message degree {f.total_degree()} >= k={params.k}")


def encode_frm(f, params):
    """Block at a is [f(Q^g a)] over |g| < s."""
    _check_message(f, params)
    pts = params.point_matrix()
    vals = eval_many(f, pts.reshape(-1, params.m))
    return Codeword(params, vals.reshape(params.N, params.block_size), "frm")


def encode_qmult(f, params, check=False):
    """Block at a is [D^g f(a)] over |g| < s."""
    _check_message(f, params)
    grid = np.array(params.grid, dtype=np.int64)
    cols = [eval_many(q_derive_multi(f, g), grid) for g in params.exps]
    cw = Codeword(params, np.stack(cols, axis=1), "qmult")
    if check and basis_change(encode_frm(f, params), "nu") != cw:
        raise ArithmeticError("symbolic and change-of-basis encodings disagree")
    return cw


def encode(f, params, code="qmult"):
    if code == "qmult":
        return encode_qmult(f, params)
    if code == "frm":
        return encode_frm(f, params)
    raise ValueError(f"unknown code {code!r}")


def basis_change(cw, direction):
    """'nu' turns FRM blocks into Qmult blocks, 'xi' goes back."""
    if direction not in ("nu", "xi"):
        raise ValueError("direction must be 'nu' or 'xi'")
    P = cw.params
    F = P.tower
    out = np.empty_like(cw.data)
    for i, a in enumerate(P.grid):
        nu, xi = nu_xi(F, a, P.s)
        M = np.array((nu if direction == "nu" else xi).rows, dtype=np.int64)
        out[i] = F.vmatmul(M, cw.data[i][:, None])[:, 0]
    return Codeword(P, out, "qmult" if direction == "nu" else "frm")


def triangle_exps(params):
    """{a : |a| < k} intersected with sum floor(a_i/|A|) <= s - 1."""
    n = params.n
    return [a for a in exps_below(params.m, params.k)
            if sum(x // n for x in a) <= params.s - 1]


def dimension(params):
    return len(triangle_exps(params))


def dimension_closed_form(params):
    return math.comb(params.m + params.k - 1, params.m)


def rate(params):
    return Fraction(dimension(params), params.block_size * params.N)


def rate_closed_form(params):
    return Fraction(dimension_closed_form(params), params.block_size * params.N)


def distance_lb(params):
    return 1 - Fraction(params.k - 1, params.s * params.n)


def block_agreement(u, v):
    """Number of grid points where the blocks coincide."""
    a = u.data if isinstance(u, Codeword) else np.asarray(u)
    b = v.data if isinstance(v, Codeword) else np.asarray(v)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return int(np.all(a == b, axis=-1).sum())


def block_distance(u, v):
    agree = block_agreement(u, v)
    return Fraction(u.params.N - agree, u.params.N)


# --- files -----------------------------------------------------------------

def write_codeword(cw):
    lines = [cw.params.tower.header(), cw.params.params_line(cw.code)]
    for i, row in enumerate(cw.data.tolist()):
        lines.append(f"{i}: {','.join(map(str, row))}")
    return "\n".join(lines) + "\n"


def parse_params_line(F, line):
    parts = line.split()
    if not parts or parts[0] != "params":
        raise FormatError(f"expected a params line, got {line!r}")
    kv = {}
    for p in parts[1:]:
        if "=" not in p:
            raise FormatError(f"bad params token {p!r}")
        key, val = p.split("=", 1)
        kv[key] = val
    try:
        A = tuple(int(x) for x in kv["A"].split(","))
        params = CodeParams(F, int(kv["m"]), int(kv["s"]), int(kv["k"]), A)
    except (KeyError, ValueError) as exc:
        if isinstance(exc, RegimeError):
            raise
        raise FormatError(f"bad params line {line!r}") from exc
    code = kv.get("code", "qmult")
    if code not in CODES:
        raise FormatError(f"unknown code {code!r}")
    return params, code


def read_codeword(text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 2:
        raise FormatError("codeword file needs a header and a params line")
    F = parse_header(lines[0])
    params, code = parse_params_line(F, lines[1])
    body = lines[2:]
    if len(body) != params.N:
        raise FormatError(f"expected {params.N} blocks, found {len(body)}")
    data = np.zeros((params.N, params.block_size), dtype=np.int64)
    for i, ln in enumerate(body):
        try:
            idx, vals = ln.split(":", 1)
            row = [int(x) for x in vals.split(",")]
        except ValueError as exc:
            raise FormatError(f"bad block line {ln!r}") from exc
        if int(idx) != i:
            raise FormatError(f"block {i} out of order (found index {idx.strip()})")
        if len(row) != params.block_size:
            raise FormatError(f"block {i} has {len(row)} entries, need {params.block_size}")
        if any(not 0 <= x < F.size for x in row):
            raise FormatError(f"block {i} has an entry outside K")
        data[i] = row
    return Codeword(params, data, code)
