"""End-to-end list decoding and the decoder result file."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ..codes import basis_change, encode_qmult
from ..poly import to_text
from .config import DEFAULT_CAP, choose_config
from .interp import interpolate
from .solve import dim_bound, solve


@dataclass
class DecodeResult:
    params: object
    config: object
    space: object
    candidates: list | None
    z_degree: int
    r_eff: int
    centre: tuple
    paths_agree: bool | None
    interp: object

    @property
    def enumerated(self):
        return self.candidates is not None

    def messages(self):
        return [f for _, f in self.candidates or []]

    def to_text(self):
        P = self.params
        lines = [P.tower.header(), P.params_line(), f"config {self.config.describe()}"]
        sp = self.space
        lines.append(f"dim={sp.dim}")
        if not sp.is_empty:
            lines.append(f"base {to_text(sp.base)}")
            for b in sp.basis:
                lines.append(f"basis {to_text(b)}")
        if self.candidates is None:
            lines.append("candidates: not-enumerated")
        else:
            lines.append("candidates:")
            for agree, f in self.candidates:
                lines.append(f"agreement={agree} {to_text(f)}")
        return "\n".join(lines) + "\n"


def enumerate_space(space, params, w, t_min, cap):
    """All members agreeing with w on >= t_min blocks, or None past the cap.

    Members are encoded through linearity: encode base and each direction
    once, then form every combination blockwise."""
    F = params.tower
    if space.is_empty:
        return []
    dim = space.dim
    if F.size ** dim > cap:
        return None
    base_cw = encode_qmult(space.base, params).data
    dirs = [encode_qmult(b, params).data for b in space.basis]
    out = []
    scalars = np.arange(F.size, dtype=np.int64)
    if dim == 0:
        combos = [()]
    else:
        combos = itertools.product(range(F.size), repeat=dim - 1)
    for head in combos:
        acc = base_cw
        for c, dcw in zip(head, dirs[:-1]):
            acc = F.vadd(acc, F.vmul(dcw, c))
        if dim == 0:
            words = acc[None]
            coeff_rows = [()]
        else:
            words = F.vadd(acc[None], F.vmul(scalars[:, None, None], dirs[-1][None]))
            coeff_rows = [head + (int(c),) for c in scalars]
        agree = np.all(words == w.data[None], axis=2).sum(axis=1)
        for i in np.nonzero(agree >= t_min)[0]:
            out.append((int(agree[i]), space.member(coeff_rows[i])))
    out.sort(key=lambda t: (-t[0], to_text(t[1])))
    return out


def list_decode(w, params, r, cap=DEFAULT_CAP, check_paths=False):
    if w.code == "frm":
        w = basis_change(w, "nu")
    config = choose_config(params, r, cap)
    glued = params.m > 1
    P = interpolate(w, params, config, glued)
    rep = solve(P, params, config, glued, check_paths=check_paths)
    if rep.space.dim > dim_bound(params.m, rep.r_eff):
        raise AssertionError("solution space larger than the proven bound")
    cands = enumerate_space(rep.space, params, w, config.t_min, cap)
    return DecodeResult(params, config, rep.space, cands, P.info["z_degree"],
                        rep.r_eff, rep.centre, rep.paths_agree, P)
