"""Parameter selection for the interpolation step and the agreement
threshold that guarantees a message is captured."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ..errors import RegimeError

DEFAULT_CAP = 100_000


@dataclass(frozen=True)
class DecodeConfig:
    m: int
    n: int
    s: int
    r: int
    k: int
    d: int
    t_min: int
    # the radius as stated in closed form, as a count of agreeing blocks
    stated_agreement: int
    d_unclamped: int
    d_closed_form: int | None = None
    cap: int = DEFAULT_CAP

    @property
    def n_constraints(self):
        return self.n ** self.m * math.comb(self.m + self.s - self.r, self.m)

    @property
    def n_unknowns(self):
        return (math.comb(self.m + self.d + self.k - 1, self.m)
                + self.r * math.comb(self.m + self.d, self.m))

    def describe(self):
        line = f"r={self.r} d={self.d} T_min={self.t_min} stated={self.stated_agreement}"
        if self.d_closed_form is not None:
            line += f" d_closed_form={self.d_closed_form}"
        return line


def _check(n, s, r, k):
    if not 1 <= r <= s:
        raise RegimeError(f"1 <= r <= s required (r={r}, s={s})")
    if not 1 <= k <= s * n:
        raise RegimeError(f"1 <= k <= s|A| required (k={k}, s|A|={s * n})")


def _check_tower(F, d, k):
    if F is not None and d + k - 1 >= F.bracket3:
        raise RegimeError(f"d + k - 1 < [3]_q required (d+k-1={d + k - 1}, [3]_q={F.bracket3})")


def choose_config_uni(n, s, r, k, F=None, cap=DEFAULT_CAP):
    _check(n, s, r, k)
    num = n * (s - r + 1) - (r + k) + 1
    d_raw = -((-num) // (r + 1))
    d = max(1, d_raw)
    _check_tower(F, d, k)
    t_min = (d + k - 1) // (s - r + 1) + 1
    stated = math.ceil(Fraction(n, r + 1) + Fraction(k, s - r + 1))
    return DecodeConfig(1, n, s, r, k, d, t_min, stated, d_raw, None, cap)


def choose_config_multi(m, n, s, r, k, F=None, cap=DEFAULT_CAP):
    _check(n, s, r, k)
    target = n ** m * math.comb(m + s - r, m)
    d = 1
    while math.comb(m + d + k - 1, m) + r * math.comb(m + d, m) <= target:
        d += 1
    _check_tower(F, d, k)
    block = n ** (m - 1)
    t_min = (d + k - 1) * block // (s - r + 1) + 1
    closed = _ceil_over_root(5 * (s - r + 1) * n, r + 1, m)
    # the closed-form agreement bound, read with |A|^(m-1) throughout
    stated = _ceil_over_root(5 * block, r + 1, m, Fraction(k, s - r + 1))
    return DecodeConfig(m, n, s, r, k, d, t_min, stated, d, closed, cap)


def _ceil_over_root(c, base, m, offset=Fraction(0)):
    """Least integer t with t - offset >= c / base^(1/m), decided exactly."""
    t = math.floor(c / base ** (1 / m) + offset) - 2
    while t < offset or (t - offset) ** m * base < Fraction(c) ** m:
        t += 1
    return t


def choose_config(params, r, cap=DEFAULT_CAP):
    if params.m == 1:
        return choose_config_uni(params.n, params.s, r, params.k, params.tower, cap)
    return choose_config_multi(params.m, params.n, params.s, r, params.k, params.tower, cap)
