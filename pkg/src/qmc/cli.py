"""qmc command line: params, encode, corrupt, decode, experiment, selftest."""
from __future__ import annotations

import argparse
import csv
import io
import random
import sys

from .codes import (CodeParams, block_agreement, dimension, dimension_closed_form,
                    distance_lb, encode, rate, rate_closed_form, read_codeword,
                    write_codeword)
from .decode import choose_config, list_decode
from .decode.config import DEFAULT_CAP
from .errors import FormatError, RegimeError
from .gf import build_tower, parse_header
from .poly import from_text, random_poly

EXIT_REGIME = 2
EXIT_FORMAT = 3


def _tower(args):
    try:
        return build_tower(args.p, args.e or 1)
    except ValueError as exc:
        raise RegimeError(str(exc)) from exc


def _A(args, F):
    if args.A:
        try:
            return tuple(int(x) for x in args.A.split(","))
        except ValueError as exc:
            raise FormatError(f"bad --A list {args.A!r}") from exc
    if args.A_size is None:
        raise RegimeError("one of --A or --A-size is required")
    if not 1 <= args.A_size <= F.q - 1:
        raise RegimeError(f"--A-size must lie in [1, q-1] = [1, {F.q - 1}]")
    return tuple(range(1, args.A_size + 1))


def _params(args, F=None):
    F = F or _tower(args)
    for name in ("m", "s", "k"):
        if getattr(args, name) is None:
            raise RegimeError(f"--{name} is required")
    return CodeParams(F, args.m, args.s, args.k, _A(args, F))


def _read(path):
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_params(args):
    P = _params(args)
    F = P.tower
    out = [
        F.header(),
        f"q={F.q} [3]_q={F.bracket3}",
        f"m={P.m} s={P.s} k={P.k} |A|={P.n} N={P.N} block_size={P.block_size}",
        f"dimension={dimension(P)} closed_form={dimension_closed_form(P)}",
        f"rate={rate(P)} closed_form_rate={rate_closed_form(P)}",
        f"distance_lb={distance_lb(P)}",
    ]
    for r in range(1, P.s + 1):
        try:
            cfg = choose_config(P, r)
            out.append(cfg.describe())
        except RegimeError as exc:
            out.append(f"r={r} unavailable: {exc}")
    print("\n".join(out))
    return 0


def _read_message(text, args):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty message file")
    if lines[0].startswith("QMC1"):
        F = parse_header(lines[0])
        if args.p is not None and (args.p, args.e or 1) != (F.p, F.e):
            raise FormatError("message header does not match --p/--e")
        lines = lines[1:]
    else:
        if args.p is None:
            raise RegimeError("--p is required when the message has no header")
        F = _tower(args)
    if len(lines) != 1:
        raise FormatError("message file must hold exactly one polynomial line")
    return F, from_text(F, lines[0])


def cmd_encode(args):
    F, f = _read_message(_read(args.input), args)
    P = _params(args, F)
    try:
        cw = encode(f, P, args.code)
    except ValueError as exc:
        raise RegimeError(str(exc)) from exc
    _write(args.out, write_codeword(cw))
    return 0


def corrupt(cw, errors, seed):
    """Replace ``errors`` distinct blocks by random blocks differing from the originals."""
    P = cw.params
    if not 0 <= errors < P.N:
        raise RegimeError(f"error count must satisfy 0 <= e < N = {P.N}")
    rng = random.Random(seed)
    out = cw.copy()
    size = P.tower.size
    for i in sorted(rng.sample(range(P.N), errors)):
        orig = out.data[i].tolist()
        while True:
            new = [rng.randrange(size) for _ in range(P.block_size)]
            if new != orig:
                break
        out.data[i] = new
    return out


def cmd_corrupt(args):
    cw = read_codeword(_read(args.input))
    _write(args.out, write_codeword(corrupt(cw, args.errors, args.seed)))
    return 0


def cmd_decode(args):
    w = read_codeword(_read(args.input))
    res = list_decode(w, w.params, args.r, cap=args.cap)
    _write(args.out, res.to_text())
    return 0


def run_trial(P, r, errors, seed, cap=DEFAULT_CAP, code="qmult"):
    f = random_poly(P.tower, P.m, P.k, seed)
    cw = encode(f, P, code)
    w = corrupt(cw, errors, seed)
    res = list_decode(w, P, r, cap=cap)
    if res.enumerated:
        success = f in res.messages()
    else:
        success = res.space.contains(f, P.k)
    return {
        "trial_seed": seed,
        "errors": errors,
        "agreement": block_agreement(cw, w),
        "t_min": res.config.t_min,
        "dim": res.space.dim,
        "list_size": len(res.candidates) if res.enumerated else "",
        "z_degree": res.z_degree,
        "success": int(success),
    }


def cmd_experiment(args):
    P = _params(args)
    choose_config(P, args.r)
    buf = io.StringIO()
    fields = ["trial", "trial_seed", "errors", "agreement", "t_min", "dim",
              "list_size", "z_degree", "success"]
    wr = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    wr.writeheader()
    wins = 0
    for i in range(args.trials):
        row = run_trial(P, args.r, args.errors, args.seed + i, args.cap, args.code)
        wins += row["success"]
        wr.writerow({"trial": i, **row})
    _write(args.out, buf.getvalue())
    if args.out not in (None, "-"):
        print(f"success_rate={wins}/{args.trials}")
    return 0


def cmd_selftest(args):
    from .selftest import run_all
    ok = run_all(print)
    return 0 if ok else 1


def build_parser():
    ap = argparse.ArgumentParser(prog="qmc", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def code_flags(p, need_tower=True):
        p.add_argument("--p", type=int, required=need_tower)
        p.add_argument("--e", type=int, default=1 if need_tower else None)
        p.add_argument("--m", type=int)
        p.add_argument("--s", type=int)
        p.add_argument("--k", type=int)
        p.add_argument("--A-size", dest="A_size", type=int)
        p.add_argument("--A", help="comma-separated elements of F_q")

    p = sub.add_parser("params", help="code and decoder parameters")
    code_flags(p)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("encode", help="encode a message polynomial")
    code_flags(p, need_tower=False)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")
    p.add_argument("--code", choices=["qmult", "frm"], default="qmult")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("corrupt", help="replace random blocks")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")
    p.add_argument("--errors", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_corrupt)

    p = sub.add_parser("decode", help="list decode a received word")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("experiment", help="seeded encode/corrupt/decode trials as CSV")
    code_flags(p)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--errors", type=int, required=True)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--code", choices=["qmult", "frm"], default="qmult")
    p.add_argument("--out")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("selftest", help="run the built-in invariant checks")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except RegimeError as exc:
        print(f"regime violation: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except FormatError as exc:
        print(f"malformed input: {exc}", file=sys.stderr)
        return EXIT_FORMAT


if __name__ == "__main__":
    sys.exit(main())
