"""Command line entry point (``maass52`` / ``python -m maass52``).

Exit codes: 0 ok, 1 verification failed, 2 usage error, 3 convergence not certified.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import List, Optional

from . import hecke, poincare, qseries
from .kloosterman import KloostermanContext, kloosterman
from .special import PrecisionContext

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_UNCONVERGED = 0, 1, 2, 3
DIGITS_ENV = "MAASS52_DIGITS"


class UsageError(Exception):
    pass


def _default_digits() -> int:
    raw = os.environ.get(DIGITS_ENV)
    if raw is None:
        return 50
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{DIGITS_ENV}={raw!r} is not an integer")


def _index(m: int, what: str) -> int:
    if m % 24 != 1:
        raise UsageError(f"{what}={m} is not 1 mod 24")
    return m


# --- output --------------------------------------------------------------------


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}{k}.")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix[:-1], obj


def _render(obj: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(obj, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if "terms" in obj:  # a series: one row per coefficient
            w.writerow(["n", "c"])
            for t in obj["terms"]:
                w.writerow([t["n"], t["c"]])
        else:
            w.writerow(["key", "value"])
            for k, v in _flatten(obj):
                w.writerow([k, v])
        return buf.getvalue()
    lines = []
    for k, v in _flatten(obj):
        lines.append(f"{k:40s} {v}")
    return "\n".join(lines) + "\n"


def _emit(obj: dict, args) -> None:
    text = _render(obj, args.format)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cfg(args, **overrides) -> poincare.SeriesConfig:
    kw = dict(c_max=args.cmax, digits=args.digits, tol=args.tol, rtol=args.rtol)
    kw.update(overrides)
    try:
        return poincare.SeriesConfig(**kw)
    except ValueError as exc:
        raise UsageError(str(exc))


def _converged_code(ok: bool, args) -> int:
    return EXIT_OK if ok or args.allow_unconverged else EXIT_UNCONVERGED


# --- commands ---------------------------------------------------------------------


def cmd_basis(args) -> int:
    m = _index(args.m, "m")
    if args.terms < 1:
        raise UsageError("--terms must be >= 1")
    if args.kind == "g":
        if m <= 0:
            raise UsageError("g_m needs m > 0")
        _emit(qseries.basis_g(m, args.terms - 1).to_json_obj(), args)
        return EXIT_OK
    if m < 0:
        _emit(qseries.basis_h_neg(m, max(1, args.terms - 1)).to_json_obj(), args)
        return EXIT_OK
    exp = poincare.h_expansion(m, args.terms, _cfg(args))
    _emit(exp.to_json_obj(), args)
    return _converged_code(exp.converged, args)


def cmd_partition(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    out = {"n": args.n}
    code = EXIT_OK
    if args.method in ("recurrence", "both"):
        out["recurrence"] = str(poincare.partition_oracle(args.n))
        out["p"] = out["recurrence"]
    if args.method in ("rademacher", "both"):
        res = poincare.rademacher_p(args.n, digits=args.digits, c_max=args.cmax_partition)
        out["rademacher"] = res.to_json_obj()
        out["p"] = str(res.rounded)
        if not res.certified:
            code = _converged_code(False, args)
        if args.method == "both" and res.rounded != poincare.partition_oracle(args.n):
            code = EXIT_FAIL
    _emit(out, args)
    return code


def cmd_mock_coeff(args) -> int:
    m = _index(args.m, "m")
    n = _index(args.n, "n")
    cfg = _cfg(args)
    if n > 0:
        v = poincare.mock_coefficient(m, n, cfg)
        kind = "holomorphic"
    elif m > 0:
        v = poincare.shadow_coefficient(m, -n, cfg)
        kind = "nonholomorphic"
    else:
        raise UsageError("h_m with m < 0 has no coefficients at n < 0 besides q^(m/24)")
    out = {"m": m, "n": n, "kind": kind, **v.to_json_obj()}
    if kind == "holomorphic" and n == m and m > 0:
        out["imaginary"] = repr(-(4 / 3) * (3.141592653589793 ** 0.5))
    _emit(out, args)
    return _converged_code(v.converged, args)


def cmd_kloosterman(args) -> int:
    if args.c < 1:
        raise UsageError("--c must be >= 1")
    prec = PrecisionContext(args.digits)
    val = kloosterman(KloostermanContext(args.m, args.n, args.c), prec)
    _emit({"m_prime": args.m, "n_prime": args.n, "c": args.c, "value": prec.mp.nstr(val, args.digits)}, args)
    return EXIT_OK


def cmd_verify(args) -> int:
    check = args.check
    if check == "duality":
        js = args.j or [23, 47, 71, 95]
        ks = args.k or [1, 25, 49, 73]
        rep = hecke.verify_duality(js, ks)
    elif check == "hecke":
        if args.m is None or args.ell is None:
            raise UsageError("verify hecke needs --m and --ell")
        _index(args.m, "m")
        if args.n is not None:
            if args.m <= 0:
                raise UsageError("the numeric Hecke relation needs m > 0")
            rep = hecke.verify_hecke_numeric(args.m, _index(args.n, "n"), args.ell, _cfg(args))
        else:
            rep = hecke.verify_hecke_exact(args.m, args.ell, args.terms)
    elif check == "symmetry":
        if args.m is None or args.n is None:
            raise UsageError("verify symmetry needs --m and --n")
        rep = hecke.verify_symmetry(_index(args.m, "m"), _index(args.n, "n"), _cfg(args))
    elif check == "vanishing":
        if args.m is None or args.n is None:
            raise UsageError("verify vanishing needs --m and --n")
        rep = hecke.verify_vanishing(_index(args.m, "m"), _index(args.n, "n"), _cfg(args), tol=args.tol_check)
    else:  # xi
        m = _index(args.m if args.m is not None else 1, "m")
        rep = hecke.verify_xi(m, args.terms, _cfg(args))
    _emit(rep, args)
    return EXIT_OK if rep["pass"] else EXIT_FAIL


# --- parser ----------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "pretty"), default="json")
    common.add_argument("--output", help="write to this file instead of stdout")
    common.add_argument("--digits", type=int, default=None, help=f"working precision (default ${DIGITS_ENV} or 50)")
    common.add_argument("--cmax", type=int, default=10000, help="truncation of the c-sums")
    common.add_argument("--tol", type=float, default=1e-6, help="absolute tail tolerance")
    common.add_argument("--rtol", type=float, default=1e-6, help="relative tail tolerance")
    common.add_argument("--allow-unconverged", action="store_true")

    p = _Parser(prog="maass52", description="Dual weight -1/2 and 5/2 bases: exact series, Poincare coefficients, checks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("basis", parents=[common], help="q-expansion of g_m or h_m")
    b.add_argument("kind", choices=("g", "h"))
    b.add_argument("--m", type=int, required=True)
    b.add_argument("--terms", type=int, default=5, help="number of terms including the leading one")
    b.set_defaults(func=cmd_basis)

    q = sub.add_parser("partition", parents=[common], help="p(n)")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--method", choices=("rademacher", "recurrence", "both"), default="rademacher")
    q.add_argument("--cmax-partition", type=int, default=None, help="fix the Rademacher truncation")
    q.set_defaults(func=cmd_partition)

    mc = sub.add_parser("mock-coeff", parents=[common], help="coefficient of h_m at q^(n/24)")
    mc.add_argument("--m", type=int, required=True)
    mc.add_argument("--n", type=int, required=True, help="n < 0 selects the beta(|n| y) q^(-n/24) term")
    mc.set_defaults(func=cmd_mock_coeff)

    k = sub.add_parser("kloosterman", parents=[common], help="K(m', n'; c)")
    k.add_argument("--m", type=int, required=True, help="m' with m = 24 m' + 1")
    k.add_argument("--n", type=int, required=True, help="n' with n = 24 n' + 1")
    k.add_argument("--c", type=int, required=True)
    k.set_defaults(func=cmd_kloosterman)

    v = sub.add_parser("verify", parents=[common], help="run a consistency check")
    v.add_argument("check", choices=("hecke", "duality", "symmetry", "vanishing", "xi"))
    v.add_argument("--m", type=int)
    v.add_argument("--n", type=int)
    v.add_argument("--ell", type=int)
    v.add_argument("--terms", type=int, default=15)
    v.add_argument("--j", type=int, nargs="+")
    v.add_argument("--k", type=int, nargs="+")
    v.add_argument("--tol-check", type=float, default=1e-4, help="tolerance of the vanishing check")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.digits is None:
            args.digits = _default_digits()
        if args.digits < 15:
            raise UsageError("--digits must be >= 15")
        if args.cmax < 1:
            raise UsageError("--cmax must be >= 1")
        return args.func(args)
    except (UsageError, ValueError) as exc:
        sys.stderr.write(f"maass52: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
