"""Command-line interface.

Exit codes: 0 on success, 1 when a mathematical precondition or invariant
fails, 2 on I/O or parse errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import abelian, extensions as ext, filtration, qforms
from .abelian import FinAbGroup, SizeGuardError, parse_coords
from .cocycles import alternator, is_cocycle, standard_cocycle
from .verify import run as run_verify

EXIT_OK, EXIT_MATH, EXIT_IO = 0, 1, 2


class ParseError(Exception):
    pass


def _group(text: str) -> FinAbGroup:
    try:
        mods = parse_coords(text)
    except ValueError as exc:
        raise ParseError(f"cannot parse group moduli {text!r}") from exc
    return FinAbGroup(mods)


def _coords(text: str) -> tuple[int, ...]:
    try:
        return parse_coords(text)
    except ValueError as exc:
        raise ParseError(f"cannot parse coordinates {text!r}") from exc


def _fractions(text: str | None) -> list[Fraction]:
    if text is None or not text.strip():
        return []
    try:
        return [Fraction(s.strip()) for s in text.split(",")]
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"cannot parse rationals {text!r}") from exc


def _load(arg: str):
    try:
        if arg == "-":
            return json.load(sys.stdin)
        if arg.lstrip().startswith("{"):
            return json.loads(arg)
        with open(arg) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc


def _load_ext(arg: str) -> ext.MinExt:
    obj = _load(arg)
    try:
        return ext.MinExt.from_json(obj)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"not a minimal extension encoding: {exc}") from exc


def _base(args) -> ext.BaseCategory:
    A = _group(args.group)
    t = _coords(args.t) if args.t is not None else (0,) * A.rank
    if len(t) != A.rank:
        raise ParseError(f"t has {len(t)} coordinates but the group has rank {A.rank}")
    if A.order_of(A.elt(t)) > 2:
        raise ValueError(f"t = {t} has order greater than 2")
    return ext.BaseCategory(A, t)


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True))


# ---------------------------------------------------------------------------
# Verbs
# ---------------------------------------------------------------------------


def cmd_group(args) -> int:
    A = _group(args.group)
    h2, h3, quad = filtration.cohomology_orders(A)
    info = {
        "group": A.to_json(),
        "canonical": abelian.canonical_decomposition(A).to_json(),
        "order": A.order,
        "wedge2": abelian.wedge_power(A, 2).to_json(),
        "wedge3": abelian.wedge_power(A, 3).to_json(),
        "h2_order": h2,
        "h3": h3.to_json(),
        "quad_order": quad,
    }
    if args.t is not None:
        base = _base(args)
        if base.super_tannakian:
            info["split"] = abelian.is_split(A, base.t)
            comp = abelian.complement_search(A, base.t) if A.order <= 2**12 else None
            info["complement"] = None if comp is None else [list(c) for c in comp]
    if args.json:
        _emit(info)
    else:
        print(f"group      {A}")
        print(f"canonical  {abelian.canonical_decomposition(A)}")
        print(f"order      {A.order}")
        print(f"wedge^2    {abelian.wedge_power(A, 2)}")
        print(f"wedge^3    {abelian.wedge_power(A, 3)}")
        print(f"|H^2|      {h2}")
        print(f"H^3        {h3}")
        print(f"|Quad|     {quad}")
        if "split" in info:
            print(f"split      {str(info['split']).lower()}")
    return EXIT_OK


def cmd_factors(args) -> int:
    base = _base(args)
    rep = filtration.mext_factors(base)
    if args.json:
        _emit(rep.to_json())
    else:
        print("\n".join(rep.lines()))
    return EXIT_OK


def cmd_ext(args) -> int:
    sub = args.subverb
    if sub == "build-trivial":
        base = _base(args)
        diag = _fractions(args.q) or [Fraction(0)] * base.A.rank
        if len(diag) == 1 and diag[0] == 0:
            diag = [Fraction(0)] * base.A.rank
        q = qforms.QuadForm(base.A, tuple(diag), tuple(_fractions(args.cross)))
        _emit(ext.build_trivial(base, q).to_json())
    elif sub == "build-mkzeta":
        _emit(ext.build_M_k_zeta(args.n, args.k, args.zeta).to_json())
    elif sub == "build-m2":
        _emit(ext.build_M2_xi(args.xi).to_json())
    elif sub == "build-m1":
        _emit(ext.build_M1_i(args.i).to_json())
    elif sub == "product":
        _emit(ext.product(_load_ext(args.a), _load_ext(args.b)).to_json())
    elif sub == "reverse":
        _emit(ext.reverse(_load_ext(args.input)).to_json())
    elif sub == "order":
        n = ext.order_in_mext(_load_ext(args.input), args.cap)
        if args.json:
            _emit({"order": n})
        else:
            print(n)
    elif sub == "charge":
        k16, check = ext.charge_and_w(_load_ext(args.input))
        if args.json:
            _emit({"k16": ext.charge_label(k16), "cross_check": ext.charge_label(check)})
        else:
            print(ext.charge_label(k16))
    elif sub == "equiv":
        f = ext.equivalent(_load_ext(args.a), _load_ext(args.b))
        if args.json:
            _emit({"equivalent": f is not None, "witness": None if f is None else [list(r) for r in f.matrix]})
        else:
            print(str(f is not None).lower())
    elif sub == "enumerate":
        reps = ext.enumerate_pointed(_base(args))
        if args.json:
            _emit([M.to_json() for M in reps])
        else:
            for M in reps:
                k16 = ext.charge_and_w(M)[0]
                print(f"{ext.charge_label(k16):>6}  {M.C}  {json.dumps(M.cat.form.to_json()['diag'])}")
            print(f"{len(reps)} classes")
    return EXIT_OK


def cmd_cocycle(args) -> int:
    A = _group(args.group)
    omega = standard_cocycle(A, args.type, _coords(args.indices), args.coef)
    tau = alternator(omega)
    nonzero = {}
    for i in range(A.rank):
        for j in range(A.rank):
            for k in range(A.rank):
                v = tau.values[i][j][k]
                if v:
                    nonzero[f"{i},{j},{k}"] = qforms.qz_str(v)
    out = {"cocycle": omega.to_json(), "alternator": nonzero}
    if A.order <= 16:
        out["is_cocycle"] = is_cocycle(omega)
    if args.json:
        _emit(out)
    else:
        print(json.dumps(out["cocycle"], sort_keys=True))
        if "is_cocycle" in out:
            print(f"cocycle identity  {str(out['is_cocycle']).lower()}")
        print(f"alternator        {nonzero if nonzero else 0}")
    return EXIT_OK


def cmd_verify(args) -> int:
    checks = run_verify(args.suite)
    if args.json:
        _emit([c.to_json() for c in checks])
    else:
        for c in checks:
            print(c.line())
    return EXIT_OK if all(c.passed for c in checks) else EXIT_MATH


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mext", description="Minimal extensions of Rep(A, t).")
    verbs = p.add_subparsers(dest="verb", required=True)

    def base_flags(sp, required=True):
        sp.add_argument("--group", required=required, help="cyclic moduli, e.g. 2,4")
        sp.add_argument("--t", help="coordinates of t, e.g. 0,2")

    g = verbs.add_parser("group", help="structure of a finite abelian group")
    base_flags(g)
    g.add_argument("--json", action="store_true")
    g.set_defaults(func=cmd_group)

    f = verbs.add_parser("factors", help="filtration factors of Mext(Rep(A, t))")
    base_flags(f)
    f.add_argument("--json", action="store_true")
    f.set_defaults(func=cmd_factors)

    e = verbs.add_parser("ext", help="pointed minimal extensions")
    subs = e.add_subparsers(dest="subverb", required=True)
    s = subs.add_parser("build-trivial")
    base_flags(s)
    s.add_argument("--q", default="0", help="q(e_i) values, e.g. 1/4 (0 for the zero form)")
    s.add_argument("--cross", help="b(e_i, e_j) for i < j")
    s = subs.add_parser("build-mkzeta")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--zeta", type=int, required=True, help="odd exponent of the root of unity")
    s = subs.add_parser("build-m2")
    s.add_argument("--xi", type=int, default=1, help="odd exponent of a primitive 8th root")
    s = subs.add_parser("build-m1")
    s.add_argument("--i", type=int, default=1, help="odd exponent of a primitive 4th root")
    for name in ("product", "equiv"):
        s = subs.add_parser(name)
        s.add_argument("--a", required=True, help="JSON file, inline JSON, or - for stdin")
        s.add_argument("--b", required=True)
        s.add_argument("--json", action="store_true")
    for name in ("reverse", "order", "charge"):
        s = subs.add_parser(name)
        s.add_argument("--in", dest="input", required=True, help="JSON file, inline JSON, or - for stdin")
        s.add_argument("--json", action="store_true")
        if name == "order":
            s.add_argument("--cap", type=int, default=64)
    s = subs.add_parser("enumerate")
    base_flags(s)
    s.add_argument("--json", action="store_true")
    e.set_defaults(func=cmd_ext)

    c = verbs.add_parser("cocycle", help="standard 3-cocycles and their alternators")
    c.add_argument("--group", required=True)
    c.add_argument("--type", choices=["I", "II", "III"], required=True)
    c.add_argument("--indices", required=True)
    c.add_argument("--coef", type=int, default=1)
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_cocycle)

    v = verbs.add_parser("verify", help="run the built-in example suites")
    v.add_argument("--suite", choices=["svect", "z2n", "z2z2", "kunneth", "all"], default="all")
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_IO if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, ArithmeticError, SizeGuardError, ext.OrderCapExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MATH


if __name__ == "__main__":
    sys.exit(main())
