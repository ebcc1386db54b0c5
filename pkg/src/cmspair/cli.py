"""Command-line front end: ``cmspair <subcommand> ...``.

Exit status: 0 on success (or a zero commutator verdict), 1 on a nonzero
verdict or infeasible conditions, 2 on parse/validation errors.  With
``--json`` the report is printed as one deterministic JSON object instead
of plain text.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import mpmath

from . import serialize
from .b2 import B2Model, ExcludedParameter
from .commutant import first_relation, second_relation
from .locus_lab import UnsupportedCardinality, classify, solve_couplings
from .scalar import S, Scalar, ScalarParseError, parse_scalar
from .serialize import DocumentError, EntrySpec
from .verify import DEFAULT_GG, verify_operators
from .wp import OutOfConvergenceRegion, PrecisionUnachievable, WpContext, wp_eval
from .xsymbols import Covector, InvalidLocus, Locus, LocusEntry


class UsageError(Exception):
    """Raised instead of argparse's own exit so every error path returns 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- input ----------------------------------------------------------------

def _read(path):
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise DocumentError(f"cannot read file: {exc.strerror}", path) from None


def _text_locus(lines):
    """Whitespace-separated ``c1 c2 [coupling]`` rows; scalar expressions allowed."""
    alphas, cs = [], []
    for lineno, raw in lines:
        parts = raw.split()
        if len(parts) not in (2, 3):
            raise DocumentError("expected 'c1 c2 [coupling]'", f"line {lineno}")
        vals = []
        for col, p in enumerate(parts):
            try:
                vals.append(parse_scalar(p))
            except ScalarParseError as exc:
                raise DocumentError(exc.args[0].split(" (at column")[0], f"line {lineno}",
                                    raw.find(p) + (exc.position or 0)) from None
        try:
            alphas.append(Covector(vals[0], vals[1]))
        except ValueError:
            raise DocumentError("alpha must be nonzero", f"line {lineno}") from None
        cs.append(vals[2] if len(vals) == 3 else None)
    entries = [EntrySpec(a, c) for a, c in zip(alphas, cs)]
    return serialize.Document(scalars={"a": None, "g2": None, "g3": None}, entries=entries)


def _prefixed(exc, path):
    if exc.field.startswith(path):
        return exc
    field = f"{path}: {exc.field}" if exc.field else path
    return DocumentError(str(exc).split(": ", 1)[1], field, exc.position)


def _parse_docs(text, path):
    try:
        return [serialize.loads(text)]
    except DocumentError as exc:
        # JSON Lines: several documents, one per line
        if not (exc.field.startswith("line ") and "Extra data" in str(exc)):
            raise _prefixed(exc, path) from None
    docs = []
    for lineno, ln in enumerate(text.splitlines(), 1):
        if not ln.strip():
            continue
        try:
            docs.append(serialize.loads(ln))
        except DocumentError as exc:
            inner = exc.field.replace("line 1", "").strip(": ")
            field = f"{path}: line {lineno}" + (f": {inner}" if inner else "")
            raise DocumentError(str(exc).split(": ", 1)[1], field, exc.position) from None
    return docs


def read_loci(path):
    """One or more loci from a JSON document, JSON Lines, or text rows.

    Text rows are ``c1 c2 [coupling]``; blank lines separate loci and ``#``
    starts a comment.
    """
    text = _read(path)
    if text.lstrip().startswith("{"):
        return _parse_docs(text, path)
    groups, cur = [], []
    for lineno, ln in enumerate(text.splitlines(), 1):
        body = ln.split("#", 1)[0]
        if not body.strip():
            if cur and not ln.strip():
                groups.append(cur)
                cur = []
            continue
        cur.append((lineno, body))
    if cur:
        groups.append(cur)
    if not groups:
        raise DocumentError("no locus found", path)
    try:
        return [_text_locus(g) for g in groups]
    except DocumentError as exc:
        raise _prefixed(exc, path) from None


def load_document(path):
    """Parse one document; errors name the file in the field pointer."""
    try:
        return serialize.loads(_read(path))
    except DocumentError as exc:
        raise _prefixed(exc, path) from None


def _locus(doc, need_couplings=True):
    if need_couplings:
        return doc.locus()
    return Locus([LocusEntry(e.alpha, e.coupling or S(1), e.kind, e.scale) for e in doc.entries])


# -- output ---------------------------------------------------------------

def _jsonable(v):
    if isinstance(v, Scalar):
        return str(v)
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, mpmath.mpf):
        return mpmath.nstr(v, 20)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, Covector):
        return [str(v.c1), str(v.c2)]
    return v


def _emit(args, obj, text):
    if args.json:
        sys.stdout.write(json.dumps(_jsonable(obj), indent=1, sort_keys=True) + "\n")
    else:
        sys.stdout.write(text.rstrip("\n") + "\n")


# -- subcommands ----------------------------------------------------------

def cmd_classify(args):
    docs = read_loci(args.locus)
    reports, lines = [], []
    for n, doc in enumerate(docs):
        cs = doc.couplings
        rep = classify(doc.alphas, cs if all(c is not None for c in cs) else None)
        reports.append(rep)
        lines.append(f"locus {n}: {len(doc.alphas)} lines, type {rep['type']}")
        for key in ("orthogonal_pairs", "symmetry_axes", "normal_form", "pfaffian",
                    "required_couplings"):
            if key in rep and rep[key] is not None:
                lines.append(f"  {key}: {_jsonable(rep[key])}")
        if "relations_hold" in rep:
            lines.append(f"  relations with given couplings: {'hold' if rep['relations_hold'] else 'fail'}")
        lines.append(f"  feasible: {'yes' if rep['feasible'] else 'no'}")
        for fa in rep["feasible_assignments"]:
            lines.append(f"    pinned to coupling two: {fa['pinned']}  couplings: {_jsonable(fa['couplings'])}")
    _emit(args, {"loci": reports}, "\n".join(lines))
    return 0


def cmd_couplings(args):
    docs = read_loci(args.locus)
    out, lines = [], []
    for n, doc in enumerate(docs):
        sol = solve_couplings(_locus(doc, need_couplings=False))
        out.append(sol)
        lines.append(f"locus {n}: rank {sol['rank']}, nullspace dimension {len(sol['basis'])}")
        for v in sol["basis"]:
            lines.append(f"  basis: {_jsonable(v)}")
        for key in ("pfaffian", "pfaffian_family", "triangle_family", "pair_family"):
            if sol.get(key) is not None:
                lines.append(f"  {key}: {_jsonable(sol[key])}")
    _emit(args, {"loci": out}, "\n".join(lines))
    return 0


def cmd_conditions(args):
    docs = read_loci(args.locus)
    out, lines, ok = [], [], True
    for n, doc in enumerate(docs):
        loc = doc.locus()
        first = first_relation(loc)
        second = second_relation(loc)
        rows = []
        lines.append(f"locus {n}:")
        for i, (f, s) in enumerate(zip(first, second)):
            zero = f.is_zero() and s["residual"].is_zero()
            ok = ok and zero
            rows.append({"index": i, "alpha": loc.alphas[i], "first": f,
                         "second": s["residual"], "coupling_factor": s["coupling_factor"],
                         "sum_factor": s["sum_factor"], "zero": zero})
            lines.append(f"  alpha_{i} = {_jsonable(loc.alphas[i])}: first {f}, second {s['residual']}"
                         + ("" if zero else "  [nonzero]"))
        out.append(rows)
    lines.append("all residuals zero" if ok else "nonzero residuals present")
    _emit(args, {"loci": out, "zero": ok}, "\n".join(lines))
    return 0 if ok else 1


def _rat_or_sym(text, name):
    if text == "sym":
        return None
    try:
        v = parse_scalar(text)
    except ScalarParseError as exc:
        raise DocumentError(exc.args[0].split(" (at column")[0], f"--{name}", exc.position) from None
    if not v.is_constant():
        raise DocumentError("expected a rational number or 'sym'", f"--{name}")
    return v.to_fraction()


def cmd_build(args):
    if args.model != "b2":
        raise DocumentError("only the b2 model is available", "--model")
    a = _rat_or_sym(args.a, "a")
    g2 = _rat_or_sym(args.g2, "g2")
    g3 = _rat_or_sym(args.g3, "g3")
    try:
        model = B2Model(a=a, g2=g2, g3=g3)
    except ExcludedParameter as exc:
        raise DocumentError(str(exc), "--a") from None
    L, P = model.L(), model.P()
    ents = model.entries()
    sc = model.scalars()
    texts = {"L": serialize.dumps(sc, ents, L, name="L"), "P": serialize.dumps(sc, ents, P, name="P")}
    for key, path in (("L", args.out_L), ("P", args.out_P)):
        if path == "-":
            sys.stdout.write(texts[key])
        else:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(texts[key])
    if args.out_L != "-" and args.out_P != "-":
        _emit(args, {"model": "b2", "ring": model.kind, "L_terms": len(L.items()),
                     "P_terms": len(P.items()), "P_order": P.order()},
              f"model b2 ({model.kind} ring): L has {len(L.items())} terms, "
              f"P has {len(P.items())} terms of order {P.order()}")
    return 0


def _gg_samples(text):
    if not text:
        return DEFAULT_GG
    out = []
    for part in text.split(";"):
        try:
            g2, g3 = part.split(",")
            out.append((Fraction(g2.strip()), Fraction(g3.strip())))
        except (ValueError, ZeroDivisionError):
            raise DocumentError("expected 'g2,g3;g2,g3;...'", "--gg") from None
    return tuple(out)


def cmd_verify(args):
    dL = load_document(args.L)
    dP = load_document(args.P)
    if dL.operator is None:
        raise DocumentError("document has no operator", f"{args.L}: operator")
    if dP.operator is None:
        raise DocumentError("document has no operator", f"{args.P}: operator")
    if dL.ring != dP.ring:
        raise DocumentError("L and P are over different rings", f"{args.P}: locus")
    try:
        tol = Fraction(args.tol)
    except (ValueError, ZeroDivisionError):
        try:
            tol = Fraction(float(args.tol))
        except ValueError:
            raise DocumentError("expected a number", "--tol") from None
    rep = verify_operators(dL.operator, dP.operator, mode=args.mode, trials=args.trials,
                           digits=args.digits, tol=tol, seed=args.seed,
                           gg_samples=_gg_samples(args.gg))
    obj = {"mode": rep.mode, "ring": rep.ring, "exact_zero": rep.exact_zero,
           "verdict": rep.verdict, "support": [[list(dx), n] for dx, n in rep.support]}
    if rep.numeric is not None:
        obj["numeric"] = {"samples": rep.numeric.trials,
                          "max_abs": mpmath.nstr(rep.numeric.max_abs, 8),
                          "max_relative": mpmath.nstr(rep.numeric.max_relative, 8)}
    _emit(args, obj, rep.summary())
    return 0 if rep.zero else 1


def cmd_wp(args):
    vals = {}
    for name in ("z", "g2", "g3"):
        v = _rat_or_sym(getattr(args, name), name)
        if v is None:
            raise DocumentError("a rational number is required", f"--{name}")
        vals[name] = v
    try:
        ctx = WpContext(g2=vals["g2"], g3=vals["g3"], digits=args.digits)
        p, dp, err = wp_eval(vals["z"], ctx)
    except (OutOfConvergenceRegion, PrecisionUnachievable) as exc:
        raise DocumentError(str(exc), "--z") from None
    d = args.digits
    obj = {"z": vals["z"], "g2": vals["g2"], "g3": vals["g3"], "digits": d,
           "wp": mpmath.nstr(p, d), "wp1": mpmath.nstr(dp, d), "error_bound": mpmath.nstr(err, 5)}
    if vals["g2"] == 0 and vals["g3"] == 0:
        # degenerate lattice: wp = 1/z^2 exactly
        z = vals["z"]
        obj["wp"], obj["wp1"], obj["error_bound"] = str(1 / z ** 2), str(-2 / z ** 3), "0"
    _emit(args, obj, f"wp = {obj['wp']}\nwp' = {obj['wp1']}\nerror bound = {obj['error_bound']}")
    return 0


def build_parser():
    p = _Parser(prog="cmspair", description="Rank-two commuting pairs: build, classify, verify.")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, fn, hlp in (("classify", cmd_classify, "classify a singular locus"),
                          ("couplings", cmd_couplings, "coupling families from the first relation"),
                          ("conditions", cmd_conditions, "relation residuals per line")):
        sp = sub.add_parser(name, help=hlp)
        sp.add_argument("--locus", required=True, help="locus file ('-' for stdin)")
        sp.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
        sp.set_defaults(func=fn)

    sp = sub.add_parser("build", help="write the deformed B2 operators")
    sp.add_argument("--model", default="b2")
    sp.add_argument("--a", default="sym")
    sp.add_argument("--g2", default="0")
    sp.add_argument("--g3", default="0")
    sp.add_argument("--out-L", dest="out_L", required=True)
    sp.add_argument("--out-P", dest="out_P", required=True)
    sp.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    sp.set_defaults(func=cmd_build)

    sp = sub.add_parser("verify", help="test [L, P] = 0")
    sp.add_argument("--L", required=True)
    sp.add_argument("--P", required=True)
    sp.add_argument("--mode", choices=("exact", "numeric", "both"), default="both")
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--digits", type=int, default=50)
    sp.add_argument("--tol", default="1e-25")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--gg", default="", help="(g2, g3) samples for symbolic g2, g3: '1,0;0,1'")
    sp.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("wp", help="evaluate wp and wp'")
    sp.add_argument("--z", required=True)
    sp.add_argument("--g2", default="0")
    sp.add_argument("--g3", default="0")
    sp.add_argument("--digits", type=int, default=30)
    sp.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    sp.set_defaults(func=cmd_wp)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"cmspair: error: {exc}\n")
        return 2
    except DocumentError as exc:
        sys.stderr.write(f"cmspair: error: {exc}\n")
        return 2
    except (InvalidLocus, UnsupportedCardinality, ExcludedParameter, ValueError) as exc:
        sys.stderr.write(f"cmspair: error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
