"""Text forms for coefficients and the JSON operator/locus document.

Coefficient expressions use the scalar grammar (``+ - * / ^``, integers,
``a``, ``g2``, ``g3``) extended by ring leaves:

* ``x1``, ``x2``      coordinates (rational ring)
* ``x(i)``            the linear form <alpha_i, x> of locus entry i (0-based)
* ``wp(i)``, ``wp1(i)`` the generators wp and wp' of locus entry i (elliptic ring)

Negative integer powers are allowed on units of the ring, e.g. ``x(0)^-2``.
See ``docs/format.md`` for the document grammar.
"""

from __future__ import annotations

import ast
import json
from dataclasses import dataclass, field

from .coef import Elliptic, EllipticRing, RationalPole, RationalPoleRing
from .diffop import DiffOp
from .scalar import SYMBOLS, S, Scalar, ScalarParseError, parse_expression_tree, parse_scalar
from .xsymbols import Covector, Locus, LocusEntry

FORMAT_VERSION = "cmspair/1"


class DocumentError(ValueError):
    """Parse or validation failure.

    ``field`` is a JSON path (or ``line N`` for JSON syntax errors) and
    ``position`` a 0-based column inside that field; messages show it 1-based.
    """

    def __init__(self, message, field="", position=None):
        self.field = field
        self.position = position
        where = field or "<document>"
        if position is not None:
            where += f", column {position + 1}"
        super().__init__(f"{where}: {message}")


# -- printing ---------------------------------------------------------

def _factor(c):
    s = str(c)
    if any(ch in s for ch in "+-/"):
        return f"({s})"
    return s


def _monomial_text(coef, factors):
    if not factors:
        return str(coef)
    body = "*".join(factors)
    if coef.is_one():
        return body
    if (-coef).is_one():
        return "-" + body
    if str(coef).startswith("-"):
        return f"-{_factor(-coef)}*{body}"
    return f"{_factor(coef)}*{body}"


def _power(name, e):
    return name if e == 1 else f"{name}^{e}"


def _join(terms):
    if not terms:
        return "0"
    out = terms[0]
    for t in terms[1:]:
        out += " - " + t[1:] if t.startswith("-") else " + " + t
    return out


def format_coef(c):
    if isinstance(c, Scalar):
        return str(c)
    if isinstance(c, RationalPole):
        terms = []
        for (i, j), v in sorted(c.num.items(), reverse=True):
            fs = []
            if i:
                fs.append(_power("x1", i))
            if j:
                fs.append(_power("x2", j))
            terms.append(_monomial_text(v, fs))
        body = _join(terms)
        dens = [f"x({i})^{-e}" for i, e in enumerate(c.den) if e]
        if not dens:
            return body
        if len(terms) > 1:
            body = f"({body})"
        if body == "1":
            return "*".join(dens)
        if body == "-1":
            return "-" + "*".join(dens)
        return body + "*" + "*".join(dens)
    if isinstance(c, Elliptic):
        n = c.ring.n
        terms = []
        for e, v in sorted(c.terms.items(), reverse=True):
            fs = []
            for i in range(n):
                if e[i]:
                    fs.append(_power(f"wp({i})", e[i]))
                if e[n + i]:
                    fs.append(f"wp1({i})")
            terms.append(_monomial_text(v, fs))
        return _join(terms)
    raise TypeError(f"cannot format {type(c).__name__}")


# -- parsing coefficient expressions -------------------------------------

def _index_arg(node, pos, name):
    if len(node.args) != 1 or node.keywords:
        raise ScalarParseError(f"{name}() takes one index", pos(node.col_offset))
    arg = node.args[0]
    if not (isinstance(arg, ast.Constant) and type(arg.value) is int):
        raise ScalarParseError(f"{name}() index must be an integer literal", pos(arg.col_offset))
    return arg.value, pos(arg.col_offset)


def parse_coef(text, ring, bindings=None):
    """Parse a coefficient expression into ``ring``.

    ``bindings`` maps scalar symbols to values substituted at the leaves.
    """
    bindings = bindings or {}
    if not text.strip():
        raise ScalarParseError("empty expression", 0)
    nforms = len(ring.forms)

    def leaf(node, pos):
        at = pos(getattr(node, "col_offset", 0))
        if isinstance(node, ast.Constant) and type(node.value) is int:
            return ring.const(node.value)
        if isinstance(node, ast.Name):
            if node.id in SYMBOLS:
                if node.id in bindings:
                    return ring.const(bindings[node.id])
                return ring.const(Scalar.symbol(node.id))
            if node.id in ("x1", "x2"):
                if not isinstance(ring, RationalPoleRing):
                    raise ScalarParseError(f"{node.id} is only allowed in rational documents", at)
                return ring.x(0 if node.id == "x1" else 1)
            raise ScalarParseError(f"unknown symbol {node.id!r}", at)
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
            name = node.func.id
            if name not in ("x", "wp", "wp1"):
                raise ScalarParseError(f"unknown function {name!r}", at)
            idx, iat = _index_arg(node, pos, name)
            if not 0 <= idx < nforms:
                raise ScalarParseError(f"locus index {idx} out of range", iat)
            if name == "x":
                if not isinstance(ring, RationalPoleRing):
                    raise ScalarParseError("x(i) is only allowed in rational documents", at)
                return ring.form_power(idx, 1)
            if not isinstance(ring, EllipticRing):
                raise ScalarParseError(f"{name}(i) is only allowed in elliptic documents", at)
            return ring.p(idx) if name == "wp" else ring.q(idx)
        raise ScalarParseError("unexpected token", at)

    try:
        return parse_expression_tree(text, leaf)
    except ValueError as exc:
        if isinstance(exc, ScalarParseError):
            raise
        raise ScalarParseError(str(exc), 0) from None


# -- documents ----------------------------------------------------------

@dataclass
class EntrySpec:
    alpha: Covector
    coupling: Scalar | None = None
    kind: str = "rational"
    scale: Scalar = field(default_factory=lambda: S(1))


@dataclass
class Document:
    scalars: dict
    entries: list
    name: str | None = None
    operator: DiffOp | None = None
    ring: object = None

    def bindings(self):
        return {k: v for k, v in self.scalars.items() if v is not None}

    @property
    def alphas(self):
        return [e.alpha for e in self.entries]

    @property
    def couplings(self):
        return [e.coupling for e in self.entries]

    def locus(self):
        if any(e.coupling is None for e in self.entries):
            raise DocumentError("every locus entry needs a coupling here", "locus")
        return Locus([LocusEntry(e.alpha, e.coupling, e.kind, e.scale) for e in self.entries])


_TOP_KEYS = {"format", "name", "scalars", "locus", "operator"}
_ENTRY_KEYS = {"alpha", "coupling", "kind", "scale"}
_TERM_KEYS = {"dx", "coef"}


def _scalar_field(text, path, bindings):
    if not isinstance(text, str):
        raise DocumentError("expected a string scalar expression", path)
    try:
        value = parse_scalar(text)
    except ScalarParseError as exc:
        raise DocumentError(exc.args[0].split(" (at column")[0], path, exc.position) from None
    if bindings:
        value = value.specialize(bindings)
    return value


def build_ring(entries, scalars):
    if not entries:
        raise DocumentError("locus must not be empty", "locus")
    kinds = {e.kind for e in entries}
    if len(kinds) > 1:
        raise DocumentError("mixed rational and elliptic entries are not supported", "locus")
    if kinds == {"elliptic"}:
        g2 = scalars.get("g2")
        g3 = scalars.get("g3")
        return EllipticRing([(e.alpha, e.scale) for e in entries],
                            Scalar.symbol("g2") if g2 is None else g2,
                            Scalar.symbol("g3") if g3 is None else g3)
    return RationalPoleRing([e.alpha for e in entries])


def loads(text):
    """Parse a JSON document; raises :class:`DocumentError`."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc.msg}", f"line {exc.lineno}", exc.colno - 1) from None
    return from_dict(raw)


def from_dict(raw):
    if not isinstance(raw, dict):
        raise DocumentError("document must be a JSON object")
    extra = set(raw) - _TOP_KEYS
    if extra:
        raise DocumentError(f"unknown field {sorted(extra)[0]!r}", sorted(extra)[0])
    if raw.get("format") != FORMAT_VERSION:
        raise DocumentError(f"format must be {FORMAT_VERSION!r}", "format")
    name = raw.get("name")
    if name is not None and not isinstance(name, str):
        raise DocumentError("name must be a string", "name")

    scalars = {}
    sraw = raw.get("scalars", {})
    if not isinstance(sraw, dict):
        raise DocumentError("scalars must be an object", "scalars")
    for key, val in sraw.items():
        path = f"scalars.{key}"
        if key not in SYMBOLS:
            raise DocumentError(f"unknown scalar {key!r}", path)
        if val == "sym":
            scalars[key] = None
            continue
        value = _scalar_field(val, path, None)
        if not value.is_constant():
            raise DocumentError("binding must be 'sym' or a rational number", path)
        scalars[key] = value
    for key in SYMBOLS:
        scalars.setdefault(key, None)
    bindings = {k: v.to_fraction() for k, v in scalars.items() if v is not None}

    lraw = raw.get("locus")
    if not isinstance(lraw, list):
        raise DocumentError("locus must be a list", "locus")
    entries = []
    for i, er in enumerate(lraw):
        path = f"locus[{i}]"
        if not isinstance(er, dict):
            raise DocumentError("entry must be an object", path)
        extra = set(er) - _ENTRY_KEYS
        if extra:
            k = sorted(extra)[0]
            raise DocumentError(f"unknown field {k!r}", f"{path}.{k}")
        alpha = er.get("alpha")
        if not (isinstance(alpha, list) and len(alpha) == 2):
            raise DocumentError("alpha must be a list of two scalar expressions", f"{path}.alpha")
        comps = [_scalar_field(c, f"{path}.alpha[{j}]", bindings) for j, c in enumerate(alpha)]
        try:
            cov = Covector(*comps)
        except ValueError:
            raise DocumentError("alpha must be nonzero", f"{path}.alpha") from None
        coupling = None
        if er.get("coupling") is not None:
            coupling = _scalar_field(er["coupling"], f"{path}.coupling", bindings)
            if coupling.is_zero():
                raise DocumentError("coupling must be nonzero", f"{path}.coupling")
        kind = er.get("kind", "rational")
        if kind not in ("rational", "elliptic"):
            raise DocumentError("kind must be 'rational' or 'elliptic'", f"{path}.kind")
        scale = _scalar_field(er.get("scale", "1"), f"{path}.scale", bindings)
        if scale.is_zero():
            raise DocumentError("scale must be nonzero", f"{path}.scale")
        for j, prev in enumerate(entries):
            if prev.alpha.cross(cov).is_zero():
                raise DocumentError(f"parallel to locus[{j}]", f"{path}.alpha")
        if cov.norm2().is_zero():
            raise DocumentError("alpha must have nonzero norm", f"{path}.alpha")
        entries.append(EntrySpec(cov, coupling, kind, scale))

    doc = Document(scalars=scalars, entries=entries, name=name)
    oraw = raw.get("operator")
    if oraw is not None:
        if not isinstance(oraw, list):
            raise DocumentError("operator must be a list of terms", "operator")
        ring = build_ring(entries, scalars)
        terms = {}
        for i, tr in enumerate(oraw):
            path = f"operator[{i}]"
            if not isinstance(tr, dict):
                raise DocumentError("term must be an object", path)
            extra = set(tr) - _TERM_KEYS
            if extra:
                k = sorted(extra)[0]
                raise DocumentError(f"unknown field {k!r}", f"{path}.{k}")
            dx = tr.get("dx")
            if not (isinstance(dx, list) and len(dx) == 2
                    and all(type(k) is int and k >= 0 for k in dx)):
                raise DocumentError("dx must be two non-negative integers", f"{path}.dx")
            if tuple(dx) in terms:
                raise DocumentError("duplicate multi-index", f"{path}.dx")
            text = tr.get("coef")
            if not isinstance(text, str):
                raise DocumentError("coef must be a string expression", f"{path}.coef")
            try:
                value = parse_coef(text, ring, bindings)
            except ScalarParseError as exc:
                raise DocumentError(exc.args[0].split(" (at column")[0], f"{path}.coef",
                                    exc.position) from None
            except ZeroDivisionError:
                raise DocumentError("division by zero", f"{path}.coef") from None
            terms[tuple(dx)] = value
        doc.operator = DiffOp(ring, terms)
        doc.ring = ring
    return doc


def to_dict(scalars, entries, operator=None, name=None):
    """Document dict with deterministic ordering.

    ``scalars`` maps a/g2/g3 to a value or None (symbolic); ``entries`` is a
    sequence of :class:`EntrySpec` or :class:`LocusEntry`.
    """
    out = {"format": FORMAT_VERSION}
    if name is not None:
        out["name"] = name
    out["scalars"] = {k: ("sym" if scalars.get(k) is None else str(S(scalars[k]))) for k in SYMBOLS}
    loc = []
    for e in entries:
        d = {"alpha": [str(e.alpha.c1), str(e.alpha.c2)]}
        if e.coupling is not None:
            d["coupling"] = str(e.coupling)
        d["kind"] = e.kind
        if e.kind == "elliptic":
            d["scale"] = str(e.scale)
        loc.append(d)
    out["locus"] = loc
    if operator is not None:
        out["operator"] = [{"dx": list(k), "coef": format_coef(v)} for k, v in operator.items()]
    return out


def dumps(scalars, entries, operator=None, name=None):
    return json.dumps(to_dict(scalars, entries, operator, name), indent=1) + "\n"


def document_text(doc):
    return dumps(doc.scalars, doc.entries, doc.operator, doc.name)


__all__ = ["DocumentError", "Document", "EntrySpec", "loads", "from_dict", "dumps", "to_dict",
           "format_coef", "parse_coef", "build_ring", "document_text", "FORMAT_VERSION"]
