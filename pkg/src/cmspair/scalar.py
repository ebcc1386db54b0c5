"""Exact scalars: elements of the rational function field Q(a, g2, g3).

A :class:`Scalar` is a reduced fraction of two integer polynomials in the
indeterminates ``a`` (deformation parameter) and ``g2``, ``g3`` (Weierstrass
invariants).  Numerator and denominator are kept coprime and the leading
coefficient of the denominator (lex order a > g2 > g3) is positive, so two
scalars are equal exactly when their stored polynomials coincide.
"""

from __future__ import annotations

import ast
from fractions import Fraction
from numbers import Rational

import flint

SYMBOLS = ("a", "g2", "g3")
CTX = flint.fmpz_mpoly_ctx.get(SYMBOLS, "lex")

_ZERO_POLY = CTX.constant(0)
_ONE_POLY = CTX.constant(1)


class ScalarError(ArithmeticError):
    pass


class DivisionByZero(ScalarError, ZeroDivisionError):
    pass


class PoleAtSpecialization(ScalarError):
    pass


class ScalarParseError(ValueError):
    """Raised for malformed scalar text; ``position`` is a 0-based column."""

    def __init__(self, message, position=0):
        super().__init__(f"{message} (at column {position + 1})")
        self.position = position


def _poly(value):
    if isinstance(value, flint.fmpz_mpoly):
        return value
    return CTX.constant(int(value))


class Scalar:
    __slots__ = ("num", "den")

    def __init__(self, num=0, den=1, *, _reduced=False):
        if isinstance(num, Fraction) and den == 1:
            num, den = num.numerator, num.denominator
        num = _poly(num)
        den = _poly(den)
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        if not _reduced:
            if num.is_zero():
                den = _ONE_POLY
            else:
                g = num.gcd(den)
                if not g.is_one():
                    num = num // g
                    den = den // g
            if den.leading_coefficient() < 0:
                num, den = -num, -den
        self.num = num
        self.den = den

    # -- construction -------------------------------------------------
    @classmethod
    def coerce(cls, value):
        if isinstance(value, Scalar):
            return value
        if isinstance(value, bool):
            raise TypeError("bool is not a scalar")
        if isinstance(value, int):
            return cls(CTX.constant(value), _ONE_POLY, _reduced=True)
        if isinstance(value, Rational):
            f = Fraction(value)
            return cls(CTX.constant(f.numerator), CTX.constant(f.denominator), _reduced=True)
        if isinstance(value, str):
            return parse_scalar(value)
        raise TypeError(f"cannot convert {type(value).__name__} to Scalar")

    @classmethod
    def symbol(cls, name):
        return cls(CTX.gen(SYMBOLS.index(name)), _ONE_POLY, _reduced=True)

    # -- predicates ---------------------------------------------------
    def is_zero(self):
        return self.num.is_zero()

    def is_one(self):
        return self.num.is_one() and self.den.is_one()

    def is_constant(self):
        return self.num.is_constant() and self.den.is_constant()

    def free_symbols(self):
        used = set()
        for poly in (self.num, self.den):
            for exps in poly.monoms():
                used.update(s for s, e in zip(SYMBOLS, exps) if e)
        return {s for s in SYMBOLS if s in used}

    def to_fraction(self):
        """Return the value as a Fraction; only valid for constant scalars."""
        if not self.is_constant():
            raise ValueError(f"{self} is not a rational constant")
        return Fraction(int(self.num.leading_coefficient()) if not self.num.is_zero() else 0,
                        int(self.den.leading_coefficient()))

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = Scalar.coerce(other)
            except TypeError:
                return NotImplemented
        if self.den.is_one() and other.den.is_one():
            return Scalar(self.num + other.num, _ONE_POLY, _reduced=True)
        if self.den == other.den:
            return Scalar(self.num + other.num, self.den)
        return Scalar(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(-self.num, self.den, _reduced=True)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = Scalar.coerce(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return Scalar.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = Scalar.coerce(other)
            except TypeError:
                return NotImplemented
        if self.num.is_zero() or other.num.is_zero():
            return ZERO
        if self.den.is_one() and other.den.is_one():
            return Scalar(self.num * other.num, _ONE_POLY, _reduced=True)
        # cross-cancel before multiplying to keep the gcds small
        g1 = self.num.gcd(other.den)
        g2 = other.num.gcd(self.den)
        n1, d2 = (self.num, other.den) if g1.is_one() else (self.num // g1, other.den // g1)
        n2, d1 = (other.num, self.den) if g2.is_one() else (other.num // g2, self.den // g2)
        den = d1 * d2
        num = n1 * n2
        if den.leading_coefficient() < 0:
            num, den = -num, -den
        return Scalar(num, den, _reduced=True)

    __rmul__ = __mul__

    def inverse(self):
        if self.num.is_zero():
            raise DivisionByZero("division by the zero scalar")
        return Scalar(self.den, self.num, _reduced=False)

    def __truediv__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = Scalar.coerce(other)
            except TypeError:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return Scalar.coerce(other) / self

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        return Scalar(self.num ** n, self.den ** n, _reduced=True)

    def __eq__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = Scalar.coerce(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __hash__(self):
        return hash((str(self.num), str(self.den)))

    def __bool__(self):
        return not self.num.is_zero()

    # -- substitution -------------------------------------------------
    def specialize(self, bindings):
        """Substitute rational values for some of a, g2, g3.

        ``bindings`` maps symbol names to rationals (ints, Fractions, or
        constant Scalars).  Raises PoleAtSpecialization if the denominator
        vanishes.
        """
        vals = {}
        for name, value in bindings.items():
            if name not in SYMBOLS:
                raise KeyError(f"unknown symbol {name!r}")
            if isinstance(value, Scalar):
                value = value.to_fraction()
            vals[SYMBOLS.index(name)] = Fraction(value)
        if not vals:
            return self
        num = _subst(self.num, vals)
        den = _subst(self.den, vals)
        if den.is_zero():
            raise PoleAtSpecialization(f"denominator of {self} vanishes at {bindings}")
        return num / den

    def evaluate(self, values):
        """Numeric value for a full assignment; ``values`` maps every used symbol."""
        nv = _eval_poly(self.num, values)
        dv = _eval_poly(self.den, values)
        if isinstance(nv, int) and isinstance(dv, int):
            return Fraction(nv, dv)
        return nv / dv

    # -- printing -----------------------------------------------------
    def __str__(self):
        if self.den.is_one():
            return str(self.num)
        ns = str(self.num)
        ds = str(self.den)
        if _nterms(self.num) > 1:
            ns = f"({ns})"
        if _nterms(self.den) > 1 or not self.den.is_constant():
            ds = f"({ds})"
        return f"{ns}/{ds}"

    def __repr__(self):
        return f"Scalar({str(self)!r})"


def _nterms(poly):
    return len(poly.monoms())


def _subst(poly, vals):
    """Substitute Fraction values for the variables indexed in ``vals``."""
    out = ZERO
    for exps, coeff in poly.to_dict().items():
        factor = Fraction(int(coeff))
        rem = [0, 0, 0]
        for i, e in enumerate(map(int, exps)):
            if i in vals:
                factor *= vals[i] ** e
            else:
                rem[i] = e
        if factor:
            mono = Scalar(CTX.from_dict({tuple(rem): 1}), _ONE_POLY, _reduced=True)
            out = out + mono * factor
    return out


def _eval_poly(poly, values):
    total = 0
    for exps, coeff in poly.to_dict().items():
        term = int(coeff)
        for name, e in zip(SYMBOLS, map(int, exps)):
            if e:
                term = term * values[name] ** e
        total = total + term
    return total


ZERO = Scalar(_ZERO_POLY, _ONE_POLY, _reduced=True)
ONE = Scalar(_ONE_POLY, _ONE_POLY, _reduced=True)


def S(value):
    """Shorthand coercion used throughout the package."""
    return Scalar.coerce(value)


def symbols():
    return tuple(Scalar.symbol(s) for s in SYMBOLS)


# -- textual form ------------------------------------------------------

_BINOPS = {ast.Add: "add", ast.Sub: "sub", ast.Mult: "mul", ast.Div: "div", ast.Pow: "pow"}


def parse_expression_tree(text, leaf):
    """Parse infix text with ``+ - * / ^`` and hand leaves to ``leaf``.

    ``leaf(node, pos)`` receives each ast.Name / ast.Call / ast.Constant
    (``pos`` maps an ast column to a column of ``text``) and returns a value
    supporting arithmetic.  Shared by the scalar parser and
    the coefficient-expression parser in the serialization layer.
    """
    if "**" in text:
        raise ScalarParseError("use '^' for powers", text.index("**"))
    lead = len(text) - len(text.lstrip())
    stripped = text.strip()
    # map columns of the rewritten source back to the caller's text
    back = []
    for i, ch in enumerate(stripped):
        back.extend([lead + i] * (2 if ch == "^" else 1))
    back.append(lead + len(stripped))

    def pos(col):
        return back[min(max(col, 0), len(back) - 1)]

    try:
        tree = ast.parse(stripped.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ScalarParseError(f"syntax error: {exc.msg}", pos((exc.offset or 1) - 1)) from None

    def walk(node):
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            left = walk(node.left)
            if isinstance(node.op, ast.Pow):
                exp = _int_exponent(node.right)
                if exp is None:
                    raise ScalarParseError("exponent must be an integer literal",
                                           pos(node.right.col_offset))
                try:
                    return left ** exp
                except ZeroDivisionError:
                    raise ScalarParseError("negative power of zero",
                                           pos(node.col_offset)) from None
            right = walk(node.right)
            try:
                if isinstance(node.op, ast.Add):
                    return left + right
                if isinstance(node.op, ast.Sub):
                    return left - right
                if isinstance(node.op, ast.Mult):
                    return left * right
                return left / right
            except ZeroDivisionError:
                raise ScalarParseError("division by zero", pos(node.right.col_offset)) from None
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            val = walk(node.operand)
            return -val if isinstance(node.op, ast.USub) else val
        return leaf(node, pos)

    return walk(tree.body)


def _int_exponent(node):
    sign = 1
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        sign = -1 if isinstance(node.op, ast.USub) else 1
        node = node.operand
    if isinstance(node, ast.Constant) and type(node.value) is int:
        return sign * node.value
    return None


def _scalar_leaf(node, pos):
    if isinstance(node, ast.Constant) and type(node.value) is int:
        return Scalar.coerce(node.value)
    if isinstance(node, ast.Name) and node.id in SYMBOLS:
        return Scalar.symbol(node.id)
    at = pos(getattr(node, "col_offset", 0))
    if isinstance(node, ast.Name):
        raise ScalarParseError(f"unknown symbol {node.id!r}", at)
    raise ScalarParseError("unexpected token in scalar expression", at)


def parse_scalar(text):
    """Parse the textual scalar form, e.g. ``"3/16*(a^2+1)*(3*a^2-1)"``."""
    if not text.strip():
        raise ScalarParseError("empty scalar expression", 0)
    try:
        return parse_expression_tree(text, _scalar_leaf)
    except DivisionByZero:
        raise ScalarParseError("division by zero", 0) from None


def is_excluded_parameter(a):
    """Check a rational deformation parameter against the model's exclusions.

    Returns ``(excluded, reason)``.  The irrational exclusions
    a^2 = (13 +- 4 sqrt 10)/3 can never be hit by a rational value.
    """
    a = Fraction(a.to_fraction() if isinstance(a, Scalar) else a)
    if a == 0:
        return True, "a = 0: the lines a*e1 +- e2 degenerate"
    if a in (1, -1):
        return True, "a = +-1: the locus is the B2 positive system, not a deformation"
    sq = a * a
    if sq == 3 or sq == Fraction(1, 3):
        return True, "a^2 in {3, 1/3}: a coupling constant C1 or C2 vanishes"
    if sq == Fraction(7, 3) or sq == Fraction(3, 7):
        return True, "a^2 in {7/3, 3/7}: the potential conditions degenerate"
    return False, "not excluded (irrational exclusions (13 +- 4 sqrt 10)/3 are automatically avoided)"
