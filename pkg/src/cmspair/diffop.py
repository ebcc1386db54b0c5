"""Normal-ordered differential operators in two variables.

A :class:`DiffOp` stores ``{(k1, k2): a}`` meaning ``sum a(x) d1^k1 d2^k2``
with coefficients standing to the left of the derivatives.
"""

from __future__ import annotations

from math import comb

from .xsymbols import E1, E2, Covector, XiPoly


class LevelOutOfRange(ValueError):
    pass


def _derivative_table(c, m1, m2):
    """{(j1, j2): d1^j1 d2^j2 c} for j1 <= m1, j2 <= m2."""
    table = {(0, 0): c}
    col = c
    for j1 in range(m1 + 1):
        if j1:
            col = col.diff(E1)
            table[(j1, 0)] = col
        row = col
        for j2 in range(1, m2 + 1):
            row = row.diff(E2)
            table[(j1, j2)] = row
    return table


class DiffOp:
    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms=None):
        self.ring = ring
        clean = {}
        for k, v in (terms or {}).items():
            v = ring.coerce(v)
            if not v.is_zero():
                clean[tuple(k)] = v
        self.terms = clean

    @classmethod
    def _raw(cls, ring, terms):
        obj = cls.__new__(cls)
        obj.ring = ring
        obj.terms = terms
        return obj

    # -- constructors -----------------------------------------------
    @classmethod
    def identity(cls, ring):
        return cls(ring, {(0, 0): ring.one()})

    @classmethod
    def zero(cls, ring):
        return cls._raw(ring, {})

    @classmethod
    def mult(cls, ring, c):
        return cls(ring, {(0, 0): c})

    @classmethod
    def partial(cls, ring, k1=0, k2=0):
        return cls(ring, {(k1, k2): ring.one()})

    @classmethod
    def directional(cls, ring, alpha, n=1):
        """<alpha, d_x>^n, expanded."""
        terms = {}
        for j in range(n + 1):
            c = alpha.c1 ** j * alpha.c2 ** (n - j) * comb(n, j)
            if not c.is_zero():
                terms[(j, n - j)] = ring.const(c)
        return cls._raw(ring, terms)

    @classmethod
    def from_symbol(cls, ring, sym):
        """Quantize xi^p -> d^p with coefficients on the left."""
        return cls(ring, dict(sym.terms))

    # -- structure --------------------------------------------------
    def is_zero(self):
        return not self.terms

    def order(self):
        return max((k1 + k2 for k1, k2 in self.terms), default=-1)

    def symbol(self):
        return XiPoly._raw(dict(self.terms))

    def symbol_level(self, k, m0=None):
        """Homogeneous part of the symbol of degree ``m0 - k`` (m0 = order)."""
        m0 = self.order() if m0 is None else m0
        if k < 0 or k > m0:
            raise LevelOutOfRange(f"level {k} outside 0..{m0}")
        d = m0 - k
        return XiPoly._raw({p: v for p, v in self.terms.items() if p[0] + p[1] == d})

    def coefficient(self, k1, k2):
        return self.terms.get((k1, k2), self.ring.zero())

    def items(self):
        return sorted(self.terms.items())

    def __eq__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash(tuple((k, str(v)) for k, v in self.items()))

    def __repr__(self):
        if not self.terms:
            return "DiffOp(0)"
        return "DiffOp(" + " + ".join(f"({v})*d1^{k[0]}*d2^{k[1]}" for k, v in self.items()) + ")"

    # -- linear structure -------------------------------------------
    def _coerce_op(self, other):
        if isinstance(other, DiffOp):
            return other
        return DiffOp.mult(self.ring, other)

    def __add__(self, other):
        other = self._coerce_op(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            if k in out:
                s = out[k] + v
                if s.is_zero():
                    del out[k]
                else:
                    out[k] = s
            else:
                out[k] = v
        return DiffOp._raw(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return DiffOp._raw(self.ring, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce_op(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        """Left multiplication by a function or constant."""
        c = self.ring.coerce(c)
        out = {}
        for k, v in self.terms.items():
            p = c * v
            if not p.is_zero():
                out[k] = p
        return DiffOp._raw(self.ring, out)

    def __mul__(self, other):
        if isinstance(other, DiffOp):
            return self.compose(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __matmul__(self, other):
        return self.compose(other)

    def __pow__(self, n):
        out = DiffOp.identity(self.ring)
        for _ in range(n):
            out = out.compose(self)
        return out

    # -- algebra ----------------------------------------------------
    def compose(self, other):
        """self o other, normal ordered by the Leibniz rule."""
        if not self.terms or not other.terms:
            return DiffOp.zero(self.ring)
        m1 = max(k[0] for k in self.terms)
        m2 = max(k[1] for k in self.terms)
        out = {}
        for (n1, n2), b in other.terms.items():
            table = _derivative_table(b, m1, m2)
            for (k1, k2), a in self.terms.items():
                for j1 in range(k1 + 1):
                    for j2 in range(k2 + 1):
                        db = table[(j1, j2)]
                        if db.is_zero():
                            continue
                        c = a * db
                        w = comb(k1, j1) * comb(k2, j2)
                        if w != 1:
                            c = c * w
                        key = (k1 - j1 + n1, k2 - j2 + n2)
                        out[key] = out[key] + c if key in out else c
        return DiffOp._raw(self.ring, {k: v for k, v in out.items() if not v.is_zero()})

    def commutator(self, other):
        return self.compose(other) - other.compose(self)

    def formal_adjoint(self):
        """sum_p (-d)^p o a_p."""
        out = {}
        for (k1, k2), a in self.terms.items():
            table = _derivative_table(a, k1, k2)
            sign = -1 if (k1 + k2) % 2 else 1
            for j1 in range(k1 + 1):
                for j2 in range(k2 + 1):
                    da = table[(j1, j2)]
                    if da.is_zero():
                        continue
                    c = da * (sign * comb(k1, j1) * comb(k2, j2))
                    key = (k1 - j1, k2 - j2)
                    out[key] = out[key] + c if key in out else c
        return DiffOp._raw(self.ring, {k: v for k, v in out.items() if not v.is_zero()})

    def map_coeffs(self, f, ring=None):
        ring = ring or self.ring
        out = {}
        for k, v in self.terms.items():
            w = f(v)
            if not w.is_zero():
                out[k] = w
        return DiffOp._raw(ring, out)


def compose(A, B):
    return A.compose(B)


def commutator(A, B):
    return A.commutator(B)


def formal_adjoint(Q):
    return Q.formal_adjoint()


def symbol_level(P, k, m0=None):
    return P.symbol_level(k, m0)


def schroedinger(ring, potential):
    """-(d1^2 + d2^2) + potential."""
    return DiffOp(ring, {(2, 0): -ring.one(), (0, 2): -ring.one(), (0, 0): potential})


def directional(ring, alpha, n=1):
    if not isinstance(alpha, Covector):
        alpha = Covector(*alpha)
    return DiffOp.directional(ring, alpha, n)


__all__ = ["DiffOp", "LevelOutOfRange", "compose", "commutator", "formal_adjoint",
           "symbol_level", "schroedinger", "directional"]
