"""Coefficient rings for differential operators on R^2.

Two rings are provided, both closed under x-differentiation:

* :class:`RationalPoleRing` -- polynomials in x1, x2 over Q(a, g2, g3)
  divided by a monomial in the locus linear forms x_alpha = <alpha, x>.
  Inverse-square potentials C/x_alpha^2 live here.
* :class:`EllipticRing` -- polynomials in generators p_i = wp(k_i x_alpha_i)
  and q_i = wp'(k_i x_alpha_i), reduced so every q_i appears with degree at
  most one via q^2 = 4p^3 - g2 p - g3.  Generators at different arguments
  are treated as algebraically independent.
"""

from __future__ import annotations

from math import factorial

from .scalar import ONE, ZERO, S, Scalar
from .xsymbols import Covector, NotDivisible


class RingMismatch(TypeError):
    pass


# -- bivariate polynomial helpers (dict {(i, j): Scalar}) ---------------

def _padd(p, q, sign=1):
    out = dict(p)
    for k, v in q.items():
        if sign < 0:
            v = -v
        if k in out:
            s = out[k] + v
            if s.is_zero():
                del out[k]
            else:
                out[k] = s
        else:
            out[k] = v
    return out


def _pmul(p, q):
    out = {}
    for k1, v1 in p.items():
        for k2, v2 in q.items():
            k = (k1[0] + k2[0], k1[1] + k2[1])
            pr = v1 * v2
            out[k] = out[k] + pr if k in out else pr
    return {k: v for k, v in out.items() if not v.is_zero()}


def _pscale(p, c):
    if c.is_zero():
        return {}
    return {k: v * c for k, v in p.items()}


def _pdiff(p, v):
    out = {}
    for (i, j), c in p.items():
        if i and not v.c1.is_zero():
            k = (i - 1, j)
            t = c * v.c1 * i
            out[k] = out[k] + t if k in out else t
        if j and not v.c2.is_zero():
            k = (i, j - 1)
            t = c * v.c2 * j
            out[k] = out[k] + t if k in out else t
    return {k: c for k, c in out.items() if not c.is_zero()}


def _pdiv_linear(p, alpha):
    """Exact quotient of p by alpha1*x1 + alpha2*x2, or None."""
    var = 1 if not alpha.c2.is_zero() else 0
    lead = alpha.c2 if var == 1 else alpha.c1
    other = alpha.c1 if var == 1 else alpha.c2
    inv = lead.inverse()
    work = dict(p)
    quot = {}
    while True:
        cands = [k for k in work if k[var] > 0]
        if not cands:
            break
        k = max(cands, key=lambda t: (t[var], t))
        c = work.pop(k)
        q = c * inv
        qk = (k[0], k[1] - 1) if var == 1 else (k[0] - 1, k[1])
        quot[qk] = q
        if not other.is_zero():
            sk = (qk[0] + 1, qk[1]) if var == 1 else (qk[0], qk[1] + 1)
            sub = q * other
            if sk in work:
                s = work[sk] - sub
                if s.is_zero():
                    del work[sk]
                else:
                    work[sk] = s
            else:
                work[sk] = -sub
    if work:
        return None
    return quot


class CoefElem:
    """Common interface; concrete elements come from a ring."""

    __slots__ = ("ring",)

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        out = self.ring.one()
        for _ in range(n):
            out = out * self
        return out

    def __truediv__(self, other):
        if isinstance(other, CoefElem):
            return self * other.inverse()
        return self * S(other).inverse()

    def constant_value(self):
        """The Scalar value of an x-constant element, else None."""
        raise NotImplementedError

    def __eq__(self, other):
        if isinstance(other, CoefElem) or isinstance(other, (int, Scalar)):
            return (self - other).is_zero()
        return NotImplemented

    def __hash__(self):
        return hash(str(self))


# -- rational pole ring --------------------------------------------------

class RationalPoleRing:
    """Q(a,g2,g3)[x1, x2] localized at the given linear forms."""

    kind = "rational"

    def __init__(self, forms):
        self.forms = tuple(f if isinstance(f, Covector) else Covector(*f) for f in forms)
        n = len(self.forms)
        self._zero_den = (0,) * n
        self._form_polys = [{(1, 0): f.c1, (0, 1): f.c2} for f in self.forms]
        self._form_polys = [{k: v for k, v in fp.items() if not v.is_zero()} for fp in self._form_polys]
        self._pow_cache = {}

    def __eq__(self, other):
        return isinstance(other, RationalPoleRing) and self.forms == other.forms

    def __hash__(self):
        return hash(("rational", self.forms))

    def _form_pow(self, i, k):
        key = (i, k)
        if key not in self._pow_cache:
            if k == 0:
                val = {(0, 0): ONE}
            else:
                val = _pmul(self._form_pow(i, k - 1), self._form_polys[i])
            self._pow_cache[key] = val
        return self._pow_cache[key]

    def zero(self):
        return RationalPole(self, {}, self._zero_den)

    def one(self):
        return RationalPole(self, {(0, 0): ONE}, self._zero_den)

    def const(self, c):
        c = S(c)
        if c.is_zero():
            return self.zero()
        return RationalPole(self, {(0, 0): c}, self._zero_den)

    def x(self, i):
        """The coordinate x1 (i=0) or x2 (i=1)."""
        return RationalPole(self, {(1, 0) if i == 0 else (0, 1): ONE}, self._zero_den)

    def form_power(self, i, k):
        """x_alpha_i ^ k for any integer k."""
        if k >= 0:
            return RationalPole(self, dict(self._form_pow(i, k)), self._zero_den)
        den = list(self._zero_den)
        den[i] = -k
        return RationalPole(self, {(0, 0): ONE}, tuple(den))

    def potential(self, i, coupling, j=0):
        """j-th t-derivative of C/t^2, evaluated at t = x_alpha_i."""
        c = S(coupling) * ((-1) ** j * factorial(j + 1))
        den = list(self._zero_den)
        den[i] = j + 2
        return RationalPole(self, {(0, 0): c}, tuple(den)).canonical()

    def coerce(self, value):
        if isinstance(value, RationalPole):
            if value.ring is not self and value.ring != self:
                raise RingMismatch("elements from different rational rings")
            return value
        return self.const(value)


class RationalPole(CoefElem):
    __slots__ = ("num", "den")

    def __init__(self, ring, num, den):
        self.ring = ring
        self.num = num
        self.den = den

    def canonical(self):
        if not self.num:
            return self.ring.zero()
        num = self.num
        den = list(self.den)
        for i, e in enumerate(den):
            while e > 0:
                q = _pdiv_linear(num, self.ring.forms[i])
                if q is None:
                    break
                num = q
                e -= 1
            den[i] = e
        return RationalPole(self.ring, num, tuple(den))

    def is_zero(self):
        return not self.num

    def constant_value(self):
        if not self.num:
            return ZERO
        if any(self.den) or list(self.num) != [(0, 0)]:
            return None
        return self.num[(0, 0)]

    def inverse(self):
        """Inverse of c * prod x_alpha^k; other elements are not units."""
        if not self.num:
            raise ZeroDivisionError("inverse of zero coefficient")
        num = self.num
        pows = [0] * len(self.den)
        for i, f in enumerate(self.ring.forms):
            while True:
                q = _pdiv_linear(num, f)
                if q is None:
                    break
                num = q
                pows[i] += 1
        if list(num) != [(0, 0)]:
            raise ValueError("coefficient is not invertible in the pole ring")
        c = num[(0, 0)].inverse()
        out = RationalPole(self.ring, {(0, 0): c}, tuple(pows))
        back = self.ring.one()
        for i, e in enumerate(self.den):
            if e:
                back = back * self.ring.form_power(i, e)
        return out * back

    def _lift(self, target):
        num = self.num
        for i, (have, want) in enumerate(zip(self.den, target)):
            if want > have:
                num = _pmul(num, self.ring._form_pow(i, want - have))
        return num

    def __add__(self, other):
        other = self.ring.coerce(other)
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            return RationalPole(self.ring, _padd(self.num, other.num), self.den).canonical()
        target = tuple(max(x, y) for x, y in zip(self.den, other.den))
        num = _padd(self._lift(target), other._lift(target))
        return RationalPole(self.ring, num, target).canonical()

    def __neg__(self):
        return RationalPole(self.ring, {k: -v for k, v in self.num.items()}, self.den)

    def __mul__(self, other):
        if isinstance(other, RationalPole):
            if other.ring is not self.ring and other.ring != self.ring:
                raise RingMismatch("elements from different rational rings")
            if not self.num or not other.num:
                return self.ring.zero()
            den = tuple(x + y for x, y in zip(self.den, other.den))
            return RationalPole(self.ring, _pmul(self.num, other.num), den).canonical()
        if isinstance(other, CoefElem):
            raise RingMismatch("cannot multiply elements of different rings")
        try:
            c = S(other)
        except TypeError:
            return NotImplemented
        return RationalPole(self.ring, _pscale(self.num, c), self.den if not c.is_zero() else self.ring._zero_den)

    def diff(self, v):
        """Derivative along <v, d_x>."""
        if not self.num:
            return self
        if not any(self.den):
            return RationalPole(self.ring, _pdiff(self.num, v), self.den)
        ring = self.ring
        active = [i for i, e in enumerate(self.den) if e]
        bump = tuple(e + 1 if e else 0 for e in self.den)
        # d(N/prod x_i^e_i) = (dN * prod x_i - sum e_i <alpha_i,v> N prod_{j!=i} x_j) / prod x_i^(e_i+1)
        base = _pdiff(self.num, v)
        for i in active:
            base = _pmul(base, ring._form_polys[i])
        for i in active:
            c = ring.forms[i].dot(v) * self.den[i]
            if c.is_zero():
                continue
            t = _pscale(self.num, c)
            for j in active:
                if j != i:
                    t = _pmul(t, ring._form_polys[j])
            base = _padd(base, t, sign=-1)
        return RationalPole(ring, base, bump).canonical()

    def evaluate(self, x1, x2, scalars):
        """Numeric value at (x1, x2); ``scalars`` maps a, g2, g3 to numbers."""
        total = 0
        for (i, j), c in self.num.items():
            total += c.evaluate(scalars) * x1 ** i * x2 ** j
        den = 1
        for f, e in zip(self.ring.forms, self.den):
            if e:
                den *= (f.c1.evaluate(scalars) * x1 + f.c2.evaluate(scalars) * x2) ** e
        return total / den

    def specialize(self, bindings, ring=None):
        ring = ring or self.ring
        num = {k: v.specialize(bindings) for k, v in self.num.items()}
        return RationalPole(ring, {k: v for k, v in num.items() if not v.is_zero()}, self.den).canonical()

    def __str__(self):
        from .serialize import format_coef
        return format_coef(self)

    def __repr__(self):
        return f"RationalPole({self})"


# -- elliptic ring -----------------------------------------------------

class EllipticRing:
    """Free differential ring on wp/wp' generators at scaled linear arguments.

    ``generators`` is a sequence of ``(alpha, k)``: generator i carries
    p_i = wp(k * x_alpha) and q_i = wp'(k * x_alpha).
    """

    kind = "elliptic"

    def __init__(self, generators, g2=None, g3=None):
        gens = []
        for alpha, k in generators:
            if not isinstance(alpha, Covector):
                alpha = Covector(*alpha)
            gens.append((alpha, S(k)))
        self.generators = tuple(gens)
        self.n = len(gens)
        self.g2 = Scalar.symbol("g2") if g2 is None else S(g2)
        self.g3 = Scalar.symbol("g3") if g3 is None else S(g3)
        self._unit = (0,) * (2 * self.n)
        self._dir_cache = {}
        self._qsq = None

    def __eq__(self, other):
        return (isinstance(other, EllipticRing) and self.generators == other.generators
                and self.g2 == other.g2 and self.g3 == other.g3)

    def __hash__(self):
        return hash(("elliptic", self.generators, str(self.g2), str(self.g3)))

    @property
    def forms(self):
        return tuple(a for a, _ in self.generators)

    def zero(self):
        return Elliptic(self, {})

    def one(self):
        return Elliptic(self, {self._unit: ONE})

    def const(self, c):
        c = S(c)
        return Elliptic(self, {self._unit: c} if not c.is_zero() else {})

    def p(self, i):
        e = list(self._unit)
        e[i] = 1
        return Elliptic(self, {tuple(e): ONE})

    def q(self, i):
        e = list(self._unit)
        e[self.n + i] = 1
        return Elliptic(self, {tuple(e): ONE})

    def coerce(self, value):
        if isinstance(value, Elliptic):
            if value.ring is not self and value.ring != self:
                raise RingMismatch("elements from different elliptic rings")
            return value
        return self.const(value)

    def wp_derivative(self, i, j):
        """wp^(j) at generator i's argument, as a ring element."""
        out = self.p(i)
        for _ in range(j):
            out = out.own_derivative(i)
        return out

    def potential(self, i, coefficient, j=0):
        """j-th t-derivative of c*wp(k t) at t = x_alpha_i."""
        _, k = self.generators[i]
        return self.wp_derivative(i, j) * (S(coefficient) * k ** j)

    def direction_factors(self, v):
        key = (v.c1, v.c2)
        fs = self._dir_cache.get(key)
        if fs is None:
            fs = tuple(k * alpha.dot(v) for alpha, k in self.generators)
            self._dir_cache[key] = fs
        return fs

    def qsquare(self):
        """Expansion of q_i^2 as a list of (p-exponent increment, coefficient)."""
        if self._qsq is None:
            self._qsq = [(3, S(4)), (1, -self.g2), (0, -self.g3)]
            self._qsq = [(e, c) for e, c in self._qsq if not c.is_zero()]
        return self._qsq


def _reduce_monomial(n, exps, coeff, qsq, out):
    """Add coeff * monomial to ``out`` rewriting q_i^2 (q exponents <= 2)."""
    pending = [(list(exps), coeff)]
    for i in range(n):
        if exps[n + i] < 2:
            continue
        nxt = []
        for e, c in pending:
            for inc, cc in qsq:
                e2 = list(e)
                e2[i] += inc
                e2[n + i] -= 2
                nxt.append((e2, c * cc))
        pending = nxt
    for e, c in pending:
        key = tuple(e)
        if key in out:
            s = out[key] + c
            if s.is_zero():
                del out[key]
            else:
                out[key] = s
        elif not c.is_zero():
            out[key] = c


class Elliptic(CoefElem):
    __slots__ = ("terms",)

    def __init__(self, ring, terms):
        self.ring = ring
        self.terms = terms

    def is_zero(self):
        return not self.terms

    def constant_value(self):
        if not self.terms:
            return ZERO
        if list(self.terms) != [self.ring._unit]:
            return None
        return self.terms[self.ring._unit]

    def inverse(self):
        c = self.constant_value()
        if c is None or c.is_zero():
            raise ValueError("only nonzero constants are invertible in the elliptic ring")
        return self.ring.const(c.inverse())

    def __add__(self, other):
        other = self.ring.coerce(other)
        if not other.terms:
            return self
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
        return Elliptic(self.ring, out)

    def __neg__(self):
        return Elliptic(self.ring, {k: -v for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, Elliptic):
            if other.ring is not self.ring and other.ring != self.ring:
                raise RingMismatch("elements from different elliptic rings")
            n = self.ring.n
            qsq = self.ring.qsquare()
            out = {}
            for k1, v1 in self.terms.items():
                for k2, v2 in other.terms.items():
                    e = tuple(x + y for x, y in zip(k1, k2))
                    c = v1 * v2
                    if max(e[n:], default=0) < 2:
                        if e in out:
                            s = out[e] + c
                            if s.is_zero():
                                del out[e]
                            else:
                                out[e] = s
                        else:
                            out[e] = c
                    else:
                        _reduce_monomial(n, e, c, qsq, out)
            return Elliptic(self.ring, out)
        if isinstance(other, CoefElem):
            raise RingMismatch("cannot multiply elements of different rings")
        try:
            c = S(other)
        except TypeError:
            return NotImplemented
        if c.is_zero():
            return self.ring.zero()
        return Elliptic(self.ring, {k: v * c for k, v in self.terms.items()})

    def _diff_with(self, factors):
        ring = self.ring
        n = ring.n
        qsq = ring.qsquare()
        half_g2 = ring.g2 / 2
        out = {}
        for e, c in self.terms.items():
            for i in range(n):
                f = factors[i]
                if f.is_zero():
                    continue
                pe, qe = e[i], e[n + i]
                if pe:
                    e2 = list(e)
                    e2[i] -= 1
                    e2[n + i] += 1
                    _reduce_monomial(n, e2, c * f * pe, qsq, out)
                if qe:
                    # d q = f * (6 p^2 - g2/2)
                    e2 = list(e)
                    e2[n + i] -= 1
                    e2[i] += 2
                    _reduce_monomial(n, e2, c * f * 6, qsq, out)
                    if not half_g2.is_zero():
                        e3 = list(e)
                        e3[n + i] -= 1
                        _reduce_monomial(n, e3, -(c * f * half_g2), qsq, out)
        return Elliptic(ring, out)

    def diff(self, v):
        """Derivative along <v, d_x> (chain factors k_i <alpha_i, v>)."""
        return self._diff_with(self.ring.direction_factors(v))

    def own_derivative(self, i):
        """d/dt of the generator-i argument only: p_i -> q_i, q_i -> wp''."""
        factors = [ZERO] * self.ring.n
        factors[i] = ONE
        return self._diff_with(factors)

    def support(self):
        return sorted(self.terms)

    def evaluate(self, gens, scalars):
        """Numeric value given ``gens = [(p_i, q_i), ...]`` and scalar values."""
        n = self.ring.n
        total = 0
        for e, c in self.terms.items():
            t = c.evaluate(scalars)
            for i in range(n):
                if e[i]:
                    t = t * gens[i][0] ** e[i]
                if e[n + i]:
                    t = t * gens[i][1]
            total = total + t
        return total

    def monomial_values(self, gens, scalars):
        n = self.ring.n
        vals = []
        for e, c in self.terms.items():
            t = c.evaluate(scalars)
            for i in range(n):
                if e[i]:
                    t = t * gens[i][0] ** e[i]
                if e[n + i]:
                    t = t * gens[i][1]
            vals.append(t)
        return vals

    def specialize(self, bindings, ring):
        out = {}
        for k, v in self.terms.items():
            w = v.specialize(bindings)
            if not w.is_zero():
                out[k] = w
        # q-reduction constants may have changed; re-reduce via multiplication by one
        return Elliptic(ring, out)

    def __str__(self):
        from .serialize import format_coef
        return format_coef(self)

    def __repr__(self):
        return f"Elliptic({self})"


def not_divisible(message, remainder=None):
    return NotDivisible(message, remainder)
