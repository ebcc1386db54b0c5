"""Covectors, singular loci and polynomial symbols in (xi1, xi2).

An :class:`XiPoly` is a sparse polynomial in xi1, xi2 whose coefficients are
either :class:`~cmspair.scalar.Scalar` values (x-constant symbols such as a
principal symbol) or coefficient-ring elements from :mod:`cmspair.coef`.
Coefficients only need ``+``, ``-``, ``*`` with scalars, ``is_zero`` and, for
the x-derivative operators, ``diff(direction)``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .scalar import ONE, ZERO, S, Scalar


class NotDivisible(ArithmeticError):
    """Exact division failed; ``remainder`` holds the nonzero remainder."""

    def __init__(self, message, remainder=None):
        super().__init__(message)
        self.remainder = remainder


class InvalidLocus(ValueError):
    pass


@dataclass(frozen=True)
class Covector:
    c1: Scalar
    c2: Scalar

    def __init__(self, c1, c2):
        object.__setattr__(self, "c1", S(c1))
        object.__setattr__(self, "c2", S(c2))
        if self.c1.is_zero() and self.c2.is_zero():
            raise ValueError("covector must be nonzero")

    def __iter__(self):
        return iter((self.c1, self.c2))

    def perp(self):
        return Covector(-self.c2, self.c1)

    def dot(self, other):
        return self.c1 * other.c1 + self.c2 * other.c2

    def norm2(self):
        return self.dot(self)

    def cross(self, other):
        """<self^perp, other>."""
        return self.c1 * other.c2 - self.c2 * other.c1

    def scaled(self, k):
        return Covector(self.c1 * k, self.c2 * k)

    def __neg__(self):
        return Covector(-self.c1, -self.c2)

    def __str__(self):
        return f"({self.c1}, {self.c2})"


def pairing(u, v):
    return u.dot(v)


E1 = Covector(1, 0)
E2 = Covector(0, 1)


@dataclass(frozen=True)
class LocusEntry:
    alpha: Covector
    coupling: Scalar
    kind: str = "rational"
    scale: Scalar = ONE


class Locus:
    """Ordered, pairwise non-parallel covectors with nonzero couplings."""

    def __init__(self, entries):
        built = []
        for e in entries:
            if not isinstance(e, LocusEntry):
                alpha, coupling, *rest = e
                if not isinstance(alpha, Covector):
                    alpha = Covector(*alpha)
                kind = rest[0] if rest else "rational"
                scale = S(rest[1]) if len(rest) > 1 else ONE
                e = LocusEntry(alpha, S(coupling), kind, scale)
            if e.kind not in ("rational", "elliptic"):
                raise InvalidLocus(f"unknown potential kind {e.kind!r}")
            if e.coupling.is_zero():
                raise InvalidLocus(f"coupling of {e.alpha} must be nonzero")
            if e.alpha.norm2().is_zero():
                raise InvalidLocus(f"covector {e.alpha} has zero norm")
            if e.kind == "elliptic" and e.scale.is_zero():
                raise InvalidLocus("elliptic scale must be nonzero")
            built.append(e)
        for i in range(len(built)):
            for j in range(i):
                if built[i].alpha.cross(built[j].alpha).is_zero():
                    raise InvalidLocus(f"covectors {built[j].alpha} and {built[i].alpha} are parallel")
        self.entries = tuple(built)

    @classmethod
    def from_pairs(cls, alphas, couplings):
        return cls([(a, c) for a, c in zip(alphas, couplings)])

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    @property
    def alphas(self):
        return [e.alpha for e in self.entries]

    @property
    def couplings(self):
        return [e.coupling for e in self.entries]

    def with_couplings(self, couplings):
        return Locus([LocusEntry(e.alpha, S(c), e.kind, e.scale) for e, c in zip(self.entries, couplings)])


def _is_zero(c):
    return c.is_zero()


class XiPoly:
    """Sparse polynomial in xi1, xi2: ``{(e1, e2): coefficient}``."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for k, v in terms.items():
                if isinstance(v, (int,)) or not hasattr(v, "is_zero"):
                    v = S(v)
                if not v.is_zero():
                    clean[k] = v
        self.terms = clean

    @classmethod
    def _raw(cls, terms):
        obj = cls.__new__(cls)
        obj.terms = terms
        return obj

    @classmethod
    def monomial(cls, e1, e2, coef=ONE):
        return cls({(e1, e2): coef})

    @classmethod
    def linear(cls, alpha):
        """xi_alpha = alpha1*xi1 + alpha2*xi2."""
        return cls({(1, 0): alpha.c1, (0, 1): alpha.c2})

    @classmethod
    def from_basis(cls, coeffs, alpha):
        """Sum c_k xi_alpha^k xi_{alpha^perp}^(m-k) for ``coeffs = [c_0..c_m]``."""
        m = len(coeffs) - 1
        la, lp = cls.linear(alpha), cls.linear(alpha.perp())
        out = cls()
        for k, c in enumerate(coeffs):
            if not S(c).is_zero():
                out = out + (la ** k) * (lp ** (m - k)) * S(c)
        return out

    # -- structure --------------------------------------------------
    def is_zero(self):
        return not self.terms

    def degree(self):
        return max((e1 + e2 for e1, e2 in self.terms), default=-1)

    def homogeneous_part(self, d):
        return XiPoly._raw({k: v for k, v in self.terms.items() if k[0] + k[1] == d})

    def coefficient(self, e1, e2):
        return self.terms.get((e1, e2), ZERO)

    def items(self):
        return sorted(self.terms.items())

    def __eq__(self, other):
        if not isinstance(other, XiPoly):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash(tuple(sorted((k, str(v)) for k, v in self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "XiPoly(0)"
        parts = [f"({v})*xi1^{k[0]}*xi2^{k[1]}" for k, v in self.items()]
        return "XiPoly(" + " + ".join(parts) + ")"

    # -- ring operations --------------------------------------------
    def __add__(self, other):
        if not isinstance(other, XiPoly):
            return NotImplemented
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
        return XiPoly._raw(out)

    def __neg__(self):
        return XiPoly._raw({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, XiPoly):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, XiPoly):
            out = {}
            for k1, v1 in self.terms.items():
                for k2, v2 in other.terms.items():
                    key = (k1[0] + k2[0], k1[1] + k2[1])
                    prod = v1 * v2
                    if key in out:
                        out[key] = out[key] + prod
                    else:
                        out[key] = prod
            return XiPoly._raw({k: v for k, v in out.items() if not v.is_zero()})
        return self.scale(other)

    def __rmul__(self, other):
        if isinstance(other, XiPoly):
            return NotImplemented
        return self.scale(other, left=True)

    def scale(self, c, left=False):
        if isinstance(c, (int,)) or not hasattr(c, "is_zero"):
            c = S(c)
        if c.is_zero():
            return XiPoly._raw({})
        out = {}
        for k, v in self.terms.items():
            p = c * v if left else v * c
            if not p.is_zero():
                out[k] = p
        return XiPoly._raw(out)

    def __pow__(self, n):
        out = XiPoly({(0, 0): ONE})
        for _ in range(n):
            out = out * self
        return out

    def map_coeffs(self, f):
        out = {}
        for k, v in self.terms.items():
            w = f(v)
            if not w.is_zero():
                out[k] = w
        return XiPoly._raw(out)

    # -- xi derivatives ---------------------------------------------
    def d_xi(self, i):
        out = {}
        for (e1, e2), v in self.terms.items():
            e = (e1, e2)[i]
            if e == 0:
                continue
            key = (e1 - 1, e2) if i == 0 else (e1, e2 - 1)
            out[key] = v * e
        return XiPoly._raw(out)

    def d_xi_dir(self, alpha, times=1):
        """<alpha, d_xi>^times applied to the polynomial."""
        out = self
        for _ in range(times):
            out = out.d_xi(0).scale(alpha.c1) + out.d_xi(1).scale(alpha.c2)
        return out

    def d_theta(self):
        """xi2 d/dxi1 - xi1 d/dxi2."""
        return self.d_xi(0) * XiPoly.monomial(0, 1) - self.d_xi(1) * XiPoly.monomial(1, 0)

    def times_linear(self, alpha):
        return self * XiPoly.linear(alpha)

    def div_exact_xi(self, alpha):
        """Exact quotient by xi_alpha; raises NotDivisible with the remainder."""
        quot, rem = self.divmod_linear(alpha)
        if not rem.is_zero():
            raise NotDivisible(f"not divisible by xi_{alpha}", rem)
        return quot

    def divmod_linear(self, alpha):
        # long division in the variable whose coefficient in xi_alpha is nonzero
        var = 1 if not alpha.c2.is_zero() else 0
        lead = alpha.c2 if var == 1 else alpha.c1
        other = alpha.c1 if var == 1 else alpha.c2
        inv = lead.inverse()
        work = dict(self.terms)
        quot = {}
        while True:
            cands = [k for k in work if k[var] > 0]
            if not cands:
                break
            k = max(cands, key=lambda t: (t[var], t))
            c = work.pop(k)
            q = c * inv
            qk = (k[0], k[1] - 1) if var == 1 else (k[0] - 1, k[1])
            quot[qk] = quot[qk] + q if qk in quot else q
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
        return XiPoly(quot), XiPoly(work)

    def basis_coefficients(self, alpha):
        """Coefficients ``[c_0..c_m]`` of a homogeneous degree-m polynomial in
        the basis xi_alpha^k xi_{alpha^perp}^(m-k)."""
        m = self.degree()
        if m < 0:
            return []
        if any(e1 + e2 != m for e1, e2 in self.terms):
            raise ValueError("basis expansion needs a homogeneous polynomial")
        # xi1 = (a1 X - a2 Y)/|a|^2, xi2 = (a2 X + a1 Y)/|a|^2 with X = xi_alpha, Y = xi_perp
        n2 = alpha.norm2()
        a1, a2 = alpha.c1 / n2, alpha.c2 / n2
        xi1 = XiPoly({(1, 0): a1, (0, 1): -a2})
        xi2 = XiPoly({(1, 0): a2, (0, 1): a1})
        acc = XiPoly()
        p1 = [XiPoly({(0, 0): ONE})]
        p2 = [XiPoly({(0, 0): ONE})]
        for _ in range(m):
            p1.append(p1[-1] * xi1)
            p2.append(p2[-1] * xi2)
        for (e1, e2), v in self.terms.items():
            acc = acc + (p1[e1] * p2[e2]).scale(v)
        # acc is now a polynomial in (X, Y) stored as (e_X, e_Y)
        return [acc.coefficient(k, m - k) for k in range(m + 1)]

    # -- x derivatives (coefficient-ring valued) --------------------
    def d_x(self, direction):
        return self.map_coeffs(lambda c: c.diff(direction))

    def xi_dot_dx(self):
        """<xi, d_x> applied to the coefficients."""
        return self.d_x(E1) * XiPoly.monomial(1, 0) + self.d_x(E2) * XiPoly.monomial(0, 1)

    def dx_dot_dxi(self, times=1):
        """<d_x, d_xi>^times."""
        out = self
        for _ in range(times):
            out = out.d_xi(0).d_x(E1) + out.d_xi(1).d_x(E2)
        return out

    def laplacian_x(self):
        return self.d_x(E1).d_x(E1) + self.d_x(E2).d_x(E2)


def d_xi_dir(F, alpha):
    return F.d_xi_dir(alpha)


def div_exact_xi(F, alpha):
    return F.div_exact_xi(alpha)


def d_theta(F):
    return F.d_theta()


def radial(power):
    """(xi1^2 + xi2^2)^power."""
    return XiPoly({(2, 0): ONE, (0, 2): ONE}) ** power

