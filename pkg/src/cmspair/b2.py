"""The deformed elliptic B2 pair (L, P).

Locus: e1, e2, (a, 1), (-a, 1).  Potentials

    u1 = c1 wp(2a x1),  u2 = c2 wp(2 x2),  u+- = 6(a^2+1) wp(<(+-a, 1), x>)

with c1 = 3/4 (a^2+1)(3/a^2-1), c2 = 3/4 (a^2+1)(3a^2-1).  With g2 = g3 = 0
every wp(kt) becomes 1/(kt)^2 and the model lives in the rational pole
ring; otherwise it lives in the free elliptic ring.

Primes on potentials are derivatives in their own argument t = x_alpha.
"""

from __future__ import annotations

from fractions import Fraction

from .coef import EllipticRing, RationalPoleRing
from .diffop import DiffOp
from .scalar import ONE, S, Scalar, is_excluded_parameter
from .xsymbols import E1, E2, Covector, Locus, LocusEntry


class ExcludedParameter(ValueError):
    pass


# generator order used throughout: 0 -> e1, 1 -> e2, 2 -> alpha_+, 3 -> alpha_-
IDX_1, IDX_2, IDX_P, IDX_M = 0, 1, 2, 3


def _bind(value, name):
    if value is None or (isinstance(value, str) and value == "sym"):
        return Scalar.symbol(name)
    return S(Fraction(value) if isinstance(value, str) else value)


class B2Model:
    """Parameters and operators of the deformed B2 pair.

    ``a``, ``g2``, ``g3`` may be None (symbolic) or rationals.  ``ring`` is
    ``"auto"`` (rational pole ring when g2 = g3 = 0), ``"rational"`` or
    ``"elliptic"``.  ``variant="display"`` transcribes every block literally;
    the default ``"corrected"`` applies the repairs needed for [L, P] = 0
    (see :meth:`A5`, :meth:`_k2`, :meth:`P4_block`, :meth:`P6_block`).
    """

    def __init__(self, a=None, g2=0, g3=0, ring="auto", variant="corrected", constants=None):
        self.a = _bind(a, "a")
        self.g2 = _bind(g2, "g2")
        self.g3 = _bind(g3, "g3")
        if self.a.is_constant():
            excluded, reason = is_excluded_parameter(self.a)
            if excluded:
                raise ExcludedParameter(reason)
        if not self.g2.is_constant() and "a" in self.g2.free_symbols() or "a" in self.g3.free_symbols():
            raise ValueError("g2, g3 must not depend on a")
        degenerate = self.g2.is_zero() and self.g3.is_zero()
        if ring == "auto":
            ring = "rational" if degenerate else "elliptic"
        if ring == "rational" and not degenerate:
            raise ValueError("the rational ring needs g2 = g3 = 0")
        if variant not in ("display", "corrected"):
            raise ValueError("variant must be 'display' or 'corrected'")
        self.kind = ring
        self.variant = variant
        a = self.a
        self.s = a * a + 1
        s = self.s
        self.alpha_p = Covector(a, 1)
        self.alpha_m = Covector(-a, 1)
        self.alphas = [E1, E2, self.alpha_p, self.alpha_m]
        self.scales = [2 * a, S(2), ONE, ONE]
        self.coeffs = [S(Fraction(3, 4)) * s * (3 / (a * a) - 1),
                       S(Fraction(3, 4)) * s * (3 * a * a - 1),
                       6 * s, 6 * s]
        self.couplings = [c / (k * k) for c, k in zip(self.coeffs, self.scales)]
        # additive constants on the potentials of L only; the blocks of P are not shift invariant
        self.constants = [S(c) for c in constants] if constants else [S(0)] * 4
        if ring == "rational":
            self.ring = RationalPoleRing(self.alphas)
        else:
            self.ring = EllipticRing(list(zip(self.alphas, self.scales)), self.g2, self.g3)
        self._cache = {}

    # -- bookkeeping ------------------------------------------------
    def locus(self):
        kind = "rational" if self.kind == "rational" else "elliptic"
        return Locus([LocusEntry(al, c, kind, k)
                      for al, c, k in zip(self.alphas, self.couplings, self.scales)])

    def entries(self):
        return list(self.locus())

    def scalars(self):
        return {"a": None if not self.a.is_constant() else self.a,
                "g2": None if not self.g2.is_constant() else self.g2,
                "g3": None if not self.g3.is_constant() else self.g3}

    def u(self, i, j=0):
        """j-th t-derivative of the potential on line i."""
        key = ("u", i, j)
        if key not in self._cache:
            if self.kind == "rational":
                val = self.ring.potential(i, self.couplings[i], j)
            else:
                val = self.ring.potential(i, self.coeffs[i], j)
            self._cache[key] = val
        return self._cache[key]

    def D(self, alpha, n=1):
        return DiffOp.directional(self.ring, alpha, n)

    def mult(self, c):
        return DiffOp.mult(self.ring, c)

    # -- building blocks -------------------------------------------
    def L1(self):
        return DiffOp(self.ring, {(2, 0): 1, (0, 0): -self.u(IDX_1)})

    def L2(self):
        return DiffOp(self.ring, {(0, 2): 1, (0, 0): -self.u(IDX_2)})

    def Lpm(self, sign):
        i, al = (IDX_P, self.alpha_p) if sign > 0 else (IDX_M, self.alpha_m)
        return self.D(al, 2) - self.mult(self.u(i) * self.s)

    def L(self):
        pot = self.u(IDX_1) + self.u(IDX_2) + self.u(IDX_P) + self.u(IDX_M)
        shift = sum(self.constants, S(0))
        if not shift.is_zero():
            pot = pot + shift
        return DiffOp(self.ring, {(2, 0): -1, (0, 2): -1, (0, 0): pot})

    def A5(self, sign):
        """Fifth-order commutant block attached to alpha_+ or alpha_-.

        The displayed form is

            D^5 - 5/2 u D^3 - 15/4 u' D^2 + 1/8 s^2 (15 u^2 - 25 s u'') D

        with D = <alpha, d_x> and s = a^2 + 1.  It commutes with
        L_pm = D^2 - s u only after the scaling D -> s d/dt is applied
        consistently, i.e. with the D^3 and D^2 terms carrying s and s^2, and
        with the zero-order term fixed by skew-adjointness.  ``"corrected"`` uses
        that completion, ``"display"`` the literal form.
        """
        key = ("A5", sign, self.variant)
        if key in self._cache:
            return self._cache[key]
        i, al = (IDX_P, self.alpha_p) if sign > 0 else (IDX_M, self.alpha_m)
        s = self.s
        u, u1, u2 = self.u(i), self.u(i, 1), self.u(i, 2)
        if self.variant == "display":
            c3, c2 = S(Fraction(-5, 2)), S(Fraction(-15, 4))
        else:
            c3, c2 = S(Fraction(-5, 2)) * s, S(Fraction(-15, 4)) * s * s
        c1 = (u * u * 15 - u2 * (25 * s)) * (s * s / 8)
        op = (self.D(al, 5) + self.mult(u * c3) @ self.D(al, 3)
              + self.mult(u1 * c2) @ self.D(al, 2) + self.mult(c1) @ self.D(al, 1))
        if self.variant == "corrected":
            sym = op + op.formal_adjoint()
            op = op - sym.scale(S(Fraction(1, 2)))
        self._cache[key] = op
        return op

    def A5_commutant(self, sign):
        """A5 - 21/8 s^4 g2 D, the commutant of L_pm."""
        al = self.alpha_p if sign > 0 else self.alpha_m
        corr = S(Fraction(21, 8)) * self.s ** 4 * self.g2
        return self.A5(sign) - self.D(al, 1).scale(corr)

    def P2_block(self):
        a, s = self.a, self.s
        ap, am = self.alpha_p, self.alpha_m
        pp, pm = ap.perp(), am.perp()
        up, um = self.u(IDX_P), self.u(IDX_M)
        Lp, Lm = self.Lpm(1), self.Lpm(-1)
        t1 = (self.mult(up) @ self.D(pp, 4) + self.mult(um) @ self.D(pm, 4)).scale(-20 * a * s)
        t2 = ((Lp @ Lp - self.D(ap, 4)) @ self.D(pp, 2)
              + (Lm @ Lm - self.D(am, 4)) @ self.D(pm, 2)).scale(self._k2())
        t3 = ((self.A5(1) - self.D(ap, 5)) @ self.D(pp, 1)
              - (self.A5(-1) - self.D(am, 5)) @ self.D(pm, 1)).scale(
                  -2 * (a * a - 1) * (3 / (a * a) - 1) * (3 * a * a - 1))
        t4 = ((Lp @ Lp @ Lp - self.D(ap, 6)) + (Lm @ Lm @ Lm - self.D(am, 6))).scale(
            -a * (a ** 4 - 6 * a * a + 6 - 6 / (a * a) + a ** -4))
        return (t1 + t2 + t3 + t4).scale(s ** -4)

    def _k2(self):
        a = self.a
        k = -10 * (1 / (a * a) - 4 + a * a)
        return k / a if self.variant == "display" else k * a

    def P4_block(self):
        a = self.a
        ia = 1 / a
        u1, u2, up, um = (self.u(i) for i in range(4))
        spm, dpm = up + um, up - um
        # the displayed last line carries (u+ + u-); the commuting operator needs u+ u-
        w = spm if self.variant == "display" else up * um
        c20 = (u1 * spm * (6 * a * (4 - a * a)) + u2 * spm * (7 * (a + ia))
               + w * ((35 * ia + 156 * a - 39 * a ** 3) / 8))
        c02 = (u1 * spm * (7 * (a + ia)) + u2 * spm * (6 * ia * (4 - ia * ia))
               + w * ((35 * a + 156 * ia - 39 * ia ** 3) / 8))
        c11 = u1 * dpm * (3 * a * a - 7) + u2 * dpm * (3 * ia * ia - 7)
        return DiffOp(self.ring, {(2, 0): c20, (0, 2): c02, (1, 1): c11})

    def Q4_block(self):
        a, s = self.a, self.s
        if self.g2.is_zero():
            return DiffOp.zero(self.ring)
        k = (S(Fraction(-21, 16)) * s * s * (a - 1 / a) * (3 * a * a - 1)
             * (3 / (a * a) - 1) * self.g2)
        inner = self.L1() - self.L2() - self.mult((self.u(IDX_P) + self.u(IDX_M)) * ((a * a - 1) / s))
        return inner.scale(k)

    def P6_block(self, perturb=None):
        """Zero-order block.

        ``"display"`` transcribes the printed coefficients.  The corrected
        block keeps the same monomials; it halves the u_i'' parts of the first
        two terms and replaces the coefficients of u_1 (u_+'' + u_-''),
        u_2 (u_+'' + u_-''), u_+'' u_- + u_+ u_-'' and u_+' u_-'.

        ``perturb = (k, delta)`` adds ``delta`` to the scalar coefficient of
        the k-th of the nine terms (k = 0..8, in display order).
        """
        a = self.a
        ia = 1 / a
        u1, u2, up, um = (self.u(i) for i in range(4))
        u1pp, u2pp = self.u(IDX_1, 2), self.u(IDX_2, 2)
        uppp, umpp = self.u(IDX_P, 2), self.u(IDX_M, 2)
        upp, ump = self.u(IDX_P, 1), self.u(IDX_M, 1)
        spm = up + um
        if self.variant == "display":
            h = ONE
            f5 = a / 4 * (20 * a ** 4 - 83 * a * a + 24 + 7 * ia * ia)
            f6 = a / 4 * (20 * ia ** 4 - 83 * ia * ia + 24 + 7 * a * a)
            f8 = S(Fraction(-5, 32)) * a * (5 * a ** 4 - 202 + 5 * ia ** 4)
            f9 = S(Fraction(3, 16)) * a * (a * a - ia * ia) * (19 * a * a - 122 + 19 * ia * ia)
        else:
            h = S(Fraction(1, 2))
            a2 = a * a
            f5 = a / 2 * (a2 * a2 - 4 * a2 + 5)
            f6 = a / 2 * (ia ** 4 - 4 * ia * ia + 5)
            f8 = S(Fraction(-5, 16)) * (a2 ** 4 - 6 * a2 ** 3 - 30 * a2 * a2 - 6 * a2 + 1) * ia ** 3
            f9 = S(Fraction(-3, 8)) * (a2 * a2 - 1) * (a2 * a2 + 13 * a2 + 1) * ia ** 3
        terms = [
            (u1pp * h - u1 * u1) * spm * (3 * a * (4 - a * a)),
            (u2pp * h - u2 * u2) * spm * (3 * ia * (4 - ia * ia)),
            (u1 * ((15 * a ** 3 - 72 * a - 7 * ia) / 8)
             + u2 * ((15 * ia ** 3 - 72 * ia - 7 * a) / 8)) * (up * up + um * um),
            (u1 * f5 + u2 * f6) * (uppp + umpp),
            (up * up * um + up * um * um) * (S(Fraction(3, 16)) * (a + ia) * (7 * a * a - 38 + 7 * ia * ia)),
            (uppp * um + up * umpp) * f8,
            upp * ump * f9,
            u1 * u2 * spm * (-7 * (a + ia)),
            (u1 * (a * (57 * a * a - 216 + 7 * ia * ia) / 8)
             + u2 * (ia * (57 * ia * ia - 216 + 7 * a * a) / 8)) * up * um,
        ]
        if perturb is not None:
            k, delta = perturb
            terms.append(self._p6_monomials()[k] * S(delta))
        total = self.ring.zero()
        for t in terms:
            total = total + t
        return self.mult(total)

    def _p6_monomials(self):
        """The nine potential products of the zero-order block, unit coefficients."""
        u1, u2, up, um = (self.u(i) for i in range(4))
        u1pp, u2pp = self.u(IDX_1, 2), self.u(IDX_2, 2)
        uppp, umpp = self.u(IDX_P, 2), self.u(IDX_M, 2)
        spm = up + um
        return [
            (u1pp - u1 * u1) * spm,
            (u2pp - u2 * u2) * spm,
            (u1 + u2) * (up * up + um * um),
            (u1 + u2) * (uppp + umpp),
            up * up * um + up * um * um,
            uppp * um + up * umpp,
            self.u(IDX_P, 1) * self.u(IDX_M, 1),
            u1 * u2 * spm,
            (u1 + u2) * up * um,
        ]

    def P(self, p6_perturb=None):
        """The order-six commutant, assembled block by block.

        ``p6_perturb = (k, delta)`` shifts one zero-order coefficient
        (mutation tests; see :meth:`P6_block`).
        """
        key = ("P", p6_perturb)
        if key in self._cache:
            return self._cache[key]
        a = self.a
        ia = 1 / a
        L1, L2 = self.L1(), self.L2()
        L11 = L1 @ L1
        L22 = L2 @ L2
        top = ((L11 @ L1).scale(a * (4 - a * a)) + (L11 @ L2).scale(5 * a)
               + (L1 @ L22).scale(5 * ia) + (L22 @ L2).scale(ia * (4 - ia * ia)))
        P4 = self.P4_block()
        sym4 = P4.symbol()
        half = DiffOp.from_symbol(self.ring, sym4.dx_dot_dxi(1)).scale(S(Fraction(1, 2)))
        eighth = DiffOp.from_symbol(self.ring, sym4.dx_dot_dxi(2)).scale(S(Fraction(1, 8)))
        P6 = self.P6_block(p6_perturb)
        op = top + self.P2_block() + P4 + half + eighth + self.Q4_block() + P6
        self._cache[key] = op
        return op


def principal_symbol(a):
    """a(4-a^2) xi1^6 + 5a xi1^4 xi2^2 + 5/a xi1^2 xi2^4 + (4-a^-2)/a xi2^6."""
    from .xsymbols import XiPoly
    a = S(a) if not isinstance(a, Scalar) else a
    ia = 1 / a
    return XiPoly({(6, 0): a * (4 - a * a), (4, 2): 5 * a, (2, 4): 5 * ia, (0, 6): ia * (4 - ia * ia)})


def build_L(model):
    return model.L()


def build_A5(model, sign):
    return model.A5(sign)


def build_P(model):
    return model.P()


def verify_commutation(model, mode="both", **kw):
    """[L, P] for the model: free-ring zero test, then numerics if needed."""
    from .verify import verify_operators
    return verify_operators(model.L(), model.P(), mode=mode, **kw)


# -- potential conditions -------------------------------------------------

# Each condition is (prefactor(a), [(weight(a), line, argument multiplier(a))]):
# sum weight * u_line(multiplier * t) must vanish.
def _conditions(a):
    one = ONE
    return [
        (3 / (a * a) - 7, [(one, IDX_P, one), (-one, IDX_M, one)]),
        (3 * a * a - 7, [(one, IDX_P, -a), (-one, IDX_M, a)]),
        (one, [(2 * a * a, IDX_1, -one), (S(-2), IDX_2, a), (a * a - 1, IDX_M, 2 * a)]),
        (one, [(2 * a * a, IDX_1, -one), (S(-2), IDX_2, -a), (a * a - 1, IDX_P, -2 * a)]),
        (3 * a * (a * a - 1) * (a * a + 1) ** 2 * (3 * a ** 4 - 26 * a * a + 3),
         [(8 * a * a, IDX_1, one), (a * a - 3, IDX_P, 2 * a)]),
    ]


def condition_residuals(a, coeffs, scales):
    """Residual of each functional condition for u_i(t) = c_i wp(k_i t).

    wp is even, so u_i(m t) only depends on (k_i m)^2; all terms of a
    condition share that argument, and the residual is the Scalar
    prefactor * sum weight * c_i.
    """
    out = []
    for pre, terms in _conditions(a):
        args = {(scales[i] * m) ** 2 for _, i, m in terms}
        if len({str(x) for x in args}) != 1:
            raise ValueError("condition terms do not share one wp argument")
        r = sum((w * coeffs[i] for w, i, _ in terms), S(0))
        out.append(pre * r)
    return out


def derive_potential_conditions(a=None, coeffs=None, a_squared=None):
    """Evaluate the five conditions and solve them for the coefficients.

    With the model's arguments (2a t, 2t, t, t) and u_+ fixed to
    6(a^2+1) wp(t), the conditions force u_- = u_+,
    u_1(t) = (3a^-2 - 1) u_+(2at)/8 and u_2(t) = (3a^2 - 1) u_+(2t)/8.

    The degenerate values a^2 = 7/3, 3/7 have no rational a; ``a_squared``
    lets a caller screen a value of a^2 directly.
    """
    model = B2Model(a=a)
    a = model.a
    sq = a_squared if a_squared is not None else (
        (a * a).to_fraction() if a.is_constant() else None)
    if sq is not None and Fraction(sq) in (Fraction(7, 3), Fraction(3, 7)):
        raise ExcludedParameter("a^2 in {7/3, 3/7}: the conditions degenerate")
    scales = model.scales
    cp = model.coeffs[IDX_P]
    # solve: cond 1 -> c_- = c_+; cond 5 -> c_1; cond 3 -> c_2
    cm = cp
    c1 = -(a * a - 3) * cp / (8 * a * a)
    c2 = (2 * a * a * c1 + (a * a - 1) * cm) / 2
    solved = [c1, c2, cp, cm]
    use = [S(c) for c in coeffs] if coeffs is not None else list(model.coeffs)
    return {
        "a": a,
        "residuals": condition_residuals(a, use, scales),
        "solved": solved,
        "matches_model": all((x - y).is_zero() for x, y in zip(solved, model.coeffs)),
        "relations": {
            "u_minus": "u_-(t) = u_+(t)",
            "u_1": (3 / (a * a) - 1) / 8,
            "u_2": (3 * a * a - 1) / 8,
        },
    }
