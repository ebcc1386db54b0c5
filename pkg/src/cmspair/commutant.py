"""Lower symbols of a commutant P of L = -Laplacian + sum C_a/<a,x>^2.

Starting from an x-constant principal symbol P0, the pipeline produces
P2, P3, P4, P5 and the building blocks P2^a, P4^a, P4^{a,b}, P6^a, together
with the two necessary linear relations on the locus and its couplings.
Everything lives in the rational pole ring of the locus.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import factorial, isqrt

from .coef import RationalPoleRing
from .scalar import ZERO, S, Scalar
from .xsymbols import Locus, NotDivisible, XiPoly


class NeedsThirdLine(ValueError):
    pass


class InconsistentK(ArithmeticError):
    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class PostCheckFailed(AssertionError):
    pass


def integer_class(coupling, alpha):
    """m > 0 with C = m(m+1)|alpha|^2, or None."""
    r = S(coupling) / alpha.norm2()
    if not r.is_constant():
        return None
    r = r.to_fraction()
    disc = 1 + 4 * r
    if disc.denominator != 1 or disc.numerator < 0:
        return None
    root = isqrt(disc.numerator)
    if root * root != disc.numerator or root % 2 == 0:
        return None
    m = (root - 1) // 2
    return m if m > 0 else None


def _lift(poly, ring):
    """XiPoly over Scalars -> XiPoly over the ring."""
    return XiPoly._raw({k: ring.const(v) for k, v in poly.terms.items()})


def _times(poly, c):
    """ring element c times a Scalar-coefficient XiPoly."""
    if c.is_zero():
        return XiPoly()
    return XiPoly._raw({k: c * v for k, v in poly.terms.items() if not v.is_zero()})


class SymbolPipelineState:
    """Locus, principal symbol and cached intermediate symbols."""

    def __init__(self, locus, P0):
        if not isinstance(locus, Locus):
            locus = Locus(locus)
        if any(not isinstance(v, Scalar) for v in P0.terms.values()):
            raise ValueError("the principal symbol must have x-constant Scalar coefficients")
        degs = {e1 + e2 for e1, e2 in P0.terms}
        if len(degs) > 1:
            raise ValueError("the principal symbol must be homogeneous")
        self.locus = locus
        self.P0 = P0
        self.m0 = P0.degree()
        self.alphas = locus.alphas
        self.C = locus.couplings
        self.N = len(locus)
        self.ring = RationalPoleRing(self.alphas)
        self._cache = {}

    def index(self, alpha):
        if isinstance(alpha, int):
            return alpha
        for i, a in enumerate(self.alphas):
            if a == alpha:
                return i
        raise KeyError(f"{alpha} is not in the locus")

    def u(self, i, j=0):
        return self.ring.potential(i, self.C[i], j)

    def _memo(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    def P2_alpha(self, i):
        i = self.index(i)
        al = self.alphas[i]
        return self._memo(("P2a", i), lambda: self.P0.d_xi_dir(al).div_exact_xi(al))

    def dtheta_P0(self):
        return self._memo("dtheta", self.P0.d_theta)


# -- admissibility ------------------------------------------------------

def check_admissible_P0(P0, locus):
    """Per-line parity check of P0 in the (xi_a, xi_a^perp) basis.

    Returns a list of dicts ``{index, ok, m, offending}``; ``offending``
    lists ``(k, c_k)`` for odd coefficients that must vanish and do not.
    """
    if not isinstance(locus, Locus):
        locus = Locus(locus)
    report = []
    for i, entry in enumerate(locus):
        cs = P0.basis_coefficients(entry.alpha)
        m = integer_class(entry.coupling, entry.alpha)
        top = 2 * m - 1 if m is not None else len(cs) - 1
        bad = [(k, cs[k]) for k in range(1, min(top, len(cs) - 1) + 1, 2) if not cs[k].is_zero()]
        report.append({"index": i, "ok": not bad, "m": m, "offending": bad})
    return report


def order_bound_check(P0, locus):
    """Divide D_theta P0 by prod xi_alpha; returns ``(ok, quotient_or_remainder)``."""
    alphas = locus.alphas if isinstance(locus, Locus) else [a for a, *_ in locus]
    F = P0.d_theta()
    for al in alphas:
        q, r = F.divmod_linear(al)
        if not r.is_zero():
            return False, r
        F = q
    return True, F


# -- level two and three ------------------------------------------------

def build_P2_P3(state):
    def work():
        P2 = XiPoly()
        P3 = XiPoly()
        for i, al in enumerate(state.alphas):
            P2a = state.P2_alpha(i)
            P2 = P2 + _times(P2a, state.u(i) * S(Fraction(-1, 2)))
            P3 = P3 + _times(P2a.d_xi_dir(al), state.u(i, 1) * S(Fraction(-1, 4)))
        return P2, P3
    return state._memo("P2P3", work)


# -- level four ---------------------------------------------------------

def build_P4_alpha(state, alpha):
    i = state.index(alpha)
    al = state.alphas[i]

    def work():
        num = (state.P2_alpha(i).d_xi_dir(al).scale(state.C[i] + 6 * al.norm2())
               - state.P0.d_xi_dir(al, 3).scale(4))
        return num.div_exact_xi(al)
    return state._memo(("P4a", i), work)


def d_coeff(state, alpha, beta, gamma):
    i, j, k = state.index(alpha), state.index(beta), state.index(gamma)
    if len({i, j, k}) < 3:
        raise ValueError("d needs three distinct lines")
    A, B, G = state.alphas[i], state.alphas[j], state.alphas[k]
    Ca, Cb, Cg = state.C[i], state.C[j], state.C[k]
    return (B.dot(G) / (B.cross(G) ** 3 * Ca) + G.dot(A) / (G.cross(A) ** 3 * Cb)
            + A.dot(B) / (A.cross(B) ** 3 * Cg))


def _delta_sum(state, i, j, exclude, F_div, pair):
    """(<a^perp,b>^3/N) sum_delta <delta^perp, pair> C_delta d_{a,b,delta} F/(prod xi)."""
    A, B = state.alphas[i], state.alphas[j]
    out = XiPoly()
    for k in range(state.N):
        if k in exclude:
            continue
        w = state.alphas[k].cross(pair) * state.C[k] * d_coeff(state, i, j, k)
        if w.is_zero():
            continue
        out = out + F_div(k).scale(w)
    return out.scale(A.cross(B) ** 3 / state.N)


def build_P4_ab(state, alpha, beta, gamma=None, check=True):
    """P4^{a,b} via a third line gamma; checks gamma-independence and the
    xi_a P4^{a,b} identity when ``check`` is set."""
    i, j = state.index(alpha), state.index(beta)
    if i == j:
        raise ValueError("alpha and beta must differ")
    if state.N < 3:
        raise NeedsThirdLine("P4^{a,b} through a third line needs at least three lines")
    others = [k for k in range(state.N) if k not in (i, j)]
    if gamma is not None:
        others = [state.index(gamma)] + [k for k in others if k != state.index(gamma)]
    key = ("P4ab", i, j, others[0])
    if key in state._cache and not check:
        return state._cache[key]
    values = []
    for k in (others if check else others[:1]):
        values.append(_P4_ab_via(state, i, j, k))
    result = values[0]
    if check:
        for v in values[1:]:
            if not (v - result).is_zero():
                raise PostCheckFailed("P4^{a,b} depends on the choice of the third line")
        lhs = result * XiPoly.linear(state.alphas[i])
        rhs = state.P2_alpha(j).d_xi_dir(state.alphas[i]) + _delta_sum(
            state, i, j, (i, j), lambda k: _dtheta_over(state, (i, j, k)), state.alphas[i])
        if not (lhs - rhs).is_zero():
            raise PostCheckFailed("xi_a P4^{a,b} identity fails")
    state._cache[key] = result
    return result


def _dtheta_over(state, idxs):
    key = ("dth/", tuple(sorted(idxs)))

    def work():
        F = state.dtheta_P0()
        for k in sorted(idxs):
            F = F.div_exact_xi(state.alphas[k])
        return F
    return state._memo(key, work)


def _P4_ab_via(state, i, j, k):
    A, B, G = state.alphas[i], state.alphas[j], state.alphas[k]
    num = (state.P2_alpha(i).d_xi_dir(B).scale(G.cross(A))
           + state.P2_alpha(j).d_xi_dir(A).scale(B.cross(G)))
    first = num.div_exact_xi(G).scale(-1 / A.cross(B))
    second = _delta_sum(state, i, j, (i, j, k), lambda d: _dtheta_over(state, (i, j, k, d)), G)
    return first + second


def P4_pair(state, i, j):
    """P4^{a,b} for the pair sum; two-line loci use the identity directly."""
    if state.N >= 3:
        return build_P4_ab(state, i, j, check=False)
    # xi_a P4^{a,b} = d_{xi,a} P2^b (the delta sum is empty)
    A = state.alphas[i]
    return state._memo(("P4ab2", i, j), lambda: state.P2_alpha(j).d_xi_dir(A).div_exact_xi(A))


def lower_symbols(state):
    """Dict {0, 2, 3} of ring-valued symbols (level 1 vanishes)."""
    P2, P3 = build_P2_P3(state)
    return {0: _lift(state.P0, state.ring), 1: XiPoly(), 2: P2, 3: P3}


def level5_from_adjointness(symbols, k=5):
    """P_k = 1/2 sum_{j=1..k} (-1)^(j+1)/j! <d_x, d_xi>^j P_{k-j} for odd k."""
    out = XiPoly()
    for j in range(1, k + 1):
        prev = symbols.get(k - j)
        if prev is None or prev.is_zero():
            continue
        term = prev.dx_dot_dxi(j)
        c = S(Fraction((-1) ** (j + 1), factorial(j))) / 2
        out = out + term.scale(c)
    return out


def build_P4_P5(state, post_check=True):
    def work():
        P4 = XiPoly()
        for i in range(state.N):
            P4 = P4 + _times(build_P4_alpha(state, i), state.u(i, 2) * S(Fraction(1, 48)))
        cross = XiPoly()
        for i, j in combinations(range(state.N), 2):
            cross = cross + _times(P4_pair(state, i, j), state.u(i) * state.u(j))
        P4 = P4 + cross.scale(S(Fraction(1, 4)))
        if post_check:
            lhs = XiPoly()
            for i in range(state.N):
                for j in range(state.N):
                    if i != j:
                        lhs = lhs + _times(state.P2_alpha(j).d_xi_dir(state.alphas[i]),
                                           state.u(i, 1) * state.u(j))
            if not (lhs - cross.xi_dot_dx()).is_zero():
                raise PostCheckFailed("sum u_a' u_b d_a P2^b != <xi, d_x> sum u_a u_b P4^{a,b}")
        syms = lower_symbols(state)
        syms[4] = P4
        P5 = level5_from_adjointness(syms, 5)
        return P4, P5
    return state._memo(("P4P5", post_check), work)


# -- the two linear relations ------------------------------------------

def first_relation(locus):
    al, C = locus.alphas, locus.couplings
    out = []
    for i, a0 in enumerate(al):
        r = ZERO
        for j, b in enumerate(al):
            if j != i:
                r = r + a0.dot(b) * C[j] / a0.cross(b) ** 3
        out.append(r)
    return out


def second_relation(locus):
    """Per line: residual, coupling factor C - 2|a|^2 and the sum factor."""
    al, C = locus.alphas, locus.couplings
    out = []
    for i, a0 in enumerate(al):
        ssum = ZERO
        for j, b in enumerate(al):
            if j != i:
                ssum = ssum + a0.dot(b) * b.norm2() * C[j] / a0.cross(b) ** 5
        factor = C[i] - 2 * a0.norm2()
        out.append({"residual": factor * ssum, "coupling_factor": factor, "sum_factor": ssum})
    return out


def k_constant(state, alpha0):
    i = state.index(alpha0)
    a0 = state.alphas[i]
    w1, w2 = ZERO, ZERO
    for j, b in enumerate(state.alphas):
        if j != i:
            c = state.C[j] / a0.cross(b) ** 3
            w1 = w1 + c * b.c1
            w2 = w2 + c * b.c2
    w = (w1, w2)
    n2 = a0.norm2()
    along = (w[0] * a0.c1 + w[1] * a0.c2) / n2
    if not along.is_zero():
        raise InconsistentK("sum C_b/<a0^perp,b>^3 b is not parallel to a0^perp", along)
    p = a0.perp()
    return (w[0] * p.c1 + w[1] * p.c2) / n2


# -- level six building block -------------------------------------------

def build_P6_alpha(state, alpha):
    i = state.index(alpha)
    al = state.alphas[i]
    if state.m0 <= 5:
        return XiPoly()

    def work():
        C = state.C[i]
        num = (state.P0.d_xi_dir(al, 5).scale(24)
               + state.P2_alpha(i).d_xi_dir(al, 3).scale(C - 90 * al.norm2())
               + build_P4_alpha(state, i).d_xi_dir(al).scale(C))
        return num.div_exact_xi(al)
    return state._memo(("P6a", i), work)


def assemble(state, levels=5):
    """DiffOp with symbols P0, 0, P2, P3, P4, P5 (up to ``levels``)."""
    from .diffop import DiffOp
    syms = lower_symbols(state)
    if levels >= 4:
        P4, P5 = build_P4_P5(state)
        syms[4], syms[5] = P4, P5
    total = XiPoly()
    for k in range(levels + 1):
        if k in syms:
            total = total + syms[k]
    return DiffOp.from_symbol(state.ring, total)


def d_sum_identity(state, alpha, beta):
    """sum_{g != a,b} C_g d_{a,b,g} - N <a,b>/<a^perp,b>^3 (zero when the first relation holds)."""
    i, j = state.index(alpha), state.index(beta)
    total = ZERO
    for k in range(state.N):
        if k not in (i, j):
            total = total + state.C[k] * d_coeff(state, i, j, k)
    A, B = state.alphas[i], state.alphas[j]
    return total - A.dot(B) * state.N / A.cross(B) ** 3


__all__ = [
    "SymbolPipelineState", "NeedsThirdLine", "InconsistentK", "PostCheckFailed", "NotDivisible",
    "integer_class", "check_admissible_P0", "order_bound_check", "build_P2_P3", "build_P4_alpha",
    "d_coeff", "build_P4_ab", "build_P4_P5", "first_relation", "second_relation", "k_constant",
    "build_P6_alpha", "assemble", "d_sum_identity", "level5_from_adjointness", "P4_pair",
]
