from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from cmspair.b2 import B2Model, principal_symbol
from cmspair.commutant import (InconsistentK, NeedsThirdLine, SymbolPipelineState, assemble,
                               build_P2_P3, build_P4_ab, build_P4_alpha, build_P4_P5,
                               build_P6_alpha, check_admissible_P0, d_coeff, d_sum_identity,
                               first_relation, integer_class, k_constant, order_bound_check,
                               second_relation)
from cmspair.scalar import S, Scalar, parse_scalar
from cmspair.xsymbols import Covector, Locus, XiPoly, radial

from conftest import nonzero_fracs, small_fracs

a = Scalar.symbol("a")
s = a * a + 1
E1, E2 = Covector(1, 0), Covector(0, 1)
AP, AM = Covector(a, 1), Covector(-a, 1)
C_B2 = [S(3) / 16 * s * (3 / (a * a) - 1) / (a * a), S(3) / 16 * s * (3 * a * a - 1), 6 * s, 6 * s]
B2_LOCUS = Locus(list(zip([E1, E2, AP, AM], C_B2)))


def xi_from_oracle(d):
    return XiPoly({tuple(map(int, k.split(","))): parse_scalar(v) for k, v in d.items()})


def b2_state(av=None):
    if av is None:
        return SymbolPipelineState(B2_LOCUS, principal_symbol(a))
    m = B2Model(a=av)
    return SymbolPipelineState(Locus([(e.alpha, e.coupling) for e in m.locus()]),
                               principal_symbol(m.a))


# -- admissibility and order bound ------------------------------------------

def test_b2_symbol_is_admissible():
    rep = check_admissible_P0(principal_symbol(a), B2_LOCUS)
    assert all(r["ok"] for r in rep)
    assert [r["m"] for r in rep][2:] == [2, 2]


def test_radial_symbol_always_admissible():
    loc = Locus([(Covector(1, 3), 5), (Covector(2, -1), S(1) / 3)])
    assert all(r["ok"] for r in check_admissible_P0(radial(3), loc))


def test_xi1xi2_parity(oracles):
    # xi1 xi2 = (X^2 - Y^2)/4 in the diagonal basis, so c1 = 0 there ...
    F = XiPoly.monomial(1, 1)
    assert F.basis_coefficients(Covector(1, 1)) == [parse_scalar(t) for t in oracles["xi1xi2_basis_11"]]
    assert check_admissible_P0(F, Locus([(Covector(1, 1), 7)]))[0]["ok"]
    # ... while along e1 it is X*Y with c1 = 1
    rep = check_admissible_P0(F, Locus([(E1, 7)]))
    assert not rep[0]["ok"] and rep[0]["offending"] == [(1, S(1))]


def test_integer_class():
    assert integer_class(6 * 5, Covector(1, 2)) == 2
    assert integer_class(2, E1) == 1
    assert integer_class(3, E1) is None


def test_order_bound(oracles):
    ok, q = order_bound_check(radial(2), [(E1,), (E2,)])
    assert ok and q.is_zero()
    ok, q = order_bound_check(principal_symbol(a), B2_LOCUS)
    assert ok and q.degree() == 2
    assert q == xi_from_oracle(oracles["order_bound_quotient"])
    loc3 = Locus([(E1, 1), (Covector(1, 2), 1), (Covector(3, -1), 1)])
    ok, _ = order_bound_check(XiPoly({(2, 0): 1, (1, 1): 3, (0, 2): -2}), loc3)
    assert not ok


# -- levels two to six ---------------------------------------------------------

def test_radial_p2():
    loc = Locus([(Covector(1, 2), 3), (E2, 5)])
    st_ = SymbolPipelineState(loc, radial(3))
    assert st_.P2_alpha(0) == radial(2).scale(6)
    P2, _ = build_P2_P3(st_)
    u = st_.u(0) + st_.u(1)
    expect = XiPoly._raw({k: u * v * (-3) for k, v in radial(2).terms.items()})
    assert P2 == expect


def test_single_line_second_order():
    st_ = SymbolPipelineState(Locus([(E1, 6)]), XiPoly.monomial(2, 0))
    P2, P3 = build_P2_P3(st_)
    assert P2 == XiPoly({(0, 0): -st_.u(0)})
    # P = d1^2 - u = -L has no level-three part
    assert P3.is_zero()


def test_p2_p3_against_oracle_points(oracles):
    st_ = b2_state()
    P2, P3 = build_P2_P3(st_)
    for pt in oracles["pipeline_points"]:
        vals = {"a": Fraction(pt["a"]), "g2": 0, "g3": 0}
        x1, x2 = Fraction(pt["x1"]), Fraction(pt["x2"])
        for got, ref in ((P2, pt["P2"]), (P3, pt["P3"])):
            ev = {k: v.evaluate(x1, x2, vals) for k, v in got.terms.items()}
            ev = {k: v for k, v in ev.items() if v != 0}
            assert ev == {tuple(map(int, k.split(","))): Fraction(v) for k, v in ref.items()}


def test_p4_alpha_oracles(oracles):
    st_ = b2_state()
    P4 = build_P4_alpha(st_, 0)
    assert P4 == xi_from_oracle(oracles["p4_alpha_e1"])
    assert P4.degree() == 2
    rad = SymbolPipelineState(Locus([(Covector(1, 2), 30)]), radial(3))
    assert build_P4_alpha(rad, 0) == xi_from_oracle(oracles["radial_p4_alpha_12"])


def test_p4_alpha_vanishes_in_low_order():
    st_ = SymbolPipelineState(Locus([(Covector(1, 2), 30)]), radial(1))
    assert build_P4_alpha(st_, 0).is_zero()


@given(st.integers(4, 7), st.tuples(nonzero_fracs, small_fracs),
       st.lists(small_fracs, min_size=8, max_size=8), st.booleans())
def test_p4_alpha_basis_formula(m0, al, cs, pin):
    """Closed form in the (xi_alpha, xi_alpha^perp) basis with c1 = 0 and c3 (C - 2|alpha|^2) = 0."""
    alpha = Covector(*al)
    n2 = alpha.norm2()
    c = [S(v) for v in cs[:m0 + 1]]
    c[1] = S(0)
    C = 2 * n2 if pin else n2 * 6
    if not pin:
        c[3] = S(0)
    P0 = XiPoly.from_basis(c, alpha)
    assume(not P0.is_zero() and P0.degree() == m0)
    st_ = SymbolPipelineState(Locus([(alpha, C)]), P0)
    expect = [S(0)] * (m0 - 3)
    for k in range(4, m0 + 1):
        expect[k - 4] = n2 ** 2 * k * (k - 2) * (C + (10 - 4 * k) * n2) * c[k]
    assert build_P4_alpha(st_, 0) == XiPoly.from_basis(expect, alpha)


def test_p6_alpha_oracles(oracles):
    st_ = b2_state()
    assert build_P6_alpha(st_, 2) == xi_from_oracle(oracles["p6_alpha_plus"])
    rad = SymbolPipelineState(Locus([(Covector(1, 2), 30)]), radial(3))
    assert build_P6_alpha(rad, 0) == xi_from_oracle(oracles["radial_p6_alpha_12"])
    low = SymbolPipelineState(Locus([(Covector(1, 2), 30)]), radial(2))
    assert build_P6_alpha(low, 0).is_zero()


# -- d coefficients and pair terms ------------------------------------------

def test_d_coeff_skew_and_sum():
    st_ = b2_state()
    for i, j, k in ((0, 2, 3), (1, 2, 3), (2, 3, 0)):
        assert d_coeff(st_, i, j, k) == -d_coeff(st_, j, i, k)
        assert d_coeff(st_, i, j, k) == -d_coeff(st_, i, k, j)
    for i in range(4):
        for j in range(4):
            if i != j:
                assert d_sum_identity(st_, i, j).is_zero()


def test_d_coeff_orthogonal_third_summand():
    st_ = b2_state()
    A, B, G = E1, E2, AP
    full = d_coeff(st_, 0, 1, 2)
    two = B.dot(G) / (B.cross(G) ** 3 * st_.C[0]) + G.dot(A) / (G.cross(A) ** 3 * st_.C[1])
    assert full == two


def test_p4_pair_gamma_independent_and_symmetric():
    st_ = b2_state(Fraction(5, 2))
    first = build_P4_ab(st_, 2, 3, gamma=0)
    assert first == build_P4_ab(st_, 2, 3, gamma=1)
    assert first == build_P4_ab(st_, 3, 2)


def test_p4_pair_radial_reduces_to_first_fraction():
    loc = Locus([(E1, 2), (Covector(1, 1), 4), (Covector(2, -1), 10)])
    st_ = SymbolPipelineState(loc, radial(3))
    A, B, G = loc.alphas
    num = (st_.P2_alpha(0).d_xi_dir(B).scale(G.cross(A)) + st_.P2_alpha(1).d_xi_dir(A).scale(B.cross(G)))
    expect = num.div_exact_xi(G).scale(-1 / A.cross(B))
    assert build_P4_ab(st_, 0, 1, gamma=2, check=False) == expect


def test_two_line_locus():
    loc = Locus([(E1, 6), (E2, 2)])
    st_ = SymbolPipelineState(loc, XiPoly({(4, 0): 1, (0, 4): 3}))
    with pytest.raises(NeedsThirdLine):
        build_P4_ab(st_, 0, 1)
    P4, _ = build_P4_P5(st_)
    expect = XiPoly()
    for i in range(2):
        expect = expect + XiPoly._raw({k: st_.u(i, 2) * v / 48 for k, v in build_P4_alpha(st_, i).terms.items()})
    assert P4 == expect


def test_post_check_on_b2_and_adjointness():
    build_P4_P5(b2_state())
    st_ = SymbolPipelineState(Locus([(E1, 12), (E2, 12)]), radial(3))
    P = assemble(st_, 5)
    D = P.formal_adjoint() - P
    for k in range(6):
        assert D.symbol_level(k, 6).is_zero()


# -- the two relations and K ---------------------------------------------------

def test_relation_examples(oracles):
    assert all(r.is_zero() for r in first_relation(Locus([(E1, 3), (E2, 5)])))
    assert [str(r) for r in first_relation(B2_LOCUS)] == oracles["first_relation_b2"]
    assert not first_relation(Locus([(E1, 1), (Covector(1, 2), 1)]))[0].is_zero()


def test_second_relation_b2_factors():
    rows = second_relation(B2_LOCUS)
    for r in rows:
        assert r["residual"].is_zero()
        assert r["sum_factor"].is_zero()
        assert not r["coupling_factor"].is_zero()


def test_second_relation_coupling_two():
    loc = Locus([(Covector(1, 2), 10), (Covector(3, 1), 1), (Covector(-1, 4), 7)])
    assert second_relation(loc)[0]["residual"].is_zero()
    assert not second_relation(loc)[1]["residual"].is_zero()


def test_k_constant(oracles):
    st_ = SymbolPipelineState(Locus([(E1, 3), (E2, 5)]), radial(2))
    assert k_constant(st_, 0) == 5
    st_ = b2_state()
    assert k_constant(st_, 0) == parse_scalar(oracles["k_constant_e1"])
    bad = SymbolPipelineState(B2_LOCUS.with_couplings(C_B2[:2] + [C_B2[2] + 1, C_B2[3]]),
                              principal_symbol(a))
    with pytest.raises(InconsistentK):
        k_constant(bad, 0)
