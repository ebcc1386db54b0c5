from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmspair.commutant import first_relation, second_relation
from cmspair.locus_lab import (NotAntisymmetric, UnsupportedCardinality, build_matrices, classify,
                               determinant, nullspace, pfaffian, rank, solve_couplings)
from cmspair.scalar import S, Scalar, parse_scalar
from cmspair.xsymbols import Covector, Locus

from conftest import scalars

a = Scalar.symbol("a")
s = a * a + 1
E1, E2 = Covector(1, 0), Covector(0, 1)
AP, AM = Covector(a, 1), Covector(-a, 1)
C_B2 = [S(3) / 16 * s * (3 / (a * a) - 1) / (a * a), S(3) / 16 * s * (3 * a * a - 1), 6 * s, 6 * s]
B2 = Locus(list(zip([E1, E2, AP, AM], C_B2)))


def antisym(entries, n):
    it = iter(entries)
    M = [[S(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            M[i][j] = next(it)
            M[j][i] = -M[i][j]
    return M


def frac_rank(M):
    """Plain Gaussian elimination over Fractions, used as an independent oracle."""
    A = [list(r) for r in M]
    r = 0
    for c in range(len(A[0]) if A else 0):
        p = next((k for k in range(r, len(A)) if A[k][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        for k in range(len(A)):
            if k != r and A[k][c] != 0:
                f = A[k][c] / A[r][c]
                A[k] = [x - f * y for x, y in zip(A[k], A[r])]
        r += 1
    return r


def test_pfaffian_small():
    x = a + 3
    assert pfaffian([[0, x], [-x, 0]]) == x
    assert pfaffian([[0, 1, 2], [-1, 0, 3], [-2, -3, 0]]) == 0
    with pytest.raises(NotAntisymmetric):
        pfaffian([[0, 1], [1, 0]])


@given(st.lists(scalars(max_terms=2), min_size=6, max_size=6))
def test_pfaffian_four_by_four_formula(xs):
    M = antisym(xs, 4)
    A = M
    assert pfaffian(M) == A[0][1] * A[2][3] - A[0][2] * A[1][3] + A[0][3] * A[1][2]


@settings(max_examples=30)
@given(st.sampled_from([4, 6]), st.data())
def test_pfaffian_squared_is_determinant(n, data):
    xs = data.draw(st.lists(scalars(max_terms=2, allow_den=False), min_size=n * (n - 1) // 2,
                            max_size=n * (n - 1) // 2))
    M = antisym(xs, n)
    assert pfaffian(M) ** 2 == determinant(M)


def test_matrices_of_orthogonal_pair_vanish():
    m = build_matrices(Locus([(E1, 3), (E2, 5)]))
    assert all(x.is_zero() for row in m.A + m.B for x in row)
    assert len(solve_couplings(Locus([(E1, 3), (E2, 5)]))["basis"]) == 2


def test_matrices_match_direct_sums():
    m = build_matrices(B2)
    assert m.first_residual() == first_relation(B2)
    assert m.second_residual(B2) == [r["residual"] * e.alpha.norm2()
                                     for r, e in zip(second_relation(B2), B2)]
    assert all(r.is_zero() for r in m.first_residual())


def test_three_line_nullspace(oracles):
    loc = Locus([(E1, 1), (AP, 1), (AM, 1)])
    sol = solve_couplings(loc)
    assert sol["rank"] == 2 and len(sol["basis"]) == 1
    v = sol["basis"][0]
    v = [c / v[2] for c in v]
    assert v == [parse_scalar(t) for t in oracles["nullspace_three_lines"]]
    tri = sol["triangle_family"]
    assert [c / tri[2] for c in tri] == v
    pf = sol["pfaffian_family"]
    assert [c / pf[2] for c in pf] == v


def test_b2_pfaffian_zero_and_two_dim_family():
    sol = solve_couplings(B2)
    assert sol["pfaffian"].is_zero()
    assert len(sol["basis"]) == 2
    A = build_matrices(B2).A
    for gen in sol["pair_family"]:
        assert all(r.is_zero() for r in [sum((x * y for x, y in zip(row, gen)), S(0)) for row in A])


@given(st.lists(st.integers(-6, 6), min_size=2, max_size=2))
def test_nullspace_annihilates_and_rank_agrees(vals):
    alphas = [E1, Covector(1, 2), Covector(3, -1), Covector(vals[0] * 2 + 1, 5)]
    M = build_matrices(Locus([(al, 1) for al in alphas])).A
    assert rank(M) == frac_rank([[x.to_fraction() for x in row] for row in M])
    for v in nullspace(M):
        assert all(x.is_zero() for x in [sum((m * c for m, c in zip(row, v)), S(0)) for row in M])


def test_classify_two_lines():
    assert classify([E1, E2])["type"] == "A1xA1"
    rep = classify([E1, Covector(1, 1)], [1, 1])
    assert rep["type"] == "infeasible" and not rep["relations_hold"]
    with pytest.raises(UnsupportedCardinality):
        classify([E1])


def test_classify_three_lines(oracles):
    rep = classify([E1, Covector(2, 1), Covector(-2, 1)])
    assert rep["type"] == "CFV-deformation"
    assert rep["required_couplings"] == [S(Fraction(t)) for t in oracles["cfv_a2_required"]]
    # A2 needs cot = +-1/sqrt 3, so no rational model; a non-symmetric triple is infeasible
    assert classify([E1, Covector(1, 2), Covector(3, -1)])["type"] == "infeasible"
    al = [E1, Covector(1, 2), Covector(-1, 2)]
    rep = classify(al, classify(al)["required_couplings"])
    assert rep["relations_hold"]


def test_classify_b2_normal_form():
    third = S(Fraction(1, 3))
    al = [E1, E2, Covector(1, 3), Covector(-1, 3)]
    rep = classify(al)
    assert rep["type"] == "B2-normal-form"
    assert rep["normal_form"]["a"] == third
    assert rep["pfaffian"].is_zero()
    rep = classify(B2)
    assert rep["type"] == "B2-normal-form" and rep["relations_hold"]


@pytest.mark.parametrize("k", [S(2), S(Fraction(-1, 3))])
def test_classify_equivalence_invariance(k):
    al = [E1, Covector(2, 1), Covector(-2, 1)]
    base = classify(al)["type"]
    scaled = [al[0], Covector(al[1].c1 * k, al[1].c2 * k), al[2]]
    assert classify(scaled)["type"] == base
    c, sn = S(Fraction(3, 5)), S(Fraction(4, 5))
    rot = [Covector(v.c1 * c - v.c2 * sn, v.c1 * sn + v.c2 * c) for v in al]
    assert classify(rot)["type"] == base
    b2 = [E1, E2, Covector(3, 1), Covector(-3, 1)]
    assert classify([Covector(v.c1 * c - v.c2 * sn, v.c1 * sn + v.c2 * c) for v in b2])["type"] == \
        "B2-normal-form"


def test_matrix_antisymmetry_check():
    from cmspair.locus_lab import _check_antisymmetric
    with pytest.raises(NotAntisymmetric):
        _check_antisymmetric([[S(0), S(1)], [S(2), S(0)]])
