"""Relation matrices of a singular locus, Pfaffians and the small-N classification.

For covectors alpha_1..alpha_N with couplings v = (C_1..C_N):

    A_ij = <a_i, a_j> / <a_i^perp, a_j>^3
    B_ij = <a_i, a_j> |a_i|^2 |a_j|^2 / <a_i^perp, a_j>^5

The first relation is ``A v = 0`` and the second is
``diag(C_i - 2|a_i|^2) B v = 0``.  Everything is exact over Q(a, g2, g3).

Angles never appear: the rotation invariant of a line alpha_j seen from alpha_i
is ``cot = <a_i, a_j> / <a_i^perp, a_j>``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .commutant import first_relation, second_relation
from .scalar import ONE, ZERO, S, Scalar
from .xsymbols import Covector, Locus


class NotAntisymmetric(ValueError):
    pass


class UnsupportedCardinality(ValueError):
    pass


# -- matrices -----------------------------------------------------------

@dataclass
class RelationMatrices:
    A: list
    B: list
    v: list

    @property
    def n(self):
        return len(self.v)

    def first_residual(self):
        return mat_vec(self.A, self.v)

    def second_residual(self, locus):
        Bv = mat_vec(self.B, self.v)
        return [(c - 2 * e.alpha.norm2()) * r for c, e, r in zip(self.v, locus, Bv)]


def _check_antisymmetric(M, name="matrix"):
    n = len(M)
    for i in range(n):
        if len(M[i]) != n:
            raise NotAntisymmetric(f"{name} is not square")
        if not S(M[i][i]).is_zero():
            raise NotAntisymmetric(f"{name}[{i}][{i}] is nonzero")
        for j in range(i):
            if not (S(M[i][j]) + S(M[j][i])).is_zero():
                raise NotAntisymmetric(f"{name}[{i}][{j}] != -{name}[{j}][{i}]")


def build_matrices(locus):
    if not isinstance(locus, Locus):
        locus = Locus(locus)
    al = locus.alphas
    n = len(al)
    A = [[ZERO] * n for _ in range(n)]
    B = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            cr = al[i].cross(al[j])
            d = al[i].dot(al[j])
            A[i][j] = d / cr ** 3
            B[i][j] = d * al[i].norm2() * al[j].norm2() / cr ** 5
    _check_antisymmetric(A, "A")
    _check_antisymmetric(B, "B")
    return RelationMatrices(A, B, list(locus.couplings))


def mat_vec(M, v):
    return [sum((S(m) * S(x) for m, x in zip(row, v)), ZERO) for row in M]


# -- Pfaffian, determinant, nullspace -------------------------------------

def pfaffian(M):
    """Exact Pfaffian by expansion along the first row (0 for odd size)."""
    M = [[S(x) for x in row] for row in M]
    _check_antisymmetric(M)
    n = len(M)
    if n % 2:
        return ZERO
    memo = {}

    def pf(idx):
        if not idx:
            return ONE
        if idx in memo:
            return memo[idx]
        i = idx[0]
        total = ZERO
        for pos in range(1, len(idx)):
            j = idx[pos]
            if M[i][j].is_zero():
                continue
            rest = idx[1:pos] + idx[pos + 1:]
            term = M[i][j] * pf(rest)
            total = total - term if pos % 2 == 0 else total + term
        memo[idx] = total
        return total

    return pf(tuple(range(n)))


def minor_pfaffian(M, i):
    """Pfaffian of M with row and column i deleted."""
    keep = [k for k in range(len(M)) if k != i]
    return pfaffian([[M[r][c] for c in keep] for r in keep])


def determinant(M):
    """Fraction-free (Bareiss) elimination; divisions are exact."""
    A = [[S(x) for x in row] for row in M]
    n = len(A)
    if n == 0:
        return ONE
    sign = 1
    prev = ONE
    for k in range(n - 1):
        if A[k][k].is_zero():
            for r in range(k + 1, n):
                if not A[r][k].is_zero():
                    A[k], A[r] = A[r], A[k]
                    sign = -sign
                    break
            else:
                return ZERO
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) / prev
        prev = A[k][k]
    d = A[n - 1][n - 1]
    return d if sign > 0 else -d


def rref(M):
    """(reduced rows, pivot columns)."""
    A = [[S(x) for x in row] for row in M]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        p = next((k for k in range(r, rows) if not A[k][c].is_zero()), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = A[r][c].inverse()
        A[r] = [x * inv for x in A[r]]
        for k in range(rows):
            if k != r and not A[k][c].is_zero():
                f = A[k][c]
                A[k] = [x - f * y for x, y in zip(A[k], A[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return A, pivots


def rank(M):
    return len(rref(M)[1])


def nullspace(M, ncols=None):
    """Basis of {v : M v = 0}, one vector per free column."""
    if not M:
        n = ncols or 0
        return [[ONE if i == j else ZERO for i in range(n)] for j in range(n)]
    R, piv = rref(M)
    n = len(M[0])
    basis = []
    for f in range(n):
        if f in piv:
            continue
        v = [ZERO] * n
        v[f] = ONE
        for row, p in zip(R, piv):
            v[p] = -row[f]
        basis.append(v)
    return basis


# -- couplings -------------------------------------------------------------

def solve_couplings(locus):
    """Solution families of A v = 0.

    Returns a dict with the nullspace ``basis``, ``rank`` and, where they
    apply, closed forms: ``pfaffian_family`` (odd N, rank N-1) and
    ``pair_family`` (N = 4, Pf(A) = 0, A_34 != 0, the two-parameter
    s, t family).
    """
    if not isinstance(locus, Locus):
        locus = Locus(locus)
    m = build_matrices(locus)
    A = m.A
    n = m.n
    out = {"n": n, "rank": rank(A), "basis": nullspace(A, n)}
    if n % 2 == 1 and out["rank"] == n - 1:
        fam = [minor_pfaffian(A, i) * (-1 if (i + 1) % 2 else 1) for i in range(n)]
        out["pfaffian_family"] = fam
    if n == 3:
        out["triangle_family"] = [A[1][2], A[2][0], A[0][1]]
    if n == 4:
        out["pfaffian"] = pfaffian(A)
        if out["pfaffian"].is_zero() and not A[2][3].is_zero():
            out["pair_family"] = ([A[2][3], ZERO, -A[0][3], A[0][2]],
                                  [ZERO, A[2][3], -A[1][3], A[1][2]])
    return out


# -- feasibility -------------------------------------------------------------

def _one_class(e):
    return 2 * e.alpha.norm2()


def _affine_solution(rows, rhs, n):
    """Solve rows * x = rhs exactly; None if inconsistent, else (x0, nullbasis)."""
    if not rows:
        return [ZERO] * n, nullspace([], n)
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    R, piv = rref(aug)
    if n in piv:
        return None
    x0 = [ZERO] * n
    for row, p in zip(R, piv):
        x0[p] = row[n]
    return x0, nullspace(rows, n)


def feasible_couplings(locus_alphas, trials=4, seed=0):
    """Search coupling assignments satisfying both relations.

    For each subset S of lines whose coupling is pinned to 2|alpha|^2 (the
    coupling-one class) the remaining couplings must solve A v = 0 and
    (B v)_i = 0 off S, which is linear.  A subset is admissible when the
    solution set contains a point with every free coupling nonzero and
    distinct from 2|alpha|^2.  Returns a list of ``{"pinned", "couplings",
    "family"}`` where ``couplings`` is one admissible point of the family.
    """
    alphas = [a if isinstance(a, Covector) else Covector(*a) for a in locus_alphas]
    n = len(alphas)
    probe = Locus([(a, ONE) for a in alphas])
    m = build_matrices(probe)
    rng = random.Random(seed)
    found = []
    for k in range(n, -1, -1):
        for pinned in combinations(range(n), k):
            free = [i for i in range(n) if i not in pinned]
            fixed = {i: 2 * alphas[i].norm2() for i in pinned}
            rows, rhs = [], []
            eqs = [m.A[i] for i in range(n)] + [m.B[i] for i in free]
            for row in eqs:
                rows.append([row[j] for j in free])
                rhs.append(-sum((row[j] * fixed[j] for j in pinned), ZERO))
            sol = _affine_solution(rows, rhs, len(free)) if free else (
                [], []) if all(r.is_zero() for r in rhs) else None
            if sol is None:
                continue
            x0, null = sol
            point = _admissible_point(x0, null, free, alphas, rng, trials)
            if point is None:
                continue
            v = [None] * n
            for i in pinned:
                v[i] = fixed[i]
            for i, x in zip(free, point):
                v[i] = x
            found.append({"pinned": list(pinned), "couplings": v,
                          "family": {"free": free, "particular": x0, "directions": null}})
    return found


def _admissible_point(x0, null, free, alphas, rng, trials):
    def ok(x):
        return all(not c.is_zero() and not (c - 2 * alphas[i].norm2()).is_zero()
                   for c, i in zip(x, free))

    if not null:
        return x0 if ok(x0) else None
    for _ in range(trials):
        ts = [S(Fraction(rng.randint(-97, 97), rng.randint(1, 13))) for _ in null]
        x = [c + sum((t * b[j] for t, b in zip(ts, null)), ZERO) for j, c in enumerate(x0)]
        if ok(x):
            return x
    return None


# -- classification ------------------------------------------------------------

def cot(base, other):
    """Rotation- and scale-invariant slope of ``other`` seen from ``base``."""
    return base.dot(other) / base.perp().dot(other)


def _symmetric_about(alphas, i, j, k):
    """alpha_j, alpha_k mirror images under the reflection in alpha_i."""
    return (cot(alphas[i], alphas[j]) + cot(alphas[i], alphas[k])).is_zero()


def _relations(locus):
    return {"first": first_relation(locus),
            "second": [r["residual"] for r in second_relation(locus)]}


def _all_zero(res):
    return all(r.is_zero() for r in res["first"]) and all(r.is_zero() for r in res["second"])


def classify(locus_or_alphas, couplings=None):
    """Classification report for N = 2, 3, 4 lines.

    ``locus_or_alphas`` is a Locus (its couplings are used unless
    ``couplings`` is given) or a list of covectors.
    """
    if isinstance(locus_or_alphas, Locus):
        alphas = locus_or_alphas.alphas
        if couplings is None:
            couplings = locus_or_alphas.couplings
    else:
        alphas = [a if isinstance(a, Covector) else Covector(*a) for a in locus_or_alphas]
    n = len(alphas)
    if n not in (2, 3, 4):
        raise UnsupportedCardinality(f"classification covers 2, 3 or 4 lines, got {n}")
    Locus([(a, ONE) for a in alphas])  # validates non-parallel
    report = {"n": n}
    if n == 2:
        orth = alphas[0].dot(alphas[1]).is_zero()
        report["type"] = "A1xA1" if orth else "infeasible"
        report["orthogonal"] = orth
    elif n == 3:
        report.update(_classify3(alphas))
    else:
        report.update(_classify4(alphas))
    if couplings is not None:
        loc = Locus([(a, S(c)) for a, c in zip(alphas, couplings)])
        res = _relations(loc)
        report["couplings"] = [S(c) for c in couplings]
        report["relations"] = res
        report["relations_hold"] = _all_zero(res)
    feas = feasible_couplings(alphas)
    report["feasible_assignments"] = feas
    report["feasible"] = bool(feas)
    if not feas and report.get("type") not in ("infeasible",):
        report["type"] = "infeasible"
    return report


def _classify3(al):
    out = {}
    sym = [i for i in range(3) if _symmetric_about(al, i, *[j for j in range(3) if j != i])]
    out["symmetry_axes"] = sym
    a2 = len(sym) == 3 and all(
        (cot(al[i], al[j]) ** 2 - S(Fraction(1, 3))).is_zero()
        for i in range(3) for j in range(3) if i != j)
    out["A2"] = a2
    if a2:
        out["type"] = "A2"
    elif sym:
        i = sym[0]
        j, k = [t for t in range(3) if t != i]
        out["type"] = "CFV-deformation"
        out["normal_form"] = {"axis": i, "a": _abs(cot(al[i], al[j])), "pair": [j, k]}
        # the two mirror lines must carry coupling one; the axis coupling follows from A v = 0
        m = build_matrices(Locus([(a, ONE) for a in al]))
        tri = [m.A[1][2], m.A[2][0], m.A[0][1]]
        scale = 2 * al[j].norm2() / tri[j]
        out["required_couplings"] = [t * scale for t in tri]
    else:
        out["type"] = "infeasible"
    return out


def _abs(x):
    if x.is_constant():
        return x if x.to_fraction() >= 0 else -x
    return x


def _classify4(al):
    out = {}
    orth = [(i, j) for i, j in combinations(range(4), 2) if al[i].dot(al[j]).is_zero()]
    out["orthogonal_pairs"] = orth
    nf = None
    for i, j in orth:
        k, l = [t for t in range(4) if t not in (i, j)]
        if _symmetric_about(al, i, k, l):
            nf = {"e1": i, "e2": j, "pair": [k, l], "a": _abs(cot(al[i], al[k]))}
            break
    out["normal_form"] = nf
    m = build_matrices(Locus([(a, ONE) for a in al]))
    pf = pfaffian(m.A)
    out["pfaffian"] = pf
    fam = None
    if pf.is_zero() and not m.A[2][3].is_zero():
        fam = ([m.A[2][3], ZERO, -m.A[0][3], m.A[0][2]], [ZERO, m.A[2][3], -m.A[1][3], m.A[1][2]])
    out["pair_family"] = fam
    if fam:
        # (B v)_i on the two generators, so (B v)_i = s*x + t*y
        out["second_on_family"] = [list(p) for p in zip(mat_vec(m.B, fam[0]), mat_vec(m.B, fam[1]))]
    if not orth:
        out["type"] = "infeasible"
    elif nf is not None:
        out["type"] = "B2-normal-form"
    else:
        out["type"] = "orthogonal-pair"
    return out


def locus_from_lines(lines):
    """Parse 'c1 c2 C' triples (C optional) into alphas and couplings."""
    alphas, cs = [], []
    for ln in lines:
        parts = ln.split()
        alphas.append(Covector(S(Fraction(parts[0])), S(Fraction(parts[1]))))
        cs.append(S(Fraction(parts[2])) if len(parts) > 2 else None)
    return alphas, (cs if all(c is not None for c in cs) else None)


__all__ = ["RelationMatrices", "build_matrices", "pfaffian", "minor_pfaffian", "determinant",
           "nullspace", "rank", "rref", "solve_couplings", "classify", "feasible_couplings",
           "cot", "NotAntisymmetric", "UnsupportedCardinality", "Scalar"]
