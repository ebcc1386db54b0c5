"""Independent reference values, frozen into tests/data/oracles.json.

Run with ``python3 oracles/generate.py``.  Uses sympy (exact algebra) and
mpmath's Jacobi functions; neither path shares code with the package, so
the tests compare against genuinely separate computations.
"""

import json
from pathlib import Path

import mpmath
import sympy as sp

a, X, Y, x1, x2, t1, t2 = sp.symbols("a X Y x1 x2 xi1 xi2")
OUT = Path(__file__).resolve().parent.parent / "tests" / "data" / "oracles.json"


def txt(e):
    return str(sp.factor(sp.cancel(e))).replace("**", "^")


def xipoly(e):
    p = sp.Poly(sp.expand(e), t1, t2)
    return {f"{i},{j}": txt(c) for (i, j), c in p.terms()}


def dxi(F, al, n=1):
    for _ in range(n):
        F = al[0] * sp.diff(F, t1) + al[1] * sp.diff(F, t2)
    return sp.expand(F)


def div_lin(F, al):
    q, r = sp.div(sp.Poly(F, t1, t2), sp.Poly(al[0] * t1 + al[1] * t2, t1, t2))
    assert r.is_zero, "not divisible"
    return q.as_expr()


def basis_coeffs(F, al):
    n2 = al[0] ** 2 + al[1] ** 2
    G = sp.expand(F.subs({t1: (al[0] * X - al[1] * Y) / n2, t2: (al[1] * X + al[0] * Y) / n2},
                         simultaneous=True))
    m = sp.Poly(F, t1, t2).total_degree()
    P = sp.Poly(G, X, Y)
    return [txt(P.coeff_monomial(X ** k * Y ** (m - k))) for k in range(m + 1)]


P0 = (a * (4 - a ** 2) * t1 ** 6 + 5 * a * t1 ** 4 * t2 ** 2 + 5 / a * t1 ** 2 * t2 ** 4
      + (4 - a ** -2) / a * t2 ** 6)
E1, E2, AP, AM = (1, 0), (0, 1), (a, 1), (-a, 1)
LOCUS = [E1, E2, AP, AM]
s = a ** 2 + 1
COUP = [sp.Rational(3, 16) * s * (3 / a ** 2 - 1) / a ** 2, sp.Rational(3, 16) * s * (3 * a ** 2 - 1),
        6 * s, 6 * s]


def first_relation(al, C):
    al = [tuple(sp.sympify(c) for c in v) for v in al]
    out = []
    for i, p in enumerate(al):
        r = 0
        for j, b in enumerate(al):
            if j != i:
                r += (p[0] * b[0] + p[1] * b[1]) * C[j] / (p[0] * b[1] - p[1] * b[0]) ** 3
        out.append(sp.cancel(r))
    return out


def wp_jacobi(z, e1, e2, e3):
    # wp(z) = e3 + (e1 - e3)/sn^2(sqrt(e1 - e3) z, m),  m = (e2 - e3)/(e1 - e3)
    r = mpmath.sqrt(e1 - e3)
    m = (e2 - e3) / (e1 - e3)
    sn = mpmath.ellipfun("sn", r * z, m=m)
    cn = mpmath.ellipfun("cn", r * z, m=m)
    dn = mpmath.ellipfun("dn", r * z, m=m)
    p = e3 + (e1 - e3) / sn ** 2
    dp = -2 * (e1 - e3) * r * cn * dn / sn ** 3
    return p, dp


def main():
    out = {}

    # principal symbol of the B2 pair in the (xi_alpha, xi_alpha^perp) basis
    out["p0_basis_alpha_plus"] = basis_coeffs(P0, AP)
    out["xi1xi2_basis_11"] = basis_coeffs(t1 * t2, (1, 1))

    # D_theta P0 divided by the four linear forms
    F = sp.expand(t2 * sp.diff(P0, t1) - t1 * sp.diff(P0, t2))
    for al in LOCUS:
        F = div_lin(F, al)
    out["order_bound_quotient"] = xipoly(F)

    # P4^alpha for alpha = e1 and P6^alpha for alpha = alpha_+
    def p2a(al):
        return div_lin(dxi(P0, al), al)

    def p4a(al, C):
        n2 = al[0] ** 2 + al[1] ** 2
        return div_lin(sp.expand((C + 6 * n2) * dxi(p2a(al), al) - 4 * dxi(P0, al, 3)), al)

    out["p4_alpha_e1"] = xipoly(p4a(E1, COUP[0]))
    n2p = a ** 2 + 1
    C = COUP[2]
    p6 = div_lin(sp.expand(24 * dxi(P0, AP, 5) + (C - 90 * n2p) * dxi(p2a(AP), AP, 3)
                           + C * dxi(p4a(AP, C), AP)), AP)
    out["p6_alpha_plus"] = xipoly(p6)

    # radial symbol, alpha = (1, 2) in the m = 2 class (C = 6 |alpha|^2)
    R = sp.expand((t1 ** 2 + t2 ** 2) ** 3)
    al = (1, 2)
    C5 = 30
    q2 = div_lin(dxi(R, al), al)
    q4 = div_lin(sp.expand((C5 + 30) * dxi(q2, al) - 4 * dxi(R, al, 3)), al)
    q6 = div_lin(sp.expand(24 * dxi(R, al, 5) + (C5 - 450) * dxi(q2, al, 3) + C5 * dxi(q4, al)), al)
    out["radial_p4_alpha_12"] = xipoly(q4)
    out["radial_p6_alpha_12"] = xipoly(q6)

    # generic-pipeline P2, P3 at rational points, potential C/t^2
    pts = [(sp.Rational(2), sp.Rational(1, 3), sp.Rational(-2, 5)),
           (sp.Rational(5, 3), sp.Rational(3, 7), sp.Rational(4, 9))]
    forms = [al[0] * x1 + al[1] * x2 for al in LOCUS]
    P2 = sum(-sp.Rational(1, 2) * C_ / f ** 2 * p2a(al) for al, C_, f in zip(LOCUS, COUP, forms))
    P3 = sum(-sp.Rational(1, 4) * (-2 * C_ / f ** 3) * dxi(p2a(al), al)
             for al, C_, f in zip(LOCUS, COUP, forms))
    vals = []
    for av, xv, yv in pts:
        sub = {a: av, x1: xv, x2: yv}
        vals.append({"a": str(av), "x1": str(xv), "x2": str(yv),
                     "P2": xipoly(sp.expand(P2.subs(sub))), "P3": xipoly(sp.expand(P3.subs(sub))),
                     "potential": str(sp.nsimplify(sum(C_ / f ** 2 for C_, f in zip(COUP, forms)).subs(sub)))})
    out["pipeline_points"] = vals

    # K constant at alpha0 = e1: sum_b C_b/<e1^perp,b>^3 b = K e1^perp
    w = [0, 0]
    for b, C_ in zip(LOCUS[1:], COUP[1:]):
        c = C_ / (E1[0] * b[1] - E1[1] * b[0]) ** 3
        w[0] += c * b[0]
        w[1] += c * b[1]
    assert sp.cancel(w[0]) == 0
    out["k_constant_e1"] = txt(w[1])

    # first relation on the B2 locus, and the display a C1 + C2/a^3 - (1 - a^2)/(8 a^3) 6 s
    out["first_relation_b2"] = [txt(r) for r in first_relation(LOCUS, COUP)]
    out["display_identity"] = txt(a * COUP[0] + COUP[1] / a ** 3 - (1 - a ** 2) / (8 * a ** 3) * 6 * s)

    # CFV-type 3-line locus with the mirror lines at coupling two
    lines = [(1, 0), (2, 1), (-2, 1)]
    c1 = sp.Symbol("c1")
    rel = first_relation(lines, [c1, 10, 10])
    sol = sp.solve(rel[1], c1)
    assert all(sp.simplify(r.subs(c1, sol[0])) == 0 for r in rel)
    out["cfv_a2_required"] = [str(sol[0]), "10", "10"]

    # nullspace of A for {e1, a e1 + e2, -a e1 + e2}
    L3 = [tuple(sp.sympify(c) for c in v) for v in (E1, AP, AM)]
    A = sp.zeros(3, 3)
    for i, p in enumerate(L3):
        for j, b in enumerate(L3):
            if i != j:
                A[i, j] = sp.cancel((p[0] * b[0] + p[1] * b[1]) / (p[0] * b[1] - p[1] * b[0]) ** 3)
    ns = A.nullspace()
    assert len(ns) == 1
    v = ns[0] / ns[0][2]
    out["nullspace_three_lines"] = [txt(c) for c in v]

    # wp at 50 digits via Jacobi functions (three real roots)
    mpmath.mp.dps = 60
    wp_cases = []
    for roots, zs in (((1, 0, -1), ("1/2", "3/10", "-7/10")),
                      (("2/3", "-1/3", "-1/3"), ()),
                      ((2, "-1/2", "-3/2"), ("1/4", "2/5"))):
        e = [mpmath.mpf(sp.Rational(r).p) / sp.Rational(r).q for r in roots]
        if abs(e[1] - e[2]) < mpmath.mpf(10) ** -40:
            continue
        g2 = -4 * (e[0] * e[1] + e[1] * e[2] + e[2] * e[0])
        g3 = 4 * e[0] * e[1] * e[2]
        for z in zs:
            zq = sp.Rational(z)
            p, dp = wp_jacobi(mpmath.mpf(zq.p) / zq.q, *e)
            wp_cases.append({"z": z, "g2": txt(sp.nsimplify(mpmath.nstr(g2, 30))),
                             "g3": txt(sp.nsimplify(mpmath.nstr(g3, 30))),
                             "wp": mpmath.nstr(p, 50), "wp1": mpmath.nstr(dp, 50)})
    out["wp_jacobi"] = wp_cases

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(out, indent=1, sort_keys=True) + "\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
