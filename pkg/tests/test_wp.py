import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cmspair.coef import EllipticRing
from cmspair.scalar import Scalar
from cmspair.wp import (OutOfConvergenceRegion, PrecisionUnachievable, WpContext,
                        evaluate_generators, numeric_zero_test, ode_residual, wp_eval)
from cmspair.xsymbols import Covector

a = Scalar.symbol("a")
g2s, g3s = Scalar.symbol("g2"), Scalar.symbol("g3")
RING = EllipticRing([(Covector(a, 1), 1), (Covector(-a, 1), 1)], g2s, g3s)


def test_degenerate_case_exact():
    ctx = WpContext(digits=50)
    p, dp, err = wp_eval(Fraction(3, 7), ctx)
    with mpmath.workdps(80):
        assert abs(p - mpmath.mpf(49) / 9) < mpmath.mpf(10) ** -55
        assert abs(dp + mpmath.mpf(686) / 27) < mpmath.mpf(10) ** -55
    assert err < mpmath.mpf(10) ** -55


@pytest.mark.parametrize("case", range(5))
def test_against_jacobi_oracle(oracles, case):
    c = oracles["wp_jacobi"][case]
    ctx = WpContext(g2=Fraction(c["g2"]), g3=Fraction(c["g3"]), digits=50)
    p, dp, err = wp_eval(Fraction(c["z"]), ctx)
    with mpmath.workdps(60):
        assert abs(p - mpmath.mpf(c["wp"])) < mpmath.mpf(10) ** -45 * abs(p)
        assert abs(dp - mpmath.mpf(c["wp1"])) < mpmath.mpf(10) ** -45 * abs(dp)
    assert err < mpmath.mpf(10) ** -50 * abs(p) * 10


@given(st.floats(0.05, 1.0), st.floats(-5, 5), st.floats(-5, 5))
def test_ode_residual_and_parity(z, g2, g3):
    ctx = WpContext(g2=Fraction(g2), g3=Fraction(g3), digits=30)
    if ctx.rho * z * z >= ctx.q_max:
        with pytest.raises(OutOfConvergenceRegion):
            wp_eval(z, ctx)
        return
    p, dp, _ = wp_eval(z, ctx)
    with ctx.workprec():
        assert ode_residual(z, ctx) < mpmath.mpf(10) ** -25 * max(1, abs(p) ** 3)
        pn, dpn, err = wp_eval(-z, ctx)
        assert abs(pn - p) <= 2 * err and abs(dpn + dp) <= 2 * err


def test_bound_shrinks_with_precision():
    z = Fraction(1, 3)
    errs = [wp_eval(z, WpContext(g2=2, g3=1, digits=d))[2] for d in (20, 40, 80)]
    assert errs[0] >= errs[1] >= errs[2]


def test_errors():
    with pytest.raises(OutOfConvergenceRegion):
        wp_eval(0, WpContext())
    with pytest.raises(OutOfConvergenceRegion):
        wp_eval(3, WpContext(g2=60, g3=0))
    with pytest.raises(PrecisionUnachievable):
        wp_eval(Fraction(7, 10), WpContext(g2=1, g3=1, digits=400, max_terms=5, q_max=0.9))
    with pytest.raises(PrecisionUnachievable):
        WpContext(digits=2)


def test_ode_expression_is_numerically_zero():
    p, q = RING.p(0), RING.q(0)
    expr = q * q * 3 - (4 * p * p * p - g2s * p - g3s) * 3 + p * (a + 1) - p * (a + 1)
    assert expr.is_zero()
    verdict = numeric_zero_test([p * q - q * p + (q * q - 4 * p ** 3 + g2s * p + g3s)], trials=4)
    assert verdict.zero


def _value(expr, x1, x2, g2, g3, av):
    ctx = WpContext(g2=g2, g3=g3, digits=40)
    with ctx.workprec():
        A = mpmath.mpf(av)
        ts = [A * x1 + x2, -A * x1 + x2]
        gens = evaluate_generators(ts, ctx)
        return mpmath.fsum(expr.monomial_values(gens, {"a": A, "g2": ctx._g2, "g3": ctx._g3}))


def test_difference_of_mirror_generators():
    d = RING.p(0) - RING.p(1)
    assert abs(_value(d, 0, Fraction(3, 10), 1, 0, 2)) == 0
    assert abs(_value(d, Fraction(1, 10), Fraction(3, 10), 1, 0, 2)) > 1
    assert not numeric_zero_test([d], trials=3).zero


def test_zero_test_needs_two_invariant_samples():
    with pytest.raises(ValueError):
        numeric_zero_test([RING.p(0)], gg_samples=((1, 0), (1, 0)))


def test_random_points_reproducible():
    d = RING.p(0) * RING.q(1)
    v1 = numeric_zero_test([d], trials=3, seed=5)
    v2 = numeric_zero_test([d], trials=3, seed=5)
    assert v1.samples == v2.samples
    assert random.Random(5).random() == random.Random(5).random()
