"""Weierstrass wp and wp' by the Laurent series at the origin.

With c2 = g2/20, c3 = g3/28 and the usual quadratic recurrence, every
coefficient obeys |c_k| <= 3 rho^k where rho = max(sqrt|g2|/60, cbrt|g3|/84)
(induction from k = 4 on).  That gives a geometric tail bound in
q = rho |z|^2, which is what the error estimates below use.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath


class OutOfConvergenceRegion(ValueError):
    pass


class PrecisionUnachievable(ArithmeticError):
    pass


def _mpf(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    if hasattr(v, "to_fraction"):
        return _mpf(v.to_fraction())
    return mpmath.mpf(v)


@dataclass
class WpContext:
    """Series evaluation context.

    ``q_max`` bounds rho |z|^2 (the convergence region); ``max_terms`` caps the
    truncation order before PrecisionUnachievable is raised.
    """

    g2: object = 0
    g3: object = 0
    digits: int = 50
    max_terms: int = 4000
    q_max: float = 0.5
    _coeffs: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        if self.digits < 5:
            raise PrecisionUnachievable("need at least 5 working digits")
        with self.workprec():
            self._g2 = _mpf(self.g2)
            self._g3 = _mpf(self.g3)
            self.rho = max(mpmath.sqrt(abs(self._g2) / 60), mpmath.cbrt(abs(self._g3) / 84))
        self._coeffs = [None, None]

    def workprec(self):
        return mpmath.workdps(self.digits + 10)

    def coefficient(self, k):
        """c_k for k >= 2 (memoized)."""
        cs = self._coeffs
        while len(cs) <= k:
            n = len(cs)
            if n == 2:
                cs.append(self._g2 / 20)
            elif n == 3:
                cs.append(self._g3 / 28)
            else:
                s = mpmath.fsum(cs[m] * cs[n - m] for m in range(2, n - 1))
                cs.append(3 * s / ((2 * n + 1) * (n - 3)))
        return cs[k]

    def radius(self):
        """Largest |z| accepted by wp_eval."""
        if self.rho == 0:
            return mpmath.inf
        return mpmath.sqrt(self.q_max / self.rho)


def _tails(rho, z, K):
    """Bounds for the wp and wp' tails after the k = K term."""
    q = rho * z * z
    if q == 0:
        return mpmath.mpf(0), mpmath.mpf(0)
    t0 = 3 * rho * q ** K / (1 - q)
    t1 = 6 * rho / abs(z) * q ** K * (K * (1 - q) + q) / (1 - q) ** 2
    return t0, t1


def wp_eval(z, ctx: WpContext):
    """(wp(z), wp'(z), error bound) for real nonzero z in the series region."""
    with ctx.workprec():
        z = _mpf(z)
        if z == 0:
            raise OutOfConvergenceRegion("z = 0 is a pole")
        q = ctx.rho * z * z
        if q >= ctx.q_max:
            raise OutOfConvergenceRegion(
                f"rho*|z|^2 = {mpmath.nstr(q, 5)} exceeds {ctx.q_max}; pre-scale z")
        p = 1 / (z * z)
        dp = -2 / (z * z * z)
        # truncate at working precision so derived quantities keep `digits`
        target = mpmath.mpf(10) ** (-(ctx.digits + 10)) * abs(p)
        K = 1
        t0, t1 = _tails(ctx.rho, z, K)
        while max(t0, t1) > target:
            K += 1
            if K > ctx.max_terms:
                raise PrecisionUnachievable(
                    f"tail bound still {mpmath.nstr(max(t0, t1), 5)} after {ctx.max_terms} terms")
            ck = ctx.coefficient(K)
            p += ck * z ** (2 * K - 2)
            dp += (2 * K - 2) * ck * z ** (2 * K - 3)
            t0, t1 = _tails(ctx.rho, z, K)
        # rounding of the summation itself
        eps = mpmath.mpf(10) ** (-(ctx.digits + 9)) * K * (abs(p) + abs(dp))
        err = max(t0, t1) + eps
        return +p, +dp, +err


def ode_residual(z, ctx: WpContext):
    """|wp'^2 - 4 wp^3 + g2 wp + g3| at z."""
    p, dp, _ = wp_eval(z, ctx)
    with ctx.workprec():
        return abs(dp * dp - 4 * p ** 3 + ctx._g2 * p + ctx._g3)


# -- numeric zero testing ---------------------------------------------

@dataclass
class ZeroVerdict:
    zero: bool
    max_relative: object
    trials: int
    samples: list
    max_abs: object = 0

    def __bool__(self):
        return self.zero


def _scalar_values(a, g2, g3):
    return {"a": a, "g2": g2, "g3": g3}


def sample_point(generators, a, ctx, rng, spread=0.5):
    """A random (x1, x2) keeping every scaled argument inside the region.

    ``generators`` are ``(alpha, k)`` with Scalar components, evaluated at a.
    """
    vals = {"a": a, "g2": ctx._g2, "g3": ctx._g3}
    rad = ctx.radius()
    forms = []
    for alpha, k in generators:
        kv = _mpf(k.evaluate(vals))
        forms.append((kv * _mpf(alpha.c1.evaluate(vals)), kv * _mpf(alpha.c2.evaluate(vals))))
    bound = max(abs(f1) + abs(f2) for f1, f2 in forms)
    box = spread * min(rad, 1) / bound if rad != mpmath.inf else spread / bound
    for _ in range(1000):
        x1 = mpmath.mpf(rng.uniform(-1, 1)) * box
        x2 = mpmath.mpf(rng.uniform(-1, 1)) * box
        ts = [f1 * x1 + f2 * x2 for f1, f2 in forms]
        # stay away from the poles so values do not dwarf each other
        if min(abs(t) for t in ts) > box * bound / 20:
            return x1, x2, ts
    raise OutOfConvergenceRegion("could not place a sample point away from the poles")


def evaluate_generators(ts, ctx):
    out = []
    for t in ts:
        p, dp, _ = wp_eval(t, ctx)
        out.append((p, dp))
    return out


def numeric_zero_test(exprs, gg_samples=((1, 0), (0, 1)), a_values=None, trials=20,
                      digits=50, tol=Fraction(1, 10 ** 25), seed=0):
    """Evaluate elliptic coefficients at random points.

    ``exprs`` is an iterable of Elliptic elements sharing one ring (its g2, g3
    may be symbolic; each sample binds them).  The verdict is zero iff for
    every sample and expression |value| < tol * (largest monomial).
    ``a_values`` supplies numbers for a symbolic a (one is drawn per trial
    when given as None and a is free).
    """
    exprs = [e for e in exprs]
    if not exprs:
        return ZeroVerdict(True, 0, 0, [])
    ring = exprs[0].ring
    if _fixed_gg(ring):
        gg_samples = [(ring.g2.to_fraction(), ring.g3.to_fraction())]
    elif len({(g2, g3) for g2, g3 in gg_samples}) < 2:
        raise ValueError("at least two distinct (g2, g3) samples are needed")
    rng = random.Random(seed)
    needs_a = any("a" in _free(e) for e in exprs) or any(
        "a" in (al.c1.free_symbols() | al.c2.free_symbols() | k.free_symbols())
        for al, k in ring.generators)
    worst = mpmath.mpf(0)
    worst_abs = mpmath.mpf(0)
    samples = []
    ok = True
    with mpmath.workdps(digits + 10):
        tolv = _mpf(tol)
        for g2, g3 in gg_samples:
            ctx = WpContext(g2=g2, g3=g3, digits=digits)
            for t in range(trials):
                if needs_a:
                    if a_values:
                        a = _mpf(a_values[t % len(a_values)])
                    else:
                        a = _mpf(Fraction(rng.randint(11, 39), 10))
                else:
                    a = mpmath.mpf(0)
                x1, x2, ts = sample_point(ring.generators, a, ctx, rng)
                gens = evaluate_generators(ts, ctx)
                vals = _scalar_values(a, ctx._g2, ctx._g3)
                for e in exprs:
                    mons = [_mpf(m) if isinstance(m, Fraction) else m for m in e.monomial_values(gens, vals)]
                    scale = max((abs(m) for m in mons), default=mpmath.mpf(0))
                    v = abs(mpmath.fsum(mons))
                    rel = v / scale if scale else v
                    worst = max(worst, rel)
                    worst_abs = max(worst_abs, v)
                    if v > 0 and v >= tolv * scale:
                        ok = False
                samples.append({"g2": g2, "g3": g3, "a": a, "x1": x1, "x2": x2})
    return ZeroVerdict(ok, worst, len(samples), samples, worst_abs)


def _free(e):
    out = set()
    for c in e.terms.values():
        out |= c.free_symbols()
    return out


def _fixed_gg(ring):
    return ring.g2.is_constant() and ring.g3.is_constant()


__all__ = ["WpContext", "wp_eval", "ode_residual", "numeric_zero_test", "ZeroVerdict",
           "OutOfConvergenceRegion", "PrecisionUnachievable"]
