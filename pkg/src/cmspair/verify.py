"""Commutator verification with the free-ring test first and numerics second."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .coef import Elliptic, RationalPole
from .wp import ZeroVerdict, _mpf, numeric_zero_test

DEFAULT_GG = ((1, 0), (0, 1), (3, 2))


@dataclass
class CommutationReport:
    mode: str
    exact_zero: bool
    verdict: str  # "exact-zero", "numeric-zero" or "nonzero"
    support: list = field(default_factory=list)
    numeric: ZeroVerdict | None = None
    ring: str = ""

    @property
    def zero(self):
        return self.verdict != "nonzero"

    def summary(self):
        lines = [f"ring: {self.ring}", f"mode: {self.mode}",
                 f"free-ring residual: {'zero' if self.exact_zero else 'nonzero'}"]
        if not self.exact_zero:
            lines.append(f"residual support: {len(self.support)} derivative slots")
        if self.numeric is not None:
            lines.append(f"numeric samples: {self.numeric.trials}")
            lines.append(f"max |residual|: {mpmath.nstr(self.numeric.max_abs, 5)}")
            lines.append(f"max relative residual: {mpmath.nstr(self.numeric.max_relative, 5)}")
        lines.append(f"verdict: {self.verdict}")
        return "\n".join(lines)


def residual_support(R):
    """[(dx, number of monomials)] for a nonzero commutator."""
    out = []
    for dx, c in R.items():
        n = len(c.terms) if isinstance(c, Elliptic) else len(c.num)
        out.append((dx, n))
    return out


def rational_numeric_test(exprs, trials=20, digits=50, tol=Fraction(1, 10 ** 25), seed=0,
                          a_values=None):
    """Random-point test for RationalPole coefficients."""
    rng = random.Random(seed)
    worst = mpmath.mpf(0)
    worst_abs = mpmath.mpf(0)
    ok = True
    samples = []
    with mpmath.workdps(digits + 10):
        tolv = _mpf(tol)
        for t in range(trials):
            if a_values:
                a = _mpf(a_values[t % len(a_values)])
            else:
                a = _mpf(Fraction(rng.randint(11, 39), 10))
            vals = {"a": a, "g2": mpmath.mpf(0), "g3": mpmath.mpf(0)}
            x1 = mpmath.mpf(rng.uniform(0.2, 1.0))
            x2 = mpmath.mpf(rng.uniform(0.2, 1.0)) * (1 if rng.random() < 0.5 else -1)
            for e in exprs:
                den = 1
                for f, k in zip(e.ring.forms, e.den):
                    if k:
                        den *= (_mpf(f.c1.evaluate(vals)) * x1 + _mpf(f.c2.evaluate(vals)) * x2) ** k
                mons = [_mpf(c.evaluate(vals)) * x1 ** i * x2 ** j for (i, j), c in e.num.items()]
                scale = max((abs(m) for m in mons), default=mpmath.mpf(0)) / abs(den)
                v = abs(mpmath.fsum(mons) / den)
                worst = max(worst, v / scale if scale else v)
                worst_abs = max(worst_abs, v)
                if v > 0 and v >= tolv * scale:
                    ok = False
            samples.append({"a": a, "x1": x1, "x2": x2})
    return ZeroVerdict(ok, worst, len(samples), samples, worst_abs)


def verify_operators(L, P, mode="both", trials=20, digits=50, tol=Fraction(1, 10 ** 25),
                     seed=0, gg_samples=DEFAULT_GG):
    if mode not in ("exact", "numeric", "both"):
        raise ValueError("mode must be exact, numeric or both")
    R = L.commutator(P)
    exact = R.is_zero()
    ring_kind = getattr(L.ring, "kind", "rational")
    rep = CommutationReport(mode=mode, exact_zero=exact, verdict="exact-zero" if exact else "nonzero",
                            support=[] if exact else residual_support(R), ring=ring_kind)
    if mode == "exact":
        return rep
    if mode == "numeric" or not exact:
        coeffs = [c for _, c in R.items()]
        if not coeffs:
            rep.numeric = ZeroVerdict(True, mpmath.mpf(0), 0, [], mpmath.mpf(0))
        elif isinstance(coeffs[0], RationalPole):
            rep.numeric = rational_numeric_test(coeffs, trials, digits, tol, seed)
        else:
            rep.numeric = numeric_zero_test(coeffs, gg_samples, None, trials, digits, tol, seed)
        if mode == "numeric" or not exact:
            rep.verdict = "numeric-zero" if rep.numeric.zero else "nonzero"
    return rep


__all__ = ["CommutationReport", "verify_operators", "rational_numeric_test", "residual_support"]
