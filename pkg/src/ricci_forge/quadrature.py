"""Adaptive Simpson quadrature for smooth one-dimensional integrands."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import UsageError

MAX_DEPTH = 50
_NOISE = 64 * 2.0 ** -52


@dataclass(frozen=True)
class QuadratureSpec:
    """How indefinite y-integrals are realized: ``int_{y0}^{y}`` by adaptive Simpson."""

    y0: float = 0.0
    abs_tol: float = 1e-12
    rule: str = "adaptive_simpson"

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise UsageError(f"abs_tol must be positive, got {self.abs_tol}")
        if self.rule != "adaptive_simpson":
            raise UsageError(f"unsupported quadrature rule {self.rule!r}")


def adaptive_simpson(f: Callable[[float], float], a: float, b: float,
                     abs_tol: float = 1e-12, max_depth: int = MAX_DEPTH) -> float:
    """Integrate ``f`` over [a, b] (b < a gives the signed integral).

    Intervals are bisected until the Simpson estimates on the halves agree
    with the whole-interval estimate to 15*tol; the Richardson-corrected sum
    is returned.  The tolerance is split between halves as usual.
    """
    if a == b:
        return 0.0
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    total = 0.0
    # explicit stack: (a, b, fa, fm, fb, whole, tol, depth)
    stack = [(a, b, fa, fm, fb, whole, abs_tol, 0)]
    while stack:
        a_, b_, fa_, fm_, fb_, whole_, tol, depth = stack.pop()
        m_ = 0.5 * (a_ + b_)
        lm, rm = 0.5 * (a_ + m_), 0.5 * (m_ + b_)
        flm, frm = f(lm), f(rm)
        left = (m_ - a_) / 6.0 * (fa_ + 4.0 * flm + fm_)
        right = (b_ - m_) / 6.0 * (fm_ + 4.0 * frm + fb_)
        delta = left + right - whole_
        # the last clause stops refinement once delta is pure rounding noise
        if (depth >= max_depth or abs(delta) <= 15.0 * tol
                or abs(delta) <= _NOISE * (abs(left) + abs(right))):
            total += left + right + delta / 15.0
            continue
        stack.append((m_, b_, fm_, frm, fb_, right, 0.5 * tol, depth + 1))
        stack.append((a_, m_, fa_, flm, fm_, left, 0.5 * tol, depth + 1))
    if not math.isfinite(total):
        raise ArithmeticError("quadrature produced a non-finite value")
    return total
