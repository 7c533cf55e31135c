"""Generating functions (w, q, K, N) of the metric family and how V is obtained."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

from .jets import Scalar
from .quadrature import QuadratureSpec

Fn1 = Callable[[Scalar], Scalar]
Fn2 = Callable[[Scalar, Scalar], Scalar]


@dataclass(frozen=True)
class ClosedFormV:
    """V(t, y) and its y-derivative given in closed form."""

    V: Fn2
    V_y: Fn2


@dataclass(frozen=True)
class QuadratureV:
    """V built as w|N|^(1/2) exp(q * int_{y0}^{y} |N|^(-1/2) dy')."""

    quad: QuadratureSpec = QuadratureSpec()


VMode = Union[ClosedFormV, QuadratureV]


@dataclass(frozen=True)
class GeneratorSet:
    """The free functions of the family.

    Metric components need K_t, K_x and N_y to second order, i.e. K and N to
    third order, so their first derivatives are supplied explicitly rather than
    by nesting jets.  All callables must accept floats and :class:`Jet2` alike.
    """

    w: Fn1
    q: Fn1
    K: Fn2
    K_t: Fn2
    K_x: Fn2
    N: Fn1
    N_y: Fn1
    V_mode: VMode = QuadratureV()
    name: str = "custom"

    def with_V_mode(self, mode: VMode) -> "GeneratorSet":
        return GeneratorSet(self.w, self.q, self.K, self.K_t, self.K_x, self.N,
                            self.N_y, mode, self.name)
