"""Second-order forward-mode differentiation over the coordinates (t, x, y, z).

A :class:`Jet2` carries a value together with its gradient and Hessian with
respect to the four spacetime coordinates.  Seeding each coordinate and pushing
the seeds through ordinary arithmetic yields exact first and second partial
derivatives of any composition of the supported primitives.

The elementary functions in this module (:func:`sin`, :func:`exp`, ...) accept
plain floats as well as jets, so a single closed-form expression can be
evaluated cheaply on floats or differentiated on jets.
"""

from __future__ import annotations

import math
from typing import Sequence, Union

import numpy as np

from .errors import DomainError, UsageError

NDIM = 4
AXES = ("t", "x", "y", "z")

_ZERO_GRAD = np.zeros(NDIM)
_ZERO_HESS = np.zeros((NDIM, NDIM))


class Jet2:
    """Scalar with its 4-gradient and symmetric 4x4 Hessian."""

    __slots__ = ("value", "grad", "hess")
    __array_ufunc__ = None  # numpy scalars defer to the reflected jet operators

    def __init__(self, value: float, grad=None, hess=None):
        self.value = float(value)
        self.grad = _ZERO_GRAD if grad is None else grad
        self.hess = _ZERO_HESS if hess is None else hess

    @classmethod
    def constant(cls, value: float) -> "Jet2":
        return cls(value)

    def __repr__(self) -> str:
        return f"Jet2(value={self.value!r}, grad={self.grad.tolist()!r})"

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet2):
            return Jet2(self.value + other.value, self.grad + other.grad, self.hess + other.hess)
        return Jet2(self.value + other, self.grad, self.hess)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Jet2):
            return Jet2(self.value - other.value, self.grad - other.grad, self.hess - other.hess)
        return Jet2(self.value - other, self.grad, self.hess)

    def __rsub__(self, other):
        return Jet2(other - self.value, -self.grad, -self.hess)

    def __neg__(self):
        return Jet2(-self.value, -self.grad, -self.hess)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, Jet2):
            a, b = self, other
            cross = np.outer(a.grad, b.grad)
            # cross + cross.T is symmetric bit-for-bit, unlike two separate outers
            hess = (a.hess * b.value + b.hess * a.value) + (cross + cross.T)
            return Jet2(a.value * b.value, a.grad * b.value + b.grad * a.value, hess)
        return Jet2(self.value * other, self.grad * other, self.hess * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet2):
            return self * reciprocal(other)
        if other == 0:
            raise DomainError("division by zero")
        return self * (1.0 / other)

    def __rtruediv__(self, other):
        return reciprocal(self) * other

    def __pow__(self, exponent):
        if isinstance(exponent, Jet2):
            return exp(exponent * log(self))
        return power(self, exponent)

    # comparisons act on the value so jets can flow through sign tests
    def __lt__(self, other):
        return self.value < _val(other)

    def __le__(self, other):
        return self.value <= _val(other)

    def __gt__(self, other):
        return self.value > _val(other)

    def __ge__(self, other):
        return self.value >= _val(other)

    def __float__(self) -> float:
        return self.value


Scalar = Union[float, Jet2]


def _val(a: Scalar) -> float:
    return a.value if isinstance(a, Jet2) else float(a)


def value_of(a: Scalar) -> float:
    """Plain float value of a jet or number."""
    return _val(a)


def _chain(a: Jet2, f0: float, f1: float, f2: float) -> Jet2:
    """Apply a scalar function with value f0, derivative f1, second derivative f2."""
    return Jet2(f0, f1 * a.grad, f1 * a.hess + f2 * np.outer(a.grad, a.grad))


def seed(point: Sequence[float], axis: int) -> Jet2:
    """Coordinate jet for ``axis`` at ``point``: value = coordinate, grad = e_axis."""
    if not isinstance(axis, (int, np.integer)) or not 0 <= axis < NDIM:
        raise UsageError(f"axis must be one of 0..3, got {axis!r}")
    grad = np.zeros(NDIM)
    grad[axis] = 1.0
    return Jet2(point[axis], grad, _ZERO_HESS)


def seed_all(point: Sequence[float]) -> tuple[Jet2, Jet2, Jet2, Jet2]:
    if len(point) != NDIM:
        raise UsageError(f"an event needs 4 coordinates, got {len(point)}")
    return tuple(seed(point, i) for i in range(NDIM))  # type: ignore[return-value]


# -- elementary functions (float or Jet2) ----------------------------------

def reciprocal(a: Scalar) -> Scalar:
    v = _val(a)
    if v == 0.0:
        raise DomainError("division by a zero-valued quantity")
    if not isinstance(a, Jet2):
        return 1.0 / v
    inv = 1.0 / v
    return _chain(a, inv, -inv * inv, 2.0 * inv * inv * inv)


def sin(a: Scalar) -> Scalar:
    if not isinstance(a, Jet2):
        return math.sin(a)
    s, c = math.sin(a.value), math.cos(a.value)
    return _chain(a, s, c, -s)


def cos(a: Scalar) -> Scalar:
    if not isinstance(a, Jet2):
        return math.cos(a)
    s, c = math.sin(a.value), math.cos(a.value)
    return _chain(a, c, -s, -c)


def tan(a: Scalar) -> Scalar:
    if not isinstance(a, Jet2):
        return math.tan(a)
    tv = math.tan(a.value)
    sec2 = 1.0 + tv * tv
    return _chain(a, tv, sec2, 2.0 * tv * sec2)


def exp(a: Scalar) -> Scalar:
    if not isinstance(a, Jet2):
        return math.exp(a)
    e = math.exp(a.value)
    return _chain(a, e, e, e)


def log(a: Scalar) -> Scalar:
    """Natural logarithm; the argument must be positive."""
    v = _val(a)
    if v <= 0.0:
        raise DomainError(f"ln of non-positive value {v!r}")
    if not isinstance(a, Jet2):
        return math.log(v)
    inv = 1.0 / v
    return _chain(a, math.log(v), inv, -inv * inv)


ln = log


def abs_sqrt(a: Scalar) -> Scalar:
    """|a|^(1/2), differentiable wherever a != 0."""
    v = _val(a)
    if v == 0.0:
        raise DomainError("abs_sqrt at zero")
    r = math.sqrt(abs(v))
    if not isinstance(a, Jet2):
        return r
    sgn = 1.0 if v > 0 else -1.0
    # d|a|^(1/2)/da = sgn/(2r); second derivative = -1/(4 r^3)
    return _chain(a, r, sgn / (2.0 * r), -1.0 / (4.0 * r * r * r))


def sqrt(a: Scalar) -> Scalar:
    v = _val(a)
    if v < 0.0:
        raise DomainError(f"sqrt of negative value {v!r}")
    if v == 0.0 and not isinstance(a, Jet2):
        return 0.0
    return abs_sqrt(a)


def power(a: Scalar, p: float) -> Scalar:
    """a**p for a constant real exponent."""
    v = _val(a)
    integral = float(p).is_integer()
    if v < 0.0 and not integral:
        raise DomainError(f"non-integer power {p} of negative value {v!r}")
    if v == 0.0 and p < 2 and not (integral and p >= 0):
        raise DomainError(f"power {p} not differentiable at zero")
    if not isinstance(a, Jet2):
        return v ** p
    if p == 0:
        return Jet2(1.0)
    if integral and p == 2:
        return a * a
    f0 = v ** p
    f1 = p * v ** (p - 1)
    f2 = p * (p - 1) * v ** (p - 2) if p != 1 else 0.0
    return _chain(a, f0, f1, f2)


def as_jet(a: Scalar) -> Jet2:
    return a if isinstance(a, Jet2) else Jet2(float(a))
