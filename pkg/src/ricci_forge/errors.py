"""Exception hierarchy shared by all modules.

The CLI maps :class:`UsageError` to exit status 2; every other
:class:`RicciForgeError` raised while verifying is a usage-level failure too,
whereas failed checks are reported through return values, not exceptions.
"""

from __future__ import annotations

from typing import Sequence


class RicciForgeError(Exception):
    """Base class for toolkit errors."""


class UsageError(RicciForgeError, ValueError):
    """Bad model name, malformed grid spec, precondition violated by the caller."""


class DomainError(RicciForgeError, ArithmeticError):
    """A function was evaluated outside its domain.

    ``point`` is the coordinate event (t, x, y, z) when known and ``assumption``
    names the violated hypothesis, e.g. ``"(H)"`` or ``"(12)"``.
    """

    def __init__(self, message: str, point: Sequence[float] | None = None,
                 assumption: str | None = None):
        self.point = None if point is None else tuple(float(c) for c in point)
        self.assumption = assumption
        super().__init__(message)

    def __str__(self) -> str:
        msg = super().__str__()
        if self.assumption:
            msg = f"{msg} [assumption {self.assumption}]"
        if self.point is not None:
            msg = f"{msg} at {self.point}"
        return msg


class DegenerateEventError(DomainError):
    """Metric determinant too close to zero to invert."""

    def __init__(self, det: float, point: Sequence[float] | None = None):
        self.det = float(det)
        super().__init__(f"degenerate metric, det = {det:.3e}", point)


class DegenerateLightConeError(DomainError):
    """g_00 vanishes, so the sloped null branch is undefined."""
