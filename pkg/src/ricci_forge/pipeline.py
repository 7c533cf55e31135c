"""Constructive steps of the solution family, executed numerically.

``compute_V`` and ``kappa`` realize the indefinite y-integrals as definite
integrals from ``QuadratureSpec.y0``; y-derivatives come from the integrand
itself, never from differentiating the quadrature.  The ``residual_*``
functions evaluate the left-hand sides of the reduced field equations and
return a :class:`Residual` with a magnitude scale (largest individual term),
so callers can test ``abs(value) < tol * scale``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import jets
from .errors import DomainError, UsageError
from .generators import ClosedFormV, GeneratorSet, QuadratureV
from .jets import Jet2, Scalar, value_of
from .quadrature import QuadratureSpec, adaptive_simpson

T, X, Y, Z = range(4)
EQUATIONS = ("ode7", "eq27", "eq28", "eq29", "eq30")
FD_STEP_T = 1e-5


# -- quadrature-backed pieces ----------------------------------------------

@functools.lru_cache(maxsize=8192)
def _integral_inv_sqrt_abs(N: Callable, y0: float, y: float, abs_tol: float) -> float:
    n0 = value_of(N(y0))
    if n0 == 0.0:
        raise DomainError("N vanishes at the quadrature base point", (math.nan, math.nan, y0, math.nan))
    sign0 = math.copysign(1.0, n0)

    def integrand(s: float) -> float:
        n = value_of(N(s))
        if n == 0.0 or math.copysign(1.0, n) != sign0:
            raise DomainError(f"N vanishes between y0={y0} and y={y}", (math.nan, math.nan, s, math.nan))
        return 1.0 / math.sqrt(abs(n))

    return adaptive_simpson(integrand, y0, y, abs_tol)


def _integral_jet(N: Callable, N_y: Callable, quad: QuadratureSpec, y: Scalar) -> Scalar:
    """int_{y0}^{y} |N|^(-1/2) as a jet in y (fundamental theorem for derivatives)."""
    yv = value_of(y)
    total = _integral_inv_sqrt_abs(N, float(quad.y0), yv, float(quad.abs_tol))
    if not isinstance(y, Jet2):
        return total
    n, n_y = value_of(N(yv)), value_of(N_y(yv))
    inv_s = 1.0 / math.sqrt(abs(n))
    d_inv_s = -inv_s * n_y / (2.0 * n)
    return jets._chain(y, total, inv_s, d_inv_s)


def V_and_Vy(gen: GeneratorSet, t: Scalar, y: Scalar,
             quad: QuadratureSpec | None = None) -> tuple[Scalar, Scalar]:
    """V and V_y per the generator set's V mode (``quad`` forces quadrature)."""
    if quad is None and isinstance(gen.V_mode, ClosedFormV):
        return gen.V_mode.V(t, y), gen.V_mode.V_y(t, y)
    if quad is None:
        quad = gen.V_mode.quad if isinstance(gen.V_mode, QuadratureV) else QuadratureSpec()
    N = gen.N(y)
    if value_of(N) == 0.0:
        raise DomainError("N(y) = 0", assumption="(9)")
    s = jets.abs_sqrt(N)
    I = _integral_jet(gen.N, gen.N_y, quad, y)
    w, q = gen.w(t), gen.q(t)
    E = jets.exp(q * I)
    sgn = 1.0 if value_of(N) > 0 else -1.0
    V = w * s * E
    # d|N|^(1/2)/dy = sgn(N) N_y / (2|N|^(1/2)); d(qI)/dy = q / |N|^(1/2)
    V_y = w * E * (sgn * gen.N_y(y) / (2.0 * s) + q)
    return V, V_y


def compute_V(gen: GeneratorSet, quad: QuadratureSpec, t: float, y: float) -> Jet2:
    """V(t, y) by quadrature, as a jet in t and y (x, z components zero)."""
    point = (t, 0.0, y, 0.0)
    tj, yj = jets.seed(point, T), jets.seed(point, Y)
    try:
        V, _ = V_and_Vy(gen, tj, yj, quad)
    except DomainError as exc:
        raise DomainError(str(exc.args[0]), point, exc.assumption) from exc
    return jets.as_jet(V)


def kappa(N: Callable, c1: float, c2: float, quad: QuadratureSpec, y: float,
          N_y: Callable | None = None) -> Scalar:
    """c1 |N|^(1/2) exp(c2 int |N|^(-1/2) dy); a jet in y when ``N_y`` is given."""
    if N_y is not None:
        yj = jets.seed((0.0, 0.0, y, 0.0), Y)
        I = _integral_jet(N, N_y, quad, yj)
        return c1 * jets.abs_sqrt(N(yj)) * jets.exp(c2 * I)
    n = value_of(N(y))
    if n == 0.0:
        raise DomainError("N(y) = 0", (math.nan, math.nan, y, math.nan), "(9)")
    total = _integral_inv_sqrt_abs(N, float(quad.y0), float(y), float(quad.abs_tol))
    return c1 * math.sqrt(abs(n)) * math.exp(c2 * total)


# -- residuals ---------------------------------------------------------------

@dataclass
class Residual:
    equation: str
    value: float
    scale: float
    point: tuple[float, ...]

    @property
    def relative(self) -> float:
        return abs(self.value) / self.scale if self.scale > 0 else abs(self.value)


@dataclass
class ResidualReport:
    """Worst-case summary of one equation over many sample events."""

    equation: str
    max_abs_residual: float = 0.0
    scale: float = 0.0
    max_relative: float = 0.0
    count: int = 0
    events: list[dict] = field(default_factory=list)

    def add(self, r: Residual, keep: int = 5) -> None:
        self.count += 1
        self.max_abs_residual = max(self.max_abs_residual, abs(r.value))
        self.scale = max(self.scale, r.scale)
        self.max_relative = max(self.max_relative, r.relative)
        self.events.append({"point": list(r.point), "residual": r.value,
                            "scale": r.scale, "relative": r.relative})
        self.events.sort(key=lambda e: -e["relative"])
        del self.events[keep:]

    def to_dict(self) -> dict:
        return {"equation": self.equation, "max_abs_residual": self.max_abs_residual,
                "scale": self.scale, "max_relative": self.max_relative,
                "count": self.count, "events": self.events}


def _finish(equation: str, terms: Sequence[float], point, refs: Sequence[float] = ()) -> Residual:
    """Sum the terms; the scale is the largest term or reference magnitude."""
    terms = [float(v) for v in terms]
    scale = max([abs(v) for v in terms] + [abs(float(r)) for r in refs])
    return Residual(equation, math.fsum(terms), scale, tuple(float(c) for c in point))


def residual_ode7(gen: GeneratorSet, point: Sequence[float],
                  v_transform: Callable[[Scalar], Scalar] | None = None,
                  V_transform: Callable[[Scalar], Scalar] | None = None) -> Residual:
    """First-order ODE for v with v = V K_x, f = -K^2, h = N K^2.

    ``v_transform`` / ``V_transform`` replace v or V by corrupted versions
    for negative controls.
    """
    tj, xj, yj, zj = jets.seed_all(point)
    K = gen.K(tj, xj)
    K_x = gen.K_x(tj, xj)
    N = gen.N(yj)
    V, _ = V_and_Vy(gen, tj, yj)
    if V_transform is not None:
        V = V_transform(V)
    if value_of(N) == 0.0:
        raise DomainError("N = 0", point, "(9)")
    if value_of(K) == 0.0 or value_of(K_x) == 0.0 or value_of(V) == 0.0:
        raise DomainError("V, K or K_x vanishes", point, "(12)")
    v = V * K_x
    if v_transform is not None:
        v = v_transform(v)
    f = -(K * K)
    h = N * K * K
    fh_x = (f * h).grad[X]
    if fh_x == 0.0:
        raise DomainError("(fh)_x = 0", point, "(9)")
    v, f, h = jets.as_jet(v), jets.as_jet(f), jets.as_jet(h)
    if v.value == 0.0:
        raise DomainError("v = 0", point, "(12)")
    fx, fxx = f.grad[X] / f.value, f.hess[X, X] / f.value
    hx, hxx = h.grad[X] / h.value, h.hess[X, X] / h.value
    vx = v.grad[X] / v.value
    terms = [vx * fx, vx * hx, 0.5 * fx * fx, 0.5 * hx * hx, -fxx, -hxx]
    return _finish("ode7", terms, point)


def _log_V_jet(gen: GeneratorSet, quad: QuadratureSpec | None, t: float, y: float,
               v_transform) -> tuple[Jet2, Jet2]:
    point = (t, 0.0, y, 0.0)
    tj, yj = jets.seed(point, T), jets.seed(point, Y)
    V, _ = V_and_Vy(gen, tj, yj, quad)
    if v_transform is not None:
        V = v_transform(V)
    V = jets.as_jet(V)
    N = jets.as_jet(gen.N(yj))
    if V.value == 0.0:
        raise DomainError("V = 0", point, "(12)")
    if N.value == 0.0:
        raise DomainError("N = 0", point, "(9)")
    return V, N


def residual_reduced(gen: GeneratorSet, quad: QuadratureSpec | None, equation: str,
                     t: float, y: float,
                     v_transform: Callable[[Scalar], Scalar] | None = None) -> Residual:
    """Left side of one of the reduced equations eq27..eq30 at (t, y).

    V comes from ``compute_V`` (quadrature, per ``quad``); pass ``quad=None``
    to use the generator set's own V mode.  Third derivatives needed by eq28
    and eq30 come from one central difference in t over second-order jets.
    """
    if equation not in EQUATIONS[1:]:
        raise UsageError(f"unknown reduced equation {equation!r}")
    if quad is None and isinstance(gen.V_mode, QuadratureV):
        quad = gen.V_mode.quad
    V, N = _log_V_jet(gen, quad, t, y, v_transform)
    point = (t, 0.0, y, 0.0)
    n_y, n_yy = N.grad[Y] / N.value, N.hess[Y, Y] / N.value   # N_y/N, N_yy/N
    v_y, v_yy = V.grad[Y] / V.value, V.hess[Y, Y] / V.value

    if equation == "eq27":
        terms = [-n_yy, 0.5 * n_y * n_y, 2.0 * v_yy, n_y * v_y, -2.0 * v_y * v_y]
        return _finish(equation, terms, point)
    if equation == "eq29":
        # (V_y/V)_y = V_yy/V - (V_y/V)^2 ; (N_y/N)_y = N_yy/N - (N_y/N)^2
        dlv = v_yy - v_y * v_y
        dln = n_yy - n_y * n_y
        terms = [2.0 * dlv, v_y * n_y, -dln, -0.5 * n_y * n_y]
        return _finish(equation, terms, point)

    h = FD_STEP_T
    Vp, _ = _log_V_jet(gen, quad, t + h, y, v_transform)
    Vm, _ = _log_V_jet(gen, quad, t - h, y, v_transform)
    if equation == "eq28":
        Vv = V.value
        V_y, V_t = V.grad[Y], V.grad[T]
        V_yy, V_yt = V.hess[Y, Y], V.hess[Y, T]
        V_yyt = (Vp.hess[Y, Y] - Vm.hess[Y, Y]) / (2.0 * h)
        Nn = N.grad[Y] / N.value
        terms = [4 * V_y * V_y * V_t, 2 * Vv * Vv * V_yyt, -2 * Vv * V_yy * V_t,
                 -4 * Vv * V_y * V_yt, -Vv * V_y * V_t * Nn, Vv * Vv * V_yt * Nn]
        return _finish(equation, terms, point)

    # eq30: L = V_y/V; L_t from the jet, L_yt by differencing L_y in t
    def L_y(J: Jet2) -> float:
        return J.hess[Y, Y] / J.value - (J.grad[Y] / J.value) ** 2

    L_t = V.hess[Y, T] / V.value - V.grad[Y] * V.grad[T] / V.value ** 2
    L_yt = (L_y(Vp) - L_y(Vm)) / (2.0 * h)
    terms = [2.0 * L_yt, L_t * n_y]
    # when q is constant both terms vanish identically; |L_y| sets the size
    # of the differencing noise, so it joins the scale
    return _finish(equation, terms, point, refs=[L_y(V)])


def random_ty(rng: np.random.Generator, n: int, t_range=(0.0, math.pi),
              y_range=(-3.0, 3.0), floor: float = 0.05) -> list[tuple[float, float]]:
    """Sample (t, y) pairs away from sin t = 0 and cos t = 0."""
    out = []
    while len(out) < n:
        t = float(rng.uniform(*t_range))
        if abs(math.sin(t)) <= floor or abs(math.cos(t)) <= floor:
            continue
        out.append((t, float(rng.uniform(*y_range))))
    return out
