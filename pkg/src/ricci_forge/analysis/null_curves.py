"""Null curves in the (t, x) plane at fixed (y, z).

On that plane the induced line element is g_00 dt^2 + 2 g_01 dt dx (g_11 = 0),
so the null directions are dt = 0 and dt/dx = -2 g_01 / g_00.  The sloped
branch is integrated with classical RK4, either in x or in rho = 2 ln|x|.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

from ..errors import DegenerateLightConeError, DomainError, UsageError
from ..models import Margins, MetricModel

SLOPE_CAP = 1e6


def null_slopes(model: MetricModel, event: Sequence[float]) -> tuple[float, float]:
    """(0, dt/dx): the dt = 0 branch and the sloped branch at ``event``."""
    g = model.values(event)
    g00, g01 = g[0, 0], g[0, 1]
    if g00 == 0.0:
        raise DegenerateLightConeError("g_00 = 0: sloped null branch undefined", event)
    return 0.0, -2.0 * g01 / g00


def null_residual(model: MetricModel, event: Sequence[float], slope: float) -> float:
    """g_00 s^2 + 2 g_01 s for dt/dx = s."""
    g = model.values(event)
    return g[0, 0] * slope * slope + 2.0 * g[0, 1] * slope


@dataclass
class NullCurve:
    model: str
    plane: dict
    coordinate: str                  # "x" or "rho"
    start: dict
    integrator: dict
    branch: str = "sloped"
    samples: list[dict] = field(default_factory=list)   # param, x, t, slope, residual
    halted: bool = False
    halt_reason: str | None = None

    @property
    def final(self) -> dict:
        return self.samples[-1]

    def max_relative_residual(self) -> float:
        return max(s["relative_residual"] for s in self.samples)

    def to_dict(self) -> dict:
        return asdict(self)


def _crosses(a: float, b: float) -> bool:
    return (a > 0) != (b > 0) or b == 0.0


_TIGHT = Margins(1e-12, 1e-12, 1e-12)


def _plane_hypersurfaces(model: MetricModel) -> tuple[bool, bool, bool]:
    """Which of sin t = 0, cos t = 0, x = 0 the model marks as singular."""
    return (model.is_singular((0.0, 5.0, 1.0, 0.5), _TIGHT),
            model.is_singular((math.pi / 2, 5.0, 1.0, 0.5), _TIGHT),
            model.is_singular((math.pi / 4, 0.0, 1.0, 0.5), _TIGHT))


def integrate_null_curve(model: MetricModel, start_t: float, start_param: float, end_param: float,
                         step: float = 1e-3, coordinate: str = "x", y: float = 0.0, z: float = 0.0,
                         x_sign: float = 1.0, cap: float = SLOPE_CAP) -> NullCurve:
    """RK4 along the sloped null branch from ``start_param`` to ``end_param``.

    With ``coordinate="rho"`` the parameter is rho = 2 ln|x| and
    x = x_sign e^{rho/2}, so dt/drho = (dt/dx) x / 2.  Integration halts
    before a step that would push |slope| past ``cap``, leave the model's
    domain, or cross whichever of sin t = 0, cos t = 0, x = 0 the model
    treats as singular.
    """
    if coordinate not in ("x", "rho"):
        raise UsageError(f"coordinate must be x or rho, got {coordinate!r}")
    if not step > 0:
        raise UsageError("step must be positive")
    if x_sign not in (1.0, -1.0):
        raise UsageError("x_sign must be +1 or -1")

    def to_x(param: float) -> float:
        return param if coordinate == "x" else x_sign * math.exp(0.5 * param)

    x0 = to_x(start_param)
    if model.is_singular((start_t, x0, y, z)):
        raise UsageError(f"start (t={start_t}, x={x0}) lies on or within the margin of a "
                         f"singular hypersurface of {model.name}")

    def rhs(param: float, t: float) -> float:
        x = to_x(param)
        _, s = null_slopes(model, (t, x, y, z))
        if not math.isfinite(s) or abs(s) > cap:
            raise _Halt(f"|dt/dx| exceeds cap {cap:g}")
        return s if coordinate == "x" else 0.5 * s * x

    curve = NullCurve(
        model=model.name, plane={"y": y, "z": z}, coordinate=coordinate,
        start={"t": start_t, coordinate: start_param, "x": x0},
        integrator={"method": "RK4", "step": step, "slope_cap": cap},
    )

    def record(param: float, t: float) -> None:
        x = to_x(param)
        _, s = null_slopes(model, (t, x, y, z))
        res = null_residual(model, (t, x, y, z), s)
        g00 = abs(model.values((t, x, y, z))[0, 0])
        curve.samples.append({"param": param, "x": x, "t": t, "slope": s, "residual": res,
                              "relative_residual": abs(res) / g00})

    on_sin, on_cos, on_x = _plane_hypersurfaces(model)
    direction = 1.0 if end_param >= start_param else -1.0
    total = abs(end_param - start_param)
    n_full = int(math.floor(total / step + 1e-9))
    param, t = start_param, start_t
    record(param, t)
    # parameter values come from the step index so no rounding accumulates
    nodes = [start_param + direction * step * i for i in range(1, n_full + 1)]
    if total - n_full * step > 1e-12 * max(1.0, total):
        nodes.append(end_param)
    elif nodes:
        nodes[-1] = end_param
    for p_new in nodes:
        h = p_new - param
        try:
            k1 = rhs(param, t)
            k2 = rhs(param + 0.5 * h, t + 0.5 * h * k1)
            k3 = rhs(param + 0.5 * h, t + 0.5 * h * k2)
            k4 = rhs(param + h, t + h * k3)
        except _Halt as exc:
            curve.halted, curve.halt_reason = True, str(exc)
            break
        except DomainError as exc:
            curve.halted, curve.halt_reason = True, f"left the domain: {exc}"
            break
        t_new = t + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not math.isfinite(t_new):
            curve.halted, curve.halt_reason = True, "non-finite t"
            break
        if ((on_sin and _crosses(math.sin(t), math.sin(t_new)))
                or (on_cos and _crosses(math.cos(t), math.cos(t_new)))
                or (on_x and _crosses(to_x(param), to_x(p_new)))):
            curve.halted, curve.halt_reason = True, "step would cross a singular hypersurface"
            break
        param, t = p_new, t_new
        record(param, t)
    return curve


class _Halt(Exception):
    pass
