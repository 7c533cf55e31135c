"""Induced geometry of constant-t slices."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..models import MetricModel

ZERO_TOL = 1e-12


@dataclass
class SliceMetric:
    """g_22 and g_33 sampled over an (x, y) grid at fixed t (and z)."""

    model: str
    t: float
    z: float
    xs: list[float]
    ys: list[float]
    g22: list[list[float]]           # [i_x][i_y]
    g33: list[list[float]]
    flags: list[str] = field(default_factory=list)

    @property
    def degenerate(self) -> bool:
        return "degenerate: slice is a point" in self.flags

    def to_dict(self) -> dict:
        return {"model": self.model, "t": self.t, "z": self.z, "xs": self.xs, "ys": self.ys,
                "g22": self.g22, "g33": self.g33, "flags": self.flags,
                "degenerate": self.degenerate}


def slice_metric(model: MetricModel, t: float, xs: Sequence[float], ys: Sequence[float],
                 z: float = 0.0, zero_tol: float = ZERO_TOL) -> SliceMetric:
    """Sample the induced (y, z) components at time ``t``.

    Flags ``"degenerate: slice is a point"`` when every sampled component is
    below ``zero_tol`` in magnitude (e.g. t = k pi for the examples), and
    ``"negative definite"`` when g_22 < 0 and g_33 < 0 everywhere.
    """
    g22 = np.empty((len(xs), len(ys)))
    g33 = np.empty_like(g22)
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            g = model.values((t, x, y, z))
            g22[i, j], g33[i, j] = g[2, 2], g[3, 3]
    flags = []
    if np.all(np.abs(g22) < zero_tol) and np.all(np.abs(g33) < zero_tol):
        flags.append("degenerate: slice is a point")
    elif np.all(g22 < 0) and np.all(g33 < 0):
        flags.append("negative definite")
    return SliceMetric(model.name, float(t), float(z), [float(v) for v in xs],
                       [float(v) for v in ys], g22.tolist(), g33.tolist(), flags)
