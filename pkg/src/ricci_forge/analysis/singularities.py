"""Numerical limit probes classifying singular loci of a chart.

A probe is a finite sequence of events marching toward a locus.  The
verdict compares the first and last probe events:

* ``essential``: the largest resolved Riemann component grows by more than
  ``GROWTH`` along the probe (resolved: above the cancellation noise gate and
  above ``CURVATURE_FLOOR`` times the scale at the first probe event);
* ``degenerate_point``: every metric component shrinks by more than
  ``GROWTH`` (the space-time collapses to a point);
* ``event_horizon_candidate``: the locus is a finite hypersurface and det(g)
  shrinks by more than ``GROWTH`` while curvature stays bounded;
* ``regular`` otherwise.

Rules are tried in that order.  The horizon label is a heuristic, hence
"candidate"; the formal causal definition is not checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..curvature import NOISE_GATE, compute_bundle, class_label, INDEX_CLASSES
from ..errors import DegenerateEventError, DomainError, UsageError
from ..models import MetricModel, determinant

GROWTH = 1e6
# components below this fraction of the first probe event's scale count as zero
CURVATURE_FLOOR = 1e-8
KINDS = ("event_horizon_candidate", "degenerate_point", "essential", "regular")

CHART_CAVEAT = ("component blowup is chart dependent; the Kretschmann scalar along "
                "the probe is reported for comparison")


@dataclass(frozen=True)
class Locus:
    name: str
    description: str
    finite: bool
    probe: Callable[[], list[tuple[float, float, float, float]]]
    expected: str | None = None       # verdict stated for this locus, if any
    note: str = ""


@dataclass
class SingularityVerdict:
    locus: str
    kind: str
    evidence: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"locus": self.locus, "kind": self.kind, "evidence": self.evidence}


def _finite_approach(base, axis: int, target: float, start: float, n: int = 20):
    """Geometric approach target - (target - start) 2^-k, k = 1..n."""
    out = []
    for k in range(1, n + 1):
        p = list(base)
        p[axis] = target - (target - start) * 2.0 ** -k
        out.append(tuple(p))
    return out


def _geometric(base, axis: int, start: float, ratio: float, n: int = 20):
    out = []
    for k in range(n + 1):
        p = list(base)
        p[axis] = start * ratio ** k
        out.append(tuple(p))
    return out


def _arithmetic(base, axis: int, start: float, step: float, n: int = 20):
    out = []
    for k in range(n + 1):
        p = list(base)
        p[axis] = start + step * k
        out.append(tuple(p))
    return out


_Q = math.pi / 4
_HALF = math.pi / 2


def _t_loci(base, expected_half, expected_pi):
    return [
        Locus("t->pi/2", "t -> pi/2 from below (t = k pi + pi/2)", True,
              lambda: _finite_approach(base, 0, _HALF, _Q), expected_half),
        Locus("t->pi", "t -> pi from below (t = k pi)", True,
              lambda: _finite_approach(base, 0, math.pi, 3 * _Q), expected_pi),
    ]


def _catalog_example1():
    base = (_Q, 0.0, 0.0, 0.0)
    return _t_loci(base, "event_horizon_candidate", "event_horizon_candidate") + [
        Locus("x->-inf", "x -> -infinity", False,
              lambda: _arithmetic(base, 1, 0.0, -1.0), "degenerate_point"),
        Locus("x->+inf", "x -> +infinity", False,
              lambda: _arithmetic(base, 1, 0.0, 1.0), None,
              "described as a horizon; det grows here, so the det-based heuristic "
              "cannot label it"),
    ]


def _catalog_example2():
    base = (_Q, 0.0, 0.0, 0.0)
    return _t_loci(base, "event_horizon_candidate", "event_horizon_candidate") + [
        Locus("delta->-inf", "Delta = 6x + 2(2y - cos y) sin t -> -infinity along x -> -infinity",
              False, lambda: _arithmetic(base, 1, 0.0, -1.0), "degenerate_point"),
        Locus("x->-inf", "x -> -infinity", False,
              lambda: _arithmetic(base, 1, 0.0, -1.0), "degenerate_point"),
        Locus("x->+inf", "x -> +infinity", False,
              lambda: _arithmetic(base, 1, 0.0, 1.0), None,
              "described as a horizon; det grows here"),
        Locus("y->+inf", "y -> +infinity with sin t > 0", False,
              lambda: _arithmetic(base, 2, 0.0, 1.0), "essential",
              "the same space-time is also described as regular; the verdict "
              "reflects component blowup only"),
        Locus("y->-inf", "y -> -infinity with sin t > 0", False,
              lambda: _arithmetic(base, 2, 0.0, -1.0), None,
              "described as degenerating to a point, but g_22 = -e^{2x} sin^2 t "
              "does not depend on y, so not every component vanishes"),
    ]


def _catalog_example3():
    base = (_Q, 1.0, 0.0, 0.0)
    return _t_loci(base, "event_horizon_candidate", "event_horizon_candidate") + [
        # stops at x = 2^-12: beyond that R_0202 ~ x^-2 drowns in term sums ~ x^-5
        Locus("x->0", "x -> 0+ (quasi-black-hole set)", True,
              lambda: _geometric(base, 1, 1.0, 0.5, 12), "essential"),
        Locus("x->+inf", "x -> +infinity", False,
              lambda: _geometric(base, 1, 1.0, 2.0), "degenerate_point"),
        Locus("x->-inf", "x -> -infinity", False,
              lambda: _geometric(base, 1, -1.0, 2.0), "degenerate_point"),
        Locus("y->+inf", "y -> +infinity with sin t > 0", False,
              lambda: _arithmetic(base, 2, 0.0, 1.0), "essential"),
        Locus("y->-inf", "y -> -infinity with sin t > 0", False,
              lambda: _arithmetic(base, 2, 0.0, -1.0), "regular"),
    ]


_CATALOGS = {"example1": _catalog_example1, "example2": _catalog_example2,
             "example3": _catalog_example3}


def catalog(model: MetricModel | str) -> list[Locus]:
    """Known loci of a model (example variants share their base catalog)."""
    name = model if isinstance(model, str) else model.name
    base = name.split("_")[0].split("[")[0]
    if base not in _CATALOGS:
        raise UsageError(f"no singular-locus catalog for model {name!r}")
    return _CATALOGS[base]()


def find_locus(model: MetricModel | str, name: str) -> Locus:
    for loc in catalog(model):
        if loc.name == name:
            return loc
    names = ", ".join(loc.name for loc in catalog(model))
    raise UsageError(f"unknown locus {name!r}; choose from {names}")


def _resolved_max(bundle, floor: float = 0.0) -> tuple[float, str | None]:
    R, T = bundle.riemann_lowered, bundle.term_magnitude
    best, label = 0.0, None
    for idx in INDEX_CLASSES:
        v = abs(R[idx])
        if v > NOISE_GATE * T[idx] and v > floor and v > best:
            best, label = v, class_label(idx)
    return best, label


def _ratio(last: float, first: float) -> float:
    if first == 0.0:
        return math.inf if last > 0.0 else 1.0
    return last / first


def classify_singularity(model: MetricModel, locus: Locus | str,
                         probe: Sequence[Sequence[float]] | None = None) -> SingularityVerdict:
    """Classify ``locus`` from the metric and curvature along ``probe``.

    ``probe`` defaults to the locus' own approach sequence.  Events where the
    metric is too degenerate to invert still contribute det and component
    sizes; curvature is taken from the invertible ones.
    """
    if isinstance(locus, str):
        locus = find_locus(model, locus)
    events = list(probe if probe is not None else locus.probe())
    if len(events) < 2:
        raise UsageError("a probe needs at least two events")

    dets, gmax, riem, labels, kret, used = [], [], [], [], [], []
    floor = None
    for p in events:
        try:
            mj = model.jets(p)
        except DomainError as exc:
            raise UsageError(f"probe left the domain of {model.name}: {exc}") from exc
        if not np.all(np.isfinite(mj.g)) or not np.all(np.isfinite(mj.ddg)):
            raise UsageError(f"probe left the domain of {model.name}: non-finite metric at {tuple(p)}")
        dets.append(determinant(mj))
        gmax.append(float(np.max(np.abs(mj.g))))
        try:
            b = compute_bundle(mj)
        except DegenerateEventError:
            continue
        if floor is None:
            floor = CURVATURE_FLOOR * b.scale
        r, lab = _resolved_max(b, floor)
        riem.append(r)
        labels.append(lab)
        kret.append(b.kretschmann)
        used.append(tuple(float(c) for c in p))

    det_ratio = _ratio(abs(dets[-1]), abs(dets[0]))
    g_ratio = _ratio(gmax[-1], gmax[0])
    if riem:
        nz = [i for i, r in enumerate(riem) if r > 0.0]
        r_first = riem[nz[0]] if nz else 0.0
        r_last = riem[-1]
        r_ratio = _ratio(r_last, r_first) if nz else 1.0
    else:
        r_first = r_last = 0.0
        r_ratio = 1.0

    if r_ratio > GROWTH:
        kind = "essential"
    elif g_ratio < 1.0 / GROWTH:
        kind = "degenerate_point"
    elif locus.finite and det_ratio < 1.0 / GROWTH:
        kind = "event_horizon_candidate"
    else:
        kind = "regular"

    evidence = {
        "probe_first": list(events[0]),
        "probe_last": list(events[-1]),
        "probe_events": len(events),
        "curvature_events": len(used),
        "det_limit": {"first": dets[0], "last": dets[-1], "ratio": det_ratio},
        "metric_limit": {"first": gmax[0], "last": gmax[-1], "ratio": g_ratio},
        "riemann_component_limit": {
            "first": r_first, "last": r_last, "ratio": r_ratio,
            "component": labels[-1] if labels else None,
        },
        "kretschmann_limit": {"first": kret[0] if kret else None,
                              "last": kret[-1] if kret else None},
        "growth_threshold": GROWTH,
    }
    if kind == "essential":
        evidence["caveat"] = CHART_CAVEAT
    if locus.note:
        evidence["note"] = locus.note
    if locus.expected is not None:
        evidence["expected"] = locus.expected
    return SingularityVerdict(locus.name, kind, evidence)
