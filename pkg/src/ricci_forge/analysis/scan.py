"""Grid scans: curvature, determinant and signature checks over a box of events."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from ..curvature import compute_bundle, max_off_pattern, riemann_nonzero_pattern
from ..errors import DomainError, UsageError
from ..jets import AXES
from ..models import Margins, MetricModel, builtin, determinant, leading_minors


@dataclass(frozen=True)
class AxisSpec:
    axis: str
    lo: float
    hi: float
    count: int

    def values(self) -> list[float]:
        if self.count == 1:
            return [self.lo]
        return [float(v) for v in np.linspace(self.lo, self.hi, self.count)]

    def __str__(self) -> str:
        return f"{self.axis}={self.lo:g}:{self.hi:g}:{self.count}"


@dataclass(frozen=True)
class Grid:
    axes: tuple[AxisSpec, AxisSpec, AxisSpec, AxisSpec]

    def events(self) -> list[tuple[float, float, float, float]]:
        return list(itertools.product(*(a.values() for a in self.axes)))

    def to_dict(self) -> dict:
        return {a.axis: {"min": a.lo, "max": a.hi, "count": a.count} for a in self.axes}

    def __str__(self) -> str:
        return ",".join(str(a) for a in self.axes)


def parse_axis(item: str) -> AxisSpec:
    try:
        name, rng = item.split("=", 1)
        lo, hi, count = rng.split(":")
        spec = AxisSpec(name.strip(), float(lo), float(hi), int(count))
    except ValueError:
        raise UsageError(f"bad grid axis {item!r}; expected axis=min:max:count") from None
    if spec.axis not in AXES:
        raise UsageError(f"unknown grid axis {spec.axis!r}; use t, x, y or z")
    if spec.count < 1:
        raise UsageError(f"grid count must be >= 1 in {item!r}")
    if not (math.isfinite(spec.lo) and math.isfinite(spec.hi)):
        raise UsageError(f"grid bounds must be finite in {item!r}")
    return spec


def parse_grid(text: str, default: str | None = None) -> Grid:
    """Parse ``t=a:b:n,x=...``; axes missing from ``text`` come from ``default``."""
    specs: dict[str, AxisSpec] = {}
    for source in (default, text):
        if not source:
            continue
        seen = set()
        for item in source.split(","):
            if not item.strip():
                continue
            spec = parse_axis(item.strip())
            if spec.axis in seen:
                raise UsageError(f"axis {spec.axis} given twice in grid {source!r}")
            seen.add(spec.axis)
            specs[spec.axis] = spec
    missing = [a for a in AXES if a not in specs]
    if missing:
        raise UsageError(f"grid is missing axes {missing}")
    return Grid(tuple(specs[a] for a in AXES))  # type: ignore[arg-type]


@dataclass(frozen=True)
class Tolerances:
    ricci_tol: float = 1e-8
    riemann_tol: float = 1e-8
    det_tol: float = 1e-10
    kretschmann_tol: float = 1e-8
    kretschmann_closed_tol: float = 1e-6

    def __post_init__(self):
        for k, v in asdict(self).items():
            if not v > 0:
                raise UsageError(f"tolerance {k} must be positive, got {v}")


@dataclass
class EventRecord:
    coords: tuple[float, float, float, float]
    det: float
    det_closed_form: float | None
    det_rel_err: float | None
    minors: tuple[float, float, float, float]
    minors_alternate: bool
    scale: float
    ricci_rel: float
    riemann_rel: float
    off_pattern_rel: float
    riemann_pattern: list[str]
    kretschmann: float
    kretschmann_rel: float
    kretschmann_closed_rel_err: float | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["coords"] = list(self.coords)
        d["minors"] = list(self.minors)
        return d


@dataclass
class ScanReport:
    model: str
    grid: Grid
    records: list[EventRecord]
    checks: dict[str, dict] = field(default_factory=dict)
    summary: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks.values())

    def to_dict(self, include_events: bool = True) -> dict:
        out = {"model": self.model, "grid": self.grid.to_dict(), "grid_spec": str(self.grid),
               "checks": self.checks, "summary": self.summary}
        if include_events:
            out["events"] = [r.to_dict() for r in self.records]
        return out


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b) if b != 0 else abs(a - b)


def evaluate_event(model: MetricModel, point: Sequence[float], tol: Tolerances) -> EventRecord:
    mj = model.jets(point)
    det = determinant(mj)
    det_cf = model.closed_form("det", point)
    bundle = compute_bundle(mj)
    minors = leading_minors(mj.g)
    d1, d2, d3, d4 = minors
    scale = bundle.scale
    pattern = sorted(riemann_nonzero_pattern(bundle, tol.riemann_tol))
    k_cf = model.closed_form("kretschmann", point)
    return EventRecord(
        coords=tuple(float(c) for c in point),
        det=det,
        det_closed_form=det_cf,
        det_rel_err=None if det_cf is None else _rel(det, det_cf),
        minors=minors,
        minors_alternate=bool(d1 > 0 and d2 < 0 and d3 > 0 and d4 < 0),
        scale=scale,
        ricci_rel=bundle.max_ricci / scale,
        riemann_rel=bundle.max_riemann / scale,
        off_pattern_rel=max_off_pattern(bundle) / scale,
        riemann_pattern=pattern,
        kretschmann=bundle.kretschmann,
        kretschmann_rel=abs(bundle.kretschmann) / scale ** 2,
        kretschmann_closed_rel_err=None if k_cf is None else _rel(bundle.kretschmann, k_cf),
    )


def _check(value: float, tol: float, ok: bool | None = None) -> dict:
    return {"value": value, "tol": tol, "pass": bool(value < tol) if ok is None else bool(ok)}


def summarize(model: MetricModel, records: list[EventRecord], tol: Tolerances) -> tuple[dict, dict]:
    worst = lambda key: max(getattr(r, key) for r in records)  # noqa: E731
    summary = {
        "events": len(records),
        "max_ricci_rel": worst("ricci_rel"),
        "max_riemann_rel": worst("riemann_rel"),
        "max_off_pattern_rel": worst("off_pattern_rel"),
        "max_kretschmann_rel": worst("kretschmann_rel"),
        "all_det_negative": all(r.det < 0 for r in records),
        "minors_alternate_count": sum(r.minors_alternate for r in records),
        "riemann_patterns": sorted({",".join(r.riemann_pattern) for r in records}),
    }
    det_errs = [r.det_rel_err for r in records if r.det_rel_err is not None]
    if det_errs:
        summary["max_det_rel_err"] = max(det_errs)

    claims = model.claims
    checks = {"det_negative": {"value": summary["all_det_negative"], "tol": None,
                               "pass": summary["all_det_negative"]}}
    if "vacuum" in claims:
        checks["vacuum"] = _check(summary["max_ricci_rel"], tol.ricci_tol)
    if det_errs:
        checks["det_closed_form"] = _check(summary["max_det_rel_err"], tol.det_tol)
    if "signature_chain" in claims:
        n_ok = summary["minors_alternate_count"]
        checks["signature_chain"] = {"value": n_ok, "tol": len(records), "pass": n_ok == len(records)}
    if "flat" in claims:
        checks["flat"] = _check(summary["max_riemann_rel"], tol.riemann_tol)
    if "riemann_pattern" in claims:
        checks["riemann_pattern"] = _check(summary["max_off_pattern_rel"], tol.riemann_tol)
    if "kretschmann_zero" in claims:
        checks["kretschmann_zero"] = _check(summary["max_kretschmann_rel"], tol.kretschmann_tol)
    if "kretschmann_closed_form" in claims:
        errs = [r.kretschmann_closed_rel_err for r in records if r.kretschmann_closed_rel_err is not None]
        if errs:
            summary["max_kretschmann_closed_rel_err"] = max(errs)
            checks["kretschmann_closed_form"] = _check(max(errs), tol.kretschmann_closed_tol)
    return summary, checks


@dataclass(frozen=True)
class ModelRef:
    """Picklable recipe for rebuilding a builtin model inside a worker process."""

    name: str
    params: tuple = ()
    corrupt: str | None = None

    def build(self) -> MetricModel:
        from ..models import corrupted
        model = builtin(self.name, **dict(self.params))
        return corrupted(model, self.corrupt) if self.corrupt else model


def _worker(args):
    ref, chunk, tol = args
    model = ref.build()
    return [evaluate_event(model, p, tol) for p in chunk]


def check_grid(model: MetricModel, events: Sequence[Sequence[float]],
               margins: Margins | None = None) -> None:
    bad = [tuple(p) for p in events if model.is_singular(p, margins)]
    if bad:
        shown = "; ".join(str(tuple(round(c, 6) for c in p)) for p in bad[:5])
        more = f" (+{len(bad) - 5} more)" if len(bad) > 5 else ""
        raise UsageError(f"grid intersects the singular margin of {model.name} at {len(bad)} "
                         f"events: {shown}{more}")


def scan(model: MetricModel, grid: Grid | str | None = None, tolerances: Tolerances | None = None,
         margins: Margins | None = None, workers: int = 1,
         model_ref: ModelRef | None = None) -> ScanReport:
    """Evaluate curvature and determinant checks at every grid event.

    ``workers > 1`` fans events out to a process pool; that needs ``model_ref``
    because model closures cannot be pickled.  Results keep grid order.
    """
    tol = tolerances or Tolerances()
    if grid is None or isinstance(grid, str):
        grid = parse_grid(grid or "", model.default_grid)
    events = grid.events()
    check_grid(model, events, margins)
    try:
        if workers > 1 and model_ref is not None and len(events) > 1:
            n = min(workers, len(events))
            chunks = [events[i::n] for i in range(n)]
            with ProcessPoolExecutor(max_workers=n) as pool:
                parts = list(pool.map(_worker, [(model_ref, c, tol) for c in chunks]))
            # undo the round-robin split
            records: list[EventRecord] = [None] * len(events)  # type: ignore[list-item]
            for i, part in enumerate(parts):
                records[i::n] = part
        else:
            records = [evaluate_event(model, p, tol) for p in events]
    except DomainError as exc:
        raise UsageError(f"scan left the model's domain: {exc}") from exc
    summary, checks = summarize(model, records, tol)
    return ScanReport(model.name, grid, records, checks, summary)
