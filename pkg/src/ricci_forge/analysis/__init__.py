"""Scans, singularity probes, null curves and slice geometry."""

from .null_curves import NullCurve, integrate_null_curve, null_residual, null_slopes
from .scan import Grid, ScanReport, Tolerances, parse_grid, scan
from .singularities import SingularityVerdict, catalog, classify_singularity
from .slices import SliceMetric, slice_metric

__all__ = [
    "Grid", "NullCurve", "ScanReport", "SingularityVerdict", "SliceMetric", "Tolerances",
    "catalog", "classify_singularity", "integrate_null_curve", "null_residual", "null_slopes",
    "parse_grid", "scan", "slice_metric",
]
