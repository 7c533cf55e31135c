"""Numerical verification of a family of time-periodic vacuum Einstein metrics.

Metric components are differentiated with second-order forward-mode jets
(:mod:`ricci_forge.jets`), curvature is assembled in
:mod:`ricci_forge.curvature`, and :mod:`ricci_forge.analysis` provides grid
scans, singularity probes, null curves and slice geometry.
"""

__version__ = "0.1.0"

from .errors import DegenerateEventError, DomainError, RicciForgeError, UsageError  # noqa: E402
from .jets import Jet2, seed, seed_all  # noqa: E402
from .models import MetricModel, builtin  # noqa: E402

__all__ = ["DegenerateEventError", "DomainError", "Jet2", "MetricModel", "RicciForgeError",
           "UsageError", "builtin", "seed", "seed_all", "__version__"]
