"""Simulation and verification toolkit for long-range percolation and
contact-process models whose interaction ranges are random.

Subpackages:
  distributions  laws of the integer range variable and sampling
  cpdr           event-driven contact process with dynamically resampled ranges
  aprr           oriented anisotropic percolation with random bond ranges
  oned           one-dimensional front recursions and their analytics
  bounds         closed-form calculators used to parameterize experiments
  harness        experiment orchestration, seeding, statistics, CSV emission
"""

from .rng import Rng, derive_run_seed
from .distributions import (
    BetaExp,
    Constant,
    Empirical,
    Geometric,
    ParetoTail,
    RangeDistribution,
    from_spec,
)
from .stats import wilson_interval

__version__ = "0.1.0"

__all__ = [
    "Rng",
    "derive_run_seed",
    "wilson_interval",
    "RangeDistribution",
    "Constant",
    "BetaExp",
    "ParetoTail",
    "Geometric",
    "Empirical",
    "from_spec",
    "__version__",
]
