"""Closed-form calculators used to parameterize and cross-check experiments.

These are the quantitative handles of the subcritical/supercritical analysis:
the mean offspring count of the branching comparison, the infection-rate
level below which that comparison is subcritical, and the block-event
probabilities driving the renormalization estimates.

A related renormalized expected-neighbor estimate of the form
``1 - (1-q)^l + c(p) + sum_{i>=l} P(N>=i)`` underlies the subcritical regime
of the anisotropic model for p < 1; its constant c(p) is non-constructive,
so no calculator is provided for it.

Infinite values are first-class report states, not errors, except where a
downstream formula requires finiteness (the subcritical rate bound).
All operations are pure and thread-safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .distributions import RangeDistribution


class InfiniteMomentError(ValueError):
    """Raised when a bound needs E[N^d] < inf and the distribution diverges."""


@dataclass(frozen=True)
class BoundReport:
    name: str
    value: float
    inputs: dict = field(default_factory=dict)

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "value": self.value if self.finite else "inf",
            "finite": self.finite,
            "inputs": self.inputs,
        }


def expected_ball_volume(dist: RangeDistribution, d: int) -> float:
    """E[(2N+1)^d], the mean sup-norm ball volume at a random range.

    Expanded binomially through the power moments; +inf when E[N^d] = inf
    (lower moments are then irrelevant).
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if math.isinf(dist.moment(d)):
        return math.inf
    total = 1.0
    for k in range(1, d + 1):
        total += math.comb(d, k) * (2.0 ** k) * dist.moment(k)
    return total


def subcritical_rate_bound(dist: RangeDistribution, d: int) -> BoundReport:
    """1 / (2 E[(2N+1)^d]): infection rates below this make the branching
    comparison subcritical, forcing extinction."""
    vol = expected_ball_volume(dist, d)
    if math.isinf(vol):
        raise InfiniteMomentError(
            f"E[N^{d}] is infinite for {dist!r}; the subcritical rate bound needs a finite moment"
        )
    return BoundReport(
        name="subcritical_rate_bound",
        value=1.0 / (2.0 * vol),
        inputs={"dist": dist.to_spec(), "d": d},
    )


def branching_mean(dist: RangeDistribution, d: int, lam: float) -> BoundReport:
    """E[(2N+1)^d] * 2*lambda, the offspring-mean bound of the comparison
    branching process; infinite is a valid report."""
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    if lam == 0.0:
        value = 0.0
    else:
        value = expected_ball_volume(dist, d) * 2.0 * lam
    return BoundReport(
        name="branching_mean",
        value=value,
        inputs={"dist": dist.to_spec(), "d": d, "lambda": lam},
    )


def block_range_prob(dist: RangeDistribution, L: int) -> float:
    """Probability that a renormalization block of scale L witnesses a range
    at least 7L installed and held through its time window:
    (1 - e^-1) * e^-3 * P(N >= 7L)."""
    if L < 1:
        raise ValueError(f"block scale L must be >= 1, got {L}")
    return (1.0 - math.exp(-1.0)) * math.exp(-3.0) * dist.tail(7 * L)


def horizontal_block_open_prob(lam: float, rho: float, L: int) -> float:
    """1 - (1 - (1 - e^-lambda) * rho)^L: chance that one of L candidate
    columns opens a horizontal block bond."""
    if L < 1:
        raise ValueError(f"block scale L must be >= 1, got {L}")
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho must be a probability, got {rho}")
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    return 1.0 - (1.0 - (1.0 - math.exp(-lam)) * rho) ** L


def standard_reports(dist: RangeDistribution, d: int, lam: float, L_values=(1, 2, 5, 10)) -> list[BoundReport]:
    """The report bundle emitted by the CLI `bounds` subcommand."""
    reports = []
    try:
        reports.append(subcritical_rate_bound(dist, d))
    except InfiniteMomentError:
        reports.append(
            BoundReport(
                name="subcritical_rate_bound",
                value=math.inf,
                inputs={"dist": dist.to_spec(), "d": d, "note": "E[N^d] infinite"},
            )
        )
    reports.append(branching_mean(dist, d, lam))
    for L in L_values:
        rho = block_range_prob(dist, L)
        reports.append(
            BoundReport(
                name="block_range_prob",
                value=rho,
                inputs={"dist": dist.to_spec(), "L": int(L)},
            )
        )
        reports.append(
            BoundReport(
                name="horizontal_block_open_prob",
                value=horizontal_block_open_prob(lam, rho, L),
                inputs={"lambda": lam, "rho": rho, "L": int(L)},
            )
        )
    return reports
