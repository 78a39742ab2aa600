"""Oriented anisotropic percolation with random bond ranges.

Vertices of Z^d (d >= 2) carry i.i.d. ranges N_x.  From x there are oriented
long bonds (x, x + n*e1) for every 1 <= n <= N_x, each open with probability
p, and oriented unit bonds (x, x + e_i), i = 2..d, each open with
probability q.  The origin's cluster is explored breadth-first with the
environment sampled lazily: a vertex draws its range and bond states exactly
once, when it is expanded.

Percolation cannot be decided in finite time, so the estimators use a
finite-volume proxy: a run "percolates" when the cluster reaches size_cap
vertices or a first coordinate of reach_cap.  Both caps are reported so
finite-size effects stay visible.  All bonds point in increasing coordinate
directions, hence the cluster lives in the nonnegative orthant.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .distributions import RangeDistribution, from_spec
from .rng import Rng, derive_run_seed
from .stats import wilson_interval

DIED = "died"
SIZE_CAP = "size_cap"
DISTANCE_CAP = "distance_cap"


@dataclass(frozen=True)
class AprrConfig:
    dimension: int
    p: float
    q: float
    dist: RangeDistribution
    size_cap: int = 100_000
    reach_cap: int = 10_000

    def __post_init__(self):
        if self.dimension < 2:
            raise ValueError(f"dimension must be >= 2, got {self.dimension}")
        if not (0.0 <= self.p <= 1.0 and 0.0 <= self.q <= 1.0):
            raise ValueError(f"p and q must be probabilities, got p={self.p}, q={self.q}")
        if self.size_cap < 1 or self.reach_cap < 1:
            raise ValueError("caps must be >= 1")

    @classmethod
    def from_params(cls, params: dict) -> "AprrConfig":
        return cls(
            dimension=int(params["dimension"]),
            p=float(params["p"]),
            q=float(params["q"]),
            dist=from_spec(params["dist"]),
            size_cap=int(params.get("size_cap", 100_000)),
            reach_cap=int(params.get("reach_cap", 10_000)),
        )


@dataclass(frozen=True)
class ClusterOutcome:
    verdict: str  # died | size_cap | distance_cap
    size: int
    max_coord1: int

    @property
    def percolates(self) -> bool:
        """Finite-volume proxy for an infinite cluster."""
        return self.verdict != DIED


@dataclass(eq=False)
class ClusterFrontier:
    """Exploration state: visited set, FIFO of unexpanded vertices, and the
    lazily sampled environment.  Each vertex is expanded at most once."""

    visited: set = field(default_factory=set)
    queue: deque = field(default_factory=deque)
    env: dict = field(default_factory=dict)
    size: int = 0
    max_coord1: int = 0
    max_l1: int = 0


class DenseEnvironment:
    """Pre-sampled environment on a finite window of the nonneg orthant.

    Holds the range of every window vertex and one uniform per potential
    bond, so explorations at different (p, q) share the same randomness
    (bond open iff its uniform < p resp. q).  Bonds leaving the window are
    closed.  Used by the oracle-equivalence and coupling tests.
    """

    def __init__(self, ranges: np.ndarray, hbond_u: np.ndarray, vbond_u: np.ndarray):
        self.ranges = ranges
        self.hbond_u = hbond_u
        self.vbond_u = vbond_u
        self.shape = ranges.shape

    @classmethod
    def sample(cls, dist: RangeDistribution, shape: tuple, seed: int) -> "DenseEnvironment":
        rng = Rng(seed)
        d = len(shape)
        ranges = np.empty(shape, dtype=np.int64)
        flat = ranges.reshape(-1)
        for i in range(flat.size):
            flat[i] = dist.sample(rng)
        max_len = shape[0] - 1
        hbond_u = np.empty(shape + (max_len,), dtype=np.float64)
        hflat = hbond_u.reshape(-1)
        for i in range(hflat.size):
            hflat[i] = rng.uniform()
        vbond_u = np.empty(shape + (d - 1,), dtype=np.float64)
        vflat = vbond_u.reshape(-1)
        for i in range(vflat.size):
            vflat[i] = rng.uniform()
        return cls(ranges, hbond_u, vbond_u)

    def in_window(self, x: tuple) -> bool:
        return all(0 <= c < s for c, s in zip(x, self.shape))

    def range_at(self, x: tuple) -> int:
        return int(self.ranges[x])

    def horiz_open(self, x: tuple, n: int, p: float) -> bool:
        target = (x[0] + n,) + x[1:]
        if not self.in_window(target):
            return False
        return bool(self.hbond_u[x + (n - 1,)] < p)

    def vert_open(self, x: tuple, axis: int, q: float) -> bool:
        target = x[:axis] + (x[axis] + 1,) + x[axis + 1 :]
        if not self.in_window(target):
            return False
        return bool(self.vbond_u[x + (axis - 1,)] < q)


def explore_cluster(
    config: AprrConfig,
    seed: int,
    env: DenseEnvironment | None = None,
    frontier: ClusterFrontier | None = None,
) -> ClusterOutcome:
    """Breadth-first exploration of the origin's oriented cluster.

    On expanding x: draw N_x (memoized), then try the long bonds
    (x, x + n*e1), n = 1..N_x, each open with probability p, then the unit
    bonds (x, x + e_i), i = 2..d, each open with probability q.  Newly
    opened targets are marked visited at enqueue time, so every oriented
    bond is sampled at most once and reported size equals |visited|.
    Expansion cost is O(N_x) per vertex.

    Halts as soon as either cap is hit, even mid-expansion.  With env given,
    bond states and ranges come from the pre-sampled window instead of the
    generator (bonds leaving the window are closed).  Pass a fresh
    ClusterFrontier to inspect the visited set and environment afterwards.
    """
    d, p, q = config.dimension, config.p, config.q
    rng = Rng(seed)
    if frontier is None:
        frontier = ClusterFrontier()
    origin = (0,) * d
    frontier.visited.add(origin)
    frontier.queue.append(origin)
    frontier.size = 1

    if frontier.size >= config.size_cap:
        return ClusterOutcome(SIZE_CAP, frontier.size, 0)

    def admit(y: tuple) -> str | None:
        frontier.visited.add(y)
        frontier.queue.append(y)
        frontier.size += 1
        if y[0] > frontier.max_coord1:
            frontier.max_coord1 = y[0]
        l1 = sum(y)
        if l1 > frontier.max_l1:
            frontier.max_l1 = l1
        if frontier.size >= config.size_cap:
            return SIZE_CAP
        if frontier.max_coord1 >= config.reach_cap:
            return DISTANCE_CAP
        return None

    while frontier.queue:
        x = frontier.queue.popleft()
        if env is None:
            n_x = config.dist.sample(rng)
        else:
            n_x = env.range_at(x) if env.in_window(x) else 0
        frontier.env[x] = n_x
        for n in range(1, n_x + 1):
            if env is None:
                is_open = rng.uniform() < p
            else:
                is_open = env.horiz_open(x, n, p)
            if not is_open:
                continue
            y = (x[0] + n,) + x[1:]
            if y in frontier.visited:
                continue
            verdict = admit(y)
            if verdict is not None:
                return ClusterOutcome(verdict, frontier.size, frontier.max_coord1)
        for axis in range(1, d):
            if env is None:
                is_open = rng.uniform() < q
            else:
                is_open = env.vert_open(x, axis, q)
            if not is_open:
                continue
            y = x[:axis] + (x[axis] + 1,) + x[axis + 1 :]
            if y in frontier.visited:
                continue
            verdict = admit(y)
            if verdict is not None:
                return ClusterOutcome(verdict, frontier.size, frontier.max_coord1)

    return ClusterOutcome(DIED, frontier.size, frontier.max_coord1)


@dataclass(frozen=True)
class ThetaEstimate:
    fraction: float
    wilson_low: float
    wilson_high: float
    runs: int
    successes: int
    size_cap: int
    reach_cap: int


def estimate_theta(config: AprrConfig, master_seed: int, runs: int, z: float = 2.576) -> ThetaEstimate:
    """Monte Carlo estimate of the percolation probability proxy with its
    Wilson interval (99% by default)."""
    if runs < 1:
        raise ValueError(f"runs must be >= 1, got {runs}")
    successes = 0
    for i in range(runs):
        out = explore_cluster(config, derive_run_seed(master_seed, i))
        successes += out.percolates
    lo, hi = wilson_interval(successes, runs, z)
    return ThetaEstimate(
        fraction=successes / runs,
        wilson_low=lo,
        wilson_high=hi,
        runs=runs,
        successes=successes,
        size_cap=config.size_cap,
        reach_cap=config.reach_cap,
    )


@dataclass(frozen=True)
class QcLevel:
    q: float
    estimate: ThetaEstimate
    call: str  # supercritical | subcritical | inconclusive


@dataclass(frozen=True)
class QcEstimate:
    """Finite-volume bracket for the critical vertical density q_c(p).

    The proxy depends on the caps and the decision threshold; inconclusive
    means some bisection level could not be classified at the run budget,
    and the returned bracket is then wider than the requested resolution.
    """

    p: float
    q_low: float
    q_high: float
    inconclusive: bool
    levels: tuple

    @property
    def q_mid(self) -> float:
        return 0.5 * (self.q_low + self.q_high)

    @property
    def width(self) -> float:
        return self.q_high - self.q_low


def estimate_qc(
    p: float,
    dist: RangeDistribution,
    *,
    dimension: int = 2,
    size_cap: int = 100_000,
    reach_cap: int = 10_000,
    runs: int = 200,
    q_resolution: float = 0.01,
    survival_threshold: float = 0.05,
    master_seed: int = 0,
    z: float = 2.576,
) -> QcEstimate:
    """Bisection on q: a level is supercritical when the Wilson lower bound
    of the percolation proxy exceeds survival_threshold, subcritical when
    the upper bound falls below it.  Stops at the first level the rule
    cannot classify (flagged inconclusive) or once the bracket is within
    q_resolution."""
    if not 0.0 < q_resolution < 1.0:
        raise ValueError(f"q_resolution must lie in (0,1), got {q_resolution}")
    lo, hi = 0.0, 1.0
    levels = []
    level_idx = 0
    inconclusive = False
    while hi - lo > q_resolution:
        mid = 0.5 * (lo + hi)
        config = AprrConfig(
            dimension=dimension, p=p, q=mid, dist=dist, size_cap=size_cap, reach_cap=reach_cap
        )
        est = estimate_theta(config, derive_run_seed(master_seed, level_idx), runs, z=z)
        if est.wilson_low > survival_threshold:
            call = "supercritical"
            hi = mid
        elif est.wilson_high < survival_threshold:
            call = "subcritical"
            lo = mid
        else:
            call = "inconclusive"
            inconclusive = True
        levels.append(QcLevel(q=mid, estimate=est, call=call))
        level_idx += 1
        if inconclusive:
            break
    return QcEstimate(p=p, q_low=lo, q_high=hi, inconclusive=inconclusive, levels=tuple(levels))
