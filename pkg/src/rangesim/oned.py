"""One-dimensional long-range percolation machinery.

The cluster of the origin in the 1D oriented model (bonds (i, i+k) for
k <= N_i) is tracked by a rightmost-front recursion instead of a full graph
search, so each environment value is visited O(1) times:

* all bonds present: fronts i_0 = -1, i_1 = 0 and
  i_{n+1} = max{ i + N_i : i in (i_{n-1}, i_n] }, with increments
  X_n = i_{n+1} - i_n.  The run dies at the first X_n = 0, and the cluster
  is infinite exactly when no such step occurs.  The recursion's rightmost
  equals the BFS rightmost on any environment (tested exactly).

* diluted bonds (each bond open with probability p): the base/reach chain
  j_0 = 0, u_0 = N_0; a scan of (j_n, u_n] draws B_i = {bond (j_n, i) open}
  and thinned values N_i * 1{B_i}; the next base is the leftmost maximizer
  of i + N_i * 1{B_i}.  When the maximum stalls at u_n, u_n is recorded as a
  cutting point and the chain restarts from it with reach u_n + N_{u_n};
  the run dies when that restart has range 0 (no forward continuation).

Also in this module: the exact cutting-point probability, the conditional
law of the front growth ratio X_{n+1}/X_n at a given front width, and its
large-width limit CDF.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .distributions import RangeDistribution, sample_kernel
from .rng import Rng, next_uniform

_NO_TARGET = np.int64(1) << np.int64(62)
_EMPTY_ENV = np.empty(0, dtype=np.int64)
_EMPTY_BONDS = np.empty((0, 0), dtype=np.uint8)


@dataclass(frozen=True, eq=False)
class FrontOutcome:
    """Result of one front-recursion run.

    verdict is "died" (the front stalled; the origin cluster is finite with
    the given rightmost vertex) or "alive" (the run reached its step cap or
    rightmost target).  cutting_points is populated by the diluted variant.
    w_samples holds rows (step, front_width, growth_ratio) when ratio
    collection was enabled.
    """

    verdict: str
    steps: int
    rightmost: int
    cutting_points: tuple = ()
    w_samples: np.ndarray | None = None

    @property
    def died(self) -> bool:
        return self.verdict == "died"


# --------------------------------------------------------------------------
# analytics


def cutting_point_prob(beta: float, i: int) -> float:
    """P(vertex i is a cutting point) = exp(-beta * H_i) under the
    reciprocal-exponential tail; H_i is the i-th harmonic number, summed
    directly."""
    if i < 1:
        raise ValueError(f"vertex index must be >= 1, got {i}")
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    h = 0.0
    for ell in range(1, i + 1):
        h += 1.0 / ell
    return math.exp(-beta * h)


def ratio_limit_cdf(t: float, beta: float) -> float:
    """Limit CDF of the front growth ratio: (t/(t+1))^beta for t > 0, else 0."""
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    if t <= 0.0:
        return 0.0
    return (t / (t + 1.0)) ** beta


def ratio_conditional_cdf(m: int, t: float, beta: float) -> float:
    """P(growth ratio <= t | front width m): exp(-beta * sum_{j<m} 1/(f+j))
    with f = floor(m*t + 1), evaluated by direct summation."""
    if m < 1:
        raise ValueError(f"front width m must be >= 1, got {m}")
    if not t > 0.0:
        raise ValueError(f"t must be positive, got {t}")
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    f = math.floor(m * t + 1.0)
    s = float(np.sum(1.0 / (f + np.arange(m, dtype=np.float64))))
    return math.exp(-beta * s)


# --------------------------------------------------------------------------
# recursion kernels (stream mode samples from the generator; env mode reads
# an explicit environment and bond table, used by the oracle tests)


@njit(cache=True, nogil=True)
def _front_kernel(
    state,
    kind,
    a,
    b,
    table,
    step_cap,
    rightmost_target,
    collect_w,
    w_min_m,
    w_buf,
    use_env,
    env,
):
    """Dense-bond front recursion. Returns (state, died, steps, rightmost, n_w)."""
    i_prev = np.int64(-1)
    i_cur = np.int64(0)
    steps = np.int64(0)
    x_prev = np.int64(-1)  # front width of the previous step, -1 before step 1
    n_w = 0
    while True:
        # full scan of (i_prev, i_cur]; its length is bounded by the previous
        # increment, which the halt below keeps under the rightmost target
        best = np.int64(-1)
        i = i_prev
        while i < i_cur:
            i += 1
            if use_env:
                n_i = env[i] if i < env.shape[0] else np.int64(0)
            else:
                state, n_i = sample_kernel(state, kind, a, b, table)
            v = i + n_i
            if v > best:
                best = v
        steps += 1
        i_next = best
        x_n = i_next - i_cur
        if collect_w and x_prev >= w_min_m and n_w < w_buf.shape[0]:
            w_buf[n_w, 0] = steps - 1
            w_buf[n_w, 1] = x_prev
            w_buf[n_w, 2] = x_n / x_prev
            n_w += 1
        if x_n == 0:
            return state, True, steps, i_cur, n_w
        i_prev = i_cur
        i_cur = i_next
        x_prev = x_n
        if i_cur >= rightmost_target or steps >= step_cap:
            return state, False, steps, i_cur, n_w


@njit(cache=True, nogil=True)
def _thinned_kernel(
    state,
    kind,
    a,
    b,
    table,
    p,
    step_cap,
    rightmost_target,
    cut_buf,
    use_env,
    env,
    bonds,
):
    """Diluted-bond base/reach recursion.

    Returns (state, died, steps, rightmost, n_cuts_stored, n_cuts_total).
    In env mode bonds[i, k] == 1 means bond (i, i+k+1) is open; entries
    outside the table are closed.
    """
    j = np.int64(0)
    if use_env:
        n0 = env[0] if env.shape[0] > 0 else np.int64(0)
    else:
        state, n0 = sample_kernel(state, kind, a, b, table)
    u = n0
    steps = np.int64(0)
    n_cuts_stored = 0
    n_cuts_total = 0
    if u <= j:
        return state, True, np.int64(1), np.int64(0), n_cuts_stored, n_cuts_total
    if u >= rightmost_target:
        return state, False, np.int64(0), u, n_cuts_stored, n_cuts_total

    # rolling memo of range values over (j, u]: nbuf[i - j - 1] = N_i
    nbuf = np.empty(1024, dtype=np.int64)
    valid = np.int64(0)

    while True:
        best = np.int64(-1)
        best_i = np.int64(-1)
        i = j
        while i < u:
            i += 1
            idx = i - j - 1
            if idx < valid:
                n_i = nbuf[idx]
            else:
                if use_env:
                    n_i = env[i] if i < env.shape[0] else np.int64(0)
                else:
                    state, n_i = sample_kernel(state, kind, a, b, table)
                if idx >= nbuf.shape[0]:
                    grown = np.empty(nbuf.shape[0] * 2, dtype=np.int64)
                    grown[: nbuf.shape[0]] = nbuf
                    nbuf = grown
                nbuf[idx] = n_i
                valid = idx + 1
            if use_env:
                k = i - j - 1
                open_ij = bonds[j, k] != 0 if (j < bonds.shape[0] and k < bonds.shape[1]) else False
            else:
                state, ub = next_uniform(state)
                open_ij = ub < p
            v = i + n_i if open_ij else i
            if v > best:
                best = v
                best_i = i
        steps += 1
        if best > u:
            # advance: new base is the leftmost maximizer, memo keeps (best_i, u]
            shift = best_i - j
            keep = u - best_i
            for kk in range(keep):
                nbuf[kk] = nbuf[kk + shift]
            valid = keep
            j = best_i
            u = best
        else:
            # stall at u: u is a cutting point; restart from it
            n_cuts_total += 1
            if n_cuts_stored < cut_buf.shape[0]:
                cut_buf[n_cuts_stored] = u
                n_cuts_stored += 1
            n_u = nbuf[u - j - 1]
            if n_u == 0:
                return state, True, steps, u, n_cuts_stored, n_cuts_total
            j = u
            u = u + n_u
            valid = 0
        if u >= rightmost_target or steps >= step_cap:
            return state, False, steps, u, n_cuts_stored, n_cuts_total


# --------------------------------------------------------------------------
# wrappers


def _encode_target(rightmost_target) -> np.int64:
    if rightmost_target is None or rightmost_target <= 0:
        return _NO_TARGET
    return np.int64(rightmost_target)


def run_front(
    dist: RangeDistribution,
    rng: Rng,
    *,
    step_cap: int,
    rightmost_target: int | None = None,
    collect_w: bool = False,
    w_min_m: int = 10_000,
    w_capacity: int = 65_536,
) -> FrontOutcome:
    """Dense-bond front recursion driven by the generator.

    Halts "died" at the first zero increment, "alive" at step_cap or once
    the front passes rightmost_target.  Each environment value is sampled
    exactly once; memory is O(1) beyond the optional ratio buffer.
    """
    if step_cap < 1:
        raise ValueError(f"step_cap must be >= 1, got {step_cap}")
    kind, a, b, table = dist.encode()
    w_buf = np.empty((w_capacity if collect_w else 0, 3), dtype=np.float64)
    state, died, steps, rightmost, n_w = _front_kernel(
        np.uint64(rng.state),
        kind,
        a,
        b,
        table,
        np.int64(step_cap),
        _encode_target(rightmost_target),
        collect_w,
        np.int64(w_min_m),
        w_buf,
        False,
        _EMPTY_ENV,
    )
    rng.set_state(int(state))
    return FrontOutcome(
        verdict="died" if died else "alive",
        steps=int(steps),
        rightmost=int(rightmost),
        w_samples=w_buf[:n_w].copy() if collect_w else None,
    )


def run_front_env(env, *, step_cap: int = 1 << 60) -> FrontOutcome:
    """Dense-bond recursion on an explicit environment array (tests/oracles).

    Vertices beyond the array have range 0.
    """
    env = np.ascontiguousarray(env, dtype=np.int64)
    _, died, steps, rightmost, _ = _front_kernel(
        np.uint64(0),
        0,
        0.0,
        0.0,
        np.empty(0, dtype=np.float64),
        np.int64(step_cap),
        _NO_TARGET,
        False,
        np.int64(0),
        np.empty((0, 3), dtype=np.float64),
        True,
        env,
    )
    return FrontOutcome(
        verdict="died" if died else "alive", steps=int(steps), rightmost=int(rightmost)
    )


def run_front_thinned(
    p: float,
    dist: RangeDistribution,
    rng: Rng,
    *,
    step_cap: int,
    rightmost_target: int | None = None,
    max_cut_record: int = 4096,
) -> FrontOutcome:
    """Diluted-bond base/reach recursion driven by the generator."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"bond probability must lie in (0, 1], got {p}")
    if step_cap < 1:
        raise ValueError(f"step_cap must be >= 1, got {step_cap}")
    kind, a, b, table = dist.encode()
    cut_buf = np.empty(max_cut_record, dtype=np.int64)
    state, died, steps, rightmost, n_stored, n_total = _thinned_kernel(
        np.uint64(rng.state),
        kind,
        a,
        b,
        table,
        float(p),
        np.int64(step_cap),
        _encode_target(rightmost_target),
        cut_buf,
        False,
        _EMPTY_ENV,
        _EMPTY_BONDS,
    )
    rng.set_state(int(state))
    return FrontOutcome(
        verdict="died" if died else "alive",
        steps=int(steps),
        rightmost=int(rightmost),
        cutting_points=tuple(int(c) for c in cut_buf[:n_stored]),
    )


def run_front_thinned_env(env, bonds, *, step_cap: int = 1 << 60) -> FrontOutcome:
    """Diluted-bond recursion on explicit arrays (tests/oracles).

    bonds[i, k] nonzero means bond (i, i+k+1) is open; anything outside the
    table is closed.
    """
    env = np.ascontiguousarray(env, dtype=np.int64)
    bonds = np.ascontiguousarray(bonds, dtype=np.uint8)
    cut_buf = np.empty(4096, dtype=np.int64)
    _, died, steps, rightmost, n_stored, _ = _thinned_kernel(
        np.uint64(0),
        0,
        0.0,
        0.0,
        np.empty(0, dtype=np.float64),
        1.0,
        np.int64(step_cap),
        _NO_TARGET,
        cut_buf,
        True,
        env,
        bonds,
    )
    return FrontOutcome(
        verdict="died" if died else "alive",
        steps=int(steps),
        rightmost=int(rightmost),
        cutting_points=tuple(int(c) for c in cut_buf[:n_stored]),
    )


def brute_force_rightmost(env, bond_open=None) -> int:
    """Rightmost vertex reachable from 0 by direct BFS over open bonds
    {(i, i+k) : 1 <= k <= N_i}; the independent oracle for the recursions.

    env[i] is the range of vertex i; vertices beyond the array have range 0.
    bond_open(i, j) -> bool dilutes bonds; None means every bond is present.
    """
    from collections import deque

    env = list(env)
    seen = {0}
    queue = deque([0])
    rightmost = 0
    while queue:
        i = queue.popleft()
        if i > rightmost:
            rightmost = i
        if i >= len(env):
            continue
        for k in range(1, env[i] + 1):
            j = i + k
            if j in seen:
                continue
            if bond_open is None or bond_open(i, j):
                seen.add(j)
                queue.append(j)
    return rightmost
