"""Brute-force per-bond engine for cross-checking the attempt-scheme engine.

This is the graphical construction taken literally on a finite window:
every vertex keeps an explicit range process (resampled at rate 1 whether
infected or not), every vertex has a recovery clock (rate 1, a no-op while
healthy), and every unordered pair of window vertices has its own infection
clock of rate lambda.  When a bond clock rings, an infected endpoint whose
current range covers the bond length infects a healthy other endpoint.

The aggregate event rate is constant, so selection is a single uniform over
channels; most events are no-ops.  Hopelessly slow beyond tiny windows, and
deliberately so: it shares nothing with the production engine except the
raw generator, which is what makes the statistical comparison meaningful.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .cpdr import CpdrConfig
from .distributions import sample_kernel
from .rng import Rng, next_below, next_uniform


@njit(cache=True, nogil=True)
def _oracle_kernel(state, d, lam, kind, a, b, table, radius, horizon, bx, by, blen):
    side = 2 * radius + 1
    n_vertices = 1
    for _ in range(d):
        n_vertices *= side

    ranges = np.empty(n_vertices, dtype=np.int64)
    for v in range(n_vertices):
        state, r = sample_kernel(state, kind, a, b, table)
        ranges[v] = r

    infected = np.zeros(n_vertices, dtype=np.uint8)
    origin = 0
    mult = 1
    for _ in range(d):
        origin += radius * mult
        mult *= side
    infected[origin] = 1
    n_inf = 1
    max_infected = 1

    n_bonds = bx.shape[0]
    total = 2.0 * n_vertices + lam * n_bonds
    time = 0.0
    events = np.int64(0)

    while n_inf > 0:
        state, u = next_uniform(state)
        dt = -np.log(u) / total
        if time + dt > horizon:
            return state, np.int64(1), horizon, max_infected, events, n_inf
        time += dt
        events += 1
        state, pick = next_uniform(state)
        z = pick * total
        if z < n_vertices:
            # recovery clock of some vertex; only matters when infected
            state, k = next_below(state, np.uint64(n_vertices))
            v = np.int64(k)
            if infected[v] == 1:
                infected[v] = 0
                n_inf -= 1
        elif z < 2.0 * n_vertices:
            # range change clock: every vertex resamples, infected or not
            state, k = next_below(state, np.uint64(n_vertices))
            v = np.int64(k)
            state, r = sample_kernel(state, kind, a, b, table)
            ranges[v] = r
        else:
            state, k = next_below(state, np.uint64(n_bonds))
            e = np.int64(k)
            x = bx[e]
            y = by[e]
            length = blen[e]
            if infected[x] == 1 and infected[y] == 0:
                if length <= ranges[x]:
                    infected[y] = 1
                    n_inf += 1
                    if n_inf > max_infected:
                        max_infected = n_inf
            elif infected[y] == 1 and infected[x] == 0:
                if length <= ranges[y]:
                    infected[x] = 1
                    n_inf += 1
                    if n_inf > max_infected:
                        max_infected = n_inf

    return state, np.int64(0), time, max_infected, events, n_inf


def run_cpdr_bond_oracle(config: CpdrConfig, seed: int):
    """One run of the per-bond construction.

    Returns (survived, final_time, max_infected, events).  Only sensible
    for small windows; the bond list is quadratic in the vertex count.
    """
    d = config.dimension
    side = 2 * config.window_radius + 1
    n_vertices = side ** d
    if n_vertices > 4096:
        raise ValueError("per-bond oracle is restricted to tiny windows")

    coords = np.array(
        [np.unravel_index(v, (side,) * d) for v in range(n_vertices)], dtype=np.int64
    )
    bx, by, blen = [], [], []
    for x in range(n_vertices):
        for y in range(x + 1, n_vertices):
            bx.append(x)
            by.append(y)
            blen.append(int(np.max(np.abs(coords[x] - coords[y]))))
    kind, a, b, table = config.dist.encode()
    state, verdict, final_time, max_inf, events, _ = _oracle_kernel(
        np.uint64(Rng(seed).state),
        np.int64(d),
        float(config.lam),
        kind,
        a,
        b,
        table,
        np.int64(config.window_radius),
        float(config.horizon),
        np.asarray(bx, dtype=np.int64),
        np.asarray(by, dtype=np.int64),
        np.asarray(blen, dtype=np.int64),
    )
    return bool(verdict == 1), float(final_time), int(max_inf), int(events)
