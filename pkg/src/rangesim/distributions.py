"""Laws of the integer range variable and reproducible sampling.

Every model in this package draws its ranges from one of the variants below.
A variant knows its exact tail function P(N >= n), an inverse-CDF sampler
that consumes exactly one uniform per draw, its power moments E[N^d]
(with +inf as a first-class answer), and whether its tail is heavy in the
sense limsup_n n * P(N^d >= n) > 0.

Moment finiteness and heavy-tail status are decided analytically per
variant, never by truncated summation: truncation cannot tell slow
divergence from convergence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit, types

from .rng import Rng, next_uniform

# variant codes shared with the jitted kernels
KIND_CONSTANT = 0
KIND_BETAEXP = 1
KIND_PARETOTAIL = 2
KIND_GEOMETRIC = 3
KIND_EMPIRICAL = 4

# samples are clamped here so downstream lattice arithmetic cannot overflow
SAMPLE_CLAMP = 1 << 62

_EMPTY_TABLE = np.empty(0, dtype=np.float64)


@njit(
    types.int64(types.int64, types.float64, types.float64, types.float64[::1], types.float64),
    cache=True,
    nogil=True,
)
def quantile_kernel(kind, a, b, table, u):
    """Inverse CDF at u in (0,1): returns max{n >= 0 : u > P(N <= n-1)}.

    Equivalently N >= n exactly when u > 1 - tail(n), so P(N >= n) = tail(n).
    """
    if kind == 0:  # constant a
        return np.int64(a)
    if kind == 1:  # u > exp(-a/n)  <=>  n < a / (-log u)
        x = a / (-np.log(u))
        n = np.int64(np.ceil(x)) - 1
        return n if n > 0 else 0
    if kind == 2:  # 1 - u < a * n**-b  <=>  n < (a/(1-u))**(1/b)
        x = (a / (1.0 - u)) ** (1.0 / b)
        if x >= 4.0e18:
            return np.int64(SAMPLE_CLAMP)
        n = np.int64(np.ceil(x)) - 1
        return n if n > 0 else 0
    if kind == 3:  # a**n > 1 - u  <=>  n < log(1-u)/log(a)
        x = np.log(1.0 - u) / np.log(a)
        n = np.int64(np.ceil(x)) - 1
        return n if n > 0 else 0
    # empirical table of tail values
    n = np.int64(0)
    while n + 1 < len(table) and u > 1.0 - table[n + 1]:
        n += 1
    return n


@njit(
    types.Tuple((types.uint64, types.int64))(
        types.uint64, types.int64, types.float64, types.float64, types.float64[::1]
    ),
    cache=True,
    nogil=True,
)
def sample_kernel(state, kind, a, b, table):
    """One draw of N: consumes exactly one uniform from the stream."""
    state, u = next_uniform(state)
    return state, quantile_kernel(kind, a, b, table, u)


@dataclass(frozen=True)
class RangeDistribution:
    """Base class; use one of the concrete variants."""

    def tail(self, n: int) -> float:
        """P(N >= n); tail(0) = 1 for every variant."""
        raise NotImplementedError

    def quantile(self, u: float) -> int:
        """Inverse CDF: max{n >= 0 : u > 1 - tail(n)} for u in (0,1)."""
        kind, a, b, table = self.encode()
        return int(quantile_kernel(kind, a, b, table, u))

    def sample(self, rng: Rng) -> int:
        """One draw via inverse CDF on one uniform variate."""
        return self.quantile(rng.uniform())

    def moment(self, d: int) -> float:
        """E[N^d] for d >= 1; math.inf where the tail sum diverges.

        Uses E[N^d] = sum_{n>=1} (n^d - (n-1)^d) * tail(n); each variant
        documents its convergence decision.
        """
        raise NotImplementedError

    def is_heavy_tail(self, d: int) -> bool:
        """True iff limsup_n n * P(N^d >= n) > 0, decided per variant."""
        raise NotImplementedError

    def encode(self) -> tuple[int, float, float, np.ndarray]:
        """(kind, a, b, table) encoding consumed by the jitted kernels."""
        raise NotImplementedError

    def to_spec(self) -> dict:
        """JSON-able config form (see harness config schema)."""
        raise NotImplementedError


def _check_d(d: int) -> None:
    if d < 1:
        raise ValueError(f"moment order d must be >= 1, got {d}")


def _zeta_tail(a: float, q: float) -> float:
    """sum_{n>=q} n^-a for a > 1 and integer q >= 4096.

    Euler-Maclaurin with three correction terms; the truncation error is
    below a^5 * q^(-a-5), far under 1e-12 at the q used here.
    """
    return (
        q ** (1.0 - a) / (a - 1.0)
        + 0.5 * q ** -a
        + a / 12.0 * q ** (-a - 1.0)
        - a * (a + 1.0) * (a + 2.0) / 720.0 * q ** (-a - 3.0)
    )


@dataclass(frozen=True)
class Constant(RangeDistribution):
    """Point mass at a fixed nonnegative integer k."""

    k: int

    def __post_init__(self):
        if self.k < 0 or self.k != int(self.k):
            raise ValueError(f"Constant range must be a nonnegative integer, got {self.k}")

    def tail(self, n: int) -> float:
        return 1.0 if n <= self.k else 0.0

    def moment(self, d: int) -> float:
        _check_d(d)
        return float(self.k) ** d

    def is_heavy_tail(self, d: int) -> bool:
        _check_d(d)
        return False  # bounded support

    def encode(self):
        return KIND_CONSTANT, float(self.k), 0.0, _EMPTY_TABLE

    def to_spec(self):
        return {"kind": "constant", "k": int(self.k)}


@dataclass(frozen=True)
class BetaExp(RangeDistribution):
    """Tail P(N >= n) = 1 - exp(-beta/n) for n >= 1, tail(0) = 1.

    The n = 0 case reads beta/0 = +inf so that N is a proper nonnegative
    integer variable.  Since tail(n) ~ beta/n, every moment E[N^d] is
    infinite and the tail is heavy for every d.
    """

    beta: float

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")

    def tail(self, n: int) -> float:
        if n <= 0:
            return 1.0
        return -math.expm1(-self.beta / n)

    def moment(self, d: int) -> float:
        _check_d(d)
        # (n^d - (n-1)^d) * tail(n) >= d*(n-1)^(d-1) * beta/(2n): harmonic or worse
        return math.inf

    def is_heavy_tail(self, d: int) -> bool:
        _check_d(d)
        return True  # n * tail(n^(1/d)) -> beta * n^(1 - 1/d)

    def encode(self):
        return KIND_BETAEXP, float(self.beta), 0.0, _EMPTY_TABLE

    def to_spec(self):
        return {"kind": "betaexp", "beta": float(self.beta)}


@dataclass(frozen=True)
class ParetoTail(RangeDistribution):
    """Tail P(N >= n) = min(1, c * n**-s) for n >= 1.

    E[N^d] is finite iff s > d (the summand behaves like c*d*n^(d-1-s));
    the tail is heavy for order d iff s <= d, since
    n * P(N^d >= n) = c * n^(1 - s/d).
    """

    c: float
    s: float

    def __post_init__(self):
        if not self.c > 0 or not self.s > 0:
            raise ValueError(f"ParetoTail needs c > 0 and s > 0, got c={self.c}, s={self.s}")

    def tail(self, n: int) -> float:
        if n <= 0:
            return 1.0
        return min(1.0, self.c * float(n) ** -self.s)

    def moment(self, d: int) -> float:
        _check_d(d)
        if self.s <= d:
            return math.inf
        # partial sum to M, then the exact binomial expansion of the remainder:
        # n^d - (n-1)^d = sum_j (-1)^(d-1-j) C(d,j) n^j, so the tail is a
        # combination of Hurwitz-zeta tails with exponents s - j > 1.
        M = max(4096, int(math.ceil(self.c ** (1.0 / self.s))) + 8)
        total = 0.0
        prev_pow = 0.0
        for n in range(1, M + 1):
            cur_pow = float(n) ** d
            total += (cur_pow - prev_pow) * self.tail(n)
            prev_pow = cur_pow
        for j in range(d):
            sign = -1.0 if (d - 1 - j) % 2 else 1.0
            total += self.c * sign * math.comb(d, j) * _zeta_tail(self.s - j, M + 1)
        return total

    def is_heavy_tail(self, d: int) -> bool:
        _check_d(d)
        return self.s <= d

    def encode(self):
        return KIND_PARETOTAIL, float(self.c), float(self.s), _EMPTY_TABLE

    def to_spec(self):
        return {"kind": "paretotail", "c": float(self.c), "s": float(self.s)}


@dataclass(frozen=True)
class Geometric(RangeDistribution):
    """Tail P(N >= n) = rho**n with rho in (0, 1); all moments finite."""

    rho: float

    def __post_init__(self):
        if not 0.0 < self.rho < 1.0:
            raise ValueError(f"rho must lie in (0,1), got {self.rho}")

    def tail(self, n: int) -> float:
        if n <= 0:
            return 1.0
        return self.rho ** n

    def moment(self, d: int) -> float:
        _check_d(d)
        # geometric tail: partial sums converge geometrically
        total = 0.0
        n = 0
        prev_pow = 0.0
        tail_n = 1.0
        while True:
            n += 1
            tail_n *= self.rho
            cur_pow = float(n) ** d
            term = (cur_pow - prev_pow) * tail_n
            total += term
            prev_pow = cur_pow
            if term < 1e-16 * max(total, 1.0) and n > 8:
                return total

    def is_heavy_tail(self, d: int) -> bool:
        _check_d(d)
        return False  # geometric decay kills any polynomial factor

    def encode(self):
        return KIND_GEOMETRIC, float(self.rho), 0.0, _EMPTY_TABLE

    def to_spec(self):
        return {"kind": "geometric", "rho": float(self.rho)}


@dataclass(frozen=True)
class Empirical(RangeDistribution):
    """Finite tail table: entry n is P(N >= n); first entry 1, nonincreasing."""

    table: tuple

    def __post_init__(self):
        tbl = tuple(float(x) for x in self.table)
        if len(tbl) == 0 or tbl[0] != 1.0:
            raise ValueError("Empirical tail table must start at 1")
        for a, b in zip(tbl, tbl[1:]):
            if b > a or b < 0.0:
                raise ValueError("Empirical tail table must be nonincreasing within [0,1]")
        object.__setattr__(self, "table", tbl)
        object.__setattr__(self, "_arr", np.asarray(tbl, dtype=np.float64))

    def tail(self, n: int) -> float:
        if n <= 0:
            return 1.0
        if n < len(self.table):
            return self.table[n]
        return 0.0

    def moment(self, d: int) -> float:
        _check_d(d)
        total = 0.0
        for n in range(1, len(self.table)):
            total += (float(n) ** d - float(n - 1) ** d) * self.table[n]
        return total

    def is_heavy_tail(self, d: int) -> bool:
        _check_d(d)
        return False  # finite support

    def encode(self):
        return KIND_EMPIRICAL, 0.0, 0.0, self._arr

    def to_spec(self):
        return {"kind": "empirical", "tail": list(self.table)}


def from_spec(spec: dict) -> RangeDistribution:
    """Build a distribution from its JSON config form."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ValueError(f"distribution spec must be an object with a 'kind': {spec!r}")
    kind = spec["kind"]
    try:
        if kind == "constant":
            return Constant(k=int(spec["k"]))
        if kind == "betaexp":
            return BetaExp(beta=float(spec["beta"]))
        if kind == "paretotail":
            return ParetoTail(c=float(spec["c"]), s=float(spec["s"]))
        if kind == "geometric":
            return Geometric(rho=float(spec["rho"]))
        if kind == "empirical":
            return Empirical(table=tuple(spec["tail"]))
    except KeyError as exc:
        raise ValueError(f"distribution spec for '{kind}' is missing field {exc}") from None
    raise ValueError(f"unknown distribution kind {kind!r}")


def sample_many(dist: RangeDistribution, rng: Rng, count: int) -> np.ndarray:
    """Batch of draws, identical in law and stream position to repeated sample()."""
    kind, a, b, table = dist.encode()
    state = np.uint64(rng.state)
    out, state = _sample_many_kernel(state, kind, a, b, table, count)
    rng.set_state(int(state))
    return out


@njit(cache=True, nogil=True)
def _sample_many_kernel(state, kind, a, b, table, count):
    out = np.empty(count, dtype=np.int64)
    for i in range(count):
        state, n = sample_kernel(state, kind, a, b, table)
        out[i] = n
    return out, state
