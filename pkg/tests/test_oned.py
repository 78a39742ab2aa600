import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rangesim import BetaExp, Constant, Geometric, Rng
from rangesim.distributions import sample_many
from rangesim.oned import (
    brute_force_rightmost,
    cutting_point_prob,
    ratio_conditional_cdf,
    ratio_limit_cdf,
    run_front,
    run_front_env,
    run_front_thinned,
    run_front_thinned_env,
)

# ---------------------------------------------------------------- analytics


def test_cutting_point_prob_values():
    assert cutting_point_prob(0.7, 1) == pytest.approx(math.exp(-0.7), abs=1e-15)
    # frozen: H_10 = 2.928968253968254, exp(-1.5 * H_10)
    assert cutting_point_prob(1.5, 10) == pytest.approx(0.012357990995852866, abs=1e-12)
    probs = [cutting_point_prob(2.0, i) for i in range(1, 40)]
    assert all(b < a for a, b in zip(probs, probs[1:]))
    assert probs[-1] < probs[0] / 50


def test_ratio_limit_cdf_values():
    assert ratio_limit_cdf(-1.0, 2.0) == 0.0
    assert ratio_limit_cdf(0.0, 2.0) == 0.0
    assert ratio_limit_cdf(1.0, 1.0) == pytest.approx(0.5)
    assert ratio_limit_cdf(3.0, 2.0) == pytest.approx(0.5625)


@given(st.floats(1e-3, 1e3), st.floats(0.05, 10))
@settings(max_examples=200, deadline=None)
def test_ratio_limit_cdf_monotone(t, beta):
    assert 0.0 <= ratio_limit_cdf(t, beta) <= 1.0
    assert ratio_limit_cdf(t + 0.5, beta) >= ratio_limit_cdf(t, beta)


def test_ratio_conditional_cdf_values():
    # hand evaluations: f(1)=2 gives exp(-1/2); f(2)=3 gives exp(-(1/3+1/4))
    assert ratio_conditional_cdf(1, 1.0, 1.0) == pytest.approx(0.6065306597126334, abs=1e-12)
    assert ratio_conditional_cdf(2, 1.0, 1.0) == pytest.approx(0.5580351457700471, abs=1e-12)


def test_ratio_conditional_cdf_converges_to_limit():
    beta = 1.0
    errs = [
        abs(ratio_conditional_cdf(m, 1.0, beta) - ratio_limit_cdf(1.0, beta))
        for m in (100, 1000, 10_000)
    ]
    assert errs[0] > errs[1] > errs[2]
    # correction bound at the floor scale, verified numerically
    for t in (0.5, 1.0, 2.0):
        gap = abs(ratio_conditional_cdf(10_000, t, 1.2) - ratio_limit_cdf(t, 1.2))
        assert gap <= 2 * 1.2 / math.floor(10_000 * t + 1)


def test_log_ratio_mean_sign():
    # E[log of the limit ratio] via quadrature of the two-tail integrand
    from scipy.integrate import quad

    def elog(beta):
        val, _ = quad(
            lambda u: 1.0 - (1.0 + math.exp(-u)) ** -beta - (1.0 + math.exp(u)) ** -beta,
            0.0,
            60.0,
        )
        return val

    assert elog(0.5) < -1e-3
    assert abs(elog(1.0)) < 1e-6
    assert elog(2.0) > 1e-3


def test_cutting_prob_monte_carlo():
    # empirical cutting frequency vs the closed form, 1e5 environments
    for beta, i, seed in [(1.5, 10, 101), (2.0, 5, 102)]:
        draws = sample_many(BetaExp(beta), Rng(seed), 100_000 * i).reshape(100_000, i)
        thresholds = np.arange(i, 0, -1)  # vertex j needs N_j < i - j
        hits = np.all(draws < thresholds, axis=1)
        p = cutting_point_prob(beta, i)
        se = math.sqrt(p * (1 - p) / 100_000)
        assert abs(hits.mean() - p) <= 4 * se


# ---------------------------------------------------------------- dense-bond recursion


def test_front_constant0_dies_at_origin():
    out = run_front(Constant(0), Rng(1), step_cap=100)
    assert out.died and out.steps == 1 and out.rightmost == 0


def test_front_hand_environment():
    out = run_front_env([3, 0, 0, 0])
    assert out.died and out.steps == 2 and out.rightmost == 3


def test_front_env_examples():
    assert run_front_env([2, 0, 1, 0, 0]).rightmost == 3
    assert run_front_env([0]).rightmost == 0
    assert run_front_env(np.zeros(10, dtype=np.int64)).rightmost == 0


def test_brute_force_hand_examples():
    assert brute_force_rightmost([2, 0, 1, 0, 0]) == 3
    assert brute_force_rightmost([0, 0, 0]) == 0
    # diluted: only the length-2 bond from 0 is open
    opens = {(0, 2), (2, 3)}
    assert brute_force_rightmost([2, 5, 1, 0], bond_open=lambda i, j: (i, j) in opens) == 3


def _random_envs(count, length, seed):
    rs = np.random.RandomState(seed)
    envs = []
    for k in range(count):
        style = k % 3
        if style == 0:
            env = rs.geometric(0.12, size=length) - 1
        elif style == 1:
            env = np.minimum((1.0 / rs.uniform(1e-4, 1, size=length)).astype(np.int64), 500)
        else:
            env = rs.randint(0, 6, size=length)
        envs.append(env.astype(np.int64))
    return envs


def test_front_matches_bfs_on_100_envs():
    # exact oracle equivalence of the recursion on [0, 1e4]
    for env in _random_envs(100, 10_001, seed=2024):
        assert run_front_env(env).rightmost == brute_force_rightmost(env)


def test_front_survival_beta2_small_target():
    # survival to any target is at least 1 - sum_i exp(-2 H_i) = 0.7110
    runs, alive = 200, 0
    for i in range(runs):
        out = run_front(BetaExp(2.0), Rng(5000 + i), step_cap=10**9, rightmost_target=10_000)
        alive += not out.died
    assert alive / runs >= 0.711 - 4 * math.sqrt(0.711 * 0.289 / runs)


def test_front_collects_ratio_samples():
    merged = []
    for i in range(400):
        out = run_front(
            BetaExp(1.5),
            Rng(900 + i),
            step_cap=10**9,
            rightmost_target=200_000,
            collect_w=True,
            w_min_m=100,
        )
        if out.w_samples is not None and len(out.w_samples):
            merged.append(out.w_samples)
    rows = np.vstack(merged)
    assert np.all(rows[:, 1] >= 100)  # conditioning width respected
    assert np.all(rows[:, 2] >= 0.0)
    assert len(rows) > 500


# ---------------------------------------------------------------- diluted-bond recursion


def thinned_reference(env, bonds, step_cap=10**9):
    """Independent restatement of the base/reach recursion for cross-checks."""

    def rng_range(i):
        return int(env[i]) if i < len(env) else 0

    def is_open(src, tgt):
        k = tgt - src - 1
        if src < len(bonds) and 0 <= k < len(bonds[src]):
            return bool(bonds[src][k])
        return False

    j, u = 0, rng_range(0)
    steps = 0
    cuts = []
    if u <= j:
        return "died", 1, 0, ()
    while True:
        best, best_i = -1, -1
        for i in range(j + 1, u + 1):
            v = i + rng_range(i) if is_open(j, i) else i
            if v > best:
                best, best_i = v, i
        steps += 1
        if best > u:
            j, u = best_i, best
        else:
            cuts.append(u)
            nu = rng_range(u)
            if nu == 0:
                return "died", steps, u, tuple(cuts)
            j, u = u, u + nu
        if steps >= step_cap:
            return "alive", steps, u, tuple(cuts)


def test_thinned_constant0_dies_immediately():
    out = run_front_thinned(0.5, Constant(0), Rng(3), step_cap=100)
    assert out.died and out.rightmost == 0


def test_thinned_hand_trace():
    # base 0 reaches 2; both bonds miss the forward ranges, so 2 is a cutting
    # point; its own range 3 restarts the chain, which then stalls at 5 with
    # range 0 and the run dies.
    env = np.array([2, 0, 3, 1, 0, 0], dtype=np.int64)
    bonds = np.zeros((6, 6), dtype=np.uint8)
    bonds[0, 0] = 1  # (0,1) open: reaches 1 + 0
    # (0,2) closed; from 2: (2,3) open, (2,4) open, (2,5) closed
    bonds[2, 0] = 1
    bonds[2, 1] = 1
    out = run_front_thinned_env(env, bonds)
    assert out.died
    assert out.rightmost == 5
    assert out.cutting_points == (2, 5)
    assert thinned_reference(env, bonds) == ("died", out.steps, 5, (2, 5))


def test_thinned_env_matches_reference_on_random_cases():
    rs = np.random.RandomState(7)
    for case in range(60):
        n = rs.randint(3, 60)
        env = rs.randint(0, 7, size=n).astype(np.int64)
        bonds = (rs.uniform(size=(n, 8)) < rs.uniform(0.2, 0.9)).astype(np.uint8)
        out = run_front_thinned_env(env, bonds, step_cap=10_000)
        ref = thinned_reference(env, bonds, step_cap=10_000)
        assert (out.verdict, out.steps, out.rightmost, out.cutting_points) == ref, case


def test_thinned_all_bonds_open_equals_dense_recursion():
    # with every bond open the diluted chain must die at the same rightmost
    # as the dense recursion and the BFS oracle
    for env in _random_envs(100, 2_000, seed=99):
        kmax = int(max(1, env.max()))
        bonds = np.ones((len(env), kmax), dtype=np.uint8)
        thin = run_front_thinned_env(env, bonds)
        dense = run_front_env(env)
        assert thin.died and dense.died
        assert thin.rightmost == dense.rightmost == brute_force_rightmost(env)
        # at p=1 every cut is immediately fatal: a single recorded cut
        assert len(thin.cutting_points) <= 1


def test_thinned_stream_mode_runs():
    out = run_front_thinned(
        0.6, BetaExp(3.0), Rng(17), step_cap=10**9, rightmost_target=50_000
    )
    assert out.verdict in ("died", "alive")
    if out.died:
        assert out.rightmost < 50_000
    else:
        assert out.rightmost >= 50_000


def test_thinned_stream_deterministic():
    a = run_front_thinned(0.6, BetaExp(3.0), Rng(5), step_cap=10**6, rightmost_target=10_000)
    b = run_front_thinned(0.6, BetaExp(3.0), Rng(5), step_cap=10**6, rightmost_target=10_000)
    assert (a.verdict, a.steps, a.rightmost, a.cutting_points) == (
        b.verdict,
        b.steps,
        b.rightmost,
        b.cutting_points,
    )


def test_front_validation():
    with pytest.raises(ValueError):
        run_front(Constant(1), Rng(1), step_cap=0)
    with pytest.raises(ValueError):
        run_front_thinned(0.0, Constant(1), Rng(1), step_cap=5)
    with pytest.raises(ValueError):
        cutting_point_prob(1.0, 0)
    with pytest.raises(ValueError):
        ratio_conditional_cdf(0, 1.0, 1.0)
    with pytest.raises(ValueError):
        ratio_conditional_cdf(5, 0.0, 1.0)
