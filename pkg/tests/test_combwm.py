import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from oracles import FOUR_FAMILY, four_sets, zdds
from zddbandit import dp
from zddbandit.builder import reduce_from_family
from zddbandit.combwm import (CombWM, bound_expected, bound_highprob, estimate_loss, init, log_checkpoints,
                              mixture_cpm, run, sample_action, schedule, update_weights)
from zddbandit.zdd import EmptyFamilyError, Zdd, enumerate_family, min_additive_cost

W2 = np.log([2.0, 1, 1, 1, 1])


def test_schedule_examples():
    assert schedule(1, 3, 1.0, 1.0)[0] == 0.5
    assert schedule(4, 2, 1.0, 1.0)[0] == 0.25
    assert schedule(4, 2, 0.5, math.sqrt(3))[1] == pytest.approx(0.5 * 0.5 / (2 * 3))
    with pytest.raises(ValueError):
        schedule(0, 3, 1.0, 1.0)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 10**9), st.sampled_from([2, 3]), st.floats(1e-3, 10), st.floats(1, 20))
def test_schedule_ranges(t, alpha, lam, L):
    g, e = schedule(t, alpha, lam, L)
    g2, e2 = schedule(t + 1, alpha, lam, L)
    assert 0 < g <= 0.5 and e > 0
    assert g2 <= g and e2 <= e


def test_init_four_sets():
    s = init(four_sets(), 3)
    assert s.L == pytest.approx(math.sqrt(3)) and s.L2 == 3 and s.K == 4 and s.t == 1
    assert np.array_equal(s.log_w, np.zeros(5))
    U = oracles.uniform_cpm(FOUR_FAMILY, 5)
    assert s.lam == pytest.approx(oracles.numpy_lambda(U), abs=1e-12)
    assert np.allclose(s.uniform_cpm, U, atol=1e-15)


def test_init_singleton():
    s = init(reduce_from_family([(1,)], 3))
    assert s.L == 1 and s.lam == pytest.approx(1.0)
    expect = np.zeros((3, 3))
    expect[0, 0] = 1
    assert np.array_equal(s.uniform_cpm, expect)


def test_init_rejects_degenerate():
    with pytest.raises(EmptyFamilyError):
        init(Zdd.base(3))
    with pytest.raises(EmptyFamilyError):
        init(Zdd.empty(3))


def frequencies(state, gamma, n, seed):
    rng = np.random.default_rng(seed)
    counts = {}
    for _ in range(n):
        a = sample_action(state, rng, gamma)
        counts[a] = counts.get(a, 0) + 1
    return {k: v / n for k, v in counts.items()}


def test_mixture_gamma_one_is_uniform():
    s = init(four_sets())
    s.log_w = np.array([5.0, -3, 0, 2, 1])
    f = frequencies(s, 1.0, 40000, 0)
    assert set(f) == set(FOUR_FAMILY)
    assert oracles.tv([f[x] for x in FOUR_FAMILY], [0.25] * 4) <= 0.01


def test_mixture_uniform_weights_is_uniform():
    s = init(four_sets())
    f = frequencies(s, 0.3, 40000, 1)
    assert oracles.tv([f[x] for x in FOUR_FAMILY], [0.25] * 4) <= 0.01


def test_mixture_example():
    s = init(four_sets())
    s.log_w = W2.copy()
    f = frequencies(s, 0.5, 10**5, 2)
    exact = {(1, 4): 7 / 24, (2, 5): 5 / 24, (1, 3, 5): 7 / 24, (2, 3, 4): 5 / 24}
    assert abs(f[(1, 4)] - 7 / 24) < 0.005
    assert oracles.tv([f[x] for x in exact], list(exact.values())) <= 0.01


def test_mixture_cpm_examples():
    s = init(four_sets())
    for g in (0.1, 0.5, 0.9):
        assert np.allclose(mixture_cpm(s, g), s.uniform_cpm, atol=1e-15)
    s.log_w = W2.copy()
    assert mixture_cpm(s, 0.5)[0, 0] == pytest.approx(7 / 12)
    brute = 0.5 * oracles.cpm(FOUR_FAMILY, 5, W2) + 0.5 * oracles.uniform_cpm(FOUR_FAMILY, 5)
    assert np.allclose(mixture_cpm(s, 0.5), brute, atol=1e-14)
    single = init(reduce_from_family([(2, 3)], 4))
    single.log_w = np.array([1.0, -2, 3, 0])
    expect = np.zeros((4, 4))
    expect[1:3, 1:3] = 1
    assert np.allclose(mixture_cpm(single, 0.37), expect, atol=1e-15)


def test_estimate_examples():
    assert np.array_equal(estimate_loss(np.eye(3), 0.0, (1, 2)), np.zeros(3))
    s = init(reduce_from_family([(1,)], 3))
    from zddbandit.linalg import pinv_symmetric
    est = estimate_loss(pinv_symmetric(mixture_cpm(s)), 1.0, (1,))
    assert np.allclose(est, [1, 0, 0], atol=1e-14)
    f = init(four_sets())
    P = mixture_cpm(f)
    Pb = oracles.uniform_cpm(FOUR_FAMILY, 5)
    est = estimate_loss(pinv_symmetric(P), 1.0, (1, 4))
    assert np.allclose(est, oracles.numpy_pinv(Pb) @ np.array([1, 0, 0, 1, 0.0]), atol=1e-12)


def test_estimate_dimension_and_warning(caplog):
    with pytest.raises(ValueError):
        estimate_loss(np.eye(3), 1.0, (4,))
    with caplog.at_level(logging.WARNING):
        estimate_loss(np.eye(3), 2.0, (1,))
    assert "violates" in caplog.text


def test_update_examples():
    s = init(four_sets(), fixed=(0.5, 0.1))
    s2 = update_weights(s, np.ones(5))
    assert np.allclose(np.exp(s2.log_w), math.exp(-0.1))
    assert s2.t == 2 and s.t == 1
    s = init(four_sets(), 3)
    s.log_w = np.array([-1.0, 0.5, 2, 0, -3])
    s.t = 7
    s2 = update_weights(s, np.zeros(5))
    ratio = s.rates(8)[1] / s.rates(7)[1]
    assert np.allclose(s2.log_w, ratio * s.log_w, rtol=0, atol=1e-15)
    with pytest.raises(ValueError):
        update_weights(s, np.zeros(4))


def test_weight_history_identity():
    zdd = four_sets()
    p = CombWM(zdd, 3, np.random.default_rng(0))
    adv_rng = np.random.default_rng(1)
    total = np.zeros(5)
    for _ in range(1000):
        arms = p.act()
        ell = np.where(adv_rng.random(5) < 0.5, 0.2, -0.2)
        p.feedback(float(ell[[i - 1 for i in arms]].sum()))
        total += p.last.loss_estimate
    eta_next = p.state.rates()[1]
    assert p.state.t == 1001
    assert np.abs(p.state.log_w + eta_next * total).max() <= 1e-9


def test_fixed_rate_first_round_matches():
    zdd = four_sets()
    s = init(zdd, 3)
    g1, e1 = s.rates(1)
    a = CombWM(zdd, 3, np.random.default_rng(4))
    b = CombWM(zdd, 3, np.random.default_rng(4), fixed=(g1, e1))
    assert a.act() == b.act()
    a.feedback(0.4)
    b.feedback(0.4)
    assert (a.last.gamma, a.last.eta) == (b.last.gamma, b.last.eta)
    assert np.array_equal(a.last.P, b.last.P)
    assert np.array_equal(a.last.loss_estimate, b.last.loss_estimate)
    # from round 2 on only the fixed variant keeps its rates
    assert b.state.rates() == (g1, e1) and a.state.rates() != (g1, e1)


def test_feedback_requires_act():
    p = CombWM(four_sets(), 3, np.random.default_rng(0))
    with pytest.raises(RuntimeError):
        p.feedback(0.0)


def test_policy_is_deterministic():
    def trace(seed):
        p = CombWM(four_sets(), 2, np.random.default_rng(seed))
        out = []
        for t in range(50):
            out.append(p.act())
            p.feedback(0.1 * (t % 3) - 0.1)
        return out, p.state.log_w
    (a, wa), (b, wb) = trace(3), trace(3)
    assert a == b and np.array_equal(wa, wb)


def estimate_rounds(zdd, alpha, rounds, seed):
    fam = enumerate_family(zdd)
    X = oracles.indicator(fam, zdd.d)
    p = CombWM(zdd, alpha, np.random.default_rng(seed))
    adv = np.random.default_rng(seed + 1)
    for _ in range(rounds):
        arms = p.act()
        ell = np.where(adv.random(zdd.d) < 0.5, 1.0, -1.0) / zdd.d
        p.feedback(float(ell[[i - 1 for i in arms]].sum()))
        yield p, X


def test_estimate_properties_four_sets():
    st0 = init(four_sets())
    for p, X in estimate_rounds(four_sets(), 3, 100, 5):
        info = p.last
        bound = st0.L2 / (info.gamma * st0.lam)
        assert np.abs(info.P @ info.P_pinv @ X.T - X.T).max() <= 1e-8
        assert np.abs(X @ info.loss_estimate).max() <= bound + 1e-6
        assert np.linalg.eigvalsh(info.P_pinv).max() <= 1 / (info.gamma * st0.lam) + 1e-6
        est = info.loss_estimate
        assert np.allclose(info.P @ info.P_pinv @ est, est, atol=1e-9)


@settings(max_examples=25, deadline=None)
@given(zdds(max_d=6, max_size=12), st.integers(0, 1000))
def test_estimate_properties_random_families(pair, seed):
    z, fam = pair
    if max(len(s) for s in fam) == 0:
        return
    st0 = init(z)
    for p, X in estimate_rounds(z, 2, 15, seed):
        info = p.last
        assert np.abs(info.P @ info.P_pinv @ X.T - X.T).max() <= 1e-8
        assert np.abs(X @ info.loss_estimate).max() <= st0.L2 / (info.gamma * st0.lam) + 1e-6


def mc_unbiased(state, ell, n, seed):
    """Monte Carlo mean and standard error of est^T 1_X for every member X."""
    zdd = state.zdd
    fam = enumerate_family(zdd)
    X = oracles.indicator(fam, zdd.d)
    gamma = state.rates()[0]
    P = mixture_cpm(state, gamma)
    Pp = oracles.numpy_pinv(P)
    rng = np.random.default_rng(seed)
    B = dp.backward_weights(zdd, state.log_w)
    Bu = dp.backward_weights(zdd, np.zeros(zdd.d))
    pick_u = rng.random(n) < gamma
    draws = dp.draw_many(zdd, state.log_w, B, n, rng).astype(float)
    unif = dp.draw_many(zdd, np.zeros(zdd.d), Bu, n, rng).astype(float)
    draws[pick_u] = unif[pick_u]
    c = draws @ ell
    samples = (c[:, None] * draws) @ Pp @ X.T  # n x |S|
    return samples.mean(axis=0), samples.std(axis=0, ddof=1) / math.sqrt(n), X @ ell


def test_unbiasedness_four_sets():
    s = init(four_sets())
    s.log_w = np.array([0.4, -0.7, 0.1, 0.9, -0.2])
    s.t = 9
    ell = np.array([0.2, -0.2, 0.2, 0.2, -0.2])
    mean, se, truth = mc_unbiased(s, ell, 2 * 10**5, 3)
    assert np.all(np.abs(mean - truth) <= 4 * se)


@settings(max_examples=50, deadline=None)
@given(zdds(max_d=6, max_size=15), st.data())
def test_argmin_invariant_under_positive_scaling(pair, data):
    z, fam = pair
    ell = np.array(data.draw(st.lists(st.integers(-4, 4), min_size=z.d, max_size=z.d)), dtype=float)
    c = data.draw(st.sampled_from([0.5, 2.0, 3.0, 7.25]))

    def argmins(vec):
        vals = {s: sum(vec[i - 1] for i in s) for s in fam}
        m = min(vals.values())
        return {s for s, v in vals.items() if v == m}

    v1, a1 = min_additive_cost(z, ell)
    v2, a2 = min_additive_cost(z, c * ell)
    assert v2 == c * v1
    assert argmins(ell) == argmins(c * ell)
    assert a1 in argmins(ell) and a2 in argmins(c * ell)


def test_run_zero_environment():
    tr = run(four_sets(), 3, lambda t: np.zeros(5), 200, np.random.default_rng(0))
    assert np.all(tr.regret == 0) and np.all(tr.costs == 0)


def test_run_singleton_family():
    rng = np.random.default_rng(1)
    tr = run(reduce_from_family([(1, 2)], 3), 3, lambda t: rng.uniform(-0.3, 0.3, 3), 200,
             np.random.default_rng(0))
    assert np.allclose(tr.regret, 0, atol=1e-12)


def test_run_regret_recomputed_from_history():
    rng = np.random.default_rng(2)
    tr = run(four_sets(), 2, lambda t: np.where(rng.random(5) < 0.4, 0.2, -0.2), 300, np.random.default_rng(3),
             keep_losses=True)
    cum = np.cumsum(tr.losses, axis=0)
    X = oracles.indicator(FOUR_FAMILY, 5)
    for j, t in enumerate(tr.logged):
        best = (X @ cum[t - 1]).min()
        assert tr.regret[j] == pytest.approx(tr.cum_costs[t - 1] - best, abs=1e-9)
    costs = np.array([tr.losses[t][[i - 1 for i in a]].sum() for t, a in enumerate(tr.arms)])
    assert np.allclose(costs, tr.costs, atol=1e-12)


def test_log_checkpoints():
    assert np.array_equal(log_checkpoints(5), [1, 2, 3, 4, 5])
    pts = log_checkpoints(10**5)
    assert pts[0] == 1 and pts[-1] == 10**5 and 1000 in pts and np.all(np.diff(pts) > 0)
    assert 123457 in log_checkpoints(123457)


def test_bound_examples():
    T = 1e4
    assert bound_expected(1, 1, 1, math.e, T) == pytest.approx((2 + (math.e - 2) + 2) * 100)
    assert bound_expected(1, 1, 1, math.e, 1) == pytest.approx(4.718281828, abs=1e-9)
    assert bound_expected(3, 0.5, 2, 1, T) == pytest.approx(((math.e - 2) * 3 * 0.5 / 4 + 2) * 100)
    coef = 3 * (math.e - 2) / 4 + 1.5 + math.sqrt(7)
    K = 5
    assert bound_highprob(1, 1, 1, K, (K + 2) / math.e, T) == pytest.approx(coef * T ** (2 / 3))
    assert bound_highprob(1, 1, 1, K, (K + 2) / math.e, 1) == pytest.approx(coef)


def test_bounds_four_sets_recomputed():
    s = init(four_sets())
    lam = oracles.numpy_lambda(oracles.uniform_cpm(FOUR_FAMILY, 5))
    T, delta, d, K, L2 = 1e4, 0.05, 5, 4, 3.0
    hp = (3 * d * (math.e - 2) * lam / (4 * L2) + 1.5 + math.sqrt(L2 * 7 / lam * math.log((K + 2) / delta))) * T ** (2 / 3)
    ex = (2 * L2 * math.log(K) / lam + (math.e - 2) * d * lam / L2 + 2) * math.sqrt(T)
    assert bound_highprob(s.d, s.lam, s.L, s.K, delta, T) == pytest.approx(hp, rel=1e-12)
    assert bound_expected(s.d, s.lam, s.L, s.K, T) == pytest.approx(ex, rel=1e-12)


def test_bounds_reject_bad_input():
    with pytest.raises(ValueError):
        bound_highprob(5, 0.2, 1.0, 4, 0.0, 10)
    with pytest.raises(ValueError):
        bound_expected(5, 0.0, 1.0, 4, 10)
