import math

import numpy as np
import pytest
from scipy import stats

import isomix as im
from isomix.errors import InvalidArgument
from isomix.targets import TargetSpec


def flat_target(d):
    return TargetSpec(d=d, potential=lambda x: 0.0, gradient=lambda x: np.zeros(d), m=0.0, L=1.0,
                      mode=np.zeros(d), batch_potential=lambda xs: np.zeros(len(xs)))


# --------------------------------------------------------------------------
# single steps


def test_rwm_constant_potential_always_accepts():
    t = flat_target(3)
    rng = im.CounterRNG(0)
    assert all(im.rwm_step(np.zeros(3), t, 5.0, rng).accepted for _ in range(200))
    assert rng.position == 200 * 4


def test_rwm_downhill_always_accepts():
    t = im.gaussian_target(2, 1.0)
    rng = im.CounterRNG(1)
    x = np.array([5.0, 5.0])
    for _ in range(200):
        step = im.rwm_step(x, t, 0.01, rng)
        if step.log_ratio > 0:
            assert step.accepted


def test_detailed_balance_identity():
    t = im.diagonal_gaussian_target([1.0, 3.0])
    rng = np.random.default_rng(2)
    for _ in range(1000):
        x, y = rng.normal(size=2) * 2, rng.normal(size=2) * 2
        px, py = math.exp(-t.potential(x)), math.exp(-t.potential(y))
        lhs = px * min(1.0, py / px)
        rhs = py * min(1.0, px / py)
        assert lhs == pytest.approx(rhs, rel=1e-15)


def test_nonfinite_ratio_rejects():
    t = TargetSpec(d=1, potential=lambda x: math.inf if x[0] > 0 else 0.5 * x[0] ** 2,
                   gradient=lambda x: x, m=1.0, L=1.0, mode=np.zeros(1))
    rng = im.CounterRNG(3)
    for _ in range(100):
        step = im.rwm_step(np.array([-0.1]), t, 1.0, rng)
        assert step.x[0] <= 0


def test_pcn_step_free_and_downhill():
    free = im.pcn_quadratic_target([1.0, 2.0], 0.0)
    rng = im.CounterRNG(4)
    assert all(im.pcn_step(np.ones(2), free, 0.7, rng).accepted for _ in range(200))
    quad = im.pcn_quadratic_target([1.0, 2.0], 1.0)
    for _ in range(200):
        s = im.pcn_step(np.array([3.0, -3.0]), quad, 0.7, rng)
        if s.log_ratio > 0:
            assert s.accepted
    with pytest.raises(InvalidArgument):
        im.pcn_step(np.ones(2), free, 1.0, rng)


def test_pcn_proposal_preserves_reference():
    cov = np.array([[1.0, 0.5], [0.5, 2.0]])
    free = im.pcn_quadratic_target(cov, 0.0)
    n = 100_000
    xs = im.gaussian_sample(np.zeros(2), im.CounterRNG(5), cov=cov, size=n)
    w = im.kernel_step_batch(xs, free, im.KernelConfig("pcn", rho=0.6), im.CounterRNG(6)).y
    emp = np.cov(w.T)
    # standard error of a sample covariance entry: sqrt((C_ii C_jj + C_ij^2) / n)
    se = np.sqrt((np.outer(np.diag(cov), np.diag(cov)) + cov ** 2) / n)
    assert np.all(np.abs(emp - cov) <= 3 * se)


def test_batch_row_matches_single_step():
    t = im.gaussian_target(3, 1.0)
    xs = np.random.default_rng(7).normal(size=(5, 3))
    cfg = im.KernelConfig("rwm", sigma=0.8)
    batch = im.kernel_step_batch(xs, t, cfg, im.CounterRNG(8))
    for i in range(5):
        s = im.rwm_step(xs[i], t, 0.8, im.CounterRNG(8, 0, i * 4))
        assert np.array_equal(s.x, batch.y[i]) and s.accepted == batch.accepted[i]


def test_kernel_config_validation():
    with pytest.raises(InvalidArgument):
        im.KernelConfig("hmc", sigma=1.0)
    with pytest.raises(InvalidArgument):
        im.KernelConfig("rwm", rho=0.5)
    with pytest.raises(InvalidArgument):
        im.KernelConfig("rwm")
    with pytest.raises(InvalidArgument):
        im.KernelConfig("rwm", sigma=1.0, varsigma=1.0)
    with pytest.raises(InvalidArgument):
        im.KernelConfig("pcn", rho=0.6, eta=0.6)
    cfg = im.KernelConfig("pcn", eta=0.6)
    assert cfg.rho == pytest.approx(0.8)
    assert im.KernelConfig("rwm", varsigma=2.0).resolve(im.gaussian_target(4, 1.0)).sigma == 1.0
    with pytest.raises(InvalidArgument):
        im.KernelConfig("pcn", varsigma=5.0).resolve(im.pcn_quadratic_target([1.0], 1.0))


# --------------------------------------------------------------------------
# chains


def test_chain_forced_rejection_keeps_init():
    t = im.gaussian_target(2, 1e-4)  # very steep potential
    init = np.array([50.0, -50.0])
    stats_ = im.run_chain(im.KernelConfig("rwm", sigma=1e4), t, init, 1, seed=0)
    assert stats_.n_accepted == 0 and np.array_equal(stats_.final_state, init)


def test_chain_determinism():
    t = im.gaussian_target(4, 1.0)
    cfg = im.KernelConfig("rwm", varsigma=1.0)
    f = [im.coordinate(0), im.linear(np.ones(4))]
    a = im.run_chain(cfg, t, im.mode_gaussian_init(t), 5000, seed=11, functionals=f, record_every=7)
    b = im.run_chain(cfg, t, im.mode_gaussian_init(t), 5000, seed=11, functionals=f, record_every=7)
    assert a.n_accepted == b.n_accepted
    assert np.array_equal(a.functional_sums, b.functional_sums)
    assert np.array_equal(a.final_state, b.final_state)
    assert np.array_equal(a.trajectory, b.trajectory)


def test_chain_split_and_compose():
    t = im.gaussian_target(3, 1.0)
    cfg = im.KernelConfig("rwm", varsigma=1.0)
    f = [im.coordinate(1)]
    whole = im.run_chain(cfg, t, np.zeros(3), 6000, seed=5, functionals=f)
    first = im.run_chain(cfg, t, np.zeros(3), 2500, seed=5, functionals=f)
    second = im.run_chain(cfg, t, first.final_state, 3500, seed=5, functionals=f, start_step=2500)
    joined = first.merge(second)
    assert joined.n_accepted == whole.n_accepted
    assert np.array_equal(joined.final_state, whole.final_state)
    # sums of the same terms, accumulated in a different order
    assert np.allclose(joined.functional_sums, whole.functional_sums, rtol=1e-12, atol=1e-9)
    with pytest.raises(InvalidArgument):
        second.merge(first)


def test_chain_matches_stepwise_replay():
    t = im.gaussian_target(2, 1.0)
    chain = im.run_chain(im.KernelConfig("rwm", sigma=0.9), t, np.zeros(2), 300, seed=3)
    rng = im.CounterRNG(3)
    x = np.zeros(2)
    acc = 0
    for _ in range(300):
        s = im.rwm_step(x, t, 0.9, rng)
        x, acc = s.x, acc + s.accepted
    assert acc == chain.n_accepted and np.array_equal(x, chain.final_state)


def test_chain_acceptance_floor_d10():
    t = im.gaussian_target(10, 1.0)
    n = 100_000
    s = im.run_chain(im.KernelConfig("rwm", varsigma=1.0), t, lambda r: t.sample(r, 1)[0], n, seed=1)
    p = s.acceptance_rate
    assert p >= 0.3032653 - 3 * math.sqrt(p * (1 - p) / n)


def test_chain_functional_sums():
    t = im.gaussian_target(1, 1.0)
    s = im.run_chain(im.KernelConfig("rwm", sigma=1.0), t, np.zeros(1), 50, seed=2,
                     functionals=[im.coordinate(0)], record_every=1)
    vals = np.concatenate([[0.0], s.trajectory[:, 1]])
    before, after = vals[:-1], vals[1:]
    assert s.functional_sums[0] == pytest.approx(
        [before.sum(), (before ** 2).sum(), (before * after).sum(), ((after - before) ** 2).sum()])
    assert s.trajectory[:, 2].sum() == s.n_accepted
    d = s.to_dict()
    assert d["n_steps"] == 50 and len(d["final_state"]) == 1


def test_pcn_chain_without_potential_accepts_everything():
    t = im.pcn_quadratic_target(np.linspace(1, 3, 5), 0.0)
    s = im.run_chain(im.KernelConfig("pcn", rho=0.5), t, np.zeros(5), 20_000, seed=4)
    assert s.n_accepted == 20_000


def test_chain_kernel_target_mismatch():
    with pytest.raises(InvalidArgument):
        im.run_chain(im.KernelConfig("rwm", sigma=1.0), im.pcn_quadratic_target([1.0], 1.0),
                     np.zeros(1), 10, seed=0)
    with pytest.raises(InvalidArgument):
        im.run_chain(im.KernelConfig("pcn", rho=0.5), im.gaussian_target(1, 1.0),
                     np.zeros(1), 10, seed=0)
    with pytest.raises(InvalidArgument):
        im.run_chain(im.KernelConfig("rwm", sigma=1.0), im.gaussian_target(2, 1.0),
                     np.zeros(3), 10, seed=0)


# --------------------------------------------------------------------------
# initialisers


def test_accepted_proposal_flat_returns_first_proposal():
    t = flat_target(2)
    rng = im.CounterRNG(9)
    got = im.accepted_proposal_init(np.ones(2), t, 0.5, rng)
    z, _ = im.CounterRNG(9).step_block(1, 2)
    assert got.trials == 1 and np.array_equal(got.x, np.ones(2) + 0.5 * z[0])
    assert rng.position == 3


def test_accepted_proposal_stream_position():
    t = im.gaussian_target(2, 1.0)
    rng = im.CounterRNG(10)
    got = im.accepted_proposal_init(np.full(2, 4.0), t, 3.0, rng)
    assert rng.position == got.trials * 3


def test_accepted_proposal_mean_trials():
    t = im.gaussian_target(6, 1.0)
    sigma = im.rwm_sigma(1.0, 6, 1.0)
    rng = im.CounterRNG(12)
    trials = np.array([im.accepted_proposal_init(np.full(6, 0.5), t, sigma, rng).trials
                       for _ in range(5000)], dtype=float)
    assert trials.mean() <= 1 / 0.3032653 + 3 * trials.std(ddof=1) / math.sqrt(trials.size)


def test_accepted_proposal_law_d1():
    # P^alpha(x0, dy) ∝ N(y; x0, s^2) min(1, pi(y)/pi(x0)) for pi = N(0, 1)
    x0, s = 1.5, 1.2
    t = im.gaussian_target(1, 1.0)
    rng = im.CounterRNG(13)
    out = np.array([im.accepted_proposal_init([x0], t, s, rng).x[0] for _ in range(10_000)])

    def dens(y):
        return stats.norm.pdf(y, x0, s) * np.minimum(1.0, np.exp(0.5 * (x0 ** 2 - y ** 2)))

    lo, hi = x0 - 12 * s, x0 + 12 * s
    total = im.adaptive_quadrature(dens, lo, hi, breakpoints=(-x0, x0))

    def cdf(y):
        return np.array([im.adaptive_quadrature(dens, lo, v, breakpoints=[b for b in (-x0, x0)
                                                                        if lo < b < v]) / total
                         if v > lo else 0.0 for v in np.atleast_1d(y)])

    assert stats.kstest(out, cdf).statistic <= 0.02

    # two-sample check against a direct rejection construction
    g = np.random.default_rng(14)
    y = g.normal(x0, s, 200_000)
    keep = g.uniform(size=y.size) < np.minimum(1.0, np.exp(0.5 * (x0 ** 2 - y ** 2)))
    assert stats.ks_2samp(out, y[keep]).statistic <= 0.02


def test_accepted_proposal_failure():
    t = im.gaussian_target(50, 1e-3)
    with pytest.raises(im.NumericalFailure):
        im.accepted_proposal_init(np.zeros(50), t, 100.0, im.CounterRNG(0), max_trials=100)
    with pytest.raises(InvalidArgument):
        im.accepted_proposal_init(np.zeros(50), t, 0.0, im.CounterRNG(0))


def test_gaussian_sample():
    mean = np.array([1.0, -1.0])
    assert np.array_equal(im.gaussian_sample(mean, im.CounterRNG(0), var=0.0), mean)
    cov = np.array([[2.0, 0.6], [0.6, 1.0]])
    n = 100_000
    xs = im.gaussian_sample(mean, im.CounterRNG(1), cov=cov, size=n)
    se_mean = np.sqrt(np.diag(cov) / n)
    assert np.all(np.abs(xs.mean(axis=0) - mean) <= 3 * se_mean)
    se_cov = np.sqrt((np.outer(np.diag(cov), np.diag(cov)) + cov ** 2) / n)
    assert np.all(np.abs(np.cov(xs.T) - cov) <= 3 * se_cov)
    chol = np.linalg.cholesky(cov)
    same = im.gaussian_sample(mean, im.CounterRNG(1), chol=chol, size=n)
    assert np.allclose(same, xs)
    with pytest.raises(InvalidArgument):
        im.gaussian_sample(mean, im.CounterRNG(1), var=1.0, cov=cov)
    with pytest.raises(InvalidArgument):
        im.gaussian_sample(mean, im.CounterRNG(1), cov=[[1.0, 2.0], [2.0, 1.0]])


def test_pcn_init_cov_and_warm_bound():
    c = np.array([0.5, 1.0, 4.0])
    t = im.pcn_quadratic_target(c, 2.0)
    assert np.allclose(np.diag(im.pcn_init_cov(t)), c / (1 + 2.0 * c))
    det_root = math.sqrt(np.prod(1 + 2.0 * c))
    assert 1.0 <= det_root <= im.warm_start_u0("pcn-gaussian", L=2.0, trace_c=c.sum())
    x = im.pcn_gaussian_init(t)(im.CounterRNG(0))
    assert x.shape == (3,)
