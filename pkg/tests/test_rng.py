import numpy as np
import pytest
from scipy import stats

from isomix import CounterRNG
from isomix.rng import as_rng


def test_positioning_is_exact():
    a = CounterRNG(5)
    whole = a.raw(11)
    b = CounterRNG(5)
    parts = np.concatenate([b.raw(3), b.raw(1), b.raw(7)])
    assert np.array_equal(whole, parts)
    assert np.array_equal(CounterRNG(5).jump(6).raw(5), whole[6:])


def test_step_block_consumes_d_plus_one_words():
    rng = CounterRNG(1)
    z, u = rng.step_block(4, 3)
    assert z.shape == (4, 3) and u.shape == (4,)
    assert rng.position == 16
    # a row equals the matching single-step call
    z2, u2 = CounterRNG(1, 0, 2 * 4).step_block(1, 3)
    assert np.array_equal(z2[0], z[2]) and u2[0] == u[2]


def test_uniform_open_interval_and_distribution():
    u = CounterRNG(3).uniform(200_000)
    assert u.min() > 0.0 and u.max() < 1.0
    assert stats.kstest(u, "uniform").pvalue > 1e-3


def test_normal_distribution():
    z = CounterRNG(4).normal(200_000)
    assert stats.kstest(z, "norm").pvalue > 1e-3


def test_split_streams_differ_and_are_stable():
    root = CounterRNG(9)
    a, b = root.split(1), root.split(2)
    assert a.stream != b.stream
    assert np.array_equal(a.raw(4), CounterRNG(9).split(1).raw(4))
    assert not np.array_equal(CounterRNG(9).split(1).raw(4), CounterRNG(9).split(2).raw(4))
    assert len(root.spawn(3)) == 3


def test_as_rng():
    r = CounterRNG(1)
    assert as_rng(r) is r
    assert as_rng(7).seed == 7
    with pytest.raises(ValueError):
        as_rng(None)
    with pytest.raises(ValueError):
        CounterRNG(1, position=-1)
