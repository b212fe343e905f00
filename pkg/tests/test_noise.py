import numpy as np
import pytest

from mflangevin.noise import NoiseStream


def test_deterministic_given_seed():
    a = NoiseStream(7, run=0, n_agents=3).normal_block(5)
    b = NoiseStream(7, run=0, n_agents=3).normal_block(5)
    assert np.array_equal(a, b)


def test_draw_granularity_transparent():
    # one call for 10 normals == two calls for 5 each, bitwise
    one = NoiseStream(7, run=0, n_agents=1).agent_normal(0, 10)
    s = NoiseStream(7, run=0, n_agents=1)
    two = np.concatenate([s.agent_normal(0, 5), s.agent_normal(0, 5)])
    assert np.array_equal(one, two)


def test_agents_and_runs_disjoint():
    s = NoiseStream(7, run=0, n_agents=2)
    a0 = s.agent_normal(0, 100)
    a1 = s.agent_normal(1, 100)
    assert not np.array_equal(a0, a1)
    r1 = NoiseStream(7, run=1, n_agents=2).agent_normal(0, 100)
    assert not np.array_equal(a0, r1)
    init = NoiseStream.init_generator(7, 0).standard_normal(100)
    assert not np.array_equal(a0, init)


def test_agent_keys_relabel_streams():
    # agent i with keys (2, 0, 1) draws the stream of default agent keys[i]
    base = NoiseStream(7, run=0, n_agents=3)
    perm = NoiseStream(7, run=0, n_agents=3, agent_keys=[2, 0, 1])
    B = base.normal_block(4)
    P = perm.normal_block(4)
    assert np.array_equal(P, B[[2, 0, 1]])


def test_normal_block_matches_agent_normal():
    s1 = NoiseStream(9, run=0, n_agents=4)
    s2 = NoiseStream(9, run=0, n_agents=4)
    blk = s1.normal_block(6)
    for i in range(4):
        assert np.array_equal(blk[i], s2.agent_normal(i, 6))


def test_bad_agent_keys_length():
    with pytest.raises(ValueError):
        NoiseStream(1, n_agents=2, agent_keys=[0])


def test_init_generator_run_dependent():
    a = NoiseStream.init_generator(3, 0).standard_normal(10)
    b = NoiseStream.init_generator(3, 1).standard_normal(10)
    c = NoiseStream.init_generator(3, 0).standard_normal(10)
    assert np.array_equal(a, c)
    assert not np.array_equal(a, b)
