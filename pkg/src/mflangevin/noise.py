"""Reproducible per-agent Gaussian noise substreams.

Substreams are derived with ``numpy.random.SeedSequence`` spawn keys from a
single 64-bit master seed, one Philox counter-based generator per
``(run, agent)`` pair, so trajectories are bit-identical regardless of how
work is scheduled across threads or processes.  Gaussians come from numpy's
ziggurat sampler; this choice is fixed and part of the reproducibility
contract.

Draw granularity is transparent: requesting ``n`` normals in one call or in
several smaller calls yields the same sequence, so steppers may block their
draws for speed without changing results.
"""

import numpy as np

__all__ = ["NoiseStream"]

_INIT_TAG = 0
_AGENT_TAG = 1


class NoiseStream:
    """Independent Gaussian substreams for every agent of one run.

    Parameters
    ----------
    seed : int
        Master seed shared by the whole experiment.
    run : int
        Run (replicate) index; distinct runs get disjoint substreams.
    n_agents : int
        Number of agents.
    agent_keys : sequence of int, optional
        Substream key per agent, default ``0..n_agents-1``.  Permuting the
        keys together with the initial positions permutes trajectories
        exactly (exchangeability).
    """

    def __init__(self, seed, run=0, n_agents=1, agent_keys=None):
        self.seed = int(seed)
        self.run = int(run)
        self.n_agents = int(n_agents)
        if agent_keys is None:
            agent_keys = range(self.n_agents)
        keys = [int(k) for k in agent_keys]
        if len(keys) != self.n_agents:
            raise ValueError("agent_keys length must equal n_agents")
        self._gens = [
            np.random.Generator(np.random.Philox(
                np.random.SeedSequence(self.seed, spawn_key=(self.run, _AGENT_TAG, k))))
            for k in keys
        ]

    @staticmethod
    def init_generator(seed, run=0):
        """Run-level generator for initial-condition draws (disjoint from
        every agent substream)."""
        return np.random.Generator(np.random.Philox(
            np.random.SeedSequence(int(seed), spawn_key=(int(run), _INIT_TAG))))

    def agent_normal(self, agent, n):
        """Next ``n`` standard normals of one agent's substream, shape (n,)."""
        return self._gens[agent].standard_normal(int(n))

    def normal_block(self, n_per_agent):
        """Next ``n_per_agent`` normals from every agent, shape
        ``(n_agents, n_per_agent)``, consumed in agent order."""
        return np.stack([g.standard_normal(int(n_per_agent)) for g in self._gens])
