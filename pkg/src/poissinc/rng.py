"""Counter-based, splittable random streams.

Every logical stream is addressed by ``(master seed, experiment id,
replicate id)`` and backed by a Philox generator, so draws never depend on
the order in which replicates are scheduled.
"""

from __future__ import annotations

import zlib
from concurrent.futures import ThreadPoolExecutor

import numpy as np

__all__ = ["RngStream", "experiment_key", "map_replicates"]


def experiment_key(name):
    """Stable 32-bit key for an experiment name (ints pass through)."""
    if isinstance(name, (int, np.integer)):
        return int(name)
    return zlib.crc32(str(name).encode("utf-8"))


class RngStream:
    """A keyed random stream.

    Parameters
    ----------
    seed : int
        Master seed (64-bit).
    experiment : int or str
        Experiment identifier; strings are hashed with CRC32.
    replicate : int
        Replicate index.
    path : tuple of int, optional
        Further split coordinates appended by :meth:`split`.
    """

    def __init__(self, seed, experiment=0, replicate=0, path=()):
        if seed is None:
            raise ValueError("an explicit seed is required")
        self.seed = int(seed)
        self.experiment = experiment_key(experiment)
        self.replicate = int(replicate)
        self.path = tuple(int(p) for p in path)
        self._gen = None

    @property
    def key(self):
        return (self.experiment, self.replicate) + self.path

    @property
    def generator(self):
        if self._gen is None:
            ss = np.random.SeedSequence(self.seed, spawn_key=self.key)
            self._gen = np.random.Generator(np.random.Philox(ss))
        return self._gen

    def split(self, *coords):
        """Child stream, independent of this one and of its siblings."""
        return RngStream(self.seed, self.experiment, self.replicate,
                         self.path + coords)

    def replicate_stream(self, replicate):
        return RngStream(self.seed, self.experiment, replicate, self.path)

    def __repr__(self):
        return (f"RngStream(seed={self.seed}, experiment={self.experiment}, "
                f"replicate={self.replicate}, path={self.path})")


def map_replicates(fn, replicates, seed, experiment, workers=1):
    """Evaluate ``fn(stream)`` for each replicate, in replicate order.

    Each replicate gets its own stream, so the output does not depend on
    ``workers``.
    """
    streams = [RngStream(seed, experiment, i) for i in range(replicates)]
    if workers <= 1:
        return [fn(s) for s in streams]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, streams))
