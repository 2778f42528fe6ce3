""" Random streams of the replicas

Replica i of a run with master seed s draws from
``PCG64(SeedSequence(s, spawn_key=(i,)))``, the i-th child that
``SeedSequence(s).spawn()`` would hand out. A replica's numbers therefore do
not depend on how replicas are grouped into chunks or workers.
"""

import numpy as np
from numpy.random import PCG64, Generator, SeedSequence

from django.conf import settings


def replica_sequence(seed, index):
    return SeedSequence(int(seed), spawn_key=(int(index),))


def replica_generator(seed, index):
    return Generator(PCG64(replica_sequence(seed, index)))


def child_seed(seed, index):
    """ A 63-bit seed for the index-th independent sub-run of ``seed``

    >>> child_seed(1, 0) == child_seed(1, 0)
    True
    >>> child_seed(1, 0) != child_seed(1, 1)
    True
    """
    state = replica_sequence(seed, index).generate_state(1, dtype=np.uint64)
    return int(state[0] >> np.uint64(1))


class UniformBlocks(object):
    """ Uniforms on [0, 1) for a batch of replicas, refilled in blocks

    ``take()`` returns one row of ``width`` uniforms per replica. Every
    replica consumes its own stream at the same pace, so the values a replica
    sees depend only on its seed and index. """

    def __init__(self, seed, first, count, width=1, block_size=None):
        self.generators = [replica_generator(seed, first + i) for i in range(count)]
        self.width = width
        self.block_size = block_size or settings.UNIFORM_BLOCK_SIZE
        self.block = None
        self.position = self.block_size
        self.draws = 0

    def _refill(self):
        shape = (self.block_size, self.width)
        self.block = np.stack([g.random(shape) for g in self.generators], axis=1)
        self.position = 0

    def take(self):
        """ array of shape (count, width) """
        if self.position >= self.block_size:
            self._refill()

        row = self.block[self.position]
        self.position += 1
        self.draws += self.width
        return row
