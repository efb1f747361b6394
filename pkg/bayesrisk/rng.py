# *****************************************************************************
# *
# * Authors:     The scipion-bayesrisk contributors
# *
# * This program is free software; you can redistribute it and/or modify
# * it under the terms of the GNU General Public License as published by
# * the Free Software Foundation; either version 3 of the License, or
# * (at your option) any later version.
# *
# * This program is distributed in the hope that it will be useful,
# * but WITHOUT ANY WARRANTY; without even the implied warranty of
# * MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# * GNU General Public License for more details.
# *
# * You should have received a copy of the GNU General Public License
# * along with this program; if not, write to the Free Software
# * Foundation, Inc., 59 Temple Place, Suite 330, Boston, MA
# * 02111-1307  USA
# *
# *****************************************************************************
"""
Deterministic, splittable random streams.

A stream is identified by a 64-bit seed and a label. The root stream of a
seed draws from PCG64 seeded with the seed itself; any other label draws from
the child seed obtained by hashing "<seed>:<label>" with BLAKE2b (8 byte
digest, read little endian), so the same (seed, label) pair always gives the
same sequence on every platform and distinct labels give distinct sequences.
Normal variates are the inverse normal CDF applied to the uniforms.
"""
import hashlib
import logging

import numpy as np
from scipy.special import ndtri

from .errors import InvalidParameter

logger = logging.getLogger(__name__)

SEED_MASK = (1 << 64) - 1
UNIFORM_EPS = 2.0 ** -53
ROOT_LABEL = 'root'


def mixSeed(seed, label):
    """ Child seed of (seed, label): BLAKE2b-64 of the ascii text
    '<seed>:<label>' interpreted as a little endian unsigned integer. """
    digest = hashlib.blake2b(("%d:%s" % (seed, label)).encode('utf-8'),
                             digest_size=8).digest()
    return int.from_bytes(digest, 'little')


class SeededStream:
    """ Random stream bound to (seed, label). Draws advance an internal
    PCG64 state, so two streams built from the same pair produce the same
    sequence. The ``seed`` attribute is the stream's own PCG64 seed: the
    given seed for the root label, the mixed child seed otherwise. """

    def __init__(self, seed, label=ROOT_LABEL):
        if not label:
            raise InvalidParameter("Stream label must be a non empty string")
        seed = int(seed) & SEED_MASK
        self.label = str(label)
        self.seed = seed if self.label == ROOT_LABEL else \
            mixSeed(seed, self.label)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def __repr__(self):
        return "SeededStream(seed=%d, label=%r)" % (self.seed, self.label)

    def derive(self, label):
        """ Independent child stream. Depends only on this stream's seed and
        the label, never on how many draws were already taken. """
        if not label or label == ROOT_LABEL:
            raise InvalidParameter("Child label must be a non empty string "
                                   "other than %r" % ROOT_LABEL)
        return SeededStream(self.seed, label)

    def uniform(self, size=None):
        """ Uniforms on the open interval (0, 1). """
        u = self._gen.random(size)
        return np.clip(u, UNIFORM_EPS, 1.0 - UNIFORM_EPS)

    def normal(self, size=None, loc=0.0, scale=1.0):
        return loc + scale * ndtri(self.uniform(size))

    def integers(self, high, size=None):
        return self._gen.integers(0, high, size=size)

    def generator(self):
        """ Underlying numpy generator, for scipy.stats random_state. """
        return self._gen


def derive(parent, label):
    return parent.derive(label)


def asStream(seedOrStream, label=ROOT_LABEL):
    """ Accept either an integer seed or an existing stream. """
    if isinstance(seedOrStream, SeededStream):
        return seedOrStream
    return SeededStream(seedOrStream, label)
