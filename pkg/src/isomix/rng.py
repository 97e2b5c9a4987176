"""Counter-based random streams.

Every draw has an absolute position in a Philox stream keyed by
``(seed, stream)``.  Jumping to any position is O(1), so a run of ``n1``
steps followed by ``n2`` steps consumes exactly the same variates as a
single run of ``n1 + n2`` steps, and independent replicas are obtained by
``split`` without any shared state.

Uniforms are built from the top 53 bits of each 64-bit word and shifted by
half an ulp, so they lie strictly inside (0, 1).  Normals are obtained by
inverting the normal CDF, which keeps the consumption at exactly one word
per variate.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

_MASK64 = (1 << 64) - 1
_TWO_M53 = 2.0 ** -53


class CounterRNG:
    """Cursor over a keyed Philox stream.

    Args:
        seed: 64-bit seed (first key word).
        stream: stream id (second key word); ``split`` derives new ids.
        position: index of the next 64-bit word to be consumed.
    """

    def __init__(self, seed: int, stream: int = 0, position: int = 0):
        self.seed = int(seed) & _MASK64
        self.stream = int(stream) & _MASK64
        self.position = int(position)
        if self.position < 0:
            raise ValueError("position must be nonnegative")

    def __repr__(self):
        return f"CounterRNG(seed={self.seed}, stream={self.stream}, position={self.position})"

    def _key(self):
        return np.array([self.seed, self.stream], dtype=np.uint64)

    def raw(self, k: int) -> np.ndarray:
        """Return the next ``k`` 64-bit words and advance the cursor."""
        k = int(k)
        if k <= 0:
            return np.empty(0, dtype=np.uint64)
        block, lane = divmod(self.position, 4)
        counter = np.array([block & _MASK64, block >> 64, 0, 0], dtype=np.uint64)
        bitgen = np.random.Philox(key=self._key(), counter=counter)
        words = bitgen.random_raw(k + lane)[lane:]
        self.position += k
        return words

    def uniform(self, size=None):
        """Uniforms on the open interval (0, 1), numpy ``size`` convention."""
        k = 1 if size is None else int(np.prod(size))
        words = self.raw(k)
        u = ((words >> np.uint64(11)).astype(np.float64) + 0.5) * _TWO_M53
        return float(u[0]) if size is None else u.reshape(size)

    def normal(self, size=None):
        """Standard normals by inversion (one word per variate)."""
        u = self.uniform(size)
        return float(ndtri(u)) if size is None else ndtri(u)

    def step_block(self, rows: int, d: int) -> tuple[np.ndarray, np.ndarray]:
        """``rows`` Metropolis steps' worth of variates.

        Each row consumes ``d + 1`` consecutive words: ``d`` normals for the
        proposal followed by one uniform for the accept test.  Fixing the
        per-step consumption is what makes chains split and compose exactly.
        """
        words = self.raw(rows * (d + 1)).reshape(rows, d + 1)
        u = ((words >> np.uint64(11)).astype(np.float64) + 0.5) * _TWO_M53
        return ndtri(u[:, :d]), u[:, d]

    def jump(self, position: int) -> "CounterRNG":
        """Copy of this stream positioned at absolute word ``position``."""
        return CounterRNG(self.seed, self.stream, position)

    def split(self, index: int) -> "CounterRNG":
        """Independent child stream; children of distinct indices never overlap."""
        ss = np.random.SeedSequence([self.seed, self.stream, int(index)])
        stream = int(ss.generate_state(1, dtype=np.uint64)[0])
        return CounterRNG(self.seed, stream, 0)

    def spawn(self, n: int) -> list["CounterRNG"]:
        return [self.split(i) for i in range(n)]


def as_rng(seed_or_rng) -> CounterRNG:
    if isinstance(seed_or_rng, CounterRNG):
        return seed_or_rng
    if seed_or_rng is None:
        raise ValueError("an explicit seed is required")
    return CounterRNG(int(seed_or_rng))
