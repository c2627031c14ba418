"""Reproducible, indexable random-number streams.

Streams are backed by the counter-based Philox bit generator keyed by
``(master_seed, stream_index)``, so a path's variates depend only on its
index and never on how many other paths ran before it.  Distinct indices
give statistically independent streams.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


class RngStream:
    """Single-owner random stream identified by ``(master_seed, stream_index)``.

    Two streams constructed with the same pair produce bit-identical
    variate sequences; streams with different indices are independent.
    A stream must not be shared across concurrent tasks.

    Args:
        master_seed: 64-bit seed shared by an experiment.
        stream_index: Non-negative index selecting the substream
            (one per simulated path, by convention).
    """

    def __init__(self, master_seed: int, stream_index: int = 0):
        if not isinstance(stream_index, (int, np.integer)) or stream_index < 0:
            raise ValueError(f"stream_index must be a non-negative integer, got {stream_index!r}")
        if not isinstance(master_seed, (int, np.integer)):
            raise ValueError(f"master_seed must be an integer, got {master_seed!r}")
        self.master_seed = int(master_seed) & _MASK64
        self.stream_index = int(stream_index)
        self._generator = self._make_generator()

    def _make_generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=self.master_seed,
                                     spawn_key=(self.stream_index,))
        return np.random.Generator(np.random.Philox(seq))

    @property
    def generator(self) -> np.random.Generator:
        """Underlying numpy generator (advance it only through one owner)."""
        return self._generator

    def reset(self) -> None:
        """Rewind the stream to its initial state."""
        self._generator = self._make_generator()

    def standard_normal(self, size=None):
        return self._generator.standard_normal(size)

    def random(self, size=None):
        return self._generator.random(size)

    def exponential(self, scale: float, size=None):
        return self._generator.exponential(scale, size)

    def poisson(self, lam: float, size=None):
        return self._generator.poisson(lam, size)

    def __repr__(self) -> str:
        return f"RngStream(master_seed={self.master_seed}, stream_index={self.stream_index})"


def sample_brownian_increment(stream: RngStream, dt: float, size=None):
    """Draw Brownian increments W(t+dt) - W(t) ~ Normal(0, dt).

    Args:
        stream: Source stream; advanced by one draw per increment.
        dt: Time-step length, strictly positive.
        size: Optional shape for a batch of independent increments.

    Returns:
        A float when ``size`` is None, else an ndarray of shape ``size``.

    Raises:
        ValueError: If ``dt <= 0``.
    """
    if not dt > 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    return stream.standard_normal(size) * np.sqrt(dt)
