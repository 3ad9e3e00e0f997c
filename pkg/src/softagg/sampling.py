"""Seeded without-replacement batch sampling of KB row ids.

Each batch is a uniform draw (without replacement) from the ids not yet
emitted; batches keep coming until every id has been handed out exactly
once.  Draws use a partial Fisher-Yates shuffle over the remaining pool,
so the cost of a batch is proportional to the batch, not to the KB --
that is what makes time-to-first-estimate independent of table size.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import ParameterError


@dataclass(frozen=True)
class SampleBatch:
    ids: tuple[int, ...]
    index: int  # 1-based batch sequence number


def batch_size_for(m: int, sample_pct: float) -> int:
    """floor(m * s / 100), but never below one row."""
    return max(1, int(m * sample_pct) // 100)


class BatchSampler:
    """Single-consumer iterator over disjoint random batches of row ids.

    The same (ids, sample_pct, seed) triple always yields a byte-identical
    batch stream.  Distinct instances are independent.
    """

    def __init__(self, ids, sample_pct: float, seed: int):
        if not 0.0 < sample_pct <= 100.0:
            raise ParameterError(
                f"sample percentage must lie in (0, 100], got {sample_pct}"
            )
        self._pool = list(ids)
        self.m = len(self._pool)
        self.sample_pct = sample_pct
        self.seed = seed
        self.batch_size = batch_size_for(self.m, sample_pct)
        self.drawn_total = 0
        self._batches_emitted = 0
        self._rng = random.Random(seed)

    @property
    def remaining(self) -> int:
        return len(self._pool)

    def next_batch(self) -> SampleBatch | None:
        """Next batch, or None once every id has been emitted.

        All batches have batch_size ids except possibly the last, which
        carries the remainder.
        """
        if not self._pool:
            return None
        take = min(self.batch_size, len(self._pool))
        picked = []
        pool = self._pool
        for _ in range(take):
            j = self._rng.randrange(len(pool))
            pool[j], pool[-1] = pool[-1], pool[j]
            picked.append(pool.pop())
        self.drawn_total += take
        self._batches_emitted += 1
        return SampleBatch(ids=tuple(picked), index=self._batches_emitted)

    def __iter__(self):
        while True:
            batch = self.next_batch()
            if batch is None:
                return
            yield batch


def new_sampler(ids, sample_pct: float, seed: int) -> BatchSampler:
    """Fresh sampler over the given row ids (usually the source relation's)."""
    return BatchSampler(ids, sample_pct, seed)
