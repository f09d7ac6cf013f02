"""Fixed-shape pairwise reduction of per-block partial results."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, NamedTuple, Sequence, TypeVar

import numpy as np

T = TypeVar("T")

BLOCK_SIZE = 1 << 16


def pairwise_reduce(items: Sequence[T], combine: Callable[[T, T], T]) -> T:
    """Reduce ``items`` with a balanced binary tree whose shape depends only on ``len(items)``."""
    if not items:
        raise ValueError("nothing to reduce")
    level = list(items)
    while len(level) > 1:
        nxt = [combine(level[i], level[i + 1]) for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return level[0]


def blocks(n: int, size: int = BLOCK_SIZE) -> list[tuple[int, int]]:
    """``(start, count)`` pairs covering ``range(n)`` in fixed-size chunks."""
    return [(s, min(size, n - s)) for s in range(0, n, size)]


def map_blocks(fn: Callable[[int, int], T], n: int, threads: int = 1) -> list[T]:
    """Apply ``fn(start, count)`` to every block, in block order."""
    spans = blocks(n)
    if threads <= 1 or len(spans) <= 1:
        return [fn(s, c) for s, c in spans]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda sc: fn(*sc), spans))


class Moments(NamedTuple):
    """Count, mean and sum of squared deviations of a sample."""

    count: int
    mean: float
    m2: float

    @classmethod
    def of(cls, values: np.ndarray) -> "Moments":
        n = int(values.size)
        if n == 0:
            return cls(0, 0.0, 0.0)
        mean = float(np.sum(values)) / n
        return cls(n, mean, float(np.sum((values - mean) ** 2)))


def combine_moments(x: Moments, y: Moments) -> Moments:
    """Chan et al. parallel update of count, mean and M2."""
    if x.count == 0:
        return y
    if y.count == 0:
        return x
    n = x.count + y.count
    delta = y.mean - x.mean
    mean = x.mean + delta * (y.count / n)
    m2 = x.m2 + y.m2 + delta * delta * (x.count * y.count / n)
    return Moments(n, mean, m2)


def reduce_moments(parts: Iterable[Moments]) -> Moments:
    return pairwise_reduce(list(parts), combine_moments)
