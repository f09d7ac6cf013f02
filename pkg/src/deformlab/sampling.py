"""Seeded, index-addressable random matrix ensembles.

Randomness comes from SplitMix64 (Steele, Lea & Flood, 2014) used as a
counter-based generator: word ``n`` of stream ``seed`` is

    mix64(seed + (n + 1) * 0x9E3779B97F4A7C15  mod 2**64)

with the standard SplitMix64 finalizer

    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z =  z ^ (z >> 31)

Sample ``i`` owns words ``16 * i`` .. ``16 * i + 15`` (so a stream holds
``2**60`` samples).  Uniforms are ``(z >> 11) * 2**-53``; normals use the
Box-Muller transform on consecutive word pairs.  Because sample ``i`` is a
pure function of ``(seed, i)``, index ranges may be split across workers in
any way without changing results.  The 64-bit words and uniforms are
bit-reproducible everywhere; normals additionally depend on the platform's
``log``/``cos``/``sin``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

GOLDEN_GAMMA = np.uint64(0x9E3779B97F4A7C15)
MIX1 = np.uint64(0xBF58476D1CE4E5B9)
MIX2 = np.uint64(0x94D049BB133111EB)
WORDS_PER_SAMPLE = 16
MAX_SEED = 2**64 - 1


@dataclass(frozen=True)
class GaussianIID:
    """Independent standard normal entries."""

    dim: int = 2

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError("GaussianIID dim must be 2 or 3")


@dataclass(frozen=True)
class UniformBall4:
    """2x2 matrices whose polar point ``(x, y, z, t)`` is uniform in a 4-ball."""

    radius: float = 1.0
    dim: int = 2

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        if self.dim != 2:
            raise ValueError("UniformBall4 is two-dimensional")


@dataclass(frozen=True)
class UniformBidisk:
    """2x2 matrices with ``(x, z)`` and ``(y, t)`` independently uniform in disks of radius ``R``.

    In ``(r, rho)`` this is the density ``r * rho`` on the square
    ``[0, R]**2``, the domain over which the closed-form mean ``3 - 4 ln 2``
    is taken.  It is not rotation invariant in the matrix entries.
    """

    radius: float = 1.0
    dim: int = 2

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        if self.dim != 2:
            raise ValueError("UniformBidisk is two-dimensional")


@dataclass(frozen=True)
class OrderedSimplexColumns:
    """Diagonal matrices with column norms uniform on ``{0 < z < y < 1}`` (or the 3D analogue)."""

    dim: int = 2

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError("OrderedSimplexColumns dim must be 2 or 3")


Ensemble = Union[GaussianIID, UniformBall4, UniformBidisk, OrderedSimplexColumns]


@dataclass(frozen=True)
class SampleStream:
    seed: int
    ensemble: Ensemble

    def __post_init__(self):
        if not 0 <= int(self.seed) <= MAX_SEED:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @property
    def dim(self) -> int:
        return self.ensemble.dim


def parse_seed(text: str) -> int:
    """Parse a decimal or ``0x``-prefixed hexadecimal 64-bit seed."""
    s = text.strip().lower()
    value = int(s, 16) if s.startswith("0x") else int(s, 10)
    if not 0 <= value <= MAX_SEED:
        raise ValueError(f"seed {text!r} is outside [0, 2**64)")
    return value


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * MIX1
    z = (z ^ (z >> np.uint64(27))) * MIX2
    return z ^ (z >> np.uint64(31))


def words(seed: int, start: int, count: int, n_words: int) -> np.ndarray:
    """Raw 64-bit words, shape ``(count, n_words)``, for samples ``start .. start+count-1``."""
    if n_words > WORDS_PER_SAMPLE:
        raise ValueError("too many words per sample")
    idx = np.arange(start, start + count, dtype=np.uint64)[:, None]
    n = idx * np.uint64(WORDS_PER_SAMPLE) + np.arange(n_words, dtype=np.uint64)
    return _mix64(np.uint64(seed) + (n + np.uint64(1)) * GOLDEN_GAMMA)


def uniforms(seed: int, start: int, count: int, n_words: int) -> np.ndarray:
    """Uniform doubles in ``[0, 1)`` with 53 random bits."""
    return (words(seed, start, count, n_words) >> np.uint64(11)).astype(np.float64) * 2.0**-53


def normals(seed: int, start: int, count: int, n: int) -> np.ndarray:
    """Standard normals, shape ``(count, n)``, via Box-Muller."""
    pairs = (n + 1) // 2
    u = uniforms(seed, start, count, 2 * pairs)
    u1 = 1.0 - u[:, 0::2]  # (0, 1]
    u2 = u[:, 1::2]
    rad = np.sqrt(-2.0 * np.log(u1))
    ang = 2.0 * np.pi * u2
    g = np.empty((count, 2 * pairs))
    g[:, 0::2] = rad * np.cos(ang)
    g[:, 1::2] = rad * np.sin(ang)
    return g[:, :n]


def ball_points(seed: int, start: int, count: int, radius: float = 1.0) -> np.ndarray:
    """Points ``(x, y, z, t)`` uniform in the 4-ball of the given radius."""
    g = normals(seed, start, count, 4)
    # Word 4 is the first word not consumed by the four normals.
    u = 1.0 - uniforms(seed, start, count, 5)[:, 4]
    scale = radius * u**0.25 / np.linalg.norm(g, axis=1)
    return g * scale[:, None]


def bidisk_points(seed: int, start: int, count: int, radius: float = 1.0) -> np.ndarray:
    """Points ``(x, y, z, t)`` with ``(x, z)`` and ``(y, t)`` uniform in disks."""
    u = uniforms(seed, start, count, 4)
    r = radius * np.sqrt(1.0 - u[:, 0])
    rho = radius * np.sqrt(1.0 - u[:, 1])
    alpha = 2.0 * np.pi * u[:, 2]
    beta = 2.0 * np.pi * u[:, 3]
    return np.stack(
        [r * np.sin(alpha), rho * np.sin(beta), r * np.cos(alpha), rho * np.cos(beta)], axis=1
    )


def ball_to_matrix(pts: np.ndarray) -> np.ndarray:
    """Map ``(x, y, z, t)`` to ``[[x + y, z + t], [t - z, x - y]]``."""
    x, y, z, t = pts[..., 0], pts[..., 1], pts[..., 2], pts[..., 3]
    row0 = np.stack([x + y, z + t], axis=-1)
    row1 = np.stack([t - z, x - y], axis=-1)
    return np.stack([row0, row1], axis=-2)


def sample_block(stream: SampleStream, start: int, count: int) -> np.ndarray:
    """Samples ``start .. start+count-1`` of ``stream`` as an array ``(count, d, d)``."""
    if start < 0 or count < 0:
        raise ValueError("start and count must be nonnegative")
    ens = stream.ensemble
    seed = int(stream.seed)
    d = ens.dim
    if isinstance(ens, GaussianIID):
        return normals(seed, start, count, d * d).reshape(count, d, d)
    if isinstance(ens, UniformBall4):
        return ball_to_matrix(ball_points(seed, start, count, ens.radius))
    if isinstance(ens, UniformBidisk):
        return ball_to_matrix(bidisk_points(seed, start, count, ens.radius))
    if isinstance(ens, OrderedSimplexColumns):
        u = 1.0 - uniforms(seed, start, count, d)
        norms = -np.sort(-u, axis=1)
        out = np.zeros((count, d, d))
        out[:, np.arange(d), np.arange(d)] = norms
        return out
    raise TypeError(f"unknown ensemble {ens!r}")


def sample_matrix(stream: SampleStream, index: int) -> np.ndarray:
    """The ``index``-th matrix of ``stream``."""
    if index < 0:
        raise ValueError("index must be nonnegative")
    return sample_block(stream, index, 1)[0]
