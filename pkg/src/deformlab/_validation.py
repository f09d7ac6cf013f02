"""Input coercion shared by the public entry points."""

from __future__ import annotations

import numpy as np

from .errors import DomainError


def as_matrix(m, dim: int) -> np.ndarray:
    """Return ``m`` as a float array of shape ``(..., dim, dim)``.

    Flat inputs of length ``dim * dim`` are read row-major.  Non-finite
    entries raise :class:`DomainError`.
    """
    arr = np.asarray(m, dtype=float)
    if arr.ndim == 1 and arr.shape[0] == dim * dim:
        arr = arr.reshape(dim, dim)
    if arr.ndim < 2 or arr.shape[-2:] != (dim, dim):
        raise DomainError(f"expected a {dim}x{dim} matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("matrix entries must be finite")
    return arr
