"""Deformation coefficient of 2x2 operators.

A 2x2 matrix ``[[a, b], [c, d]]`` maps the unit circle onto an ellipse with
semi-axes ``p >= q``; the deformation coefficient is ``q / p``.  Every function
here accepts a single matrix of shape ``(2, 2)`` or a stack ``(..., 2, 2)``
and broadcasts over the leading axes.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ._validation import as_matrix
from .errors import ZeroColumn, ZeroMatrix

TWO_PI = 2.0 * np.pi


class SingularPair(NamedTuple):
    """Semi-axes of the image ellipse, ``p >= q >= 0``."""

    p: np.ndarray | float
    q: np.ndarray | float


class PolarForm(NamedTuple):
    """Polar parameters of a 2x2 matrix.

    With ``x = r sin(alpha)``, ``z = r cos(alpha)``, ``y = rho sin(beta)``,
    ``t = rho cos(beta)`` the matrix is ``a = x + y``, ``d = x - y``,
    ``b = z + t``, ``c = t - z``.  Then ``det = r**2 - rho**2`` and the
    deformation coefficient is ``|r - rho| / (r + rho)``.
    """

    r: np.ndarray | float
    rho: np.ndarray | float
    alpha: np.ndarray | float
    beta: np.ndarray | float


def _scalar(x):
    return x.item() if isinstance(x, np.ndarray) and x.ndim == 0 else x


def _singular_pair(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Power-of-two rescaling is exact and keeps D = ad - bc clear of under/overflow.
    amax = np.max(np.abs(m), axis=(-2, -1))
    _, exp = np.frexp(np.where(amax > 0, amax, 1.0))
    s = np.ldexp(m, -exp[..., None, None])
    a, b, c, d = s[..., 0, 0], s[..., 0, 1], s[..., 1, 0], s[..., 1, 1]
    # p + q = 2r and p - q = 2 rho (polar radii); p = r + rho equals
    # sqrt((T + sqrt(T**2 - 4 D**2)) / 2) but is free of cancellation.
    r = np.hypot(0.5 * (a + d), 0.5 * (b - c))
    rho = np.hypot(0.5 * (a - d), 0.5 * (b + c))
    p = r + rho
    D = np.abs(a * d - b * c)
    with np.errstate(invalid="ignore", divide="ignore"):
        q = np.where(p > 0, D / np.where(p > 0, p, 1.0), 0.0)
    q = np.minimum(q, p)
    return np.ldexp(p, exp), np.ldexp(q, exp)


def singular_pair(m) -> SingularPair:
    """Singular values ``(p, q)`` of ``m`` in descending order.

    ``p**2`` is the larger root of ``x**2 - T x + D**2`` with
    ``T = a**2 + b**2 + c**2 + d**2`` and ``D = ad - bc``; it is evaluated as
    the sum of the two polar radii.  ``q`` is recovered as ``|D| / p`` so it
    keeps full relative accuracy even when ``q << p``.  The zero matrix
    returns ``(0, 0)``.
    """
    m = as_matrix(m, 2)
    p, q = _singular_pair(m)
    return SingularPair(_scalar(p), _scalar(q))


def k2_batch(m) -> np.ndarray:
    """Vectorized ``k2`` that returns NaN for zero matrices instead of raising."""
    p, q = _singular_pair(as_matrix(m, 2))
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(p > 0, q / np.where(p > 0, p, 1.0), np.nan)


def k2(m):
    """Deformation coefficient ``q / p`` of a 2x2 matrix.

    Singular matrices give 0.  Raises :class:`ZeroMatrix` for the zero matrix.

    >>> k2([[2.0, 0.0], [0.0, 1.0]])
    0.5
    """
    k = k2_batch(m)
    if np.any(np.isnan(k)):
        raise ZeroMatrix("k2 is undefined for the zero matrix")
    return _scalar(k)


def to_polar(m) -> PolarForm:
    """Polar parameters ``(r, rho, alpha, beta)`` of ``m``.

    Undefined angles (``r == 0`` or ``rho == 0``) are set to 0.
    """
    m = as_matrix(m, 2)
    a, b, c, d = m[..., 0, 0], m[..., 0, 1], m[..., 1, 0], m[..., 1, 1]
    x = (a + d) / 2.0
    y = (a - d) / 2.0
    z = (b - c) / 2.0
    t = (b + c) / 2.0
    r = np.hypot(x, z)
    rho = np.hypot(y, t)
    alpha = np.where(r > 0, _angle(x, z), 0.0)
    beta = np.where(rho > 0, _angle(y, t), 0.0)
    return PolarForm(*(_scalar(v) for v in (r, rho, alpha, beta)))


def _angle(sin_part, cos_part):
    ang = np.mod(np.arctan2(sin_part, cos_part), TWO_PI)
    return np.where(ang >= TWO_PI, 0.0, ang)


def from_polar(pf: PolarForm) -> np.ndarray:
    """Inverse of :func:`to_polar`; returns an array of shape ``(..., 2, 2)``."""
    r, rho, alpha, beta = (np.asarray(v, dtype=float) for v in pf)
    if np.any(r < 0) or np.any(rho < 0):
        raise ValueError("radii must be nonnegative")
    x = r * np.sin(alpha)
    z = r * np.cos(alpha)
    y = rho * np.sin(beta)
    t = rho * np.cos(beta)
    row0 = np.stack([x + y, z + t], axis=-1)
    row1 = np.stack([t - z, x - y], axis=-1)
    return np.stack([row0, row1], axis=-2)


def k2_polar(pf: PolarForm):
    """``|r - rho| / (r + rho)``; raises :class:`ZeroMatrix` when both radii vanish."""
    r = np.asarray(pf.r, dtype=float)
    rho = np.asarray(pf.rho, dtype=float)
    s = r + rho
    if np.any(s == 0):
        raise ZeroMatrix("k2_polar is undefined for r = rho = 0")
    return _scalar(np.abs(r - rho) / s)


def column_bound2(m):
    """Ratio of the smaller to the larger column norm; an upper bound on ``k2``."""
    m = as_matrix(m, 2)
    n0 = np.hypot(m[..., 0, 0], m[..., 1, 0])
    n1 = np.hypot(m[..., 0, 1], m[..., 1, 1])
    lo, hi = np.minimum(n0, n1), np.maximum(n0, n1)
    if np.any(lo == 0):
        raise ZeroColumn("column_bound2 needs both columns nonzero")
    return _scalar(lo / hi)
