"""Deformation coefficient of 3x3 operators.

The squared semi-axes of the ellipsoid ``A(S^2)`` are the roots of

    s(x) = x**3 - (u**2 + v**2 + w**2) x**2 + (S1**2 + S2**2 + S3**2) x - V**2

where ``u <= v <= w`` are the column norms of ``A``, ``S_i`` the areas of the
parallelograms spanned by column pairs and ``V = |det A|``.  Functions accept a
single ``(3, 3)`` matrix or a stack ``(..., 3, 3)``.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ._validation import as_matrix
from .core2d import _scalar
from .errors import ComplexRoots, ZeroColumn, ZeroMatrix

# Scale-free discriminant floor below which the coefficients are rejected.
DISCRIMINANT_FLOOR = -1e-10
DEFAULT_REL_TOL = 1e-9


class GramInvariants(NamedTuple):
    """Column norms ``u <= v <= w``, pair areas and volume.

    ``s1`` is the area spanned by the columns of norms ``v`` and ``w`` (the
    pair opposite ``u``), ``s2`` the pair opposite ``v`` and ``s3`` the pair
    opposite ``w``.
    """

    u: np.ndarray | float
    v: np.ndarray | float
    w: np.ndarray | float
    s1: np.ndarray | float
    s2: np.ndarray | float
    s3: np.ndarray | float
    vol: np.ndarray | float


class CubicCoeffs(NamedTuple):
    e1: np.ndarray | float
    e2: np.ndarray | float
    e3: np.ndarray | float


class EigenTriple(NamedTuple):
    """Roots ``x1 <= x2 <= x3`` of ``s``, i.e. squared singular values."""

    x1: np.ndarray | float
    x2: np.ndarray | float
    x3: np.ndarray | float


class InterlaceVerdict(NamedTuple):
    holds: bool
    margin: float
    tol: float


def _det3(m: np.ndarray) -> np.ndarray:
    return (
        m[..., 0, 0] * (m[..., 1, 1] * m[..., 2, 2] - m[..., 1, 2] * m[..., 2, 1])
        - m[..., 0, 1] * (m[..., 1, 0] * m[..., 2, 2] - m[..., 1, 2] * m[..., 2, 0])
        + m[..., 0, 2] * (m[..., 1, 0] * m[..., 2, 1] - m[..., 1, 1] * m[..., 2, 0])
    )


def _gram_squared(m: np.ndarray):
    """Sorted squared norms, squared opposite areas and squared volume."""
    g = _gram(m)
    n2 = np.stack([g[..., 0, 0], g[..., 1, 1], g[..., 2, 2]], axis=-1)
    # Area of the pair opposite column i via the cross product; the equivalent
    # Gram minor cancels catastrophically for nearly parallel columns.
    pairs = ((1, 2), (0, 2), (0, 1))
    a2 = np.stack(
        [np.sum(np.cross(m[..., :, j], m[..., :, k]) ** 2, axis=-1) for j, k in pairs],
        axis=-1,
    )
    order = np.argsort(n2, axis=-1, kind="stable")
    n2 = np.take_along_axis(n2, order, axis=-1)
    a2 = np.take_along_axis(a2, order, axis=-1)
    d = _det3(m)
    return n2, a2, d * d


def _rescale(m: np.ndarray):
    amax = np.max(np.abs(m), axis=(-2, -1))
    _, exp = np.frexp(np.where(amax > 0, amax, 1.0))
    return np.ldexp(m, -exp[..., None, None]), exp


def gram_invariants(m) -> GramInvariants:
    """Sorted column norms, areas of the opposite column pairs, and ``|det|``."""
    m = as_matrix(m, 3)
    s, exp = _rescale(m)
    n2, a2, v2 = _gram_squared(s)
    e = exp[..., None]
    norms = np.ldexp(np.sqrt(n2), e)
    areas = np.ldexp(np.sqrt(a2), 2 * e)
    vol = np.ldexp(np.sqrt(v2), 3 * exp)
    return GramInvariants(
        *(_scalar(x) for x in (norms[..., 0], norms[..., 1], norms[..., 2])),
        *(_scalar(x) for x in (areas[..., 0], areas[..., 1], areas[..., 2])),
        _scalar(vol),
    )


def char_poly3(g: GramInvariants) -> CubicCoeffs:
    """Coefficients ``(e1, e2, e3)`` of the characteristic polynomial of ``A^t A``."""
    u, v, w, s1, s2, s3, vol = (np.asarray(x, dtype=float) for x in g)
    return CubicCoeffs(
        _scalar(u * u + v * v + w * w),
        _scalar(s1 * s1 + s2 * s2 + s3 * s3),
        _scalar(vol * vol),
    )


def _horner(x, e1, e2, e3):
    return ((x - e1) * x + e2) * x - e3


def _polish(x, e1, e2, e3):
    f = _horner(x, e1, e2, e3)
    df = (3.0 * x - 2.0 * e1) * x + e2
    with np.errstate(invalid="ignore", divide="ignore"):
        cand = x - f / df
    ok = np.isfinite(cand) & (np.abs(_horner(cand, e1, e2, e3)) < np.abs(f))
    return np.where(ok, cand, x)


def _eig3(e1, e2, e3):
    """Batched trigonometric solve; returns (x1, x2, x3, normalized discriminant)."""
    e1 = np.asarray(e1, dtype=float)
    e2 = np.asarray(e2, dtype=float)
    e3 = np.asarray(e3, dtype=float)
    safe = np.where(e1 > 0, e1, 1.0)
    c2 = e2 / (safe * safe)
    c3 = e3 / (safe * safe * safe)
    disc = 18.0 * c2 * c3 - 4.0 * c3 + c2 * c2 - 4.0 * c2**3 - 27.0 * c3 * c3

    h = e1 / 3.0
    P = np.maximum((e1 * e1 - 3.0 * e2) / 9.0, 0.0)
    q = -2.0 * e1**3 / 27.0 + e1 * e2 / 3.0 - e3
    sp = np.sqrt(P)
    with np.errstate(invalid="ignore", divide="ignore"):
        arg = np.where(P > 0, -q / (2.0 * P * sp), 0.0)
    phi = np.arccos(np.clip(arg, -1.0, 1.0)) / 3.0
    x3 = h + 2.0 * sp * np.cos(phi)
    x1 = h + 2.0 * sp * np.cos(phi + 2.0 * np.pi / 3.0)
    x2 = h + 2.0 * sp * np.cos(phi - 2.0 * np.pi / 3.0)

    roots = [_polish(x, e1, e2, e3) for x in (x1, x2, x3)]
    roots = np.sort(np.stack(roots, axis=-1), axis=-1)
    roots = np.maximum(roots, 0.0)
    zero = e1 == 0
    roots = np.where(zero[..., None], 0.0, roots)
    disc = np.where(zero, 0.0, disc)
    return roots[..., 0], roots[..., 1], roots[..., 2], disc


def eig3(c: CubicCoeffs) -> EigenTriple:
    """Real roots of ``x**3 - e1 x**2 + e2 x - e3``, ascending and nonnegative.

    Uses the trigonometric form of Cardano's formula with the ``arccos``
    argument clamped to ``[-1, 1]``, followed by one Newton step per root
    (kept only when it reduces ``|s(x)|``).  Raises :class:`ComplexRoots` when
    the coefficients are negative or the discriminant is materially negative,
    i.e. they do not come from a Gram matrix.
    """
    e1, e2, e3 = (np.asarray(x, dtype=float) for x in c)
    if np.any(e1 < 0) or np.any(e2 < 0) or np.any(e3 < 0):
        raise ComplexRoots("coefficients of a Gram polynomial are nonnegative")
    x1, x2, x3, disc = _eig3(e1, e2, e3)
    if np.any(disc < DISCRIMINANT_FLOOR):
        raise ComplexRoots(f"discriminant {float(np.min(disc)):.3e} is negative")
    return EigenTriple(_scalar(x1), _scalar(x2), _scalar(x3))


def _gram(m: np.ndarray) -> np.ndarray:
    return np.einsum("...ki,...kj->...ij", m, m)


def _deflate_pair(g, x1, x2, x3):
    top = (x3 - x2) >= (x2 - x1)
    lam = np.where(top, x3, x1)
    r = g - lam[..., None, None] * np.eye(3)
    crosses = np.stack(
        [np.cross(r[..., 0, :], r[..., 1, :]), np.cross(r[..., 0, :], r[..., 2, :]), np.cross(r[..., 1, :], r[..., 2, :])],
        axis=-2,
    )
    norms = np.linalg.norm(crosses, axis=-1)
    best = np.argmax(norms, axis=-1)
    v = np.take_along_axis(crosses, best[..., None, None], axis=-2)[..., 0, :]
    vn = np.take_along_axis(norms, best[..., None], axis=-1)[..., 0]
    ok = vn > 0
    v = v / np.where(ok, vn, 1.0)[..., None]
    # Complete v to an orthonormal basis using the axis it is least aligned with.
    k = np.argmin(np.abs(v), axis=-1)
    ek = np.eye(3)[k]
    u1 = ek - np.take_along_axis(v, k[..., None], axis=-1) * v
    u1 = u1 / np.linalg.norm(u1, axis=-1, keepdims=True)
    u2 = np.cross(v, u1)
    gu1 = np.einsum("...ij,...j->...i", g, u1)
    gu2 = np.einsum("...ij,...j->...i", g, u2)
    a = np.einsum("...i,...i->...", u1, gu1)
    b = np.einsum("...i,...i->...", u1, gu2)
    d = np.einsum("...i,...i->...", u2, gu2)
    mid = 0.5 * (a + d)
    rad = np.hypot(0.5 * (a - d), b)
    lo, hi = mid - rad, mid + rad
    n1 = np.where(top, lo, lam)
    n2 = np.where(top, hi, lo)
    n3 = np.where(top, lam, hi)
    out = np.sort(np.stack([n1, n2, n3], axis=-1), axis=-1)
    old = np.stack([x1, x2, x3], axis=-1)
    out = np.where(ok[..., None], out, old)
    out = np.maximum(out, 0.0)
    return out[..., 0], out[..., 1], out[..., 2]


def _eig_sym3(g: np.ndarray, e2: np.ndarray, e3: np.ndarray):
    """Trigonometric eigenvalues of symmetric 3x3 ``g`` (batched), ascending.

    The depressed cubic is formed from the shifted matrix ``C = g - (tr/3) I``
    rather than from ``(e1, e2, e3)``: its coefficients ``tr(C**2)/2`` and
    ``det C`` carry absolute error ``eps * ||g||`` even when roots cluster,
    where the coefficient form loses up to ``eps**(1/3)``.  Each root gets one
    Newton step on the depressed cubic.  The two closest roots are then
    recomputed from the 2x2 block orthogonal to the isolated root's
    eigenvector, since a near-double root of any cubic is only determined to
    ``sqrt(eps)``.  A well separated smallest root gets a final Newton step on
    ``s`` itself, which resolves it to relative accuracy.
    """
    e1 = g[..., 0, 0] + g[..., 1, 1] + g[..., 2, 2]
    h = e1 / 3.0
    c00, c11, c22 = g[..., 0, 0] - h, g[..., 1, 1] - h, g[..., 2, 2] - h
    c01, c02, c12 = g[..., 0, 1], g[..., 0, 2], g[..., 1, 2]
    p2 = (c00 * c00 + c11 * c11 + c22 * c22 + 2.0 * (c01 * c01 + c02 * c02 + c12 * c12)) / 6.0
    detc = (
        c00 * (c11 * c22 - c12 * c12)
        - c01 * (c01 * c22 - c12 * c02)
        + c02 * (c01 * c12 - c11 * c02)
    )
    sp = np.sqrt(p2)
    with np.errstate(invalid="ignore", divide="ignore"):
        arg = np.where(p2 > 0, detc / (2.0 * p2 * sp), 0.0)
    phi = np.arccos(np.clip(arg, -1.0, 1.0)) / 3.0
    ys = [2.0 * sp * np.cos(phi + k * 2.0 * np.pi / 3.0) for k in (1, 2, 0)]

    def dep(y):
        return (y * y - 3.0 * p2) * y - detc

    polished = []
    for y in ys:
        f = dep(y)
        df = 3.0 * (y * y - p2)
        with np.errstate(invalid="ignore", divide="ignore"):
            cand = y - f / df
        ok = np.isfinite(cand) & (np.abs(dep(cand)) < np.abs(f))
        polished.append(np.where(ok, cand, y))
    x = np.sort(np.stack(polished, axis=-1), axis=-1) + h[..., None]
    x1, x2, x3 = _deflate_pair(g, x[..., 0], x[..., 1], x[..., 2])
    sep = x1 <= 0.25 * x2
    x1 = np.where(sep, _polish(x1, e1, e2, e3), x1)
    x1 = np.clip(x1, 0.0, x2)
    return x1, x2, x3


def _spectrum(m: np.ndarray):
    """Scaled squared norms, e1 and roots, plus the power-of-two exponent."""
    s, exp = _rescale(m)
    n2, a2, v2 = _gram_squared(s)
    e1 = n2.sum(axis=-1)
    x1, x2, x3 = _eig_sym3(_gram(s), a2.sum(axis=-1), v2)
    return n2, e1, x1, x2, x3, exp


def eig3_matrix(m) -> EigenTriple:
    """Roots of ``s`` for the Gram matrix of ``m``, solved from the shifted Gram matrix.

    This is the route used by :func:`k3` and :func:`interlace_check`.
    """
    n2, e1, x1, x2, x3, exp = _spectrum(as_matrix(m, 3))
    return EigenTriple(*(_scalar(np.ldexp(x, 2 * exp)) for x in (x1, x2, x3)))


def k3_batch(m, squared: bool = False) -> np.ndarray:
    """Vectorized ``k3``; NaN marks zero matrices."""
    n2, e1, x1, x2, x3, _ = _spectrum(as_matrix(m, 3))
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(x3 > 0, x1 / np.where(x3 > 0, x3, 1.0), np.nan)
    return ratio if squared else np.sqrt(ratio)


def k3(m, squared: bool = False):
    """Smallest-to-largest semi-axis ratio ``sqrt(x1 / x3)`` of a 3x3 operator.

    ``squared=True`` returns ``x1 / x3`` instead.  Both forms are bounded by
    :func:`column_bound3`.
    """
    k = k3_batch(m, squared=squared)
    if np.any(np.isnan(k)):
        raise ZeroMatrix("k3 is undefined for the zero matrix")
    return _scalar(k)


def column_bound3_batch(m) -> np.ndarray:
    m = as_matrix(m, 3)
    n = np.sqrt(np.sort(np.einsum("...ki,...ki->...i", m, m), axis=-1))
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(n[..., 0] > 0, n[..., 0] / np.where(n[..., 2] > 0, n[..., 2], 1.0), np.nan)


def column_bound3(m):
    """``u / w``, the smallest over the largest column norm."""
    b = column_bound3_batch(m)
    if np.any(np.isnan(b)):
        raise ZeroColumn("column_bound3 needs all columns nonzero")
    return _scalar(b)


def interlace_margins(m, rel_tol: float = DEFAULT_REL_TOL):
    """Worst signed slack ``min(u**2 - x1, x3 - w**2)`` and its tolerance ``rel_tol * e1``.

    Returned in the units of ``m``.
    """
    n2, e1, x1, x2, x3, exp = _spectrum(as_matrix(m, 3))
    margin = np.minimum(n2[..., 0] - x1, x3 - n2[..., 2])
    return np.ldexp(margin, 2 * exp), np.ldexp(rel_tol * e1, 2 * exp)


def interlace_check(m, tol: float | None = None) -> InterlaceVerdict:
    """Check ``x1 <= u**2`` and ``w**2 <= x3`` for a single matrix.

    ``tol`` is absolute; by default it is ``1e-9 * e1``.
    """
    m = as_matrix(m, 3)
    if m.ndim != 2:
        raise ValueError("interlace_check takes a single matrix; use interlace_margins")
    margin, default_tol = interlace_margins(m)
    tol = float(default_tol) if tol is None else float(tol)
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    margin = float(margin)
    return InterlaceVerdict(margin >= -tol, margin, tol)
