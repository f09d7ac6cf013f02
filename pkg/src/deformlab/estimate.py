"""Mean deformation coefficients: exact constants, quadrature and Monte Carlo.

The closed-form 2D mean ``3 - 4 ln 2`` is taken with the polar point
``(x, y, z, t)`` of the matrix restricted to ``|(y, t)| <= |(x, z)| <= R``,
volume element ``r dr dalpha rho drho dbeta``:

    mean = int_0^R r dr int_0^r rho (r - rho)/(r + rho) drho
           / int_0^R r dr int_0^r rho drho.

Numerator and denominator are both homogeneous of degree 4 in ``R``, so the
ratio does not depend on ``R`` and the ``R -> infinity`` limit equals its
value at any radius.  Equivalently, ``(x, z)`` and ``(y, t)`` are uniform in
two disks (:class:`~deformlab.sampling.UniformBidisk`).

That measure is not rotation invariant in the four matrix entries.  Under a
rotation-invariant law (Gaussian entries, uniform 4-ball) ``k`` depends only
on the angle ``theta`` in ``(r, rho) = s (cos theta, sin theta)``, whose
density is ``2 cos(theta) sin(theta)``, and the mean is ``1 - ln 2``.

The column-bound integrals average ``smallest / largest`` column norm over
norm tuples uniform on the ordered unit simplex.  That is yet another
measure; these integrals only give coarse upper bounds.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import quadrature
from .core2d import k2_batch
from .core3d import column_bound3_batch, k3_batch
from .errors import DimensionMismatch, DomainError
from .reduction import Moments, map_blocks, reduce_moments
from .sampling import SampleStream, sample_block

EXACT_MEAN_K2 = 3.0 - 4.0 * math.log(2.0)
ROTATION_INVARIANT_MEAN_K2 = 1.0 - math.log(2.0)
MEASURES = {"bidisk": EXACT_MEAN_K2, "rotation_invariant": ROTATION_INVARIANT_MEAN_K2}
STATISTICS = ("k2", "k3", "column_ratio")


@dataclass
class Estimate:
    value: float
    std_error: Optional[float]
    n: int
    method: str
    seed: Optional[int] = None
    elapsed: float = 0.0
    skipped: int = 0
    notes: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)


def mean_k2_exact(measure: str = "bidisk") -> Estimate:
    """Closed-form mean of the 2D deformation coefficient.

    ``"bidisk"`` gives ``3 - 4 ln 2``; ``"rotation_invariant"`` (Gaussian
    entries or a uniform 4-ball) gives ``1 - ln 2``.
    """
    if measure not in MEASURES:
        raise DomainError(f"unknown measure {measure!r}")
    return Estimate(MEASURES[measure], 0.0, 0, "exact", notes={"measure": measure})


def inner_antiderivative(r, rho):
    """``F(r, rho) = -rho**2/2 + 2 rho r - 2 r**2 ln(r + rho)``.

    ``dF/drho = rho (r - rho) / (r + rho)``, the inner integrand of the mean.
    """
    r = np.asarray(r, dtype=float)
    rho = np.asarray(rho, dtype=float)
    if np.any(r < 0) or np.any(rho < 0):
        raise DomainError("r and rho must be nonnegative")
    if np.any(r + rho == 0):
        raise DomainError("F is undefined at r = rho = 0")
    out = -0.5 * rho * rho + 2.0 * rho * r - 2.0 * r * r * np.log(r + rho)
    return out.item() if out.ndim == 0 else out


def mean_k2_quadrature(tol: float = 1e-10, radius: float = 1.0) -> Estimate:
    """Evaluate the polar-coordinate mean ratio by adaptive quadrature.

    The inner integral is closed-form via :func:`inner_antiderivative`; the
    outer integrals over ``r`` are adaptive Gauss-Kronrod to ``tol``.
    """
    if not 1e-14 <= tol <= 1e-4:
        raise DomainError("tol must lie in [1e-14, 1e-4]")
    if not radius > 0:
        raise DomainError("radius must be positive")
    t0 = time.perf_counter()
    scale = radius**4

    def numerator(r):
        return r * (inner_antiderivative(r, r) - inner_antiderivative(r, 0.0))

    def denominator(r):
        return r * (0.5 * r * r)

    num = quadrature.integrate(numerator, 0.0, radius, tol * scale / 32.0)
    den = quadrature.integrate(denominator, 0.0, radius, tol * scale / 64.0)
    return Estimate(
        num.value / den.value,
        0.0,
        num.nodes + den.nodes,
        "quadrature",
        elapsed=time.perf_counter() - t0,
        notes={"tol": tol, "radius": radius, "measure": "bidisk", "numerator": num.value, "denominator": den.value},
    )


def mean_k2_angular_quadrature(tol: float = 1e-12) -> Estimate:
    """Rotation-invariant 2D mean as ``int_0^{pi/2} k(theta) 2 cos sin dtheta``.

    ``k(theta) = |cos - sin| / (cos + sin)``; split at ``pi/4`` where ``k``
    has a kink.
    """
    t0 = time.perf_counter()

    def f(th):
        c, s = np.cos(th), np.sin(th)
        return np.abs(c - s) / (c + s) * 2.0 * c * s

    left = quadrature.integrate(f, 0.0, np.pi / 4, tol / 2.0)
    right = quadrature.integrate(f, np.pi / 4, np.pi / 2, tol / 2.0)
    return Estimate(
        left.value + right.value,
        0.0,
        left.nodes + right.nodes,
        "quadrature",
        elapsed=time.perf_counter() - t0,
        notes={"tol": tol, "measure": "rotation_invariant"},
    )


def _statistic_fn(statistic: str, dim: int):
    if statistic not in STATISTICS:
        raise DomainError(f"unknown statistic {statistic!r}")
    if statistic == "k2":
        if dim != 2:
            raise DimensionMismatch("k2 needs a 2-dimensional ensemble")
        return k2_batch
    if statistic == "k3":
        if dim != 3:
            raise DimensionMismatch("k3 needs a 3-dimensional ensemble")
        return k3_batch
    if dim == 2:
        return _column_ratio2
    return column_bound3_batch


def _column_ratio2(m):
    n = np.sort(np.hypot(m[..., 0, :], m[..., 1, :]), axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(n[..., 0] > 0, n[..., 0] / n[..., 1], np.nan)


def mean_monte_carlo(
    stream: SampleStream, statistic: str, n: int, threads: int = 1
) -> Estimate:
    """Sample mean of ``statistic`` over the first ``n`` matrices of ``stream``.

    ``std_error`` is the unbiased sample standard deviation over ``sqrt(n)``.
    Blocks of samples are reduced with a fixed pairwise tree, so the result
    is bit-identical for every ``threads`` value.  Undefined samples (zero
    matrices or zero columns) are skipped and counted.
    """
    if n < 2:
        raise DomainError("Monte Carlo needs n >= 2")
    fn = _statistic_fn(statistic, stream.dim)

    def block(start, count):
        vals = fn(sample_block(stream, start, count))
        ok = ~np.isnan(vals)
        return Moments.of(vals[ok]), int(count - np.count_nonzero(ok))

    t0 = time.perf_counter()
    parts = map_blocks(block, n, threads)
    mom = reduce_moments([p[0] for p in parts])
    skipped = sum(p[1] for p in parts)
    if mom.count < 2:
        raise DomainError("fewer than two usable samples")
    var = mom.m2 / (mom.count - 1)
    return Estimate(
        mom.mean,
        math.sqrt(var / mom.count),
        n,
        "monte_carlo",
        seed=int(stream.seed),
        elapsed=time.perf_counter() - t0,
        skipped=skipped,
        notes={"statistic": statistic, "ensemble": type(stream.ensemble).__name__},
    )


def bound_mean_quadrature(dim: int, tol: float = 1e-12) -> Estimate:
    """Mean of ``smallest / largest`` column norm over the ordered unit simplex.

    For ``dim=2`` this is ``int_0^1 dy int_0^y z/y dz`` over the triangle
    area, for ``dim=3`` the analogous ratio over ``0 < u < v < w < 1``.  Each
    level is integrated with the adaptive rule.
    """
    if dim not in (2, 3):
        raise DomainError("dim must be 2 or 3")
    t0 = time.perf_counter()
    count = [0]

    def quad(f, a, b):
        res = quadrature.integrate(f, a, b, tol / 16.0)
        count[0] += res.nodes
        return res.value

    def vectorize(g):
        return lambda xs: np.array([g(float(x)) for x in xs])

    if dim == 2:
        num = quad(vectorize(lambda y: quad(lambda z: z / y, 0.0, y)), 0.0, 1.0)
        den = quad(vectorize(lambda y: quad(np.ones_like, 0.0, y)), 0.0, 1.0)
    else:
        num = quad(
            vectorize(lambda w: quad(vectorize(lambda v: quad(lambda u: u / w, 0.0, v)), 0.0, w)),
            0.0,
            1.0,
        )
        den = quad(
            vectorize(lambda w: quad(vectorize(lambda v: quad(np.ones_like, 0.0, v)), 0.0, w)),
            0.0,
            1.0,
        )
    return Estimate(
        num / den,
        0.0,
        count[0],
        "quadrature",
        elapsed=time.perf_counter() - t0,
        notes={"dim": dim, "numerator": num, "denominator": den},
    )


__all__ = [
    "EXACT_MEAN_K2",
    "ROTATION_INVARIANT_MEAN_K2",
    "Estimate",
    "bound_mean_quadrature",
    "inner_antiderivative",
    "mean_k2_angular_quadrature",
    "mean_k2_exact",
    "mean_k2_quadrature",
    "mean_monte_carlo",
]
