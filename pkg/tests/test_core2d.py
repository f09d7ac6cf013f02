import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import radical_k2, random_orthogonal
from deformlab import (
    PolarForm,
    ZeroColumn,
    ZeroMatrix,
    column_bound2,
    from_polar,
    k2,
    k2_polar,
    singular_pair,
    to_polar,
)
from deformlab.errors import DomainError

PHI = (1 + math.sqrt(5)) / 2
SHEAR = [[1.0, 1.0], [0.0, 1.0]]

entries = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False)
matrices = arrays(np.float64, (2, 2), elements=entries).filter(lambda m: np.abs(m).max() > 1e-3)


@pytest.mark.parametrize(
    "m, expected",
    [
        (np.eye(2), (1.0, 1.0)),
        ([[3.0, 0.0], [0.0, 1.0]], (3.0, 1.0)),
        (SHEAR, (PHI, PHI - 1)),
        (np.zeros((2, 2)), (0.0, 0.0)),
    ],
)
def test_singular_pair_examples(m, expected):
    p, q = singular_pair(m)
    assert p == pytest.approx(expected[0], rel=1e-15)
    assert q == pytest.approx(expected[1], rel=1e-15)


def test_singular_pair_matches_numpy(rng):
    m = rng.normal(size=(1000, 2, 2))
    p, q = singular_pair(m)
    s = np.linalg.svd(m, compute_uv=False)
    np.testing.assert_allclose(p, s[:, 0], rtol=1e-13)
    np.testing.assert_allclose(q, s[:, 1], rtol=1e-12, atol=1e-15 * s[:, 0].max())


@pytest.mark.parametrize(
    "m, expected",
    [
        (np.eye(2), 1.0),
        ([[2.0, 0.0], [0.0, 1.0]], 0.5),
        (SHEAR, (3 - math.sqrt(5)) / 2),
        ([[2.0, 1.0], [-1.0, 0.0]], 3 - 2 * math.sqrt(2)),
        ([[1.0, 2.0], [2.0, 4.0]], 0.0),
    ],
)
def test_k2_examples(m, expected):
    assert k2(m) == pytest.approx(expected, abs=1e-15)


def test_k2_zero_matrix():
    with pytest.raises(ZeroMatrix):
        k2(np.zeros((2, 2)))


def test_k2_rejects_bad_input():
    with pytest.raises(DomainError):
        k2([[1.0, np.nan], [0.0, 1.0]])
    with pytest.raises(DomainError):
        k2(np.eye(3))


def test_k2_matches_radical_well_conditioned(rng):
    for m in rng.normal(size=(2000, 2, 2)):
        s = np.linalg.svd(m, compute_uv=False)
        if s[0] / s[1] > 1e3:
            continue
        assert abs(k2(m) - radical_k2(m)) < 1e-12


def test_k2_batched():
    out = k2(np.stack([np.eye(2), np.diag([2.0, 1.0])]))
    np.testing.assert_array_equal(out, [1.0, 0.5])


@pytest.mark.parametrize("eps", [1e-8, 1e-100, 1e-300])
def test_near_singular_is_exact(eps):
    assert k2(np.diag([1.0, eps])) == eps
    assert singular_pair(np.diag([1.0, eps])) == (1.0, eps)


def test_large_entries_do_not_overflow():
    p, q = singular_pair([[1e200, 0.0], [0.0, 1e199]])
    assert p == pytest.approx(1e200, rel=1e-15)
    assert q == pytest.approx(1e199, rel=1e-15)


# --- polar form ---------------------------------------------------------


def test_to_polar_identity():
    pf = to_polar(np.eye(2))
    assert pf.r == 1.0 and pf.rho == 0.0
    assert pf.alpha == pytest.approx(math.pi / 2) and pf.beta == 0.0


def test_to_polar_swap_has_only_rho():
    # det = -1 < 0 so rho > r; z = 0, t = 1.
    pf = to_polar([[0.0, 1.0], [1.0, 0.0]])
    assert (pf.r, pf.rho, pf.alpha, pf.beta) == (0.0, 1.0, 0.0, 0.0)


def test_to_polar_worked_example():
    # a=2, b=1, c=-1, d=0 -> x=1, y=1, z=(b-c)/2=1, t=(b+c)/2=0.
    pf = to_polar([[2.0, 1.0], [-1.0, 0.0]])
    assert pf.r == pytest.approx(math.sqrt(2))
    assert pf.rho == pytest.approx(1.0)
    assert pf.alpha == pytest.approx(math.pi / 4)
    assert pf.beta == pytest.approx(math.pi / 2)
    np.testing.assert_allclose(from_polar(pf), [[2.0, 1.0], [-1.0, 0.0]], atol=1e-15)


def test_from_polar_examples():
    np.testing.assert_allclose(from_polar(PolarForm(1.0, 0.0, math.pi / 2, 0.0)), np.eye(2), atol=1e-16)
    np.testing.assert_array_equal(from_polar(PolarForm(0.0, 0.0, 1.3, 2.1)), np.zeros((2, 2)))
    with pytest.raises(ValueError):
        from_polar(PolarForm(-1.0, 0.0, 0.0, 0.0))


def test_polar_determinant_sign(rng):
    m = rng.normal(size=(1000, 2, 2))
    pf = to_polar(m)
    np.testing.assert_allclose(pf.r**2 - pf.rho**2, np.linalg.det(m), atol=1e-12)


@pytest.mark.parametrize(
    "r, rho, expected",
    [(1.0, 1.0, 0.0), (2.0, 0.0, 1.0), (1.0, math.sqrt(2), 3 - 2 * math.sqrt(2))],
)
def test_k2_polar_examples(r, rho, expected):
    assert k2_polar(PolarForm(r, rho, 0.3, 0.7)) == pytest.approx(expected, abs=1e-15)


def test_k2_polar_zero():
    with pytest.raises(ZeroMatrix):
        k2_polar(PolarForm(0.0, 0.0, 0.0, 0.0))


def test_polar_angles_canonical_and_in_range(rng):
    pf = to_polar(rng.normal(size=(1000, 2, 2)))
    assert np.all((pf.alpha >= 0) & (pf.alpha < 2 * math.pi))
    assert np.all((pf.beta >= 0) & (pf.beta < 2 * math.pi))
    assert to_polar([[-0.0, 0.0], [0.0, 0.0]]).alpha == 0.0


@settings(max_examples=300, deadline=None)
@given(matrices)
def test_polar_round_trip_and_consistency(m):
    pf = to_polar(m)
    np.testing.assert_allclose(from_polar(pf), m, rtol=0, atol=1e-12 * np.abs(m).max())
    assert abs(k2_polar(pf) - k2(m)) < 1e-12


# --- column bound -------------------------------------------------------


@pytest.mark.parametrize(
    "m, expected",
    [(np.eye(2), 1.0), ([[2.0, 0.0], [0.0, 1.0]], 0.5), (SHEAR, 1 / math.sqrt(2))],
)
def test_column_bound2_examples(m, expected):
    assert column_bound2(m) == pytest.approx(expected, rel=1e-15)
    assert k2(m) <= column_bound2(m) + 1e-14


def test_column_bound2_zero_column():
    with pytest.raises(ZeroColumn):
        column_bound2([[1.0, 0.0], [1.0, 0.0]])


# --- invariants ---------------------------------------------------------


@settings(max_examples=300, deadline=None)
@given(matrices)
def test_vieta_and_bound(m):
    p, q = singular_pair(m)
    T = float(np.sum(m * m))
    D = abs(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    assert p >= q >= 0
    assert abs(p * q - D) <= 1e-12 * p * p
    assert abs(p * p + q * q - T) <= 1e-12 * T
    if np.all(np.hypot(m[0], m[1]) > 0):
        assert k2(m) <= column_bound2(m) + 1e-14


@settings(max_examples=200, deadline=None)
@given(matrices, st.integers(0, 2**32 - 1))
def test_orthogonal_invariance(m, seed):
    q = random_orthogonal(np.random.default_rng(seed), 2)
    k = k2(m)
    assert abs(k2(q @ m) - k) < 1e-12
    assert abs(k2(m @ q) - k) < 1e-12


@settings(max_examples=200, deadline=None)
@given(matrices, st.sampled_from([1e-6, -1e-6, 1.0, -1.0, 1e6, -1e6]))
def test_scale_and_transpose_invariance(m, c):
    k = k2(m)
    assert abs(k2(c * m) - k) < 1e-12
    assert abs(k2(m.T) - k) < 1e-12


@settings(max_examples=200, deadline=None)
@given(matrices)
def test_inverse_invariance(m):
    if abs(np.linalg.det(m)) <= 1e-6:
        return
    assert abs(k2(np.linalg.inv(m)) - k2(m)) < 1e-9
