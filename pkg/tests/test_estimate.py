import math
import time

import numpy as np
import pytest
import sympy as sp
from scipy import integrate as sp_integrate

from deformlab import (
    EXACT_MEAN_K2,
    ROTATION_INVARIANT_MEAN_K2,
    DimensionMismatch,
    DomainError,
    GaussianIID,
    OrderedSimplexColumns,
    SampleStream,
    UniformBall4,
    UniformBidisk,
    bound_mean_quadrature,
    column_bound2,
    column_bound3,
    inner_antiderivative,
    k2,
    k3,
    mean_k2_angular_quadrature,
    mean_k2_exact,
    mean_k2_quadrature,
    mean_monte_carlo,
)
from deformlab.sampling import sample_block


def test_constants_symbolic():
    r, rho = sp.symbols("r rho", positive=True)
    inner = sp.integrate(rho * (r - rho) / (r + rho), (rho, 0, r))
    bidisk = sp.integrate(r * inner, (r, 0, 1)) / sp.integrate(r * r**2 / 2, (r, 0, 1))
    assert float(sp.N(bidisk - (3 - 4 * sp.log(2)), 30)) == pytest.approx(0.0, abs=1e-25)
    # Rotation-invariant law: angular density 2 cos sin on [0, pi/2]; with
    # t = tan(theta) the half on [0, pi/4] becomes a rational integral.
    t = sp.symbols("t", positive=True)
    half = sp.integrate((1 - t) / (1 + t) * 2 * t / (1 + t**2) ** 2, (t, 0, 1))
    assert sp.simplify(2 * half - (1 - sp.log(2))) == 0


def test_mean_k2_exact():
    e = mean_k2_exact()
    assert e.value == EXACT_MEAN_K2 == 3 - 4 * math.log(2)
    assert e.value == pytest.approx(0.227411277760219, abs=1e-15)
    assert e.std_error == 0.0 and e.method == "exact"
    assert mean_k2_exact("rotation_invariant").value == ROTATION_INVARIANT_MEAN_K2
    with pytest.raises(DomainError):
        mean_k2_exact("lebesgue")


def test_antiderivative_values():
    assert inner_antiderivative(1.0, 1.0) - inner_antiderivative(1.0, 0.0) == pytest.approx(
        1.5 - 2 * math.log(2), abs=1e-15
    )
    ref, _ = sp_integrate.quad(lambda p: p * (1 - p) / (1 + p), 0, 1, epsabs=1e-15)
    assert 1.5 - 2 * math.log(2) == pytest.approx(ref, abs=1e-14)
    assert 1.5 - 2 * math.log(2) == pytest.approx(0.1137056, abs=1e-7)
    for r in (0.3, 1.0, 2.5):
        assert inner_antiderivative(r, 0.0) == pytest.approx(-2 * r * r * math.log(r), abs=1e-15)


@pytest.mark.parametrize("r, rho", [(2.0, 1.0), (1.0, 0.5), (0.7, 3.0)])
def test_antiderivative_derivative(r, rho):
    h = 1e-6
    fd = (inner_antiderivative(r, rho + h) - inner_antiderivative(r, rho - h)) / (2 * h)
    assert fd == pytest.approx(rho * (r - rho) / (r + rho), abs=1e-9)


def test_antiderivative_domain():
    with pytest.raises(DomainError):
        inner_antiderivative(0.0, 0.0)
    with pytest.raises(DomainError):
        inner_antiderivative(-1.0, 1.0)


def test_quadrature_value_and_parts():
    e = mean_k2_quadrature(1e-10)
    assert abs(e.value - EXACT_MEAN_K2) < 1e-10
    assert e.method == "quadrature" and e.std_error == 0.0
    assert e.notes["denominator"] == pytest.approx(1 / 8, abs=1e-15)
    assert e.notes["numerator"] == pytest.approx((1.5 - 2 * math.log(2)) / 4, abs=1e-12)
    assert e.notes["numerator"] == pytest.approx(0.0284264, abs=1e-7)
    brute, _ = sp_integrate.dblquad(
        lambda p, r: r * p * (r - p) / (r + p), 0, 1, 0, lambda r: r, epsabs=1e-13
    )
    assert e.notes["numerator"] == pytest.approx(brute, abs=1e-11)


def test_quadrature_radius_independent():
    vals = [mean_k2_quadrature(1e-10, radius=R).value for R in (0.5, 1.0, 2.0)]
    assert max(vals) - min(vals) < 1e-10


def test_quadrature_is_fast():
    t0 = time.perf_counter()
    mean_k2_quadrature(1e-10)
    assert time.perf_counter() - t0 < 1.0


def test_quadrature_tol_domain():
    for bad in (1e-15, 1e-3, 0.0):
        with pytest.raises(DomainError):
            mean_k2_quadrature(bad)


def test_angular_quadrature():
    e = mean_k2_angular_quadrature()
    assert abs(e.value - (1 - math.log(2))) < 1e-12


@pytest.mark.parametrize("dim, expected", [(2, 0.5), (3, 1 / 3)])
def test_bound_integrals(dim, expected):
    e = bound_mean_quadrature(dim)
    assert abs(e.value - expected) < 1e-10
    with pytest.raises(DomainError):
        bound_mean_quadrature(4)


def test_monte_carlo_small_and_deterministic():
    s = SampleStream(1, GaussianIID(2))
    a = mean_monte_carlo(s, "k2", 200000, threads=1)
    b = mean_monte_carlo(s, "k2", 200000, threads=4)
    assert a.value == b.value and a.std_error == b.std_error
    assert a.method == "monte_carlo" and a.seed == 1 and a.n == 200000 and a.skipped == 0
    k = k2(sample_block(s, 0, 200000))
    assert a.value == pytest.approx(k.mean(), abs=1e-14)
    assert a.std_error == pytest.approx(k.std(ddof=1) / math.sqrt(len(k)), rel=1e-10)


def test_monte_carlo_errors():
    with pytest.raises(DimensionMismatch):
        mean_monte_carlo(SampleStream(1, GaussianIID(3)), "k2", 10)
    with pytest.raises(DimensionMismatch):
        mean_monte_carlo(SampleStream(1, GaussianIID(2)), "k3", 10)
    with pytest.raises(DomainError):
        mean_monte_carlo(SampleStream(1, GaussianIID(2)), "k2", 1)
    with pytest.raises(DomainError):
        mean_monte_carlo(SampleStream(1, GaussianIID(2)), "median", 10)


@pytest.mark.slow
def test_three_way_agreement_bidisk():
    q = mean_k2_quadrature(1e-10)
    mc = mean_monte_carlo(SampleStream(1, UniformBidisk()), "k2", 10**6)
    assert abs(q.value - EXACT_MEAN_K2) < 1e-8
    assert abs(mc.value - EXACT_MEAN_K2) < 3 * mc.std_error
    assert abs(mc.value - q.value) < 3 * mc.std_error


@pytest.mark.slow
def test_rotation_invariant_ensembles_agree():
    g = mean_monte_carlo(SampleStream(1, GaussianIID(2)), "k2", 10**6)
    b = mean_monte_carlo(SampleStream(1, UniformBall4()), "k2", 10**6)
    assert abs(g.value - b.value) < 3 * math.hypot(g.std_error, b.std_error)
    assert abs(g.value - ROTATION_INVARIANT_MEAN_K2) < 3 * g.std_error
    assert g.value < 0.5


@pytest.mark.slow
def test_k3_mean_and_bound_chain():
    e = mean_monte_carlo(SampleStream(1, GaussianIID(3)), "k3", 10**6, threads=4)
    assert 0.10 <= e.value <= 0.20
    assert e.value < 1 / 3


@pytest.mark.slow
def test_column_ratio_mc():
    e = mean_monte_carlo(SampleStream(1, OrderedSimplexColumns(2)), "column_ratio", 10**6)
    assert abs(e.value - 0.5) < 3 * e.std_error


def test_per_sample_bound():
    m2 = sample_block(SampleStream(3, GaussianIID(2)), 0, 20000)
    assert np.all(k2(m2) <= column_bound2(m2) + 1e-12)
    m3 = sample_block(SampleStream(3, GaussianIID(3)), 0, 20000)
    assert np.all(k3(m3) <= column_bound3(m3) + 1e-12)
