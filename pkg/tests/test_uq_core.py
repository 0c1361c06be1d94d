"""Sampling, estimator algebra, lambda selection, cost model."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kinetic_uq import (CostModel, allocate_samples, lambda_cost_corrected,
                        lambda_star, lambda_star_moment, mc_estimate,
                        mscv_estimate_field, mscv_estimate_homogeneous,
                        sample_z, var_cov_estimators,
                        variance_reduction_report)
from kinetic_uq.errors import PairingError, ParameterError
from kinetic_uq.uq_core import control_variate_estimate


# ---------------------------------------------------------------------------
# sampling streams

def test_sample_z_reproducible_and_stream_separated():
    a = sample_z(100, seed=7)
    b = sample_z(100, seed=7)
    assert np.array_equal(a, b)
    assert a.shape == (100,)
    assert np.all((a >= 0) & (a < 1))
    c = sample_z(100, seed=7, stream="ensemble")
    d = sample_z(100, seed=7, stream="validation")
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)
    assert not np.array_equal(c, d)
    # different seeds differ
    assert not np.array_equal(a, sample_z(100, seed=8))


def test_sample_z_shapes_and_validation():
    assert sample_z(5, 0, d=3).shape == (5, 3)
    assert sample_z(0, 0).shape == (0,)
    with pytest.raises(ParameterError):
        sample_z(-1, 0)
    with pytest.raises(ParameterError):
        sample_z(5, 0, d=0)
    with pytest.raises(ParameterError):
        sample_z(5, 0, stream="nope")


# ---------------------------------------------------------------------------
# variance / covariance / lambda

def test_var_cov_hand_oracle():
    # f = {1,2,3}, cv = {2,4,6}: Var(f)=1, Var(cv)=4, Cov=2 with 1/(M-1)
    f = np.array([1.0, 2.0, 3.0])
    c = np.array([2.0, 4.0, 6.0])
    var_f, var_c, cov = var_cov_estimators(f, c)
    assert var_f == pytest.approx(1.0)
    assert var_c == pytest.approx(4.0)
    assert cov == pytest.approx(2.0)
    assert lambda_star(f, c) == pytest.approx(0.5, rel=1e-12)


def test_var_cov_validates_inputs():
    with pytest.raises(PairingError):
        var_cov_estimators(np.ones((3, 2)), np.ones((3, 3)))
    with pytest.raises(ParameterError):
        var_cov_estimators(np.ones(1), np.ones(1))


def test_lambda_star_degenerate_cv_is_exact_zero():
    f = np.array([1.0, 2.0, 3.0, 4.0])
    c = np.full(4, 0.1)  # identical samples; mean rounds by an ulp
    assert lambda_star(f, c) == 0.0
    # mixed field: one degenerate point, one live point
    cf = np.stack([np.full(4, 0.1), np.array([2.0, 4.0, 6.0, 8.0])], axis=1)
    ff = np.stack([f, f], axis=1)
    lam = lambda_star(ff, cf)
    assert lam[0] == 0.0
    assert lam[1] == pytest.approx(0.5, rel=1e-10)


def test_lambda_zero_estimate_is_plain_mc_bitwise():
    rng = np.random.default_rng(3)
    f = rng.standard_normal((10, 7, 5))
    c = rng.standard_normal((10, 7, 5))
    est = control_variate_estimate(f, c, rng.standard_normal((7, 5)), 0.0)
    assert np.array_equal(est, mc_estimate(f))


def test_lambda_modes_through_estimator_front_end():
    rng = np.random.default_rng(11)
    f = rng.standard_normal((20, 4))
    c = 0.5 * f + 0.1 * rng.standard_normal((20, 4))
    cm = np.zeros(4)
    r0 = mscv_estimate_homogeneous(f, c, cm, lam_mode="zero")
    assert np.array_equal(r0.value, mc_estimate(f))
    assert r0.mode == "zero" and r0.m == 20
    r1 = mscv_estimate_homogeneous(f, c, cm, lam_mode="one")
    expect = mc_estimate(f) - 1.0 * (mc_estimate(c) - cm)
    assert np.array_equal(r1.value, expect)
    ropt = mscv_estimate_homogeneous(f, c, cm, lam_mode="optimal")
    assert np.all(np.isfinite(ropt.value))
    rgiven = mscv_estimate_homogeneous(f, c, cm, lam_mode=0.7)
    assert rgiven.mode == "given"
    with pytest.raises(ParameterError):
        mscv_estimate_homogeneous(f, c, cm, lam_mode="bogus")
    with pytest.raises(ParameterError):
        mscv_estimate_homogeneous(f, c, cm, lam_mode="cost-corrected")


def test_pairing_contract_on_field_estimator():
    rng = np.random.default_rng(1)
    f = rng.standard_normal((6, 3))
    c = rng.standard_normal((6, 3))
    z = sample_z(6, 0)
    # matching z passes
    mscv_estimate_field(f, c, np.zeros(3), z_paired=z, z_cv=z.copy())
    with pytest.raises(PairingError):
        mscv_estimate_field(f, c, np.zeros(3), z_paired=z,
                            z_cv=sample_z(6, 0, stream="ensemble"))
    with pytest.raises(PairingError):
        mscv_estimate_field(f, c, np.zeros(3), z_paired=z)
    with pytest.raises(PairingError):
        mscv_estimate_field(f[:5], c, np.zeros(3))


def test_lambda_cost_corrected_limits():
    # huge ensemble: correction negligible
    assert lambda_cost_corrected(0.8, 10, 10 ** 6) == pytest.approx(0.8, rel=1e-5)
    # equal budgets: exactly half
    assert lambda_cost_corrected(0.8, 500, 500) == pytest.approx(0.4, rel=1e-14)
    expect = 0.5 * 1000.0 / 1010.0
    assert lambda_cost_corrected(0.5, 10, 1000) == pytest.approx(expect, rel=1e-14)
    with pytest.raises(ParameterError):
        lambda_cost_corrected(0.5, 0, 10)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1),
       st.floats(min_value=-2.0, max_value=2.0),
       st.floats(min_value=0.05, max_value=2.0))
def test_lambda_star_minimizes_residual_variance(seed, slope, noise):
    """The quadratic in lambda is minimized at the sample lambda*."""
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(40)
    f = slope * c + noise * rng.standard_normal(40)
    lam = lambda_star(f, c)

    def resid_var(l):
        r = f - l * (c - np.mean(c))
        return np.var(r, ddof=1)

    base = resid_var(lam)
    for l in np.linspace(lam - 1.0, lam + 1.0, 21):
        assert base <= resid_var(l) + 1e-12 * max(1.0, base)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_estimator_linear_in_lambda(seed):
    """Estimate(lam) interpolates linearly between MC and micro-macro."""
    rng = np.random.default_rng(seed)
    f = rng.standard_normal(12)
    c = rng.standard_normal(12)
    cm = float(rng.standard_normal())
    e0 = control_variate_estimate(f, c, cm, 0.0)
    e1 = control_variate_estimate(f, c, cm, 1.0)
    for lam in (-0.5, 0.3, 2.0):
        e = control_variate_estimate(f, c, cm, lam)
        assert e == pytest.approx((1 - lam) * e0 + lam * e1, rel=1e-10, abs=1e-12)


def test_lambda_star_moment_delegates():
    rng = np.random.default_rng(9)
    f = rng.standard_normal((8, 5))
    c = rng.standard_normal((8, 5))
    assert np.array_equal(np.asarray(lambda_star_moment(f, c)),
                          np.asarray(lambda_star(f, c)))


# ---------------------------------------------------------------------------
# cost model and allocation

def test_cost_model_work_factors_hand_values():
    cm = CostModel(n_v=32, n_angles=8)
    # 1.25 * 8 * log2(1024) = 100, 1.0 * 8 * 1024 * 10 = 81920
    assert cm.work_factor_bgk() == pytest.approx(100.0, rel=1e-14)
    assert cm.work_factor_euler() == pytest.approx(81920.0, rel=1e-14)


def test_allocation_matches_reference_budget():
    m_e_bgk, m_e_euler = allocate_samples(CostModel(n_v=32, n_angles=8), m=10)
    assert (m_e_bgk, m_e_euler) == (1000, 819200)
    with pytest.raises(ParameterError):
        allocate_samples(CostModel(n_v=32, n_angles=8), m=0)


# ---------------------------------------------------------------------------
# variance reduction report

def test_variance_reduction_report_tracks_correlation():
    rng = np.random.default_rng(21)
    c = rng.standard_normal(100000)
    f = c + 0.5 * rng.standard_normal(100000)
    rep = variance_reduction_report(f, c)
    rho = rep["rho"]
    assert rep["predicted_factor"] == pytest.approx(1 - rho ** 2, rel=1e-12)
    assert rep["observed_factor"] == pytest.approx(1 - rho ** 2, rel=0.05)
    # strongly correlated pair reduces variance a lot
    assert rep["observed_factor"] < 0.3


def test_variance_reduction_report_degenerate():
    rep = variance_reduction_report(np.ones(5), np.ones(5))
    assert np.isnan(rep["rho"])
    assert rep["predicted_factor"] == 1.0
    assert rep["observed_factor"] == 1.0
