"""Monte Carlo and multi-scale control variate estimators.

The central object is the corrected estimator

    E_lambda[f] = E_M[f] - lambda (E_M[cv] - <cv>),

where f and cv are paired samples (same random inputs, sample by sample)
and <cv> is the control variate's own expectation, known either in
closed form or from a large independent ensemble of cheap solves.
lambda = 0 reduces to plain Monte Carlo bit for bit, lambda = 1 to the
micro-macro estimator; the variance-optimal choice is Cov/Var with the
unbiased sample formulas.  All estimator algebra is pointwise, so fields
of any shape pass through unchanged after the leading sample axis.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import PairingError, ParameterError

LAMBDA_GUARD_SCALE = 1e-14

_STREAM_IDS = {"paired": 0, "ensemble": 1, "validation": 2}


def sample_z(n, seed, d=1, stream="paired"):
    """Uniform samples on [0, 1], reproducible across platforms.

    The same (n, seed, stream) always yields the same sequence; the
    'paired' and 'ensemble' streams are independent of each other for a
    given seed, which is what keeps control variate ensembles independent
    of the paired kinetic samples.  Returns shape (n,) for d = 1, else
    (n, d).  n = 0 is allowed and gives an empty array.
    """
    n = int(n)
    if n < 0:
        raise ParameterError("sample count must be non-negative")
    if d < 1:
        raise ParameterError("dimension must be >= 1")
    if stream not in _STREAM_IDS:
        raise ParameterError(f"unknown stream {stream!r}")
    rng = np.random.default_rng([_STREAM_IDS[stream], int(seed)])
    z = rng.random((n, d))
    return z[:, 0] if d == 1 else z


def mc_estimate(samples, weights=None):
    """Plain Monte Carlo mean over the leading sample axis."""
    samples = np.asarray(samples, dtype=float)
    if samples.shape[0] == 0:
        raise ParameterError("cannot average an empty sample set")
    if weights is None:
        return np.mean(samples, axis=0)
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (samples.shape[0],):
        raise ParameterError("weights must match the sample axis")
    return np.tensordot(weights, samples, axes=(0, 0)) / weights.sum()


def var_cov_estimators(f_samples, cv_samples):
    """Unbiased sample variance and covariance (1/(M-1) normalization).

    Returns (var_f, var_cv, cov) pointwise over the field axes.
    """
    f_samples = np.asarray(f_samples, dtype=float)
    cv_samples = np.asarray(cv_samples, dtype=float)
    if f_samples.shape != cv_samples.shape:
        raise PairingError("paired sample arrays must have identical shapes")
    m = f_samples.shape[0]
    if m < 2:
        raise ParameterError("variance estimation needs at least 2 samples")
    df = f_samples - np.mean(f_samples, axis=0)
    dc = cv_samples - np.mean(cv_samples, axis=0)
    var_f = np.sum(df * df, axis=0) / (m - 1)
    var_cv = np.sum(dc * dc, axis=0) / (m - 1)
    cov = np.sum(df * dc, axis=0) / (m - 1)
    return var_f, var_cv, cov


def lambda_star(f_samples, cv_samples, guard_scale=LAMBDA_GUARD_SCALE):
    """Variance-optimal lambda = Cov / Var, guarded against degeneracy.

    The denominator carries a floor delta = guard_scale * max(Var[cv])
    and lambda is set to zero wherever the control variate samples are
    all identical, so deterministic control variates reduce the
    estimator to plain Monte Carlo bit for bit.  The identical-sample
    test is bitwise: the sample variance of equal values is zero in
    exact arithmetic even though the mean rounds by an ulp.
    """
    _, var_cv, cov = var_cov_estimators(f_samples, cv_samples)
    cv_samples = np.asarray(cv_samples, dtype=float)
    degenerate = np.all(cv_samples == cv_samples[:1], axis=0)
    var_cv = np.atleast_1d(var_cv)
    cov = np.atleast_1d(cov)
    degenerate = np.atleast_1d(degenerate) | (var_cv == 0.0)
    vmax = float(np.max(np.where(degenerate, 0.0, var_cv)))
    if vmax == 0.0:
        lam = np.zeros_like(var_cv)
    else:
        lam = cov / (var_cv + guard_scale * vmax)
        lam[degenerate] = 0.0
    return lam if lam.ndim and lam.size > 1 else float(lam.reshape(-1)[0])


def lambda_star_moment(f_moment_samples, cv_moment_samples, guard_scale=LAMBDA_GUARD_SCALE):
    """lambda_star computed on a macroscopic moment (e.g. temperature)
    instead of the distribution itself; one value per space point."""
    return lambda_star(f_moment_samples, cv_moment_samples, guard_scale)


def lambda_cost_corrected(lam_star, m, m_e):
    """Finite-budget correction M_E / (M + M_E) * lambda_star."""
    if m < 1 or m_e < 1:
        raise ParameterError("sample counts must be positive")
    return (m_e / (m + m_e)) * np.asarray(lam_star, dtype=float)


def control_variate_estimate(f_samples, cv_samples, cv_mean, lam):
    """The estimator formula itself; lam broadcasts pointwise."""
    mean_f = mc_estimate(f_samples)
    mean_cv = mc_estimate(cv_samples)
    return mean_f - np.asarray(lam) * (mean_cv - cv_mean)


@dataclass
class EstimatorResult:
    """Value and bookkeeping of one estimator evaluation."""
    value: np.ndarray
    lam: object
    mode: str
    m: int
    m_e: int = 0
    diagnostics: dict = field(default_factory=dict)


def _resolve_lambda(mode, f_samples, cv_samples, m_e, guard_scale):
    if isinstance(mode, (int, float, np.ndarray)):
        return np.asarray(mode, dtype=float), "given"
    if mode == "zero":
        return 0.0, mode
    if mode == "one":
        return 1.0, mode
    if mode == "optimal":
        return lambda_star(f_samples, cv_samples, guard_scale), mode
    if mode == "cost-corrected":
        if m_e is None or m_e < 1:
            raise ParameterError("cost-corrected lambda needs the ensemble size M_E")
        lam = lambda_star(f_samples, cv_samples, guard_scale)
        return lambda_cost_corrected(lam, f_samples.shape[0], m_e), mode
    raise ParameterError(f"unknown lambda mode {mode!r}")


def mscv_estimate_homogeneous(f_samples, cv_samples, cv_mean, lam_mode="optimal",
                              m_e=None, guard_scale=LAMBDA_GUARD_SCALE):
    """Control variate estimator for space-homogeneous problems.

    cv_mean is the exact (closed-form or collocation) expectation of the
    control variate.  lam_mode is 'zero', 'one', 'optimal',
    'cost-corrected', or an explicit numeric lambda.
    """
    f_samples = np.asarray(f_samples, dtype=float)
    cv_samples = np.asarray(cv_samples, dtype=float)
    if f_samples.shape[0] != cv_samples.shape[0]:
        raise PairingError("kinetic and control variate sample counts differ")
    if f_samples.shape[0] == 0:
        raise ParameterError("cannot estimate from zero samples")
    lam, mode = _resolve_lambda(lam_mode, f_samples, cv_samples, m_e, guard_scale)
    value = control_variate_estimate(f_samples, cv_samples, cv_mean, lam)
    return EstimatorResult(value=value, lam=lam, mode=mode, m=f_samples.shape[0],
                           m_e=0 if m_e is None else int(m_e))


def mscv_estimate_field(f_samples, cv_samples, cv_ensemble_mean, lam_mode="optimal",
                        z_paired=None, z_cv=None, m_e=None,
                        guard_scale=LAMBDA_GUARD_SCALE):
    """Control variate estimator for space-dependent problems.

    The pairing contract is enforced: when the random inputs behind the
    kinetic samples (z_paired) and behind the control variate samples
    (z_cv) are given, they must agree exactly, element by element.
    cv_ensemble_mean is the independent-ensemble estimate of <cv>.
    """
    if (z_paired is None) != (z_cv is None):
        raise PairingError("pass both z_paired and z_cv, or neither")
    if z_paired is not None and not np.array_equal(np.asarray(z_paired), np.asarray(z_cv)):
        raise PairingError("control variate samples were not generated from the "
                           "same random inputs as the kinetic samples")
    return mscv_estimate_homogeneous(f_samples, cv_samples, cv_ensemble_mean,
                                     lam_mode, m_e, guard_scale)


@dataclass
class CostModel:
    """Per-solve cost ratios of the kinetic solver against the two
    control variate solvers, in the fast spectral cost model

        cost(kinetic) = C n_angles^(d_v - 1) n_v^d_v log2(n_v^d_v) n_x^d_x,
        cost(bgk cv)  = C1 n_v^d_v n_x^d_x,
        cost(euler cv) = C2 n_x^d_x.

    ratio_bgk is C/C1, ratio_euler is C/C2.
    """
    n_v: int
    n_angles: int
    d_v: int = 2
    ratio_bgk: float = 1.25
    ratio_euler: float = 1.0

    def work_factor_bgk(self):
        modes = self.n_v ** self.d_v
        return self.ratio_bgk * self.n_angles ** (self.d_v - 1) * np.log2(modes)

    def work_factor_euler(self):
        modes = self.n_v ** self.d_v
        return self.ratio_euler * self.n_angles ** (self.d_v - 1) * modes * np.log2(modes)


def allocate_samples(cost, m):
    """Ensemble sizes affordable at the cost of M kinetic solves.

    Returns (m_e_bgk, m_e_euler), floor-rounded: how many BGK or Euler
    control variate solves match the budget of the M kinetic solves.
    """
    if m < 1:
        raise ParameterError("need at least one kinetic sample")
    m_e_bgk = int(np.floor(m * cost.work_factor_bgk()))
    m_e_euler = int(np.floor(m * cost.work_factor_euler()))
    return m_e_bgk, m_e_euler


def variance_reduction_report(f_samples, cv_samples, guard_scale=LAMBDA_GUARD_SCALE):
    """Correlation, predicted and measured variance reduction factors.

    predicted = 1 - rho^2 from the sample correlation; observed is the
    measured variance of the corrected samples over the variance of the
    raw ones.  Degenerate (zero-variance) inputs report rho = nan and
    factor 1.  Fields are reduced to scalars by averaging the pointwise
    variances, matching how total estimator variance adds up.
    """
    f_samples = np.asarray(f_samples, dtype=float)
    cv_samples = np.asarray(cv_samples, dtype=float)
    var_f, var_cv, cov = var_cov_estimators(f_samples, cv_samples)
    tot_f = float(np.mean(var_f))
    tot_cv = float(np.mean(var_cv))
    if tot_f == 0.0 or tot_cv == 0.0:
        return {"rho": float("nan"), "predicted_factor": 1.0,
                "observed_factor": 1.0, "lam": 0.0}
    lam = lambda_star(f_samples, cv_samples, guard_scale)
    rho = float(np.mean(cov) / np.sqrt(tot_f * tot_cv))
    resid = f_samples - np.asarray(lam) * (cv_samples - np.mean(cv_samples, axis=0))
    var_resid = np.sum((resid - np.mean(resid, axis=0)) ** 2, axis=0) / (f_samples.shape[0] - 1)
    observed = float(np.mean(var_resid) / tot_f)
    return {"rho": rho, "predicted_factor": 1.0 - rho ** 2,
            "observed_factor": observed, "lam": lam}
