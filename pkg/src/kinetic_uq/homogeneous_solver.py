"""Time integration for space-homogeneous kinetic equations df/dt = Q(f),
plus closed-form BGK relaxation solutions and their expectations.

States are arrays (..., n, n); leading axes are sample batches that move
through the integrator together.
"""

import numpy as np

from .errors import NumericalError, ParameterError


def rk4_step(f, dt, rhs, step_index=None):
    """One classical fourth-order Runge-Kutta step for df/dt = rhs(f).

    Raises a numerical error naming the step if non-finite values appear,
    which is how collision blow-up on too-coarse time steps surfaces.
    """
    k1 = rhs(f)
    k2 = rhs(f + 0.5 * dt * k1)
    k3 = rhs(f + 0.5 * dt * k2)
    k4 = rhs(f + dt * k3)
    out = f + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(out)):
        where = "" if step_index is None else f" at step {step_index}"
        raise NumericalError(f"non-finite state after time step{where}; "
                             f"the step size is likely too large")
    return out


def _step_count(dt, t_final):
    if not dt > 0:
        raise ParameterError("dt must be positive")
    if t_final < 0:
        raise ParameterError("t_final must be non-negative")
    n_steps = int(round(t_final / dt))
    if abs(n_steps * dt - t_final) > 1e-9 * max(1.0, abs(t_final)):
        raise ParameterError(f"t_final = {t_final} is not a multiple of dt = {dt}")
    return n_steps


def solve_homogeneous(f0, dt, t_final, rhs, record_every=1, callback=None):
    """Integrate df/dt = rhs(f) from 0 to t_final with RK4.

    Records the state every record_every steps (t = 0 and the final time
    always included) and returns (times, states) with states stacked on a
    new leading time axis.  callback(step, t, f), when given, runs after
    every step for streaming diagnostics.
    """
    n_steps = _step_count(dt, t_final)
    if record_every < 1:
        raise ParameterError("record_every must be >= 1")
    f = np.array(f0, dtype=float, copy=True)
    times = [0.0]
    states = [f.copy()]
    for step in range(1, n_steps + 1):
        f = rk4_step(f, dt, rhs, step_index=step)
        if callback is not None:
            callback(step, step * dt, f)
        if step % record_every == 0 or step == n_steps:
            times.append(step * dt)
            states.append(f.copy())
    return np.array(times), np.stack(states, axis=0)


def bgk_exact(f0, f_inf, nu, t):
    """Exact BGK relaxation e^(-nu t) f0 + (1 - e^(-nu t)) f_inf.

    Valid when the equilibrium of f0 is f_inf (conservation makes it
    time-independent).  nu and t broadcast against the batch axes of the
    fields, so per-sample rates pass as arrays shaped (..., 1, 1) after
    the implicit expansion done here.
    """
    nu = np.asarray(nu, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(nu <= 0):
        raise ParameterError("relaxation rate nu must be positive")
    if np.any(t < 0):
        raise ParameterError("time must be non-negative")
    decay = np.exp(-nu * t)
    if decay.ndim:
        decay = decay[..., None, None]
    f0 = np.asarray(f0, dtype=float)
    f_inf = np.asarray(f_inf, dtype=float)
    return f_inf + decay * (f0 - f_inf)


def bgk_exact_expectation(f0_mean, f_inf_mean, nu, t):
    """Expectation of the BGK solution when nu is deterministic: the
    closed form applied to the mean initial state and mean equilibrium."""
    return bgk_exact(f0_mean, f_inf_mean, nu, t)


def bgk_random_nu_expectation(f0_mean, f_inf_mean, nu_samples, t,
                              nu_bar=None, f0_samples=None, f_inf_samples=None):
    """Expectation of the BGK solution under a random relaxation rate.

    Splits E[e^(-nu t)(f0 - f_inf)] around the anchor rate nu_bar:

        E[f] = <f_inf> + E_M[(e^(-nu t) - e^(-nu_bar t)) (f0 - f_inf)]
               + e^(-nu_bar t) (<f0> - <f_inf>),

    where <.> are the (accurately known) means and the inner expectation
    runs over the supplied ensemble.  With z entering only through nu,
    omit the per-sample fields and the factored form is used.  nu_bar
    defaults to the ensemble mean of nu_samples.
    """
    nu_samples = np.asarray(nu_samples, dtype=float)
    if nu_samples.ndim != 1 or nu_samples.size == 0:
        raise ParameterError("nu_samples must be a nonempty 1d array")
    if np.any(nu_samples <= 0):
        raise ParameterError("relaxation rates must be positive")
    if t < 0:
        raise ParameterError("time must be non-negative")
    if nu_bar is None:
        nu_bar = float(np.mean(nu_samples))
    f0_mean = np.asarray(f0_mean, dtype=float)
    f_inf_mean = np.asarray(f_inf_mean, dtype=float)
    anchor = np.exp(-nu_bar * t)
    coeff = np.exp(-nu_samples * t) - anchor
    if (f0_samples is None) != (f_inf_samples is None):
        raise ParameterError("pass both per-sample fields or neither")
    if f0_samples is None:
        correction = float(np.mean(coeff)) * (f0_mean - f_inf_mean)
    else:
        f0_samples = np.asarray(f0_samples, dtype=float)
        f_inf_samples = np.asarray(f_inf_samples, dtype=float)
        if f0_samples.shape[0] != nu_samples.size or f_inf_samples.shape[0] != nu_samples.size:
            raise ParameterError("per-sample fields must match nu_samples in length")
        correction = np.tensordot(coeff, f0_samples - f_inf_samples, axes=(0, 0)) / nu_samples.size
    return f_inf_mean + correction + anchor * (f0_mean - f_inf_mean)
