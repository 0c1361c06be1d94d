"""Compressible Euler equations in one space and two velocity dimensions.

The gas has two translational degrees of freedom, so gamma = 2 and the
ideal-gas closure reads p = rho T, E = p/(gamma - 1) + rho |u|^2 / 2.
The transverse momentum rho u_y is carried passively.  Conserved state
arrays have shape (..., 4, n_x) with components (rho, rho u_x, rho u_y, E);
leading axes are sample batches.

Discretization: component-wise WENO5 finite differences with global
Lax-Friedrichs flux splitting and two-stage SSP Runge-Kutta in time.
"""

import numpy as np

from . import weno
from .equilibrium import moment_matched_maxwellian
from .errors import NumericalError, ParameterError

GAMMA = 2.0


def primitive(U):
    """Primitive variables (rho, ux, uy, p, T, c) from conserved state.

    Raises a numerical error if density or pressure is not positive
    anywhere, which is how lost positivity surfaces.
    """
    U = np.asarray(U, dtype=float)
    rho = U[..., 0, :]
    if np.any(rho <= 0) or not np.all(np.isfinite(rho)):
        raise NumericalError("non-positive or non-finite density in Euler state")
    ux = U[..., 1, :] / rho
    uy = U[..., 2, :] / rho
    p = (GAMMA - 1.0) * (U[..., 3, :] - 0.5 * rho * (ux ** 2 + uy ** 2))
    if np.any(p <= 0) or not np.all(np.isfinite(p)):
        raise NumericalError("non-positive or non-finite pressure in Euler state")
    T = p / rho
    c = np.sqrt(GAMMA * T)
    return rho, ux, uy, p, T, c


def conserved(rho, ux, uy, p):
    """Conserved state (..., 4, n_x) from primitive fields."""
    rho = np.asarray(rho, dtype=float)
    E = p / (GAMMA - 1.0) + 0.5 * rho * (np.asarray(ux) ** 2 + np.asarray(uy) ** 2)
    return np.stack([rho, rho * ux, rho * uy, E], axis=-2)


def euler_flux(U):
    """Physical flux of the conserved state along x."""
    rho, ux, uy, p, _, _ = primitive(U)
    E = np.asarray(U, dtype=float)[..., 3, :]
    return np.stack([rho * ux, rho * ux ** 2 + p, rho * uy * ux, (E + p) * ux], axis=-2)


def max_signal_speed(U):
    """Largest |u_x| + c per sample, the global Lax-Friedrichs constant."""
    _, ux, _, _, _, c = primitive(U)
    return np.max(np.abs(ux) + c, axis=-1)


def _pad_state(U, boundary):
    if boundary in ("periodic", "outflow"):
        return weno.pad(U, boundary)
    if boundary == "reflect":
        # mirror about the wall face with the normal velocity flipped
        widths = [(0, 0)] * (U.ndim - 1) + [(3, 3)]
        P = np.pad(U, widths, mode="symmetric")
        P[..., 1, :3] *= -1.0
        P[..., 1, -3:] *= -1.0
        return P
    raise ParameterError(f"unknown boundary mode {boundary!r}")


def euler_rhs(U, dx, boundary="outflow"):
    """Semi-discrete right-hand side -d/dx F(U) with WENO5 upwinding."""
    P = _pad_state(U, boundary)
    F = euler_flux(P)
    alpha = max_signal_speed(P)[..., None, None]
    f_plus = 0.5 * (F + alpha * P)
    f_minus = 0.5 * (F - alpha * P)
    dF = (weno.upwind_derivative(f_plus, dx, True)
          + weno.upwind_derivative(f_minus, dx, False))
    return -dF


def euler_step(U, dt, dx, boundary="outflow"):
    """One SSP-RK2 (Heun) step of the semi-discrete Euler system."""
    if U.shape[-1] < 7:
        raise ParameterError("need at least 7 cells for the WENO5 stencil")
    U1 = U + dt * euler_rhs(U, dx, boundary)
    out = 0.5 * U + 0.5 * (U1 + dt * euler_rhs(U1, dx, boundary))
    if not np.all(np.isfinite(out)):
        raise NumericalError("non-finite state after Euler step")
    return out


def solve_euler(U0, dt, t_final, dx, boundary="outflow", record_every=1):
    """Integrate to t_final, recording every record_every steps.

    Returns (times, states) with states stacked on a new leading axis;
    t = 0 and the final time are always recorded.
    """
    if not dt > 0:
        raise ParameterError("dt must be positive")
    n_steps = int(round(t_final / dt))
    if abs(n_steps * dt - t_final) > 1e-9 * max(1.0, abs(t_final)):
        raise ParameterError(f"t_final = {t_final} is not a multiple of dt = {dt}")
    U = np.array(U0, dtype=float, copy=True)
    times = [0.0]
    states = [U.copy()]
    for step in range(1, n_steps + 1):
        try:
            U = euler_step(U, dt, dx, boundary)
        except NumericalError as exc:
            raise NumericalError(f"{exc} (step {step})") from exc
        if step % record_every == 0 or step == n_steps:
            times.append(step * dt)
            states.append(U.copy())
    return np.array(times), np.stack(states, axis=0)


def lift_to_equilibrium(U, grid):
    """Local Maxwellians with the discrete moments of the Euler state.

    U is (..., 4, n_x); the result is (..., n_x, n, n).  The Euler energy
    and the kinetic energy moment agree because gamma = 2 matches two
    velocity dimensions, so the lift is moment-exact by construction.
    """
    U = np.asarray(U, dtype=float)
    rho, ux, uy, _, _, _ = primitive(U)
    energy = U[..., 3, :]
    return moment_matched_maxwellian((rho, ux, uy, energy), grid)
