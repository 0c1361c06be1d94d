"""Kinetic equations in one space and two velocity dimensions:

    df/dt + v_x df/dx = (1/eps) Q(f),

with Q either the BGK relaxation toward the local matched Maxwellian
(rate nu = b0 rho) or the spectral Boltzmann operator scaled by b0.
States are arrays (..., n_x, n_v, n_v); leading axes are sample batches.

Transport is a method-of-lines WENO5 upwind derivative per velocity
plane (the advection speed v_x is constant within a plane, so no flux
splitting is needed), composed with the collision term inside a two-stage
SSP Runge-Kutta step.  Boundary conditions: periodic, outflow, or
diffusive (thermalizing) walls on both ends.
"""

import numpy as np

from . import weno
from .collision_ops import q_bgk, q_boltzmann_fast
from .equilibrium import maxwellian
from .errors import NumericalError, ParameterError
from .phase_grid import moment_fields


def diffusive_wall(f_cell, T_w, side, grid):
    """Wall emission density for a thermalizing boundary.

    f_cell is the boundary-cell trace (..., n_v, n_v); T_w the wall
    temperature (scalar or batch array).  The emitted state is
    rho_w M_{T_w} with rho_w chosen so the net mass flux through the
    wall vanishes.  Returns (rho_w, M_w) with M_w the unit-density wall
    Maxwellian.  A negative emission demand (nonphysical boundary trace)
    raises a numerical error.
    """
    if side not in ("left", "right"):
        raise ParameterError("side must be 'left' or 'right'")
    f_cell = np.asarray(f_cell, dtype=float)
    T_w = np.asarray(T_w, dtype=float)
    if np.any(T_w <= 0):
        raise ParameterError("wall temperature must be positive")
    m_w = maxwellian(np.ones(T_w.shape), np.zeros(T_w.shape + (2,)), T_w, grid)
    v1 = grid.v1
    out_mask = v1 < 0 if side == "left" else v1 > 0
    dv = grid.cell_volume
    flux_out = (f_cell * np.where(out_mask, v1, 0.0)).sum(axis=(-2, -1)) * dv
    flux_in_unit = (m_w * np.where(out_mask, 0.0, v1)).sum(axis=(-2, -1)) * dv
    rho_w = -flux_out / flux_in_unit
    if np.any(rho_w < 0):
        raise NumericalError("diffusive wall asked for negative emission density; "
                             "boundary trace is nonphysical")
    return rho_w, m_w


def wall_net_flux(f, T_w_left, T_w_right, grid):
    """Net mass flux through each wall given the current boundary traces.

    Zero to rounding by construction of the emission density; recorded
    each step as a conservation diagnostic.  Returns (..., 2).
    """
    f = np.asarray(f, dtype=float)
    v1 = grid.v1
    dv = grid.cell_volume
    out = []
    for side, T_w, cell in (("left", T_w_left, f[..., 0, :, :]),
                            ("right", T_w_right, f[..., -1, :, :])):
        rho_w, m_w = diffusive_wall(cell, T_w, side, grid)
        out_mask = v1 < 0 if side == "left" else v1 > 0
        flux_out = (cell * np.where(out_mask, v1, 0.0)).sum(axis=(-2, -1)) * dv
        flux_in = (rho_w[..., None, None] * m_w * np.where(out_mask, 0.0, v1)).sum(axis=(-2, -1)) * dv
        out.append(flux_out + flux_in)
    return np.stack(out, axis=-1)


def _padded_planes(f, bc, grid, T_w_left=None, T_w_right=None):
    """Move x last, pad with ghosts per boundary mode.

    Returns q (..., n_v1, n_v2, n_x + 6).  For diffusive walls the
    incoming half-plane ghosts carry the wall emission; outgoing planes
    fall back to edge replication (their ghosts are downwind anyway).
    """
    q = np.moveaxis(np.asarray(f, dtype=float), -3, -1)
    if bc in ("periodic", "outflow"):
        return weno.pad(q, bc)
    if bc != "diffusive":
        raise ParameterError(f"unknown boundary mode {bc!r}")
    if T_w_left is None or T_w_right is None:
        raise ParameterError("diffusive walls need T_w_left and T_w_right")
    p = weno.pad(q, "outflow")
    n1 = grid.n_per_dim
    neg = slice(0, n1 // 2)   # v_x < 0 planes (centers are sorted)
    pos = slice(n1 // 2, n1)
    rho_l, m_l = diffusive_wall(f[..., 0, :, :], T_w_left, "left", grid)
    ghost_l = (rho_l[..., None, None] * m_l)[..., pos, :, None]
    p[..., pos, :, :3] = ghost_l
    rho_r, m_r = diffusive_wall(f[..., -1, :, :], T_w_right, "right", grid)
    ghost_r = (rho_r[..., None, None] * m_r)[..., neg, :, None]
    p[..., neg, :, -3:] = ghost_r
    return p


def transport_rhs(f, xgrid, vgrid, bc="periodic", T_w_left=None, T_w_right=None):
    """-v_x df/dx with per-plane WENO5 upwinding."""
    p = _padded_planes(f, bc, vgrid, T_w_left, T_w_right)
    n1 = vgrid.n_per_dim
    neg = slice(0, n1 // 2)
    pos = slice(n1 // 2, n1)
    der = np.empty_like(p[..., 3:-3])
    der[..., neg, :, :] = weno.upwind_derivative(p[..., neg, :, :], xgrid.dx, False)
    der[..., pos, :, :] = weno.upwind_derivative(p[..., pos, :, :], xgrid.dx, True)
    speed = vgrid.centers[:, None, None]
    return np.moveaxis(-speed * der, -1, -3)


def transport_step(f, dt, xgrid, vgrid, bc="periodic", T_w_left=None, T_w_right=None):
    """One SSP-RK2 step of pure transport (collisionless)."""
    def rhs(g):
        return transport_rhs(g, xgrid, vgrid, bc, T_w_left, T_w_right)
    f1 = f + dt * rhs(f)
    out = 0.5 * f + 0.5 * (f1 + dt * rhs(f1))
    if not np.all(np.isfinite(out)):
        raise NumericalError("non-finite state after transport step")
    return out


def collision_rhs(f, model, vgrid, b0=1.0, plan=None, kernel=None):
    """Collision term Q(f) per space cell for the chosen model.

    b0 is the kernel magnitude, scalar or batched (..., 1) against the
    space axis.  'bgk' relaxes at rate nu = b0 rho; 'boltzmann' scales
    the spectral operator by b0; 'none' returns zero (pure transport).
    """
    if model == "none":
        return np.zeros_like(f)
    if model == "bgk":
        rho = moment_fields(f, vgrid)[0]
        nu = np.asarray(b0, dtype=float) * rho
        return q_bgk(f, nu, vgrid)
    if model == "boltzmann":
        if plan is None or kernel is None:
            raise ParameterError("boltzmann model needs a spectral plan and kernel")
        q = q_boltzmann_fast(f, f, kernel, plan)
        b0 = np.asarray(b0, dtype=float)
        scale = b0 if b0.ndim == 0 else b0[..., None, None]
        return q * scale
    raise ParameterError(f"unknown collision model {model!r}")


def kinetic_rhs(f, eps, xgrid, vgrid, model, bc="periodic", b0=1.0,
                plan=None, kernel=None, T_w_left=None, T_w_right=None):
    """Full semi-discrete right-hand side, transport plus collisions/eps."""
    if not eps > 0:
        raise ParameterError("Knudsen number eps must be positive")
    rhs = transport_rhs(f, xgrid, vgrid, bc, T_w_left, T_w_right)
    if model != "none":
        rhs = rhs + collision_rhs(f, model, vgrid, b0, plan, kernel) / eps
    return rhs


def kinetic_step(f, dt, eps, xgrid, vgrid, model, bc="periodic", b0=1.0,
                 plan=None, kernel=None, T_w_left=None, T_w_right=None,
                 step_index=None):
    """One SSP-RK2 step of the full kinetic equation."""
    def rhs(g):
        return kinetic_rhs(g, eps, xgrid, vgrid, model, bc, b0, plan, kernel,
                           T_w_left, T_w_right)
    f1 = f + dt * rhs(f)
    out = 0.5 * f + 0.5 * (f1 + dt * rhs(f1))
    if not np.all(np.isfinite(out)):
        where = "" if step_index is None else f" at step {step_index}"
        raise NumericalError(f"non-finite kinetic state{where}; "
                             f"check the time step against transport and collision scales")
    return out


def solve_kinetic(f0, dt, t_final, eps, xgrid, vgrid, model, bc="periodic",
                  b0=1.0, plan=None, kernel=None, T_w_left=None, T_w_right=None,
                  record_every=1, track_wall_flux=False):
    """Integrate the kinetic equation, recording every record_every steps.

    Returns (times, states, diagnostics).  With track_wall_flux the
    worst net wall mass flux seen at any step is kept per wall in
    diagnostics['wall_flux_max'].
    """
    if not dt > 0:
        raise ParameterError("dt must be positive")
    if record_every < 1:
        raise ParameterError("record_every must be >= 1")
    n_steps = int(round(t_final / dt))
    if abs(n_steps * dt - t_final) > 1e-9 * max(1.0, abs(t_final)):
        raise ParameterError(f"t_final = {t_final} is not a multiple of dt = {dt}")
    f = np.array(f0, dtype=float, copy=True)
    times = [0.0]
    states = [f.copy()]
    wall_max = np.zeros(2)
    if track_wall_flux and bc == "diffusive":
        net = wall_net_flux(f, T_w_left, T_w_right, vgrid)
        wall_max = np.maximum(wall_max, np.max(np.abs(net.reshape(-1, 2)), axis=0))
    for step in range(1, n_steps + 1):
        f = kinetic_step(f, dt, eps, xgrid, vgrid, model, bc, b0, plan, kernel,
                         T_w_left, T_w_right, step_index=step)
        if track_wall_flux and bc == "diffusive":
            net = wall_net_flux(f, T_w_left, T_w_right, vgrid)
            wall_max = np.maximum(wall_max, np.max(np.abs(net.reshape(-1, 2)), axis=0))
        if step % record_every == 0 or step == n_steps:
            times.append(step * dt)
            states.append(f.copy())
    diagnostics = {"wall_flux_max": wall_max if track_wall_flux else None}
    return np.array(times), np.stack(states, axis=0), diagnostics
