"""Maxwellian equilibria: analytic, discretely moment-matched, and the
micro-macro split built on them.

On a truncated, finite velocity grid the analytic Maxwellian does not
reproduce its own parameters under the discrete quadrature.  Whenever a
scheme needs the discrete moments to match exactly (micro-macro
splitting, BGK relaxation, lifting macroscopic states), the matched
variant solves a small Newton problem for adjusted parameters.
"""

import numpy as np

from .errors import NumericalError, ParameterError
from .phase_grid import MomentSet, moment_fields

NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 50


def maxwellian(rho, u, T, grid):
    """Analytic Maxwellian rho/(2 pi T) exp(-|v-u|^2 / (2T)).

    rho, T and the two components of u may be scalars or arrays with a
    common batch shape; the result has that shape plus (n, n).  rho = 0
    gives the zero field regardless of T.
    """
    rho = np.asarray(rho, dtype=float)
    T = np.asarray(T, dtype=float)
    u = np.asarray(u, dtype=float)
    if u.shape[-1] != 2:
        raise ParameterError("u must have two components on the last axis")
    if np.any((T <= 0) & (rho != 0)):
        raise ParameterError("temperature must be positive where rho is nonzero")
    batch = np.broadcast_shapes(rho.shape, T.shape, u.shape[:-1])
    rho_b = np.broadcast_to(rho, batch)[..., None, None]
    T_b = np.broadcast_to(np.where(T > 0, T, 1.0), batch)[..., None, None]
    u1 = np.broadcast_to(u[..., 0], batch)[..., None, None]
    u2 = np.broadcast_to(u[..., 1], batch)[..., None, None]
    arg = ((grid.v1 - u1) ** 2 + (grid.v2 - u2) ** 2) / (2.0 * T_b)
    return rho_b / (2.0 * np.pi * T_b) * np.exp(-arg)


def maxwellian_from_moments(moments, grid):
    """Analytic Maxwellian with the parameters of a MomentSet."""
    return maxwellian(moments.rho, np.asarray(moments.u), moments.temperature, grid)


def _newton_moment_arrays(rho, u1, u2, energy, grid):
    """Newton solve for Maxwellian parameters whose discrete (quadrature)
    moments equal the targets.  All inputs share a batch shape."""
    ok = rho > 0
    # vacuum cells get a dummy admissible target and are zeroed afterwards
    rho = np.where(ok, rho, 1.0)
    u1 = np.where(ok, u1, 0.0)
    u2 = np.where(ok, u2, 0.0)
    energy = np.where(ok, energy, 1.0)
    T_target = (2.0 * energy / rho - (u1 ** 2 + u2 ** 2)) / 2.0
    if np.any((T_target <= 0) & ok):
        raise ParameterError("target moments imply a non-positive temperature")
    # start from the analytic parameters; on resolved grids this is
    # within quadrature error of the fixed point already
    p_rho = rho.astype(float).copy()
    p_u1 = np.array(u1, dtype=float, copy=True)
    p_u2 = np.array(u2, dtype=float, copy=True)
    p_T = T_target.astype(float).copy()
    target = np.stack([rho, rho * u1, rho * u2, energy], axis=-1)
    scale = np.maximum(np.abs(target), rho[..., None])
    dv = grid.cell_volume
    for _ in range(NEWTON_MAX_ITER):
        u = np.stack([p_u1, p_u2], axis=-1)
        f = maxwellian(p_rho, u, p_T, grid)
        c1 = grid.v1 - p_u1[..., None, None]
        c2 = grid.v2 - p_u2[..., None, None]
        csq = c1 ** 2 + c2 ** 2
        m_rho, m_u1, m_u2, m_E = moment_fields(f, grid)
        current = np.stack([m_rho, m_rho * m_u1, m_rho * m_u2, m_E], axis=-1)
        res = current - target
        if np.all(np.abs(res) / scale <= NEWTON_TOL):
            out = f
            break
        # derivative fields of the Maxwellian w.r.t. its four parameters
        d_rho = f / p_rho[..., None, None]
        d_u1 = f * c1 / p_T[..., None, None]
        d_u2 = f * c2 / p_T[..., None, None]
        d_T = f * (csq / (2.0 * p_T[..., None, None] ** 2) - 1.0 / p_T[..., None, None])
        derivs = (d_rho, d_u1, d_u2, d_T)
        jac = np.empty(res.shape + (4,))
        for j, d in enumerate(derivs):
            jac[..., 0, j] = d.sum(axis=(-2, -1)) * dv
            jac[..., 1, j] = (d * grid.v1).sum(axis=(-2, -1)) * dv
            jac[..., 2, j] = (d * grid.v2).sum(axis=(-2, -1)) * dv
            jac[..., 3, j] = 0.5 * (d * grid.vsq).sum(axis=(-2, -1)) * dv
        try:
            step = np.linalg.solve(jac, res[..., None])[..., 0]
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"singular Jacobian in moment matching: {exc}") from exc
        p_rho -= step[..., 0]
        p_u1 -= step[..., 1]
        p_u2 -= step[..., 2]
        p_T -= step[..., 3]
        if np.any(p_rho <= 0) or np.any(p_T <= 0):
            raise NumericalError(
                "moment matching left the admissible set (rho or T <= 0); "
                "the target state is not representable on this grid")
    else:
        worst = float(np.max(np.abs(res) / scale))
        raise NumericalError(
            f"moment matching did not reach {NEWTON_TOL:g} in "
            f"{NEWTON_MAX_ITER} iterations (worst scaled residual {worst:.3e})")
    if not np.all(ok):
        out = np.where(ok[..., None, None], out, 0.0)
    return out


def moment_matched_maxwellian(moments, grid):
    """Maxwellian-shaped field whose discrete moments equal the target.

    moments may be a MomentSet or a tuple of arrays (rho, u1, u2, energy)
    sharing a batch shape; the result appends the velocity shape.  The
    moment residual is driven below 1e-12 (scaled); failure to converge
    raises a numerical error.  rho = 0 cells come back as zero fields.
    """
    if isinstance(moments, MomentSet):
        rho = np.asarray(moments.rho, dtype=float)
        u = np.asarray(moments.u, dtype=float)
        e = np.asarray(moments.energy, dtype=float)
        rho, u1, u2, energy = np.atleast_1d(rho), np.atleast_1d(u[..., 0]), np.atleast_1d(u[..., 1]), np.atleast_1d(e)
        out = _newton_moment_arrays(rho, u1, u2, energy, grid)
        return out[0] if np.ndim(moments.rho) == 0 else out
    rho, u1, u2, energy = (np.asarray(a, dtype=float) for a in moments)
    if np.any(rho < 0):
        raise ParameterError("rho must be non-negative")
    return _newton_moment_arrays(rho, u1, u2, energy, grid)


def micro_macro_split(f, grid, f_eq=None, tol=1e-10):
    """Split f = f_eq + g with a moment-free fluctuation g.

    f_eq defaults to the moment-matched Maxwellian of f, in which case
    the discrete moments of g vanish by construction; a caller-supplied
    f_eq is checked to be moment-consistent with f to tol (relative to
    the density) and rejected otherwise.
    """
    f = np.asarray(f, dtype=float)
    rho_f, u1_f, u2_f, e_f = moment_fields(f, grid)
    if f_eq is None:
        f_eq = moment_matched_maxwellian(
            (np.atleast_1d(rho_f), np.atleast_1d(u1_f), np.atleast_1d(u2_f), np.atleast_1d(e_f)), grid)
        f_eq = f_eq.reshape(f.shape)
    else:
        f_eq = np.asarray(f_eq, dtype=float)
        g = f - f_eq
        dv = grid.cell_volume
        raw = (g.sum(axis=(-2, -1)) * dv,
               (g * grid.v1).sum(axis=(-2, -1)) * dv,
               (g * grid.v2).sum(axis=(-2, -1)) * dv,
               0.5 * (g * grid.vsq).sum(axis=(-2, -1)) * dv)
        ref = max(float(np.max(np.abs(rho_f))), 1.0)
        worst = max(float(np.max(np.abs(m))) for m in raw)
        if worst > tol * ref:
            raise NumericalError(
                f"supplied equilibrium is not moment-consistent with f "
                f"(worst moment residual {worst:.3e} > {tol:g} * {ref:g})")
    return f_eq, f - f_eq
