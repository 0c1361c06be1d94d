"""Grids in velocity and physical space, moments, and weighted norms.

Velocity space is a uniform cell-centered tensor grid on the square
[-v_max, v_max]^2.  Distribution functions are plain numpy arrays whose
last two axes run over the two velocity components; any leading axes are
treated as batch axes (samples, space cells, time, ...).
"""

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError


class VelocityGrid:
    """Uniform cell-centered velocity grid on [-v_max, v_max]^2.

    Centers are built as (j - (n-1)/2) * spacing so that the grid is
    symmetric under v -> -v to the last bit, which keeps reflections and
    parity arguments exact in floating point.
    """

    def __init__(self, n_per_dim, v_max):
        n = int(n_per_dim)
        if n < 2:
            raise ParameterError("velocity grid needs at least 2 points per dimension")
        if not v_max > 0:
            raise ParameterError("v_max must be positive")
        self.n_per_dim = n
        self.v_max = float(v_max)
        self.d_v = 2
        self.spacing = 2.0 * self.v_max / n
        self.centers = (np.arange(n) - (n - 1) / 2.0) * self.spacing
        self.v1, self.v2 = np.meshgrid(self.centers, self.centers, indexing="ij")
        self.vsq = self.v1 ** 2 + self.v2 ** 2
        self.cell_volume = self.spacing ** 2

    @property
    def shape(self):
        return (self.n_per_dim, self.n_per_dim)

    def __repr__(self):
        return f"VelocityGrid(n_per_dim={self.n_per_dim}, v_max={self.v_max})"


class SpatialGrid1D:
    """Uniform cell-centered grid on [0, length] with n_x cells."""

    def __init__(self, n_x, length=1.0):
        n_x = int(n_x)
        if n_x < 1:
            raise ParameterError("spatial grid needs at least one cell")
        if not length > 0:
            raise ParameterError("domain length must be positive")
        self.n_x = n_x
        self.length = float(length)
        self.dx = self.length / n_x
        self.centers = (np.arange(n_x) + 0.5) * self.dx

    def __repr__(self):
        return f"SpatialGrid1D(n_x={self.n_x}, length={self.length})"


@dataclass
class MomentSet:
    """Density, mean velocity and total energy density of a distribution.

    Temperature follows the ideal-gas closure in two velocity dimensions,
    T = (2 E / rho - |u|^2) / 2.
    """

    rho: float
    u: np.ndarray
    energy: float

    @property
    def temperature(self):
        rho = np.asarray(self.rho, dtype=float)
        u = np.asarray(self.u, dtype=float)
        energy = np.asarray(self.energy, dtype=float)
        usq = np.sum(u * u, axis=-1) if u.ndim else u * u
        with np.errstate(divide="ignore", invalid="ignore"):
            T = (2.0 * energy / rho - usq) / 2.0
        return np.where(rho == 0.0, 0.0, T) if np.ndim(T) else (0.0 if rho == 0.0 else float(T))


def moment_fields(f, grid):
    """Raw moments of f over its velocity axes.

    f has shape (..., n, n); returns (rho, u1, u2, energy) with shape
    (...,).  Mean velocity is zero wherever rho is zero.
    """
    f = np.asarray(f, dtype=float)
    dv = grid.cell_volume
    rho = f.sum(axis=(-2, -1)) * dv
    m1 = (f * grid.v1).sum(axis=(-2, -1)) * dv
    m2 = (f * grid.v2).sum(axis=(-2, -1)) * dv
    energy = 0.5 * (f * grid.vsq).sum(axis=(-2, -1)) * dv
    with np.errstate(divide="ignore", invalid="ignore"):
        u1 = np.where(rho != 0.0, m1 / np.where(rho != 0.0, rho, 1.0), 0.0)
        u2 = np.where(rho != 0.0, m2 / np.where(rho != 0.0, rho, 1.0), 0.0)
    return rho, u1, u2, energy


def compute_moments(f, grid):
    """Moments of a single distribution (n, n) as a MomentSet."""
    f = np.asarray(f, dtype=float)
    if f.shape != grid.shape:
        raise ParameterError(f"expected shape {grid.shape}, got {f.shape}")
    rho, u1, u2, energy = moment_fields(f, grid)
    return MomentSet(rho=float(rho), u=np.array([u1, u2]), energy=float(energy))


def weighted_norm(f, grid, p=1, s=0, dx=None):
    """Integral sum |f|^p (1 + |v|^s) dv [dx], without the 1/p root.

    With dx given, f is a space-velocity field (..., n_x, n, n) and the
    spatial axis is integrated with weight dx; otherwise f is (..., n, n).
    Returns a scalar for a single field, an array over leading batch axes.
    """
    if p not in (1, 2):
        raise ParameterError("only p = 1 and p = 2 are supported")
    if s < 0:
        raise ParameterError("velocity weight exponent s must be >= 0")
    f = np.asarray(f, dtype=float)
    # s = 0 means the plain unweighted L^p integral
    w = 1.0 + grid.vsq ** (s / 2.0) if s > 0 else np.ones(grid.shape)
    val = (np.abs(f) ** p * w).sum(axis=(-2, -1)) * grid.cell_volume
    if dx is not None:
        val = val.sum(axis=-1) * dx
    elif f.ndim > 2:
        pass  # remaining axes are batch axes
    return val if np.ndim(val) else float(val)


def rooted_norm(f, grid, p=1, s=0, dx=None):
    """The usual L^p_s norm: weighted_norm(...)**(1/p)."""
    return weighted_norm(f, grid, p=p, s=s, dx=dx) ** (1.0 / p)


def uq_error_norm(samples, grid, p=1, s=0, dx=None, weights=None, rooted=False):
    """Norm of a random field: L^p_s norm of the root mean square over z.

    samples has shape (n_z, ...) with remaining axes a (space-)velocity
    field.  The mean over z is plain (or 'weights'-weighted) averaging;
    the pointwise root mean square is then measured in L^p_s.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim < 3 or samples.shape[0] == 0:
        raise ParameterError("need a nonempty leading sample axis")
    if weights is None:
        msq = np.mean(samples ** 2, axis=0)
    else:
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (samples.shape[0],):
            raise ParameterError("weights must match the sample axis length")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise ParameterError("weights must sum to one")
        msq = np.tensordot(weights, samples ** 2, axes=(0, 0))
    rms = np.sqrt(msq)
    fn = rooted_norm if rooted else weighted_norm
    return fn(rms, grid, p=p, s=s, dx=dx)
