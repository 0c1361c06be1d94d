"""Benchmark configurations and the experiment driver.

Five numbered benchmarks, each available at 'desk' scale (minutes on a
laptop) and 'paper' scale (the full published resolution):

1. homogeneous Boltzmann relaxation of an uncertain two-bump datum,
   control variates: equilibrium and exact BGK;
2. homogeneous Boltzmann with an uncertain collision kernel magnitude
   and an isotropic datum whose equilibrium is deterministic;
3. Sod-type shock tube with uncertain initial temperatures (kinetic in
   1x2v), Euler control variate;
4. deterministic Sod datum with an uncertain collision kernel;
5. heated-wall boundary-driven problem with an uncertain wall
   temperature, diffusive walls on both ends.

A run solves the kinetic samples and the collocation reference in one
batch (identical code path, identical random inputs for every estimator),
evaluates the configured estimator roster at the recorded times, and
returns rows ready for the CSV writers.
"""

import hashlib
import time as _time
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import euler1d, kinetic1d
from .collision_ops import (CollisionKernel, SpectralPlan, q_bgk,
                            q_boltzmann_fast)
from .equilibrium import moment_matched_maxwellian
from .errors import ConfigError
from .homogeneous_solver import (bgk_exact, bgk_random_nu_expectation,
                                 solve_homogeneous)
from .phase_grid import (SpatialGrid1D, VelocityGrid, moment_fields,
                         rooted_norm, weighted_norm)
from .uq_core import (lambda_cost_corrected, lambda_star, lambda_star_moment,
                      mc_estimate, sample_z)

HOMOGENEOUS_TESTS = (1, 2)
FIELD_TESTS = (3, 4, 5)
# explicit field-Boltzmann stability cap: the spectral loss rate is
# 2 pi b0 rho, which an explicit step dt = eps cannot resolve; see dt rule
BOLTZMANN_DT_SAFETY = 2.5


@dataclass
class ExperimentConfig:
    """Flat, fully overridable description of one benchmark run."""
    test: int
    scale: str = "desk"
    mode: str = "homogeneous"          # "homogeneous" or "field"
    model: str = "boltzmann"           # "boltzmann" or "bgk"
    bc: str = "outflow"                # field runs: outflow | periodic | diffusive
    # resolution
    n_v: int = 32
    v_max: float = 16.0
    n_angles: int = 8
    n_x: int = 0
    length: float = 1.0
    # time stepping
    dt: float = 0.0                    # 0 means: use the test's rule
    t_final: float = 10.0
    record_every: int = 0              # 0 means: choose ~9 records
    # physics and uncertainty
    eps: float = 1.0
    b0: float = 1.0
    s_amp: float = 0.2
    rho0: float = 0.125
    sigma: float = 0.5
    t0: float = 1.0
    # sampling
    m: int = 10
    m_e: int = 0
    n_ref: int = 16
    seed: int = 1
    # estimator roster: (control variate kind, lambda mode) pairs; the
    # plain Monte Carlo estimator is always evaluated as well
    estimators: tuple = ()

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


_DESK = {
    1: dict(mode="homogeneous", model="boltzmann", n_v=32, v_max=16.0, n_angles=8,
            dt=0.05, t_final=10.0, record_every=20, m=10, n_ref=16,
            s_amp=0.2, rho0=0.125, sigma=0.5, b0=1.0,
            estimators=(("equilibrium", "one"), ("equilibrium", "optimal"),
                        ("bgk", "optimal"))),
    2: dict(mode="homogeneous", model="boltzmann", n_v=32, v_max=16.0, n_angles=8,
            dt=0.2, t_final=50.0, record_every=10, m=10, m_e=10000, n_ref=16,
            s_amp=0.2, b0=1.0,
            estimators=(("equilibrium", "optimal"), ("bgk", "optimal"))),
    3: dict(mode="field", model="bgk", bc="outflow", n_v=16, v_max=8.0, n_angles=8,
            n_x=50, length=1.0, t_final=0.875, eps=1e-2, m=10, m_e=1000, n_ref=16,
            s_amp=0.25, b0=1.0, estimators=(("euler", "optimal-moment"),)),
    4: dict(mode="field", model="bgk", bc="outflow", n_v=16, v_max=8.0, n_angles=8,
            n_x=50, length=1.0, t_final=0.875, eps=5e-4, m=10, m_e=1000, n_ref=16,
            s_amp=0.99, b0=1.0, estimators=(("euler", "optimal-moment"),)),
    5: dict(mode="field", model="bgk", bc="diffusive", n_v=16, v_max=8.0, n_angles=8,
            n_x=40, length=1.0, t_final=0.9, eps=1e-2, m=10, m_e=64, n_ref=16,
            s_amp=0.2, t0=1.0, b0=1.0, estimators=(("bgk", "optimal-moment"),)),
}

_PAPER = {
    1: dict(n_v=64, dt=1.0, t_final=70.0, record_every=1, n_ref=32),
    2: dict(n_v=64, dt=0.5, t_final=150.0, record_every=4, m_e=100000, n_ref=32),
    3: dict(model="boltzmann", n_x=100, n_v=32, m_e=10000),
    4: dict(model="boltzmann", n_x=100, n_v=32, eps=5e-4, m_e=1000),
    5: dict(model="boltzmann", n_x=100, n_v=32, m_e=1000),
}

_HOMOGENEOUS_CVS = ("equilibrium", "bgk")
_FIELD_CVS = ("euler", "bgk")
_LAM_MODES = ("zero", "one", "optimal", "cost-corrected", "optimal-moment")


def build_test(test, scale="desk", **overrides):
    """Configuration for one benchmark, with validated overrides."""
    try:
        test = int(test)
    except (TypeError, ValueError):
        raise ConfigError(f"test id must be an integer, got {test!r}")
    if test not in _DESK:
        raise ConfigError(f"unknown test {test}; choose from {sorted(_DESK)}")
    if scale not in ("desk", "paper"):
        raise ConfigError(f"unknown scale {scale!r}; choose 'desk' or 'paper'")
    params = dict(_DESK[test])
    if scale == "paper":
        params.update(_PAPER[test])
    config = ExperimentConfig(test=test, scale=scale, **params)
    valid = {f.name for f in fields(ExperimentConfig)}
    for key, value in overrides.items():
        if key not in valid:
            raise ConfigError(f"unknown configuration key {key!r}")
        if key in ("test", "scale", "mode"):
            raise ConfigError(f"{key} cannot be overridden; build a new config")
        config = replace(config, **{key: value})
    _validate(config)
    return config


def _validate(config):
    if config.model not in ("boltzmann", "bgk"):
        raise ConfigError(f"unknown model {config.model!r}")
    if config.m < 1:
        raise ConfigError("need at least one kinetic sample")
    if config.n_ref < 2:
        raise ConfigError("collocation reference needs at least 2 nodes")
    if config.mode == "field" and config.n_x < 7:
        raise ConfigError("field runs need at least 7 cells")
    if not config.t_final > 0:
        raise ConfigError("t_final must be positive")
    if config.mode == "field" and not config.eps > 0:
        raise ConfigError("eps must be positive")
    if config.mode == "homogeneous" and not config.dt > 0:
        raise ConfigError("homogeneous runs need an explicit dt")
    if config.mode == "field" and config.estimators and config.m_e < 1:
        raise ConfigError("field control variates need an ensemble (m_e >= 1)")
    allowed_cvs = _HOMOGENEOUS_CVS if config.mode == "homogeneous" else _FIELD_CVS
    for cv, lam in config.estimators:
        if cv not in allowed_cvs:
            raise ConfigError(f"control variate {cv!r} is not available for "
                              f"{config.mode} runs (choose from {allowed_cvs})")
        if lam not in _LAM_MODES:
            raise ConfigError(f"unknown lambda mode {lam!r}")
        if config.mode == "homogeneous" and lam == "optimal-moment":
            raise ConfigError("moment-based lambda applies to field runs")
        if lam == "cost-corrected" and config.m_e < 1:
            raise ConfigError("cost-corrected lambda needs m_e >= 1")


def estimator_name(cv, lam):
    return f"cv_{cv}_{lam}"


def gauss_nodes_unit(n):
    """Gauss-Legendre nodes and weights mapped to [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(int(n))
    return (x + 1.0) / 2.0, w / 2.0


# ---------------------------------------------------------------------------
# initial data


def initial_homogeneous(config, z):
    """Initial distributions for a batch of z values, shape (B, n, n)."""
    grid = VelocityGrid(config.n_v, config.v_max)
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if config.test == 1:
        # two drifting bumps at +-(2+sz), -(1+sz) along the diagonal,
        # normalized so the total mass is rho0
        c1 = 2.0 + config.s_amp * z
        c2 = -(1.0 + config.s_amp * z)
        # each bump integrates to pi sigma, so this prefactor gives total
        # mass rho0
        pref = config.rho0 / (2.0 * np.pi * config.sigma)
        out = np.empty(z.shape + grid.shape)
        for i, (a, b) in enumerate(zip(c1, c2)):
            bump1 = np.exp(-((grid.v1 - a) ** 2 + (grid.v2 - a) ** 2) / config.sigma)
            bump2 = np.exp(-((grid.v1 - b) ** 2 + (grid.v2 - b) ** 2) / config.sigma)
            out[i] = pref * (bump1 + bump2)
        return out
    if config.test == 2:
        # isotropic non-Maxwellian datum; z enters through the kernel only
        f0 = (1.0 / (2.0 * np.pi ** 2)) * grid.vsq * np.exp(-grid.vsq / 2.0)
        return np.broadcast_to(f0, z.shape + grid.shape).copy()
    raise ConfigError(f"test {config.test} is not homogeneous")


def kernel_magnitude(config, z):
    """Collision kernel magnitude per sample; tests 2 and 4 draw it from z."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if config.test in (2, 4):
        return config.b0 * (1.0 + config.s_amp * z)
    return np.full(z.shape, config.b0)


def initial_field(config, z):
    """Initial Euler states (B, 4, n_x) for a batch of z values."""
    xgrid = SpatialGrid1D(config.n_x, config.length)
    z = np.atleast_1d(np.asarray(z, dtype=float))
    x = xgrid.centers
    left = x < 0.5 * config.length
    if config.test in (3, 4):
        s = config.s_amp if config.test == 3 else 0.0
        rho = np.where(left, 1.0, 0.125)
        t_left = 1.0 + s * z[:, None]
        t_right = 0.8 + s * z[:, None]
        T = np.where(left, t_left, t_right)
        rho = np.broadcast_to(rho, T.shape)
        zero = np.zeros_like(T)
        return euler1d.conserved(rho, zero, zero, rho * T)
    if config.test == 5:
        rho = np.ones(z.shape + x.shape)
        T = np.full_like(rho, config.t0)
        zero = np.zeros_like(rho)
        return euler1d.conserved(rho, zero, zero, rho * T)
    raise ConfigError(f"test {config.test} is not a field test")


def wall_temperatures(config, z):
    """(T_left(z), T_right) for the heated-wall benchmark."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    t_left = 2.0 * (config.t0 + config.s_amp * z)
    t_right = np.full(z.shape, config.t0)
    return t_left, t_right


# ---------------------------------------------------------------------------
# time stepping rules


def choose_dt(config):
    """Time step honoring transport CFL, relaxation scale, and (for the
    spectral Boltzmann model in space) the collision stability cap; then
    shrunk so t_final is an exact multiple."""
    if config.mode == "homogeneous":
        dt = config.dt
    else:
        xgrid = SpatialGrid1D(config.n_x, config.length)
        dt = min(xgrid.dx / (2.0 * config.v_max), config.eps)
        if config.model == "boltzmann":
            b0_max = float(np.max(kernel_magnitude(config, np.array([0.0, 1.0]))))
            rho_max = 3.0  # compression bound for gamma = 2 shocks on O(1) data
            cap = BOLTZMANN_DT_SAFETY * config.eps / (2.0 * np.pi * b0_max * rho_max)
            dt = min(dt, cap)
        if config.dt > 0:
            dt = config.dt
    n_steps = max(1, int(np.ceil(config.t_final / dt - 1e-9)))
    return config.t_final / n_steps, n_steps


def _record_every(config, n_steps):
    if config.record_every > 0:
        return config.record_every
    return max(1, n_steps // 8)


# ---------------------------------------------------------------------------
# results


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    times: np.ndarray
    error_rows: list            # (time, estimator, norm_id, error)
    lambda_rows: list           # (time, x_index, v1_index, v2_index, lambda)
    moment_rows: list           # (time, x_index, rho, ux, uy, E, T, sigma_T)
    meta: dict
    extras: dict = field(default_factory=dict)


def _hash_array(a):
    return hashlib.sha256(np.ascontiguousarray(a).tobytes()).hexdigest()


def _norm_ids_homogeneous():
    return ("l1", "l2", "l2_raw", "l1_s2")


def _error_homogeneous(diff, grid, norm_id):
    if norm_id == "l1":
        return weighted_norm(diff, grid, p=1, s=0)
    if norm_id == "l2":
        return rooted_norm(diff, grid, p=2, s=0)
    if norm_id == "l2_raw":
        return weighted_norm(diff, grid, p=2, s=0)
    if norm_id == "l1_s2":
        return weighted_norm(diff, grid, p=1, s=2)
    raise ConfigError(f"unknown norm {norm_id!r}")


def _error_field(diff, dx, norm_id):
    if norm_id == "l1":
        return float(np.sum(np.abs(diff)) * dx)
    if norm_id == "l2":
        return float(np.sqrt(np.sum(diff ** 2) * dx))
    raise ConfigError(f"unknown norm {norm_id!r}")


# ---------------------------------------------------------------------------
# homogeneous path


def _homogeneous_solve(config, z_batch, b0_batch):
    grid = VelocityGrid(config.n_v, config.v_max)
    f0 = initial_homogeneous(config, z_batch)
    dt, _ = choose_dt(config)
    if config.model == "boltzmann":
        plan = SpectralPlan(grid, config.n_angles)
        kernel = CollisionKernel(b0_batch)

        def rhs(f):
            return q_boltzmann_fast(f, f, kernel, plan)
    else:
        rho = moment_fields(f0, grid)[0]
        nu = b0_batch * rho

        def rhs(f):
            return q_bgk(f, nu, grid)
    times, traj = solve_homogeneous(f0, dt, config.t_final, rhs,
                                    record_every=_record_every(config, int(round(config.t_final / dt))))
    return grid, times, traj


def _run_homogeneous(config):
    t_start = _time.perf_counter()
    grid = VelocityGrid(config.n_v, config.v_max)
    z = sample_z(config.m, config.seed, stream="paired")
    nodes, wts = gauss_nodes_unit(config.n_ref)
    z_all = np.concatenate([z, nodes])
    b0_all = kernel_magnitude(config, z_all)
    _, times, traj = _homogeneous_solve(config, z_all, b0_all)
    f_samp = traj[:, :config.m]
    f_nodes = traj[:, config.m:]
    ref_mean = np.tensordot(f_nodes, wts, axes=(1, 0))

    # control variate closed forms on samples and reference nodes
    f0_all = initial_homogeneous(config, z_all)
    mom_all = moment_fields(f0_all, grid)
    eq_all = moment_matched_maxwellian(mom_all, grid)
    eq_samp, eq_nodes = eq_all[:config.m], eq_all[config.m:]
    eq_mean = np.tensordot(eq_nodes, wts, axes=(0, 0))
    rho_all = mom_all[0]
    nu_all = rho_all * b0_all

    cv_data = {}
    for cv, _lam in config.estimators:
        if cv in cv_data:
            continue
        if cv == "equilibrium":
            cv_samples = np.broadcast_to(eq_samp, (len(times),) + eq_samp.shape)
            cv_means = np.broadcast_to(eq_mean, (len(times),) + eq_mean.shape)
        elif cv == "bgk":
            cv_samples = np.stack([
                bgk_exact(f0_all[:config.m], eq_samp, nu_all[:config.m], t)
                for t in times])
            if config.test == 2:
                # z enters through nu only: factored random-rate expectation
                nu_e = kernel_magnitude(config, sample_z(config.m_e, config.seed,
                                                         stream="ensemble")) * rho_all[0]
                nu_bar = config.b0 * (1.0 + 0.5 * config.s_amp) * rho_all[0]
                cv_means = np.stack([
                    bgk_random_nu_expectation(f0_all[0], eq_all[0], nu_e, t, nu_bar=nu_bar)
                    for t in times])
            else:
                cv_node_t = np.stack([
                    bgk_exact(f0_all[config.m:], eq_nodes, nu_all[config.m:], t)
                    for t in times])
                cv_means = np.tensordot(cv_node_t, wts, axes=(1, 0))
        else:
            raise ConfigError(f"unknown homogeneous control variate {cv!r}")
        cv_data[cv] = (cv_samples, cv_means)

    error_rows, lambda_rows = [], []
    norm_ids = _norm_ids_homogeneous()
    mc_t = np.stack([mc_estimate(f_samp[i]) for i in range(len(times))])
    for i, t in enumerate(times):
        for nid in norm_ids:
            error_rows.append((t, "mc", nid, float(_error_homogeneous(
                mc_t[i] - ref_mean[i], grid, nid))))
    for cv, lam_mode in config.estimators:
        cv_samples, cv_means = cv_data[cv]
        name = estimator_name(cv, lam_mode)
        for i, t in enumerate(times):
            fs, cs, cm = f_samp[i], cv_samples[i], cv_means[i]
            if lam_mode == "zero":
                lam = 0.0
            elif lam_mode == "one":
                lam = 1.0
            elif lam_mode == "optimal":
                lam = lambda_star(fs, cs)
            elif lam_mode == "cost-corrected":
                lam = lambda_cost_corrected(lambda_star(fs, cs), config.m, config.m_e)
            else:
                raise ConfigError(f"lambda mode {lam_mode!r} not valid here")
            est = mc_estimate(fs) - np.asarray(lam) * (mc_estimate(cs) - cm)
            for nid in norm_ids:
                error_rows.append((t, name, nid, float(_error_homogeneous(
                    est - ref_mean[i], grid, nid))))
            if lam_mode in ("optimal", "cost-corrected"):
                lam_arr = np.broadcast_to(np.asarray(lam, dtype=float), grid.shape)
                for j1 in range(grid.n_per_dim):
                    for j2 in range(grid.n_per_dim):
                        lambda_rows.append((t, -1, j1, j2, float(lam_arr[j1, j2])))

    moment_rows = _homogeneous_moment_rows(times, f_nodes, wts, grid)
    meta = _meta(config, t_start, z_hash=_hash_array(z), observable="f",
                 times=times)
    return ExperimentResult(config=config, times=times, error_rows=error_rows,
                            lambda_rows=lambda_rows, moment_rows=moment_rows,
                            meta=meta,
                            extras={"ref_mean": ref_mean, "f_samples": f_samp,
                                    "cv_data": cv_data, "grid": grid,
                                    "z": z, "ref_nodes": nodes, "ref_weights": wts})


def _homogeneous_moment_rows(times, f_nodes, wts, grid):
    rows = []
    for i, t in enumerate(times):
        rho, u1, u2, energy = moment_fields(f_nodes[i], grid)
        T = (2.0 * energy / rho - (u1 ** 2 + u2 ** 2)) / 2.0
        mean = lambda a: float(np.dot(wts, a))
        sig = mean(T ** 2) - mean(T) ** 2
        rows.append((t, 0, mean(rho), mean(u1), mean(u2), mean(energy),
                     mean(T), float(np.sqrt(max(sig, 0.0)))))
    return rows


# ---------------------------------------------------------------------------
# field path


def _temperature_of_euler(U):
    return euler1d.primitive(U)[4]


def _temperature_of_kinetic(f, grid):
    rho, u1, u2, energy = moment_fields(f, grid)
    return (2.0 * energy / rho - (u1 ** 2 + u2 ** 2)) / 2.0


def _solve_kinetic_batch(config, z_batch, track_wall_flux=False):
    xgrid = SpatialGrid1D(config.n_x, config.length)
    vgrid = VelocityGrid(config.n_v, config.v_max)
    U0 = initial_field(config, z_batch)
    f0 = euler1d.lift_to_equilibrium(U0, vgrid)
    b0 = kernel_magnitude(config, z_batch)[:, None]
    dt, n_steps = choose_dt(config)
    plan = kernel = None
    if config.model == "boltzmann":
        plan = SpectralPlan(vgrid, config.n_angles)
        kernel = CollisionKernel(1.0)
    tw_l = tw_r = None
    if config.bc == "diffusive":
        tw_l, tw_r = wall_temperatures(config, z_batch)
    times, traj, diag = kinetic1d.solve_kinetic(
        f0, dt, config.t_final, config.eps, xgrid, vgrid, config.model,
        bc=config.bc, b0=b0, plan=plan, kernel=kernel,
        T_w_left=tw_l, T_w_right=tw_r,
        record_every=_record_every(config, n_steps),
        track_wall_flux=track_wall_flux)
    return xgrid, vgrid, times, traj, diag


def _solve_euler_batch(config, z_batch, record_every):
    xgrid = SpatialGrid1D(config.n_x, config.length)
    U0 = initial_field(config, z_batch)
    dt, _ = choose_dt(config)
    bc = "reflect" if config.bc == "diffusive" else config.bc
    times, states = euler1d.solve_euler(U0, dt, config.t_final, xgrid.dx,
                                        boundary=bc, record_every=record_every)
    return times, np.stack([_temperature_of_euler(s) for s in states])


def _solve_bgk_cv_batch(config, z_batch, chunk=256):
    """Temperature trajectories of the BGK control variate solves."""
    cfg = replace(config, model="bgk")
    out = []
    for start in range(0, len(z_batch), chunk):
        zb = z_batch[start:start + chunk]
        _, vgrid, times, traj, _ = _solve_kinetic_batch(cfg, zb)
        out.append(np.stack([_temperature_of_kinetic(traj[i], vgrid)
                             for i in range(len(times))]))
    return np.concatenate(out, axis=1)


def _run_field(config):
    t_start = _time.perf_counter()
    z = sample_z(config.m, config.seed, stream="paired")
    nodes, wts = gauss_nodes_unit(config.n_ref)
    z_all = np.concatenate([z, nodes])
    track = config.bc == "diffusive"
    # pin dt so every solve below (kinetic, reference, control variates)
    # lands on identical record times
    dtv, n_steps = choose_dt(config)
    rec = _record_every(config, n_steps)
    pinned = replace(config, dt=dtv, record_every=rec)
    xgrid, vgrid, times, traj, diag = _solve_kinetic_batch(pinned, z_all,
                                                           track_wall_flux=track)
    T_all = np.stack([_temperature_of_kinetic(traj[i], vgrid)
                      for i in range(len(times))])
    T_samp = T_all[:, :config.m]
    T_ref = np.tensordot(T_all[:, config.m:], wts, axes=(1, 0))

    z_e = sample_z(config.m_e, config.seed, stream="ensemble") if config.m_e else np.empty(0)

    cv_data = {}
    notes = {}
    for cv, _lam in config.estimators:
        if cv in cv_data:
            continue
        if cv == "euler":
            _, T_cv_paired = _solve_euler_batch(pinned, z, rec)
            _, T_cv_ens = _solve_euler_batch(pinned, z_e, rec)
        elif cv == "bgk":
            if config.model == "bgk":
                # the control variate model coincides with the kinetic
                # model at this scale: paired samples are reused
                T_cv_paired = T_samp
                notes["cv_bgk_same_model"] = True
            else:
                T_cv_paired = _solve_bgk_cv_batch(pinned, z)
            T_cv_ens = _solve_bgk_cv_batch(pinned, z_e)
        else:
            raise ConfigError(f"unknown field control variate {cv!r}")
        cv_data[cv] = (T_cv_paired, T_cv_ens.mean(axis=1), T_cv_ens)

    error_rows, lambda_rows = [], []
    norm_ids = ("l1", "l2")
    for i, t in enumerate(times):
        est = mc_estimate(T_samp[i])
        for nid in norm_ids:
            error_rows.append((t, "mc", nid, _error_field(est - T_ref[i], xgrid.dx, nid)))
    for cv, lam_mode in config.estimators:
        T_cv_paired, T_cv_mean, _ = cv_data[cv]
        name = estimator_name(cv, lam_mode)
        for i, t in enumerate(times):
            fs, cs, cm = T_samp[i], T_cv_paired[i], T_cv_mean[i]
            if lam_mode == "zero":
                lam = 0.0
            elif lam_mode == "one":
                lam = 1.0
            elif lam_mode in ("optimal", "optimal-moment"):
                lam = lambda_star_moment(fs, cs)
            elif lam_mode == "cost-corrected":
                lam = lambda_cost_corrected(lambda_star_moment(fs, cs),
                                            config.m, config.m_e)
            else:
                raise ConfigError(f"lambda mode {lam_mode!r} not valid here")
            est = mc_estimate(fs) - np.asarray(lam) * (mc_estimate(cs) - cm)
            for nid in norm_ids:
                error_rows.append((t, name, nid, _error_field(est - T_ref[i], xgrid.dx, nid)))
            if lam_mode in ("optimal", "optimal-moment", "cost-corrected"):
                lam_arr = np.broadcast_to(np.asarray(lam, dtype=float), (config.n_x,))
                for j in range(config.n_x):
                    lambda_rows.append((t, j, -1, -1, float(lam_arr[j])))

    moment_rows = _field_moment_rows(config, times, traj[:, config.m:], wts, vgrid)
    meta = _meta(config, t_start, z_hash=_hash_array(z), observable="temperature",
                 times=times, notes=notes)
    if diag.get("wall_flux_max") is not None:
        meta["wall_flux_max"] = [float(v) for v in diag["wall_flux_max"]]
    extras = {"T_ref": T_ref, "T_samples": T_samp, "cv_data": cv_data,
              "xgrid": xgrid, "vgrid": vgrid, "diagnostics": diag,
              "z": z, "ref_weights": wts}
    return ExperimentResult(config=config, times=times, error_rows=error_rows,
                            lambda_rows=lambda_rows, moment_rows=moment_rows,
                            meta=meta, extras=extras)


def _field_moment_rows(config, times, f_nodes, wts, vgrid):
    rows = []
    for i, t in enumerate(times):
        rho, u1, u2, energy = moment_fields(f_nodes[i], vgrid)
        T = (2.0 * energy / rho - (u1 ** 2 + u2 ** 2)) / 2.0
        for j in range(config.n_x):
            mean = lambda a: float(np.dot(wts, a[:, j]))
            sig = mean(T ** 2) - mean(T) ** 2
            rows.append((t, j, mean(rho), mean(u1), mean(u2), mean(energy),
                         mean(T), float(np.sqrt(max(sig, 0.0)))))
    return rows


# ---------------------------------------------------------------------------
# shared


def _meta(config, t_start, z_hash, observable, times, notes=None):
    from . import __version__
    dt, n_steps = choose_dt(config)
    meta = {
        "config": {k: (list(v) if isinstance(v, tuple) else v)
                   for k, v in config.as_dict().items()},
        "estimators": ["mc"] + [estimator_name(cv, lam)
                                for cv, lam in config.estimators],
        "observable": observable,
        "dt": dt,
        "n_steps": n_steps,
        "record_times": [float(t) for t in times],
        "seed": config.seed,
        "z_hash_paired": z_hash,
        "version": __version__,
        "numpy_version": np.__version__,
        "wall_time_s": _time.perf_counter() - t_start,
    }
    if notes:
        meta["notes"] = notes
    return meta


def collocation_reference(config, n_nodes=None, check_doubling=False):
    """Deterministic collocation reference for a configuration.

    Solves the problem at the Gauss-Legendre nodes in z and returns the
    weighted mean observable trajectory.  With check_doubling the run is
    repeated at twice the node count and the relative change comes back
    as the reference's own error bar.
    """
    n_nodes = config.n_ref if n_nodes is None else int(n_nodes)
    out = _collocation_once(config, n_nodes)
    if check_doubling:
        fine = _collocation_once(config, 2 * n_nodes)
        denom = float(np.max(np.abs(fine["mean"][-1])))
        out["doubling_error"] = float(
            np.max(np.abs(fine["mean"][-1] - out["mean"][-1])) / max(denom, 1e-300))
    return out


def _collocation_once(config, n_nodes):
    nodes, wts = gauss_nodes_unit(n_nodes)
    if config.mode == "homogeneous":
        b0 = kernel_magnitude(config, nodes)
        _, times, traj = _homogeneous_solve(config, nodes, b0)
        mean = np.tensordot(traj, wts, axes=(1, 0))
    else:
        _, vgrid, times, traj, _ = _solve_kinetic_batch(config, nodes)
        T = np.stack([_temperature_of_kinetic(traj[i], vgrid)
                      for i in range(len(times))])
        mean = np.tensordot(T, wts, axes=(1, 0))
    return {"nodes": nodes, "weights": wts, "times": times, "mean": mean}


def run_experiment(config):
    """Solve one configured benchmark and evaluate its estimator roster."""
    if config.mode == "homogeneous":
        return _run_homogeneous(config)
    return _run_field(config)
