"""Time integrators for the quartic and cubic Schrodinger equations.

The canonical form integrated here is

    i u_t = orientation * P(d_x) u + kappa * |u|^2 u,

with ``P = d_x^4`` (quartic) or ``P = d_x^2`` (cubic).  In Fourier variables
the linear flow is exact: for the quartic equation coefficients rotate by
``exp(-i * orientation * xi^4 * t)``, for the cubic by
``exp(+i * orientation * xi^2 * t)``.  The nonlinear substep is the exact
phase rotation ``u -> u * exp(-i kappa |u|^2 dt)``, which conserves |u|
pointwise, so Strang splitting conserves mass to round-off.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import AbortedRunError, ConfigError
from .spectral import (
    Field,
    Spectrum,
    check_resolved,
    spectral_tail_fraction,
    to_physical,
    to_spectrum,
)

__all__ = [
    "EvolutionConfig",
    "TrajectoryRecord",
    "linear_propagate_4nls",
    "linear_propagate_nls",
    "nonlinear_substep",
    "strang_step",
    "ifrk4_step",
    "evolve",
    "galerkin_rhs",
    "galerkin_evolve",
    "conserved_energy",
    "trajectory_to_csv",
    "run_manifest",
]


@dataclass(frozen=True)
class EvolutionConfig:
    """Full description of one evolution run."""

    equation: str = "quartic"  # "quartic" or "cubic"
    orientation: int = 1  # sign of the linear term in i u_t = +/- P u + ...
    kappa: int = 1  # nonlinearity coefficient, -1 / 0 / +1
    dt: float = 1e-3
    t_end: float = 1.0
    scheme: str = "strang"  # "strang" or "ifrk4"
    record_stride: int = 1
    record_fields: bool = True
    sobolev_orders: tuple = ()
    start_tail_tol: float = 1e-8
    run_tail_tol: float = 1e-6
    require_localized: bool = True
    # with project_K set, every nonlinear evaluation is truncated to
    # |k| <= project_K; on a grid with M > 4*project_K this reproduces the
    # Galerkin ODE system exactly (the cubic aliases cannot reach the band)
    project_K: Optional[int] = None

    def __post_init__(self):
        if self.equation not in ("quartic", "cubic"):
            raise ConfigError(f"unknown equation '{self.equation}'")
        if self.orientation not in (1, -1):
            raise ConfigError("orientation must be +1 or -1")
        if self.kappa not in (1, 0, -1):
            raise ConfigError("kappa must be -1, 0 or +1")
        if self.scheme not in ("strang", "ifrk4"):
            raise ConfigError(f"unknown scheme '{self.scheme}'")
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ConfigError("dt must be positive and finite")
        if not (np.isfinite(self.t_end) and self.t_end >= self.dt):
            raise ConfigError("t_end must satisfy dt <= t_end")
        if self.record_stride < 1:
            raise ConfigError("record_stride must be a positive integer")

    def linear_phase_rate(self, xi: np.ndarray) -> np.ndarray:
        """d(arg c_k)/dt of the linear flow at frequency xi."""
        if self.equation == "quartic":
            return -self.orientation * xi**4
        return self.orientation * xi**2


@dataclass
class TrajectoryRecord:
    """Diagnostics collected during a run; read-only afterwards."""

    times: np.ndarray
    mass: np.ndarray
    energy: np.ndarray
    sobolev: dict
    fields: Optional[list]
    config: EvolutionConfig
    aborted: bool = False

    def final_field(self) -> Field:
        if not self.fields:
            raise ConfigError("run was recorded in storage-lean mode")
        return self.fields[-1]


def linear_propagate_4nls(f: Field, t: float, orientation: int = 1) -> Field:
    """Multiply mode xi by exp(i * orientation * t * xi^4)."""
    if t == 0:
        return f.copy()
    spec = to_spectrum(f)
    spec.coef *= np.exp(1j * orientation * t * f.grid.xi**4)
    return to_physical(spec)


def linear_propagate_nls(f: Field, t: float, orientation: int = 1) -> Field:
    """Multiply mode xi by exp(i * orientation * t * xi^2)."""
    if t == 0:
        return f.copy()
    spec = to_spectrum(f)
    spec.coef *= np.exp(1j * orientation * t * f.grid.xi**2)
    return to_physical(spec)


def nonlinear_substep(f: Field, dt: float, kappa: int) -> Field:
    """Exact flow of i u_t = kappa |u|^2 u: a pointwise phase rotation."""
    return Field(f.grid, f.values * np.exp(-1j * kappa * np.abs(f.values) ** 2 * dt))


def _half_multiplier(cfg: EvolutionConfig, grid, dt: float) -> np.ndarray:
    return np.exp(1j * cfg.linear_phase_rate(grid.xi) * dt / 2)


def strang_step(f: Field, cfg: EvolutionConfig) -> Field:
    """One half-linear / full-nonlinear / half-linear composition."""
    half = _half_multiplier(cfg, f.grid, cfg.dt)
    u = to_physical(Spectrum(f.grid, to_spectrum(f).coef * half))
    u = nonlinear_substep(u, cfg.dt, cfg.kappa)
    coef = to_spectrum(u).coef * half
    if cfg.project_K is not None:
        coef[np.abs(f.grid.k) > cfg.project_K] = 0.0
    return to_physical(Spectrum(f.grid, coef))


def _nonlinear_rhs_coef(cfg: EvolutionConfig, u_phys: np.ndarray, grid) -> np.ndarray:
    # coefficient-space RHS of the nonlinearity: -i kappa * hat(|u|^2 u)
    if cfg.kappa == 0:
        return np.zeros(grid.M, dtype=np.complex128)
    cubic = np.abs(u_phys) ** 2 * u_phys
    out = -1j * cfg.kappa * np.fft.fft(cubic) * grid._centering_phase() / grid.M
    if cfg.project_K is not None:
        out[np.abs(grid.k) > cfg.project_K] = 0.0
    return out


def ifrk4_step(f: Field, cfg: EvolutionConfig) -> Field:
    """Classical RK4 in the rotating Fourier frame (integrating factor)."""
    grid = f.grid
    dt = cfg.dt
    lam = 1j * cfg.linear_phase_rate(grid.xi)
    e_half = np.exp(lam * dt / 2)
    e_full = e_half * e_half
    phase = grid._centering_phase()

    def nl(coef):
        u = np.fft.ifft(coef * phase) * grid.M
        return _nonlinear_rhs_coef(cfg, u, grid)

    c = to_spectrum(f).coef
    k1 = nl(c)
    k2 = nl(e_half * (c + dt / 2 * k1))
    k3 = nl(e_half * c + dt / 2 * k2)
    k4 = nl(e_full * c + dt * e_half * k3)
    c_new = e_full * c + dt / 6 * (e_full * k1 + 2 * e_half * (k2 + k3) + k4)
    return to_physical(Spectrum(grid, c_new))


def conserved_energy(f: Field, cfg: EvolutionConfig) -> float:
    """The energy functional conserved by the configured equation.

    Quartic: orientation/2 * int |u_xx|^2 + kappa/4 * int |u|^4.
    Cubic:   orientation/2 * int |u_x|^2  + kappa/4 * int |u|^4.
    """
    spec = to_spectrum(f)
    xi = f.grid.xi
    order = 2 if cfg.equation == "quartic" else 1
    kinetic = 0.5 * f.grid.L * np.sum(np.abs(xi) ** (2 * order) * np.abs(spec.coef) ** 2)
    quartic = f.grid.dx * np.sum(np.abs(f.values) ** 4)
    return float(cfg.orientation * kinetic + cfg.kappa / 4 * quartic)


def evolve(f0: Field, cfg: EvolutionConfig) -> TrajectoryRecord:
    """March ``f0`` to ``t_end``, recording diagnostics every record_stride steps.

    The start is guarded by the resolution check (spectral tail, and the
    boundary tail when ``require_localized``); at every record point the
    spectral tail is re-checked and a blow-up past ``run_tail_tol`` raises
    :class:`AbortedRunError` carrying the partial record.
    """
    check_resolved(f0, tol=cfg.start_tail_tol, localized=cfg.require_localized)
    grid = f0.grid
    n_steps = int(round(cfg.t_end / cfg.dt))
    if abs(n_steps * cfg.dt - cfg.t_end) > 1e-9 * cfg.t_end:
        raise ConfigError("t_end must be an integer number of steps")

    times, masses, energies = [], [], []
    sob = {s: [] for s in cfg.sobolev_orders}
    fields = [] if cfg.record_fields else None

    lam = 1j * cfg.linear_phase_rate(grid.xi)
    half = np.exp(lam * cfg.dt / 2)
    phase = grid._centering_phase()

    def record(t, u_phys):
        f = Field(grid, u_phys)
        times.append(t)
        masses.append(grid.dx * float(np.sum(np.abs(u_phys) ** 2)))
        energies.append(conserved_energy(f, cfg))
        from .spectral import sobolev_norm

        for s in cfg.sobolev_orders:
            sob[s].append(sobolev_norm(f, s))
        if fields is not None:
            fields.append(f.copy())
        return f

    u = f0.values.copy()
    record(0.0, u)

    def make_record(aborted=False):
        return TrajectoryRecord(
            times=np.array(times),
            mass=np.array(masses),
            energy=np.array(energies),
            sobolev={s: np.array(v) for s, v in sob.items()},
            fields=fields,
            config=cfg,
            aborted=aborted,
        )

    proj = None if cfg.project_K is None else (np.abs(grid.k) <= cfg.project_K)
    step = 0
    while step < n_steps:
        if cfg.scheme == "strang":
            c = np.fft.fft(u) * phase / grid.M
            u = np.fft.ifft(c * half * phase) * grid.M
            u = u * np.exp(-1j * cfg.kappa * np.abs(u) ** 2 * cfg.dt)
            c = np.fft.fft(u) * phase / grid.M
            if proj is not None:
                c = np.where(proj, c, 0.0)
            u = np.fft.ifft(c * half * phase) * grid.M
        else:
            u = ifrk4_step(Field(grid, u), cfg).values
        step += 1
        if step % cfg.record_stride == 0 or step == n_steps:
            f = record(step * cfg.dt, u)
            tail = spectral_tail_fraction(f)
            if tail > cfg.run_tail_tol:
                raise AbortedRunError(
                    f"spectral tail blow-up at t={step * cfg.dt:g}: "
                    f"{tail:.3e} > {cfg.run_tail_tol:.1e}",
                    record=make_record(aborted=True),
                )
    return make_record()


# ---------------------------------------------------------------------------
# brute-force Galerkin oracle


def galerkin_rhs(s: Spectrum, cfg: EvolutionConfig, K: int) -> Spectrum:
    """Exact RHS of the Fourier-truncated equation on modes |k| <= K.

    The cubic term is the direct convolution
    ``sum_{k-l+m=n} c_k conj(c_l) c_m`` restricted to |k|,|l|,|m|,|n| <= K;
    cost O(K^2) per output mode.
    """
    grid = s.grid
    if K < 1 or K > grid.M // 2 - 1:
        raise ConfigError(f"mode cutoff K={K} outside grid resolution")
    kfull = grid.k
    keep = np.abs(kfull) <= K
    peak = np.max(np.abs(s.coef))
    if peak > 0 and np.any(np.abs(s.coef[~keep]) > 1e-12 * peak):
        raise ConfigError("spectrum has support above the Galerkin cutoff")

    ks = np.arange(-K, K + 1)
    c = s.coef[(ks % grid.M)]
    out = np.zeros(2 * K + 1, dtype=np.complex128)
    if cfg.kappa != 0:
        prod = c[:, None, None] * np.conj(c)[None, :, None] * c[None, None, :]
        n = ks[:, None, None] - ks[None, :, None] + ks[None, None, :]
        valid = np.abs(n) <= K
        np.add.at(out, n[valid] + K, prod[valid])
        out *= -1j * cfg.kappa
    xi = 2 * np.pi / grid.L * ks
    out += 1j * cfg.linear_phase_rate(xi) * c

    full = np.zeros(grid.M, dtype=np.complex128)
    full[(ks % grid.M)] = out
    return Spectrum(grid, full)


def _galerkin_convolution(coef: np.ndarray, ks: np.ndarray, K: int,
                          kappa: int) -> np.ndarray:
    """-i kappa * truncated convolution of |u|^2 u on centered indices."""
    out = np.zeros(2 * K + 1, dtype=np.complex128)
    if kappa == 0:
        return out
    prod = coef[:, None, None] * np.conj(coef)[None, :, None] * coef[None, None, :]
    n = ks[:, None, None] - ks[None, :, None] + ks[None, None, :]
    valid = np.abs(n) <= K
    np.add.at(out, n[valid] + K, prod[valid])
    return -1j * kappa * out


def galerkin_evolve(s0: Spectrum, cfg: EvolutionConfig, K: int, t: float,
                    n_steps: int = 200) -> Spectrum:
    """Integrating-factor RK4 for the truncated ODE system.

    The linear rotation is applied exactly (an explicit treatment of the
    xi^4 phases would dissipate the top modes long before the RK4 step
    limit), so the only error is the RK4 error of the slow nonlinear part;
    ground truth for the derivative identities and increment experiments.
    """
    grid = s0.grid
    if K < 1 or K > grid.M // 2 - 1:
        raise ConfigError(f"mode cutoff K={K} outside grid resolution")
    peak = np.max(np.abs(s0.coef))
    if peak > 0 and np.any(np.abs(s0.coef[np.abs(grid.k) > K]) > 1e-12 * peak):
        raise ConfigError("spectrum has support above the Galerkin cutoff")
    ks = np.arange(-K, K + 1)
    c = s0.coef[(ks % grid.M)].copy()
    xi = 2 * np.pi / grid.L * ks
    lam = 1j * cfg.linear_phase_rate(xi)
    dt = t / n_steps
    e_half = np.exp(lam * dt / 2)
    e_full = e_half * e_half

    def nl(coef):
        return _galerkin_convolution(coef, ks, K, cfg.kappa)

    for _ in range(n_steps):
        k1 = nl(c)
        k2 = nl(e_half * (c + dt / 2 * k1))
        k3 = nl(e_half * c + dt / 2 * k2)
        k4 = nl(e_full * c + dt * e_half * k3)
        c = e_full * c + dt / 6 * (e_full * k1 + 2 * e_half * (k2 + k3) + k4)

    full = np.zeros(grid.M, dtype=np.complex128)
    full[(ks % grid.M)] = c
    return Spectrum(grid, full)


# ---------------------------------------------------------------------------
# export


def trajectory_to_csv(rec: TrajectoryRecord, path) -> None:
    orders = sorted(rec.sobolev)
    with open(path, "w") as fh:
        cols = ["t", "mass", "hamiltonian"] + [f"h{s:g}" for s in orders]
        fh.write(",".join(cols) + "\n")
        for i, t in enumerate(rec.times):
            row = [repr(float(t)), repr(float(rec.mass[i])), repr(float(rec.energy[i]))]
            row += [repr(float(rec.sobolev[s][i])) for s in orders]
            fh.write(",".join(row) + "\n")


def run_manifest(f0: Field, cfg: EvolutionConfig) -> dict:
    """Self-contained description of a run: config, grid, data hash."""
    h = hashlib.sha256(f0.values.tobytes()).hexdigest()
    d = {
        "grid": {"L": f0.grid.L, "M": f0.grid.M},
        "config": {
            "equation": cfg.equation,
            "orientation": cfg.orientation,
            "kappa": cfg.kappa,
            "dt": cfg.dt,
            "t_end": cfg.t_end,
            "scheme": cfg.scheme,
            "record_stride": cfg.record_stride,
        },
        "initial_data_sha256": h,
    }
    return json.loads(json.dumps(d))  # force plain JSON types
