"""Periodic grid, Fourier transforms, multipliers, norms and canonical data.

Conventions, fixed once and inherited by every other module:

* sample points ``x_j = -L/2 + j*dx`` with ``dx = L/M``,
* frequencies ``xi_k = 2*pi*k/L`` for integer ``k in [-M/2, M/2)``,
  stored in FFT order,
* coefficients ``c_k = (1/M) sum_j u(x_j) exp(-i xi_k x_j)`` so that
  ``u(x_j) = sum_k c_k exp(i xi_k x_j)``,
* Parseval: ``sum_j |u(x_j)|^2 dx = L sum_k |c_k|^2``.

All physical-space integrals are the rectangle rule ``dx * sum``, which is
spectrally accurate for periodic band-limited data.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError, NumericDomainError, ResolutionError

__all__ = [
    "Grid",
    "Field",
    "Spectrum",
    "SymbolFn",
    "make_grid",
    "to_spectrum",
    "to_physical",
    "apply_symbol",
    "fractional_derivative",
    "sobolev_norm",
    "lebesgue_norm",
    "project_band",
    "make_gaussian",
    "spectral_tail_fraction",
    "boundary_tail_fraction",
    "check_resolved",
    "field_to_csv",
    "field_from_csv",
    "spectrum_to_csv",
    "spectrum_from_csv",
    "field_to_binary",
    "field_from_binary",
]


@dataclass(frozen=True)
class Grid:
    """Periodic spatial grid on ``[-L/2, L/2)`` with ``M`` points.

    Immutable; safe to share between threads and reuse across fields.
    """

    L: float
    M: int

    def __post_init__(self):
        if not np.isfinite(self.L) or self.L <= 0:
            raise ConfigError(f"domain length must be positive, got L={self.L}")
        if self.M % 2 != 0 or self.M < 8:
            raise ConfigError(f"mode count must be even and >= 8, got M={self.M}")

    @property
    def dx(self) -> float:
        return self.L / self.M

    @property
    def x(self) -> np.ndarray:
        return -self.L / 2 + self.dx * np.arange(self.M)

    @property
    def k(self) -> np.ndarray:
        """Integer mode indices in FFT order: 0, 1, ..., M/2-1, -M/2, ..., -1."""
        return np.fft.fftfreq(self.M, d=1.0 / self.M).astype(np.int64)

    @property
    def xi(self) -> np.ndarray:
        """Angular frequencies 2*pi*k/L in FFT order."""
        return 2.0 * np.pi / self.L * self.k

    @property
    def xi_max(self) -> float:
        """Largest represented |xi| (the Nyquist frequency pi*M/L)."""
        return np.pi * self.M / self.L

    def _centering_phase(self) -> np.ndarray:
        # exp(-i xi_k x_0) with x_0 = -L/2 equals (-1)^k exactly.
        return np.where(self.k % 2 == 0, 1.0, -1.0)


@dataclass
class Field:
    """Complex-valued state sampled on a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.complex128)
        if self.values.shape != (self.grid.M,):
            raise ConfigError(
                f"sample count {self.values.shape} does not match grid M={self.grid.M}"
            )
        if not np.all(np.isfinite(self.values.view(np.float64))):
            raise NumericDomainError("field contains non-finite samples")

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())

    def conj(self) -> "Field":
        return Field(self.grid, np.conj(self.values))


@dataclass
class Spectrum:
    """Fourier coefficients of a field, indexed by frequency in FFT order."""

    grid: Grid
    coef: np.ndarray

    def __post_init__(self):
        self.coef = np.ascontiguousarray(self.coef, dtype=np.complex128)
        if self.coef.shape != (self.grid.M,):
            raise ConfigError(
                f"coefficient count {self.coef.shape} does not match grid M={self.grid.M}"
            )

    def copy(self) -> "Spectrum":
        return Spectrum(self.grid, self.coef.copy())


@dataclass(frozen=True)
class SymbolFn:
    """An evaluable Fourier multiplier xi -> complex with a readable tag."""

    fn: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    tag: str = "symbol"

    def __call__(self, xi: np.ndarray) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(xi, dtype=np.float64)))


def make_grid(L: float, M: int) -> Grid:
    """Build a periodic grid of length ``L`` with ``M`` (even, >= 8) modes."""
    return Grid(float(L), int(M))


def to_spectrum(f: Field) -> Spectrum:
    phase = f.grid._centering_phase()
    return Spectrum(f.grid, np.fft.fft(f.values) * phase / f.grid.M)


def to_physical(s: Spectrum) -> Field:
    phase = s.grid._centering_phase()
    return Field(s.grid, np.fft.ifft(s.coef * phase) * s.grid.M)


def apply_symbol(s: Spectrum, sigma: SymbolFn) -> Spectrum:
    """Multiply each coefficient by sigma(xi_k)."""
    vals = np.asarray(sigma(s.grid.xi), dtype=np.complex128)
    if not np.all(np.isfinite(vals.view(np.float64))):
        raise NumericDomainError(f"symbol '{sigma.tag}' is non-finite on the grid")
    return Spectrum(s.grid, s.coef * vals)


def fractional_derivative(f: Field, alpha: float) -> Field:
    """Apply |xi|^alpha.  alpha = 0 is the identity; constants map to zero for alpha > 0."""
    if alpha < 0:
        raise ConfigError("negative-order derivatives are not supported")
    if alpha == 0:
        return f.copy()
    sym = SymbolFn(lambda xi: np.abs(xi) ** alpha, tag=f"|xi|^{alpha}")
    return to_physical(apply_symbol(to_spectrum(f), sym))


def sobolev_norm(f: Field, s: float, homogeneous: bool = False) -> float:
    """H^s norm ``(L sum <xi>^{2s} |c_k|^2)^{1/2}`` with ``<xi>^2 = 1 + xi^2``.

    With ``homogeneous=True`` the weight is ``|xi|^{2s}`` and the zero mode
    is excluded (its weight is zero for s > 0 and undefined for s < 0; on
    mean-free data the exclusion is exact).
    """
    spec = to_spectrum(f)
    xi = f.grid.xi
    if homogeneous:
        w = np.zeros_like(xi)
        nz = xi != 0
        w[nz] = np.abs(xi[nz]) ** (2.0 * s)
    else:
        w = (1.0 + xi**2) ** s
    return float(np.sqrt(f.grid.L * np.sum(w * np.abs(spec.coef) ** 2)))


def lebesgue_norm(f: Field, p: float) -> float:
    """L^p norm by grid quadrature; ``p = inf`` returns the max modulus."""
    if p == np.inf:
        return float(np.max(np.abs(f.values)))
    if p < 1:
        raise ConfigError(f"Lebesgue exponent must be >= 1, got p={p}")
    return float((f.grid.dx * np.sum(np.abs(f.values) ** p)) ** (1.0 / p))


def _smooth_step(t: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    t = np.clip(t, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(t > 0, np.exp(-1.0 / np.maximum(t, 1e-300)), 0.0)
        b = np.where(t < 1, np.exp(-1.0 / np.maximum(1.0 - t, 1e-300)), 0.0)
    return a / (a + b)


def _bump(r: np.ndarray) -> np.ndarray:
    """Even cutoff: 1 on [-1, 1], 0 outside (-2, 2), smooth in between."""
    return _smooth_step(2.0 - np.abs(r))


def _dyadic_exponent(N: float) -> int:
    j = int(round(np.log2(N)))
    if N <= 0 or 2.0**j != N:
        raise ConfigError(f"band parameter must be dyadic (1, 2, 4, ...), got {N}")
    return j


def band_symbol(N: float) -> SymbolFn:
    """Littlewood-Paley bump for the band |xi| ~ N (N dyadic >= 1)."""
    _dyadic_exponent(N)
    if N == 1:
        return SymbolFn(lambda xi: _bump(xi), tag="band[1]")
    return SymbolFn(
        lambda xi: _bump(xi / N) - _bump(2.0 * xi / N), tag=f"band[{N:g}]"
    )


def project_band(f: Field, N: float) -> Field:
    """Project onto the dyadic frequency band |xi| ~ N.

    The bumps telescope: summing the projections over N = 1, 2, 4, ... up to
    the first dyadic level >= the grid's Nyquist frequency reproduces the
    field exactly on resolved frequencies.
    """
    return to_physical(apply_symbol(to_spectrum(f), band_symbol(N)))


def make_gaussian(
    grid: Grid,
    amplitude: complex = 1.0,
    width: float = 1.0,
    carrier: float = 0.0,
    center: float = 0.0,
) -> Field:
    """Modulated Gaussian ``A exp(i k0 x) exp(-((x - x0)/w)^2)``.

    Fails with :class:`ResolutionError` when the carrier or width leaves
    spectral mass at the Nyquist mode above 1e-12 of the peak coefficient.
    """
    if width <= 0:
        raise ConfigError("gaussian width must be positive")
    if abs(carrier) >= grid.xi_max:
        raise ConfigError(
            f"carrier {carrier} is at or above the Nyquist frequency {grid.xi_max}"
        )
    x = grid.x
    f = Field(
        grid,
        amplitude * np.exp(1j * carrier * x) * np.exp(-(((x - center) / width) ** 2)),
    )
    spec = to_spectrum(f)
    k = grid.k
    nyq_zone = np.abs(k) >= grid.M // 2 - 1
    tail = np.max(np.abs(spec.coef[nyq_zone]))
    peak = np.max(np.abs(spec.coef))
    if tail > 1e-12 * peak:
        raise ResolutionError(
            f"gaussian under-resolved: Nyquist coefficient {tail:.3e} "
            f"exceeds 1e-12 of peak {peak:.3e}"
        )
    return f


def spectral_tail_fraction(f: Field) -> float:
    """Fraction of spectral mass in the top octave |xi| >= xi_max/2."""
    spec = to_spectrum(f)
    power = np.abs(spec.coef) ** 2
    total = np.sum(power)
    if total == 0:
        return 0.0
    hi = np.abs(f.grid.xi) >= f.grid.xi_max / 2
    return float(np.sum(power[hi]) / total)


def boundary_tail_fraction(f: Field) -> float:
    """Fraction of mass within L/16 of either domain edge."""
    power = np.abs(f.values) ** 2
    total = np.sum(power)
    if total == 0:
        return 0.0
    edge = np.abs(f.grid.x) >= f.grid.L / 2 - f.grid.L / 16
    return float(np.sum(power[edge]) / total)


def check_resolved(f: Field, tol: float = 1e-8, localized: bool = True) -> dict:
    """Guard used by experiments before trusting a periodic surrogate.

    Returns the measured tail fractions; raises :class:`ResolutionError`
    when the spectral tail (or, for localized data, the boundary tail)
    exceeds ``tol`` of the total mass.
    """
    spectral = spectral_tail_fraction(f)
    boundary = boundary_tail_fraction(f)
    report = {"spectral_tail": spectral, "boundary_tail": boundary}
    if spectral > tol:
        raise ResolutionError(f"spectral tail {spectral:.3e} exceeds {tol:.1e}")
    if localized and boundary > tol:
        raise ResolutionError(f"boundary tail {boundary:.3e} exceeds {tol:.1e}")
    return report


# ---------------------------------------------------------------------------
# serialization


def field_to_csv(f: Field, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"# L={f.grid.L!r} M={f.grid.M}\n")
        fh.write("x,re_u,im_u\n")
        for xj, uj in zip(f.grid.x, f.values):
            fh.write(f"{float(xj)!r},{float(uj.real)!r},{float(uj.imag)!r}\n")


def field_from_csv(path) -> Field:
    with open(path) as fh:
        header = fh.readline().strip()
        parts = dict(tok.split("=") for tok in header.lstrip("# ").split())
        grid = make_grid(float(parts["L"]), int(parts["M"]))
        fh.readline()  # column names
        rows = [line.strip().split(",") for line in fh if line.strip()]
    vals = np.array([float(r[1]) + 1j * float(r[2]) for r in rows])
    return Field(grid, vals)


def spectrum_to_csv(s: Spectrum, path) -> None:
    order = np.argsort(s.grid.k)
    with open(path, "w") as fh:
        fh.write(f"# L={s.grid.L!r} M={s.grid.M}\n")
        fh.write("k,xi,re_c,im_c\n")
        for i in order:
            fh.write(
                f"{int(s.grid.k[i])},{float(s.grid.xi[i])!r},"
                f"{float(s.coef[i].real)!r},{float(s.coef[i].imag)!r}\n"
            )


def spectrum_from_csv(path) -> Spectrum:
    with open(path) as fh:
        header = fh.readline().strip()
        parts = dict(tok.split("=") for tok in header.lstrip("# ").split())
        grid = make_grid(float(parts["L"]), int(parts["M"]))
        fh.readline()
        coef = np.zeros(grid.M, dtype=np.complex128)
        for line in fh:
            if not line.strip():
                continue
            kk, _, re, im = line.strip().split(",")
            coef[int(kk) % grid.M] = float(re) + 1j * float(im)
    return Spectrum(grid, coef)


_BIN_MAGIC = b"FNLS"


def field_to_binary(f: Field, path) -> None:
    """Binary container: magic, L and M as little-endian doubles, then
    interleaved (re, im) little-endian doubles."""
    with open(path, "wb") as fh:
        fh.write(_BIN_MAGIC)
        fh.write(struct.pack("<dd", f.grid.L, float(f.grid.M)))
        inter = np.empty(2 * f.grid.M)
        inter[0::2] = f.values.real
        inter[1::2] = f.values.imag
        fh.write(inter.astype("<f8").tobytes())


def field_from_binary(path) -> Field:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _BIN_MAGIC:
            raise ConfigError(f"not a field container (magic {magic!r})")
        L, Mf = struct.unpack("<dd", fh.read(16))
        M = int(Mf)
        inter = np.frombuffer(fh.read(16 * M), dtype="<f8")
    return Field(make_grid(L, M), inter[0::2] + 1j * inter[1::2])
