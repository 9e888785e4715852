"""Periodic spectral kernel: grid, FFT differentiation, Helmholtz inversion.

Everything downstream works on a uniform periodic grid over [-L, L) and
manipulates fields through their real FFT. The two workhorse operators are

    d^n/dx^n  ->  multiply mode k by (ik)^n
    (1 - d^2/dx^2)^{-1}  ->  multiply mode k by 1/(1 + k^2)

The second one is the convolution with the kernel exp(-|x|)/2, realized
exactly on the periodic box as a Fourier multiplier. Quadratic products are
kept alias-free with the standard 2/3 rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


class NonFiniteFieldError(ValueError):
    """A field contains NaN or infinity where a finite value is required."""


def _first_bad_index(values: np.ndarray) -> int:
    return int(np.flatnonzero(~np.isfinite(values))[0])


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [-L, L) with its wavenumber set.

    Parameters
    ----------
    half_width : float
        L; the domain is [-L, L) with period 2L.
    n_points : int
        N; must be even and at least 16.
    """

    half_width: float
    n_points: int

    def __post_init__(self) -> None:
        if not (self.half_width > 0 and np.isfinite(self.half_width)):
            raise ValueError(f"half_width must be positive and finite, got {self.half_width}")
        if self.n_points < 16 or self.n_points % 2 != 0:
            raise ValueError(f"n_points must be even and >= 16, got {self.n_points}")

    @cached_property
    def spacing(self) -> float:
        """Grid spacing h = 2L/N."""
        return 2.0 * self.half_width / self.n_points

    @cached_property
    def x(self) -> np.ndarray:
        """Grid points x_i = -L + i*h, strictly increasing."""
        pts = -self.half_width + self.spacing * np.arange(self.n_points)
        pts.flags.writeable = False
        return pts

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Full FFT-ordered wavenumbers pi*j/L, j = 0..N/2-1, -N/2..-1.

        Closed under negation except for the lone Nyquist mode at -N/2.
        """
        k = 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.spacing)
        k.flags.writeable = False
        return k

    @cached_property
    def wavenumbers_half(self) -> np.ndarray:
        """Real-FFT wavenumbers pi*j/L for j = 0..N/2 (Nyquist last)."""
        k = 2.0 * np.pi * np.fft.rfftfreq(self.n_points, d=self.spacing)
        k.flags.writeable = False
        return k

    @cached_property
    def dealias_keep(self) -> np.ndarray:
        """Boolean 2/3-rule mask on the real-FFT layout: keep |j| <= N//3."""
        j = np.arange(self.n_points // 2 + 1)
        mask = j <= self.n_points // 3
        mask.flags.writeable = False
        return mask

    @cached_property
    def helmholtz_multiplier(self) -> np.ndarray:
        """1/(1 + k^2) on the real-FFT layout."""
        m = 1.0 / (1.0 + self.wavenumbers_half**2)
        m.flags.writeable = False
        return m

    @cached_property
    def derivative_multiplier(self) -> np.ndarray:
        """ik on the real-FFT layout, Nyquist zeroed (odd-order convention)."""
        m = 1j * self.wavenumbers_half
        m[-1] = 0.0
        m.flags.writeable = False
        return m


@dataclass(frozen=True)
class Field:
    """A real field sampled on a Grid; immutable, guaranteed finite.

    Construction copies the input values, rejects non-finite entries (a NaN
    mid-simulation is a detected blow-up and must never propagate silently),
    and locks the array. The spectrum is computed lazily and cached.
    """

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid.n_points,):
            raise ValueError(
                f"values must have shape ({self.grid.n_points},), got {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            i = _first_bad_index(vals)
            raise NonFiniteFieldError(
                f"non-finite value {vals[i]} at index {i} (x = {self.grid.x[i]:g})"
            )
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @cached_property
    def spectrum(self) -> np.ndarray:
        """Cached real-FFT of the values; round-trips to 1e-12."""
        spec = np.fft.rfft(self.values)
        spec.flags.writeable = False
        return spec

    @cached_property
    def derivative(self) -> np.ndarray:
        """Cached first spatial derivative values."""
        d = _derivative_values(self.spectrum, self.grid, 1)
        d.flags.writeable = False
        return d

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


def _derivative_values(spectrum: np.ndarray, grid: Grid, order: int) -> np.ndarray:
    k = grid.wavenumbers_half
    mult = (1j * k) ** order
    if order % 2 == 1:
        # keep real fields real: the unpaired Nyquist mode has no well-defined
        # odd derivative
        mult = mult.copy()
        mult[-1] = 0.0
    return np.fft.irfft(spectrum * mult, n=grid.n_points)


def differentiate(f: Field, order: int) -> Field:
    """Spectral d^order/dx^order of a field, order in {1, 2, 3}."""
    if order not in (1, 2, 3):
        raise ValueError(f"order must be 1, 2 or 3, got {order}")
    return Field(f.grid, _derivative_values(f.spectrum, f.grid, order))


def helmholtz_inverse(f: Field) -> Field:
    """Apply (1 - d^2/dx^2)^{-1}, i.e. convolve with the kernel exp(-|x|)/2.

    On the periodic box this is the exact Green's-function convolution,
    computed as the multiplier 1/(1 + k^2).
    """
    return Field(f.grid, np.fft.irfft(f.spectrum * f.grid.helmholtz_multiplier, n=f.grid.n_points))


def dealias(spectrum: np.ndarray, grid: Grid) -> np.ndarray:
    """Zero all modes above the 2/3-rule cutoff. Idempotent.

    Operates on the real-FFT layout (length N/2 + 1).
    """
    spec = np.asarray(spectrum)
    if spec.shape != (grid.n_points // 2 + 1,):
        raise ValueError(
            f"expected real-FFT spectrum of length {grid.n_points // 2 + 1}, got {spec.shape}"
        )
    return np.where(grid.dealias_keep, spec, 0.0)


def hs_norm(f: Field, s: float) -> float:
    """Discrete Sobolev H^s norm, sqrt(sum_k (1+k^2)^s |u_k|^2 w_k).

    Quadrature weights are chosen so s = 0 reproduces the trapezoidal L2
    norm of the periodic grid (Parseval with weight 2L/N^2).
    """
    if s < 0:
        raise ValueError(f"Sobolev exponent must be nonnegative, got {s}")
    grid = f.grid
    spec = f.spectrum
    # rfft layout counts interior modes once; their negatives carry equal energy
    mode_weight = np.full(spec.shape, 2.0)
    mode_weight[0] = 1.0
    mode_weight[-1] = 1.0
    sobolev = (1.0 + grid.wavenumbers_half**2) ** s
    total = np.sum(mode_weight * sobolev * np.abs(spec) ** 2)
    return float(np.sqrt(total * grid.spacing / grid.n_points))
