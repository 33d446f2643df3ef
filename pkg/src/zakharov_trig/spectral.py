"""Discrete torus geometry, Fourier transforms, multipliers and Sobolev norms.

Coefficient convention: a field is expanded as

    f(x_j) = sum_k fhat(k) * exp(1j * kappa_k * x_j),

with collocation points x_j = -L/2 + j*L/K and wavenumbers
kappa_k = 2*pi*k/L for signed mode numbers k in {-K/2, ..., K/2 - 1}.
Under this convention a unit plane wave exp(2j*pi*x/L) has fhat = 1 on the
signed mode k = 1 exactly.  Discrete norms carry the Parseval factor L,

    integral |f|^2 dx = L * sum_k |fhat(k)|^2 = dx * sum_j |f(x_j)|^2,

so conserved quantities are grid-independent.

All operations here are pure functions of their inputs; grids cache their
derived arrays (the "transform plan") on first use, and fields are
immutable values whose stored arrays are marked read-only, so both are
safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import symbols
from .symbols import MultiplierSymbol


class GridMismatchError(ValueError):
    """Raised when fields from different grids are combined."""


@dataclass(frozen=True)
class TorusGrid:
    """Uniform collocation grid on a circle of circumference ``length``.

    Parameters
    ----------
    length : float
        Torus circumference L > 0, in units of x.
    modes : int
        Number of collocation points K; must be a power of two >= 8.
    """

    length: float
    modes: int

    def __post_init__(self) -> None:
        if not self.length > 0.0:
            raise ValueError(f"torus length must be positive, got {self.length}")
        k = self.modes
        if k < 8 or (k & (k - 1)) != 0:
            raise ValueError(f"mode count must be a power of two >= 8, got {k}")

    @property
    def dx(self) -> float:
        """Grid spacing L/K."""
        return self.length / self.modes

    @cached_property
    def x(self) -> np.ndarray:
        """Collocation points -L/2 + j*L/K, j = 0..K-1."""
        pts = -0.5 * self.length + np.arange(self.modes) * self.dx
        pts.setflags(write=False)
        return pts

    @cached_property
    def k(self) -> np.ndarray:
        """Physical wavenumbers 2*pi*k_signed/L in FFT ordering; k[0] == 0."""
        wn = 2.0 * np.pi * np.fft.fftfreq(self.modes, d=self.dx)
        wn.setflags(write=False)
        return wn

    @cached_property
    def mode_numbers(self) -> np.ndarray:
        """Signed integer mode numbers in FFT ordering."""
        idx = np.rint(np.fft.fftfreq(self.modes) * self.modes).astype(int)
        idx.setflags(write=False)
        return idx

    @cached_property
    def _phase(self) -> np.ndarray:
        # (-1)**k_signed compensates the -L/2 grid offset; since K is even
        # this reduces to an alternating sign over the unsigned FFT index.
        ph = np.where(np.arange(self.modes) % 2 == 0, 1.0, -1.0)
        ph.setflags(write=False)
        return ph

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """2/3-rule mask: keeps signed modes with |k| <= K//3."""
        mask = (np.abs(self.mode_numbers) <= self.modes // 3).astype(float)
        mask.setflags(write=False)
        return mask

    def to_spectral_array(self, values: np.ndarray) -> np.ndarray:
        """Physical samples -> coefficients fhat(k), FFT ordering."""
        return self._phase * np.fft.fft(values) / self.modes

    def to_physical_array(self, coeffs: np.ndarray) -> np.ndarray:
        """Coefficients fhat(k) -> physical samples on the collocation grid."""
        return np.fft.ifft(self._phase * coeffs) * self.modes


def _frozen_complex(values: np.ndarray, modes: int) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128)
    if arr.shape != (modes,):
        raise ValueError(f"expected array of shape ({modes},), got {arr.shape}")
    arr.setflags(write=False)
    return arr


class Field:
    """Complex-valued function on a :class:`TorusGrid` with dual views.

    A field is constructed from either representation and lazily caches the
    other one, so repeated physical<->spectral access costs one FFT total.
    Stored arrays are read-only; treat fields as immutable values.
    """

    __slots__ = ("grid", "space", "_phys", "_spec")

    def __init__(self, grid: TorusGrid, values: np.ndarray, space: str):
        if space not in ("physical", "spectral"):
            raise ValueError(f"space must be 'physical' or 'spectral', got {space!r}")
        self.grid = grid
        self.space = space
        arr = _frozen_complex(values, grid.modes)
        self._phys = arr if space == "physical" else None
        self._spec = arr if space == "spectral" else None

    @classmethod
    def from_physical(cls, grid: TorusGrid, values: np.ndarray) -> "Field":
        return cls(grid, values, "physical")

    @classmethod
    def from_spectral(cls, grid: TorusGrid, values: np.ndarray) -> "Field":
        return cls(grid, values, "spectral")

    @classmethod
    def zeros(cls, grid: TorusGrid) -> "Field":
        return cls(grid, np.zeros(grid.modes, dtype=np.complex128), "spectral")

    @property
    def physical(self) -> np.ndarray:
        if self._phys is None:
            self._phys = _frozen_complex(
                self.grid.to_physical_array(self._spec), self.grid.modes
            )
        return self._phys

    @property
    def spectral(self) -> np.ndarray:
        if self._spec is None:
            self._spec = _frozen_complex(
                self.grid.to_spectral_array(self._phys), self.grid.modes
            )
        return self._spec

    def __repr__(self) -> str:  # pragma: no cover
        return f"Field(K={self.grid.modes}, L={self.grid.length:g}, space={self.space})"


def require_same_grid(*fields: Field) -> TorusGrid:
    """Return the common grid of ``fields`` or raise :class:`GridMismatchError`."""
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise GridMismatchError(
                f"fields live on different grids: {f.grid} vs {grid}"
            )
    return grid


def to_spectral(f: Field) -> Field:
    """Return ``f`` with spectral canonical representation (idempotent)."""
    if f.space == "spectral":
        return f
    return Field.from_spectral(f.grid, f.spectral)


def to_physical(f: Field) -> Field:
    """Return ``f`` with physical canonical representation (idempotent)."""
    if f.space == "physical":
        return f
    return Field.from_physical(f.grid, f.physical)


def apply_multiplier(f: Field, m: MultiplierSymbol) -> Field:
    """Multiply the spectral coefficients of ``f`` pointwise by m(kappa_k).

    The zero mode receives the symbol's documented limit value.  The result
    is returned with spectral canonical representation.
    """
    return Field.from_spectral(f.grid, m.evaluate(f.grid.k) * f.spectral)


def sobolev_norm(f: Field, s: float) -> float:
    """Spectral Sobolev norm of order ``s`` (any real, negative included).

    Mode k is weighted by |kappa_k|**s while the zero mode always enters
    with weight one, so the mean contributes |fhat(0)| for every s:

        norm = sqrt( L * ( |fhat(0)|**2 + sum_{k!=0} |kappa|**(2s) |fhat|**2 ) ).

    For s = 0 this coincides with the collocation L2 norm.
    """
    w = symbols.sobolev_weight(f.grid.k, s)
    return float(np.sqrt(f.grid.length * np.sum((w * np.abs(f.spectral)) ** 2)))


def product_physical(f: Field, g: Field, dealias: bool = False) -> Field:
    """Pointwise (pseudo-spectral) product on the collocation points.

    No dealiasing is applied by default; with ``dealias=True`` the product's
    coefficients above the 2/3 cutoff are zeroed.
    """
    grid = require_same_grid(f, g)
    values = f.physical * g.physical
    if dealias:
        values = grid.to_physical_array(
            grid.dealias_mask * grid.to_spectral_array(values)
        )
    return Field.from_physical(grid, values)


def mean_value(f: Field) -> complex:
    """Mean of ``f`` over the torus, read as the spectral zero mode."""
    return complex(f.spectral[0])


def add(f: Field, g: Field, alpha: complex = 1.0) -> Field:
    """Return f + alpha*g (spectral arithmetic)."""
    grid = require_same_grid(f, g)
    return Field.from_spectral(grid, f.spectral + alpha * g.spectral)


def difference(f: Field, g: Field) -> Field:
    """Return f - g (spectral arithmetic)."""
    return add(f, g, alpha=-1.0)
