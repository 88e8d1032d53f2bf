"""Grid types, inner products, and local Fourier transforms.

Everything downstream works with complex amplitudes sampled at the centers
of uniform cells. Single-photon amplitudes carry units of 1/sqrt(length)
and two-photon amplitudes 1/length, so squared norms are dimensionless
probabilities. Integrals are midpoint sums, which are exact for data that
is constant within cells and second order in the spacing for smooth data;
pulse discontinuities must therefore sit on cell boundaries.

The only physical constants are the dipole relaxation rate ``gamma`` of the
atom and the propagation speed ``c``. The default gamma = c = 1 measures
lengths in coherence lengths c/gamma and times in 1/gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PhysicalParams",
    "Grid1D",
    "Grid2D",
    "KDecomposition",
    "GeometryError",
    "GridExtentError",
    "SymmetryError",
    "inner_product",
    "local_fourier_1d",
    "local_fourier_2d",
    "rect_pulse",
    "sampled_pulse",
    "suggested_n_max",
]

# relative slack for deciding whether positions sit on the cell lattice
_ALIGN_TOL = 1e-6


class GeometryError(ValueError):
    """Grids with mismatched or misaligned geometry."""


class GridExtentError(ValueError):
    """Grid too small to hold the requested content."""


class SymmetryError(ValueError):
    """Two-photon amplitude that is not exchange symmetric."""


@dataclass(frozen=True)
class PhysicalParams:
    """Dipole relaxation rate and propagation speed.

    gamma : inverse time, rate of atomic dipole relaxation
    c     : length/time, propagation speed of the 1D field
    """

    gamma: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        if not (self.gamma >= 0 and math.isfinite(self.gamma)):
            raise ValueError(f"gamma must be finite and >= 0, got {self.gamma}")
        if not (self.c > 0 and math.isfinite(self.c)):
            raise ValueError(f"c must be finite and > 0, got {self.c}")

    @property
    def coherence_length(self) -> float:
        """Spatial extent c/gamma of a spontaneously emitted wavepacket."""
        if self.gamma == 0:
            return math.inf
        return self.c / self.gamma


@dataclass(frozen=True)
class Grid1D:
    """Complex amplitude on a uniform 1D grid, sampled at cell centers.

    ``x_min`` is the left edge of the first cell; sample j sits at
    x_min + (j + 1/2) dx. Instances are treated as immutable.
    """

    x_min: float
    dx: float
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "values", vals)
        if self.dx <= 0:
            raise ValueError(f"dx must be positive, got {self.dx}")
        if vals.ndim != 1 or vals.size < 2:
            raise ValueError("values must be a 1D array with at least 2 samples")

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def x(self) -> np.ndarray:
        """Cell-center positions."""
        return self.x_min + (np.arange(self.n) + 0.5) * self.dx

    @property
    def x_max(self) -> float:
        """Right edge of the last cell."""
        return self.x_min + self.n * self.dx

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2)) * self.dx

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def with_values(self, values: np.ndarray) -> "Grid1D":
        return Grid1D(self.x_min, self.dx, values)

    def geometry_matches(self, other) -> bool:
        return (
            self.n == getattr(other, "n", None)
            and abs(self.dx - other.dx) <= _ALIGN_TOL * self.dx
            and abs(self.x_min - other.x_min) <= _ALIGN_TOL * self.dx
        )


@dataclass(frozen=True)
class Grid2D:
    """Complex two-photon amplitude on a square grid with shared axes.

    values[i, j] samples psi(x_i, x_j) with both coordinates on the same
    cell-centered axis as :class:`Grid1D`.
    """

    x_min: float
    dx: float
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "values", vals)
        if self.dx <= 0:
            raise ValueError(f"dx must be positive, got {self.dx}")
        if vals.ndim != 2 or vals.shape[0] != vals.shape[1] or vals.shape[0] < 2:
            raise ValueError("values must be a square 2D array with at least 2 cells per axis")

    @classmethod
    def from_product(cls, a: Grid1D, b: Grid1D) -> "Grid2D":
        """Product amplitude a(x1) b(x2); symmetric when a and b coincide."""
        if not a.geometry_matches(b):
            raise GeometryError("product factors must share grid geometry")
        return cls(a.x_min, a.dx, np.outer(a.values, b.values))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def x(self) -> np.ndarray:
        return self.x_min + (np.arange(self.n) + 0.5) * self.dx

    @property
    def x_max(self) -> float:
        return self.x_min + self.n * self.dx

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2)) * self.dx**2

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def with_values(self, values: np.ndarray) -> "Grid2D":
        return Grid2D(self.x_min, self.dx, values)

    def geometry_matches(self, other) -> bool:
        return (
            self.n == getattr(other, "n", None)
            and abs(self.dx - other.dx) <= _ALIGN_TOL * self.dx
            and abs(self.x_min - other.x_min) <= _ALIGN_TOL * self.dx
        )

    def exchange_defect(self) -> float:
        """Max |psi(x1,x2) - psi(x2,x1)| relative to the largest amplitude."""
        scale = float(np.max(np.abs(self.values)))
        if scale == 0.0:
            return 0.0
        return float(np.max(np.abs(self.values - self.values.T))) / scale


def inner_product(a, b) -> complex:
    """Midpoint-rule inner product ⟨a|b⟩ = Σ conj(a)·b·dx^d.

    Conjugate symmetric: inner_product(a, b) == conj(inner_product(b, a)).
    Raises GeometryError when the grids differ.
    """
    if type(a) is not type(b) or not a.geometry_matches(b):
        raise GeometryError("inner product requires identical grid geometry")
    d = a.values.ndim
    return complex(np.vdot(a.values, b.values) * a.dx**d)


def _cells(length: float, dx: float, what: str) -> int:
    m = length / dx
    k = round(m)
    if k < 0 or abs(m - k) > _ALIGN_TOL * max(1.0, abs(m)):
        raise GeometryError(f"{what} ({length!r}) must be a whole number of cells of size {dx!r}")
    return k


def rect_pulse(length: float, dx: float, pad_left: float = 0.0, pad_right: float = 0.0) -> Grid1D:
    """Normalized rectangular pulse of the given length on [0, length].

    The grid spans [-pad_left, length + pad_right]; all three extents must
    be whole multiples of dx so the pulse edges fall on cell boundaries.
    """
    if length <= 0:
        raise ValueError(f"pulse length must be positive, got {length}")
    n_pulse = _cells(length, dx, "pulse length")
    n_left = _cells(pad_left, dx, "pad_left")
    n_right = _cells(pad_right, dx, "pad_right")
    values = np.zeros(n_left + n_pulse + n_right, dtype=complex)
    values[n_left : n_left + n_pulse] = 1.0 / math.sqrt(length)
    return Grid1D(-pad_left, dx, values)


def sampled_pulse(fn, x_min: float, x_max: float, dx: float, normalize: bool = True) -> Grid1D:
    """Sample a pulse shape fn(x) at cell centers on [x_min, x_max]."""
    n = _cells(x_max - x_min, dx, "grid extent")
    x = x_min + (np.arange(n) + 0.5) * dx
    values = np.asarray(fn(x), dtype=complex)
    grid = Grid1D(x_min, dx, values)
    if normalize:
        nrm = grid.norm()
        if nrm == 0.0:
            raise ValueError("cannot normalize a zero pulse")
        grid = grid.with_values(values / nrm)
    return grid


@dataclass(frozen=True)
class KDecomposition:
    """Discrete local Fourier coefficients on the window [0, L].

    Wavenumbers are k = 2*pi*n/L for integer n with |n| <= n_max, the
    discretization that keeps the window basis orthonormal. ``coeffs`` is
    indexed by n + n_max along each axis (1D vector or 2D square matrix).
    Summing |coeffs|^2 over the full alias-free index range recovers the
    real-space norm of the windowed region (Parseval); a truncated n_max
    drops the high-k tail.
    """

    length: float
    n_max: int
    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=complex))
        if self.length <= 0:
            raise ValueError("window length must be positive")
        m = 2 * self.n_max + 1
        if self.coeffs.shape not in ((m,), (m, m)):
            raise ValueError("coeffs shape inconsistent with n_max")

    @property
    def dk(self) -> float:
        return 2.0 * math.pi / self.length

    @property
    def n_values(self) -> np.ndarray:
        return np.arange(-self.n_max, self.n_max + 1)

    def k(self, n: int) -> float:
        return self.dk * n

    def coeff(self, n1: int, n2: int | None = None) -> complex:
        i = n1 + self.n_max
        if not 0 <= i < 2 * self.n_max + 1:
            raise IndexError(f"index {n1} outside |n| <= {self.n_max}")
        if self.coeffs.ndim == 1:
            if n2 is not None:
                raise ValueError("1D decomposition takes a single index")
            return complex(self.coeffs[i])
        j = (n2 if n2 is not None else 0) + self.n_max
        if not 0 <= j < 2 * self.n_max + 1:
            raise IndexError(f"index {n2} outside |n| <= {self.n_max}")
        return complex(self.coeffs[i, j])

    def total_weight(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))


def _window_indices(grid, length: float) -> tuple[int, int]:
    """Locate the [0, length] window on the grid; both edges must align."""
    i0f = -grid.x_min / grid.dx
    i0 = round(i0f)
    if abs(i0f - i0) > _ALIGN_TOL:
        raise GeometryError("window edge x = 0 must fall on a cell boundary")
    nw = _cells(length, grid.dx, "window length")
    if i0 < 0 or i0 + nw > grid.n:
        raise GridExtentError(
            f"window [0, {length!r}] not contained in grid [{grid.x_min!r}, {grid.x_max!r}]"
        )
    return i0, nw


def _fourier_phases(n_cells: int, n_max: int):
    if n_max is None:
        n_max = n_cells // 2 - 1
    if not 0 <= n_max <= n_cells // 2 - 1:
        raise ValueError(f"n_max must be in [0, {n_cells // 2 - 1}] for {n_cells} window cells")
    ns = np.arange(-n_max, n_max + 1)
    # cell centers sit half a cell into the window, hence the half-bin phase
    return n_max, ns % n_cells, np.exp(-1j * math.pi * ns / n_cells)


def local_fourier_1d(grid: Grid1D, length: float, n_max: int | None = None) -> KDecomposition:
    """Coefficients (1/sqrt(L)) ∫_0^L e^{-ikx} psi(x) dx of the windowed amplitude."""
    i0, nw = _window_indices(grid, length)
    f = np.fft.fft(grid.values[i0 : i0 + nw])
    n_max, idx, phase = _fourier_phases(nw, n_max)
    coeffs = (grid.dx / math.sqrt(length)) * phase * f[idx]
    return KDecomposition(length=length, n_max=n_max, coeffs=coeffs)


def local_fourier_2d(grid: Grid2D, length: float, n_max: int | None = None) -> KDecomposition:
    """Coefficients (1/L) ∫∫_0^L e^{-ik1 x1 - ik2 x2} psi(x1,x2) dx1 dx2.

    The window [0, L] must lie inside the grid with edges on cell
    boundaries. Wavenumbers are restricted to |n| <= n_max; None keeps the
    full alias-free range.
    """
    i0, nw = _window_indices(grid, length)
    block = grid.values[i0 : i0 + nw, i0 : i0 + nw]
    f = np.fft.fft2(block)
    n_max, idx, phase = _fourier_phases(nw, n_max)
    coeffs = (grid.dx**2 / length) * (phase[:, None] * phase[None, :]) * f[np.ix_(idx, idx)]
    return KDecomposition(length=length, n_max=n_max, coeffs=coeffs)


def suggested_n_max(length: float, params: PhysicalParams, tail_fraction: float = 1e-3) -> int:
    """Smallest cutoff index keeping the dropped Lorentzian-pair tail below tail_fraction.

    The pair spectrum falls off as k^-4, so the weight beyond k = 2*pi*n/L
    is computable in closed form; the cutoff grows linearly with L.
    """
    if tail_fraction <= 0 or tail_fraction >= 1:
        raise ValueError("tail_fraction must be in (0, 1)")
    lc = params.coherence_length
    if not math.isfinite(lc):
        return 1

    def outside(kappa: float) -> float:
        # fraction of ∫ (1+u^2)^-2 du lying beyond |u| = kappa
        inside = kappa / (1 + kappa**2) + math.atan(kappa)
        return 1.0 - inside / (math.pi / 2)

    n = 1
    while outside(2 * math.pi * n * lc / length) > tail_fraction:
        n += 1
    return n
