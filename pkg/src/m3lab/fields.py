"""Periodic grids, fields, and the discrete calculus everything else consumes.

Layout conventions used across the package:

  scalar / complex field   ndarray, shape (ny, nx)
  3-vector field           ndarray, shape (ny, nx, 3)
  2x2 matrix field         ndarray, shape (ny, nx, 2, 2), complex

x runs along axis 1 (fastest in memory), y along axis 0.  The domain is the
periodic rectangle [0, lx) x [0, ly) sampled at x_i = i*hx, y_j = j*hy.

Two derivative schemes are provided: "spectral" (FFT, exact below Nyquist)
and "central4" (periodic 5-point 4th-order stencil).  The periodic
antiderivative inv_dx is spectral and zero-mean by construction; the per-row
mean it discards is returned as a solvability diagnostic.
"""

import csv
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, FieldError

SPECTRAL = "spectral"
CENTRAL4 = "central4"

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class Grid2:
    """Uniform periodic rectangle: nx*ny points on [0,lx) x [0,ly)."""

    nx: int
    ny: int
    lx: float = TWO_PI
    ly: float = TWO_PI

    def __post_init__(self):
        if self.nx < 8 or self.ny < 8:
            raise ConfigError(f"grid needs nx, ny >= 8, got {self.nx} x {self.ny}")
        if self.lx <= 0 or self.ly <= 0:
            raise ConfigError("grid needs positive domain lengths")

    @property
    def hx(self) -> float:
        return self.lx / self.nx

    @property
    def hy(self) -> float:
        return self.ly / self.ny

    @cached_property
    def x(self) -> np.ndarray:
        return np.arange(self.nx) * self.hx

    @cached_property
    def y(self) -> np.ndarray:
        return np.arange(self.ny) * self.hy

    def meshgrid(self):
        """X, Y arrays of shape (ny, nx)."""
        return np.meshgrid(self.x, self.y)

    @cached_property
    def kx(self) -> np.ndarray:
        return TWO_PI * np.fft.fftfreq(self.nx, d=self.hx)

    @cached_property
    def ky(self) -> np.ndarray:
        return TWO_PI * np.fft.fftfreq(self.ny, d=self.hy)

    def zeros(self, comps: int = 0, dtype=float) -> np.ndarray:
        shape = (self.ny, self.nx) if comps == 0 else (self.ny, self.nx, comps)
        return np.zeros(shape, dtype=dtype)


@dataclass(frozen=True)
class DerivScheme:
    """Derivative scheme selection, optionally per axis."""

    x: str = SPECTRAL
    y: str = SPECTRAL

    def __post_init__(self):
        for kind in (self.x, self.y):
            if kind not in (SPECTRAL, CENTRAL4):
                raise ConfigError(f"unknown derivative scheme {kind!r}")

    @classmethod
    def of(cls, spec) -> "DerivScheme":
        if isinstance(spec, DerivScheme):
            return spec
        return cls(x=spec, y=spec)


def check_finite(f: np.ndarray, name: str = "field") -> np.ndarray:
    f = np.asarray(f)
    if not np.all(np.isfinite(f)):
        bad = int(np.size(f) - np.count_nonzero(np.isfinite(f)))
        raise FieldError(f"{name} contains {bad} non-finite entries")
    return f


def _spectral_deriv(f: np.ndarray, k: np.ndarray, axis: int) -> np.ndarray:
    fhat = np.fft.fft(f, axis=axis)
    shape = [1] * f.ndim
    shape[axis] = k.size
    out = np.fft.ifft(1j * k.reshape(shape) * fhat, axis=axis)
    return out if np.iscomplexobj(f) else out.real


def _central4_deriv(f: np.ndarray, h: float, axis: int) -> np.ndarray:
    fp1 = np.roll(f, -1, axis=axis)
    fp2 = np.roll(f, -2, axis=axis)
    fm1 = np.roll(f, 1, axis=axis)
    fm2 = np.roll(f, 2, axis=axis)
    return (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h)


def ddx(grid: Grid2, f: np.ndarray, scheme=SPECTRAL) -> np.ndarray:
    """d/dx along axis 1; works for any trailing component dimensions."""
    f = check_finite(f, "ddx input")
    kind = DerivScheme.of(scheme).x
    if kind == SPECTRAL:
        return _spectral_deriv(f, grid.kx, axis=1)
    return _central4_deriv(f, grid.hx, axis=1)


def ddy(grid: Grid2, f: np.ndarray, scheme=SPECTRAL) -> np.ndarray:
    """d/dy along axis 0; works for any trailing component dimensions."""
    f = check_finite(f, "ddy input")
    kind = DerivScheme.of(scheme).y
    if kind == SPECTRAL:
        return _spectral_deriv(f, grid.ky, axis=0)
    return _central4_deriv(f, grid.hy, axis=0)


def meanx(f: np.ndarray) -> np.ndarray:
    """Per-row x-mean, shape (ny, 1, ...) so it broadcasts against f."""
    return np.mean(f, axis=1, keepdims=True)


class Antideriv(NamedTuple):
    field: np.ndarray
    row_mean: np.ndarray  # the discarded per-row x-mean of the integrand


def inv_dx(grid: Grid2, f: np.ndarray) -> Antideriv:
    """Zero-mean periodic x-antiderivative of (f - meanx f), per y-row.

    ddx(inv_dx(f).field) == f - meanx(f) to spectral accuracy.  A nonzero
    row mean is a solvability violation of d/dx g = f on the periodic row;
    it is removed and reported, not fatal.
    """
    f = check_finite(f, "inv_dx input")
    fhat = np.fft.fft(f, axis=1)
    shape = [1] * f.ndim
    shape[1] = grid.nx
    k = grid.kx.reshape(shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        ghat = fhat / (1j * k)
    ghat[:, 0, ...] = 0.0
    g = np.fft.ifft(ghat, axis=1)
    if not np.iscomplexobj(f):
        g = g.real
    return Antideriv(g, np.squeeze(meanx(f), axis=1))


def integrate2(grid: Grid2, f: np.ndarray) -> float:
    """Periodic trapezoid quadrature hx*hy*sum(f); exact below Nyquist."""
    f = check_finite(f, "integrate2 input")
    return float(grid.hx * grid.hy * np.sum(f))


# ---------------------------------------------------------------------------
# 3-vector field algebra
# ---------------------------------------------------------------------------

def dot3(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("...k,...k->...", a, b)


def cross3(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.cross(a, b, axis=-1)


def norm3(a: np.ndarray) -> np.ndarray:
    return np.sqrt(dot3(a, a))


def normalized3(a: np.ndarray) -> np.ndarray:
    return a / norm3(a)[..., None]


# ---------------------------------------------------------------------------
# Pointwise matrix-field algebra (works for (..., 2, 2) and (..., 3, 3))
# ---------------------------------------------------------------------------

def matmul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return np.einsum("...ij,...jk->...ik", A, B)


def commutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return matmul(A, B) - matmul(B, A)


def max_norm(M: np.ndarray) -> float:
    return float(np.max(np.abs(M)))


def trace_field(M: np.ndarray) -> np.ndarray:
    return np.einsum("...ii->...", M)


# ---------------------------------------------------------------------------
# MFLD1 file format and CSV export
# ---------------------------------------------------------------------------
#
# One ASCII header line  "MFLD1 <nx> <ny> <ncomp> <lx> <ly>\n"
# followed by nx*ny*ncomp IEEE-754 binary64 little-endian values,
# row-major (y outer, x inner), components interleaved per point.

def write_mfld1(path, grid: Grid2, data: np.ndarray) -> None:
    data = np.asarray(data, dtype=float)
    if data.ndim == 2:
        data = data[:, :, None]
    if data.shape[:2] != (grid.ny, grid.nx):
        raise FieldError(f"data shape {data.shape} does not match grid {grid.ny}x{grid.nx}")
    ncomp = data.shape[2]
    header = f"MFLD1 {grid.nx} {grid.ny} {ncomp} {grid.lx:.17g} {grid.ly:.17g}\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(np.ascontiguousarray(data, dtype="<f8").tobytes())


def read_mfld1(path):
    """Returns (Grid2, data) with data shape (ny, nx, ncomp)."""
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").split()
        if len(header) != 6 or header[0] != "MFLD1":
            raise FieldError(f"{path}: not an MFLD1 file")
        nx, ny, ncomp = int(header[1]), int(header[2]), int(header[3])
        lx, ly = float(header[4]), float(header[5])
        raw = fh.read(8 * nx * ny * ncomp)
        if len(raw) != 8 * nx * ny * ncomp:
            raise FieldError(f"{path}: truncated payload")
    data = np.frombuffer(raw, dtype="<f8").reshape(ny, nx, ncomp).copy()
    return Grid2(nx, ny, lx, ly), data


def write_csv(path, grid: Grid2, data: np.ndarray) -> None:
    """CSV export (x, y, c0, ...); available for ncomp <= 4."""
    data = np.asarray(data, dtype=float)
    if data.ndim == 2:
        data = data[:, :, None]
    ncomp = data.shape[2]
    if ncomp > 4:
        raise FieldError(f"CSV export limited to ncomp <= 4, got {ncomp}")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y"] + [f"c{i}" for i in range(ncomp)])
        for j in range(grid.ny):
            for i in range(grid.nx):
                writer.writerow([repr(grid.x[i]), repr(grid.y[j])] + [repr(v) for v in data[j, i]])
