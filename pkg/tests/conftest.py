import numpy as np
import pytest

from m3lab.fields import Grid2, normalized3


@pytest.fixture
def grid():
    return Grid2(64, 64)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def band_limited(grid, rng, kmax=4, scale=1.0):
    """Random smooth real field: a handful of low modes, unit-normalized."""
    modes = np.zeros((grid.ny, grid.nx), dtype=complex)
    modes[:kmax, :kmax] = rng.normal(size=(kmax, kmax)) + 1j * rng.normal(size=(kmax, kmax))
    modes[-kmax:, :kmax] = rng.normal(size=(kmax, kmax)) + 1j * rng.normal(size=(kmax, kmax))
    f = np.fft.ifft2(modes).real
    return scale * f / np.max(np.abs(f))


def smooth_spin(grid, rng, amplitude=0.35, kmax=3):
    """Random smooth unit spin field around the north pole.

    Kept well inside the resolved band: normalization is nonlinear, so the
    spectrum of S has tails whose aliasing would otherwise dominate the
    rounding-level identities these fields are used to test.
    """
    comps = [band_limited(grid, rng, kmax=kmax, scale=amplitude) for _ in range(3)]
    S = np.stack(comps, axis=-1)
    S[..., 2] += 1.0
    return normalized3(S)


def smooth_complex(grid, rng, kmax=3, scale=0.5):
    re = band_limited(grid, rng, kmax, scale)
    im = band_limited(grid, rng, kmax, scale)
    return re + 1j * im
