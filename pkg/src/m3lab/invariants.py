"""Topological charge densities and the frame integrals of motion.

Vector form (ground truth):

    K_j = integral of e_j . (e_jx ^ e_jy),   Q_j = K_j / (4 pi)

Coefficient form: the same densities expressed through the transport
matrices A ~ (tau, sigma, k) and B ~ (m1, m2, m3),

    density_j = A[j,j+1] B[j,j+2] - A[j,j+2] B[j,j+1]   (cyclic indices)

which reduces to (sigma m3 - k m2, k m1 - tau m3, tau m2 - sigma m1) at
beta = +1.  The two forms agree pointwise at discretization order for
smooth frames; the comparison is made at the density level because for
topologically nontrivial fields the coefficients are not globally smooth
periodic functions and the integral identity via exact forms is void.
"""

from dataclasses import dataclass

import numpy as np

from .fields import SPECTRAL, Grid2, cross3, ddx, ddy, dot3, integrate2
from .frames import FrameCoeffs, FrameField, so3_matrices

FOUR_PI = 4.0 * np.pi


@dataclass(frozen=True)
class ChargeReport:
    k_vector: tuple          # (K1, K2, K3) from the triple-product densities
    k_coeff: tuple           # (K1, K2, K3) from the coefficient densities
    q: tuple                 # (Q1, Q2, Q3) = k_vector / 4pi
    density_dev: tuple       # pointwise max gap between the two densities

    def as_row(self) -> list:
        return list(self.k_vector) + list(self.k_coeff) + list(self.q)


def charge_density(grid: Grid2, e: np.ndarray, scheme=SPECTRAL) -> np.ndarray:
    """e . (e_x ^ e_y) for a unit vector field e."""
    return dot3(e, cross3(ddx(grid, e, scheme), ddy(grid, e, scheme)))


def coeff_densities(coeffs: FrameCoeffs, beta: int = 1):
    """Coefficient-form charge densities read off the transport matrices."""
    A, B, _ = so3_matrices(coeffs, beta)
    out = []
    for j in range(3):
        a, b = (j + 1) % 3, (j + 2) % 3
        out.append(A[..., j, a] * B[..., j, b] - A[..., j, b] * B[..., j, a])
    return out


def charges(grid: Grid2, F: FrameField, coeffs: FrameCoeffs, scheme=SPECTRAL,
            beta: int = 1) -> ChargeReport:
    """All six integrals plus the pointwise density agreement check."""
    dens_v = [charge_density(grid, e, scheme) for e in (F.e1, F.e2, F.e3)]
    dens_c = coeff_densities(coeffs, beta)
    k_vec = tuple(integrate2(grid, d) for d in dens_v)
    k_coe = tuple(integrate2(grid, d) for d in dens_c)
    dev = tuple(float(np.max(np.abs(dv - dc))) for dv, dc in zip(dens_v, dens_c))
    q = tuple(kj / FOUR_PI for kj in k_vec)
    return ChargeReport(k_vector=k_vec, k_coeff=k_coe, q=q, density_dev=dev)
