"""2x2 matrix connections, their flatness residuals, and the spectral flow.

The q-side linear problem is

    g_x = U g,    g_t = 2(c lam^2 + d lam) g_y + V g

whose cross-derivative compatibility is

    U_t - 2(c lam^2 + d lam) U_y - V_x + [U, V] = 0.

With U = i[(c lam^2 + d lam) s3 + (2c lam + d) Q], Q = [[0,q],[p,0]], the
unique polynomial V for which that residual vanishes identically on
solutions of the q/p/v system is

    V  = lam^2 B2 + lam B1 + B0
    B2 = -4i c^2 v s3
    B1 = -4i c d v s3 - 2 c Q_y s3 - 8i c^2 v Q
    B0 = -i d^2 v s3 -   d Q_y s3 - 4i c d v Q

(verified symbolically, all powers of lam; B0 is the closed form of
(d/2c) B1 - (d^2/4c^2) B2 and stays finite at c = 0, where it reproduces the
Zakharov-limit connection.)

The spin-side connection builder is provided verbatim for structural
diagnostics (tracelessness, algebraic identities); one grouping ambiguity in
its lam^1 coefficient is kept behind a flag.

The frame-side su(2) connection mirrors the 3x3 transport system at half
scale: residual max-norms agree with the so(3) ones after multiplying by 2.
"""

import numpy as np

from .errors import ParameterError
from .fields import (
    SPECTRAL,
    Grid2,
    commutator,
    ddx,
    ddy,
    matmul,
    max_norm,
)

SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)
IDENT2 = np.eye(2, dtype=complex)

_PAULI = {1: SIGMA1, 2: SIGMA2, 3: SIGMA3}


def pauli(j: int) -> np.ndarray:
    if j not in _PAULI:
        raise ParameterError(f"pauli index must be 1, 2 or 3, got {j}")
    return _PAULI[j].copy()


def pauli_identities() -> dict:
    """Exact checks of the product table and squares; deviations are 0.0."""
    s1, s2, s3 = SIGMA1, SIGMA2, SIGMA3
    checks = {
        "s1*s2 - i*s3": s1 @ s2 - 1j * s3,
        "s2*s3 - i*s1": s2 @ s3 - 1j * s1,
        "s3*s1 - i*s2": s3 @ s1 - 1j * s2,
        "s2*s1 + i*s3": s2 @ s1 + 1j * s3,
        "s3*s2 + i*s1": s3 @ s2 + 1j * s1,
        "s1*s3 + i*s2": s1 @ s3 + 1j * s2,
        "s1^2 - I": s1 @ s1 - IDENT2,
        "s2^2 - I": s2 @ s2 - IDENT2,
        "s3^2 - I": s3 @ s3 - IDENT2,
    }
    report = {name: float(np.max(np.abs(dev))) for name, dev in checks.items()}
    report["pass"] = all(v == 0.0 for v in report.values())
    return report


def _diag_field(scalar: np.ndarray) -> np.ndarray:
    """scalar * sigma3 as a matrix field."""
    return scalar[..., None, None] * SIGMA3


def _q_matrix(q: np.ndarray, p: np.ndarray) -> np.ndarray:
    Q = np.zeros(q.shape + (2, 2), dtype=complex)
    Q[..., 0, 1] = q
    Q[..., 1, 0] = p
    return Q


def trace_deviation(M: np.ndarray) -> float:
    """Max |trace| over the grid (builders here are traceless)."""
    return float(np.max(np.abs(np.einsum("...ii->...", M))))


def build_lax_q(grid: Grid2, q: np.ndarray, p: np.ndarray, v: np.ndarray,
                par, lam: complex, scheme=SPECTRAL):
    """(U, V) connection for the q-side system at spectral parameter lam."""
    c, d = par.c, par.d
    Q = _q_matrix(q, p)
    Q_y = ddy(grid, Q, scheme)
    Lam = c * lam**2 + d * lam
    U = 1j * (Lam * SIGMA3 + (2.0 * c * lam + d) * Q)

    B2 = -4j * c * c * _diag_field(v)
    B1 = -4j * c * d * _diag_field(v) - 2.0 * c * matmul(Q_y, SIGMA3[None, None]) \
        - 8j * c * c * v[..., None, None] * Q
    B0 = -1j * d * d * _diag_field(v) - d * matmul(Q_y, SIGMA3[None, None]) \
        - 4j * c * d * v[..., None, None] * Q
    V = lam**2 * B2 + lam * B1 + B0
    return U, V


def zero_curvature_q(grid: Grid2, qpv_before, qpv_mid, qpv_after, par,
                     lam: complex, dt2: float, scheme=SPECTRAL) -> dict:
    """Flatness residual U_t - 2(c lam^2 + d lam) U_y - V_x + [U,V].

    Each qpv_* is a (q, p, v) triple sampled at t - dt, t, t + dt; U_t is the
    central difference over the 2*dt window.  Vanishes at discretization
    order on solutions of the q/p/v system.
    """
    U0, _ = build_lax_q(grid, *qpv_before, par, lam, scheme)
    U, V = build_lax_q(grid, *qpv_mid, par, lam, scheme)
    U1, _ = build_lax_q(grid, *qpv_after, par, lam, scheme)
    Lam = par.c * lam**2 + par.d * lam
    R = (U1 - U0) / dt2 - 2.0 * Lam * ddy(grid, U, scheme) - ddx(grid, V, scheme) \
        + commutator(U, V)
    return {"lam": lam, "residual": max_norm(R),
            "trace_U": trace_deviation(U), "trace_V": trace_deviation(V)}


def _traceless(M: np.ndarray) -> np.ndarray:
    """Remove the (analytically zero) trace residue left by aliasing."""
    tr = np.einsum("...ii->...", M)
    out = M.copy()
    out[..., 0, 0] -= 0.5 * tr
    out[..., 1, 1] -= 0.5 * tr
    return out


def build_lax_spin(grid: Grid2, S: np.ndarray, u: np.ndarray, v: np.ndarray,
                   par, lam: complex, scheme=SPECTRAL, grouping: str = "factored"):
    """Spin-side connection (U', V') built verbatim; structural use only.

    S enters as the matrix field S.sigma.  The lam^1 coefficient contains an
    ambiguously grouped term; grouping="factored" multiplies the whole brace
    by the S matrix (the traceless reading), grouping="split" applies it to
    the derivative term only.

    The products S S_x and S {...} carry traces proportional to the discrete
    residue of S.S_x (zero for the continuum unit field); those are projected
    out so the builder is traceless at rounding for any unit input.
    """
    c, d, l = par.c, par.d, par.l
    denom = 2.0 * c * lam + d
    if abs(denom) < 1e-12:
        raise ParameterError(f"|2 c lam + d| = {abs(denom):.3e} too small")
    Sm = (S[..., 0, None, None] * SIGMA1 + S[..., 1, None, None] * SIGMA2
          + S[..., 2, None, None] * SIGMA3)
    Sx = ddx(grid, Sm, scheme)
    Sy = ddy(grid, Sm, scheme)
    SSx = _traceless(matmul(Sm, Sx))

    U = (1j * c * (lam**2 - l**2) + 1j * d * (lam - l)) * Sm \
        + (c * (lam - l) / denom) * SSx

    denom_l = 2.0 * c * l + d
    if abs(denom_l) < 1e-12:
        raise ParameterError(f"|2 c l + d| = {abs(denom_l):.3e} too small")
    B = 0.25 * (commutator(Sm, Sy) + 2j * u[..., None, None] * Sm)
    F2 = -4j * c * c * v[..., None, None] * Sm
    SSx_y = ddy(grid, SSx, scheme)
    if grouping == "factored":
        brace = _traceless(matmul(Sm, SSx_y - commutator(SSx, B)))
    elif grouping == "split":
        brace = matmul(Sm, SSx_y) - commutator(SSx, B)
    else:
        raise ParameterError(f"unknown grouping {grouping!r}")
    F1 = -4j * c * d * v[..., None, None] * Sm \
        - (4.0 * c * c / denom_l) * (v * v)[..., None, None] * SSx \
        - (1j * c / denom_l) * brace
    F0 = -l * F1 - l * l * F2
    V = (2.0 * c * (lam**2 - l**2) + 2.0 * d * (lam - l)) * B \
        + lam**2 * F2 + lam * F1 + F0
    return U, V


# ---------------------------------------------------------------------------
# Frame-side su(2) connection
# ---------------------------------------------------------------------------

def su2_from_vec(v1: np.ndarray, v2: np.ndarray, v3: np.ndarray, beta: int = 1) -> np.ndarray:
    """(1/2i) [[v1, v3 - i v2], [beta(v3 + i v2), -v1]]."""
    M = np.zeros(np.shape(v1) + (2, 2), dtype=complex)
    M[..., 0, 0] = v1
    M[..., 0, 1] = v3 - 1j * np.asarray(v2)
    M[..., 1, 0] = beta * (v3 + 1j * np.asarray(v2))
    M[..., 1, 1] = -np.asarray(v1)
    return M / 2j


def su2_connection(coeffs, beta: int = 1):
    """(U, V, W) from frame coefficients; W is None without time entries."""
    U = su2_from_vec(coeffs.tau, coeffs.sigma, coeffs.k, beta)
    V = su2_from_vec(coeffs.m1, coeffs.m2, coeffs.m3, beta)
    W = None
    if coeffs.has_time_entries():
        W = su2_from_vec(coeffs.w1, coeffs.w2, coeffs.w3, beta)
    return U, V, W


def frame_zero_curvature(grid: Grid2, conn_mid, scheme=SPECTRAL,
                         conn_before=None, conn_after=None, dt2: float = None) -> dict:
    """Flatness residuals of the su(2) frame connection.

    conn_* are (U, V, W) triples from su2_connection.  Reports the xy
    residual U_y - V_x + [U,V]; with before/after snapshots also the xt and
    yt residuals (time derivatives by central difference).
    """
    U, V, W = conn_mid
    out = {"xy": max_norm(ddy(grid, U, scheme) - ddx(grid, V, scheme) + commutator(U, V))}
    if conn_before is not None and conn_after is not None:
        if W is None:
            raise ParameterError("time residuals need w1..w3 in the mid connection")
        U0, V0, _ = conn_before
        U1, V1, _ = conn_after
        out["xt"] = max_norm((U1 - U0) / dt2 - ddx(grid, W, scheme) + commutator(U, W))
        out["yt"] = max_norm((V1 - V0) / dt2 - ddy(grid, W, scheme) + commutator(V, W))
    return out


# ---------------------------------------------------------------------------
# Nonisospectral flow of the spectral parameter
# ---------------------------------------------------------------------------

POLE_TOL = 1e-10


def lambda_rhs(lam: np.ndarray, lam_y: np.ndarray, par) -> np.ndarray:
    """lam_t = 2 (c lam^2 + d lam) lam_y."""
    return 2.0 * (par.c * lam**2 + par.d * lam) * lam_y


def lambda_solution(y, t, n: int, k: float, a: float, c: float = 0.0):
    """Closed-form solution lam = ((y + c)/(a - k t))^(1/n), principal branch."""
    y = np.asarray(y, dtype=complex)
    t = np.asarray(t, dtype=complex)
    denom = a - k * t
    if np.any(np.abs(denom) < POLE_TOL):
        raise ParameterError(f"|a - k t| < {POLE_TOL}: solution pole")
    w = (y + c) / denom
    return w ** (1.0 / n)


def lambda_residual(y, t, n: int, k: float, a: float, c: float = 0.0,
                    fd_step: float = 1e-6) -> dict:
    """Residual of lam_t = k lam^n lam_y for the closed-form solution.

    "analytic" uses the exact partials lam_t = k lam / (n (a - k t)) and
    lam_y = lam / (n (y + c)); "fd" replaces them by central differences of
    step fd_step.  Both are max-norms over the sample points.
    """
    y = np.asarray(y, dtype=complex)
    t = np.asarray(t, dtype=complex)
    if np.any(np.abs(y + c) < POLE_TOL):
        raise ParameterError(f"|y + c| < {POLE_TOL}: branch point")
    lam = lambda_solution(y, t, n, k, a, c)
    lam_t = k * lam / (n * (a - k * t))
    lam_y = lam / (n * (y + c))
    analytic = float(np.max(np.abs(lam_t - k * lam**n * lam_y)))

    lam_tp = lambda_solution(y, t + fd_step, n, k, a, c)
    lam_tm = lambda_solution(y, t - fd_step, n, k, a, c)
    lam_yp = lambda_solution(y + fd_step, t, n, k, a, c)
    lam_ym = lambda_solution(y - fd_step, t, n, k, a, c)
    lam_t_fd = (lam_tp - lam_tm) / (2.0 * fd_step)
    lam_y_fd = (lam_yp - lam_ym) / (2.0 * fd_step)
    fd = float(np.max(np.abs(lam_t_fd - k * lam**n * lam_y_fd)))
    return {"analytic": analytic, "fd": fd}
