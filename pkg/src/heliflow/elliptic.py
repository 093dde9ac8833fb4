"""Per-Fourier-mode elliptic solves.

Coefficients depend on r only, so every eta-mode decouples into a complex
two-point boundary value problem

    phi'' + p(r) phi' + q_n(r) phi = g_n(r)

discretised with second-order central differences. Boundary rows use the
second-order one-sided stencil; the third entry it introduces is eliminated
against the adjacent interior row, which keeps every system tridiagonal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .background import CoefficientTable
from .boundary import HelicalBC
from .errors import NotElliptic, SingularMode, ZeroMeanViolation
from .fields import AnnulusGrid

PIVOT_FLOOR = 1e-14


def thomas(lower, diag, upper, rhs):
    """Batched tridiagonal solve along axis 0.

    ``lower[i]`` multiplies x[i-1] (``lower[0]`` unused), ``upper[i]`` multiplies
    x[i+1] (``upper[-1]`` unused). Extra trailing axes are independent systems.
    """
    n = diag.shape[0]
    cp = np.empty_like(diag)
    dp = np.empty(rhs.shape, dtype=np.result_type(diag, rhs))
    scale = np.abs(lower) + np.abs(diag) + np.abs(upper)
    piv = diag[0]
    if np.any(np.abs(piv) <= PIVOT_FLOOR * scale[0]):
        raise SingularMode("zero pivot in row 0")
    cp[0] = upper[0] / piv
    dp[0] = rhs[0] / piv
    for i in range(1, n):
        piv = diag[i] - lower[i] * cp[i - 1]
        if np.any(np.abs(piv) <= PIVOT_FLOOR * scale[i]):
            raise SingularMode(f"pivot below {PIVOT_FLOOR} (relative) in row {i}")
        cp[i] = upper[i] / piv
        dp[i] = (rhs[i] - lower[i] * dp[i - 1]) / piv
    x = np.empty_like(dp)
    x[-1] = dp[-1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x


def solve_mode_bvp(h, p, q, g, left, right):
    """Solve ``phi'' + p phi' + q phi = g`` for a batch of modes.

    ``p`` has shape (N,), ``q`` and ``g`` shape (N, M). ``left``/``right`` are
    ``("dirichlet", value)`` or ``("robin", beta, value)`` meaning
    ``phi' + beta phi = value``; value and beta broadcast over modes.
    """
    n, m = g.shape
    p = np.asarray(p, dtype=float)[:, None]
    lo = np.broadcast_to(1 / h ** 2 - p / (2 * h), (n, m)).astype(complex)
    up = np.broadcast_to(1 / h ** 2 + p / (2 * h), (n, m)).astype(complex)
    di = (-2 / h ** 2 + np.broadcast_to(q, (n, m))).astype(complex)
    rhs = np.array(g, dtype=complex)

    if left[0] == "dirichlet":
        lo[0], di[0], up[0], rhs[0] = 0, 1, 0, left[1]
    else:
        beta, val = left[1], left[2]
        u1, l1, d1 = up[1], lo[1], di[1]
        di[0] = -3 / (2 * h) + beta + l1 / (2 * h * u1)
        up[0] = 4 / (2 * h) + d1 / (2 * h * u1)
        rhs[0] = val + g[1] / (2 * h * u1)
        lo[0] = 0
    if right[0] == "dirichlet":
        lo[-1], di[-1], up[-1], rhs[-1] = 0, 1, 0, right[1]
    else:
        beta, val = right[1], right[2]
        l2, u2, d2 = lo[-2], up[-2], di[-2]
        di[-1] = 3 / (2 * h) + beta - u2 / (2 * h * l2)
        lo[-1] = -4 / (2 * h) - d2 / (2 * h * l2)
        rhs[-1] = val - g[-2] / (2 * h * l2)
        up[-1] = 0
    return thomas(lo, di, up, rhs)


def solve_poisson(G2: np.ndarray, grid: AnnulusGrid) -> np.ndarray:
    """``(d_r^2 + d_eta^2) phi1 = G2``, phi1 = 0 at r0, d_r phi1 = 0 at r1."""
    g = np.fft.rfft(G2, axis=-1)
    w2 = grid.omega ** 2
    q = np.broadcast_to(-w2, g.shape)
    modes = solve_mode_bvp(grid.h_r, np.zeros(grid.N_r), q, g,
                           ("dirichlet", 0.0), ("robin", 0.0, 0.0))
    return np.fft.irfft(modes, n=grid.N_eta, axis=-1)


@dataclass
class PotentialSolution:
    phi_hat: np.ndarray   # on the sheared (y1, y2) grid
    phi: np.ndarray       # phi(r, eta) = phi_hat(r, eta + f(r))
    phi_r: np.ndarray     # chain rule: d_y1 phi_hat + f' d_y2 phi_hat
    phi_eta: np.ndarray


def _coefficients(table: CoefficientTable, variant: str):
    if variant == "euler":
        return table.k1_euler, table.k2_euler
    if variant == "reduced":
        return table.k1, table.k2
    raise ValueError(f"unknown coefficient variant {variant!r}")


def solve_sheared(Ghat: np.ndarray, table: CoefficientTable, grid: AnnulusGrid,
                  robin_data: np.ndarray, dirichlet_data: np.ndarray,
                  variant: str = "euler") -> PotentialSolution:
    """Solve the diagonal-principal-part problem in (y1, y2) coordinates.

    ``Ghat`` is the right side sampled on the (y1, y2) grid; ``robin_data``
    samples ``d_y1 phi + f'(r0) d_y2 phi`` at y1 = r0 and ``dirichlet_data``
    samples phi at y1 = r1, both on the eta grid.
    """
    if np.min(table.k22) <= 0:
        raise NotElliptic(f"min k22 = {np.min(table.k22):.3e} <= 0; sigma is not below sigma*")
    k1, k2 = _coefficients(table, variant)
    w = grid.omega
    h = grid.h_r
    g = np.fft.rfft(Ghat, axis=-1)
    q = -table.k22[:, None] * w ** 2 + 1j * w * k2[:, None]
    robin = np.fft.rfft(robin_data)
    dirichlet = np.fft.rfft(dirichlet_data)
    modes = solve_mode_bvp(h, k1, q, g,
                           ("robin", 1j * w * table.f_prime[0], robin),
                           ("dirichlet", dirichlet))
    # d/dy1 with the same one-sided end stencils as the boundary rows
    modes_r = np.gradient(modes, h, axis=0, edge_order=2)
    back = np.exp(1j * np.outer(table.f, w))
    back[:, -1] = 0.0
    n = grid.N_eta
    phi_hat = np.fft.irfft(modes, n=n, axis=-1)
    phi = np.fft.irfft(modes * back, n=n, axis=-1)
    phi_r = np.fft.irfft((modes_r + 1j * w * table.f_prime[:, None] * modes) * back, n=n, axis=-1)
    dw = 1j * w
    dw[-1] = 0.0
    phi_eta = np.fft.irfft(dw * modes * back, n=n, axis=-1)
    return PotentialSolution(phi_hat, phi, phi_r, phi_eta)


def solve_potential(G3: np.ndarray, table: CoefficientTable, bc: HelicalBC,
                    grid: AnnulusGrid, variant: str = "euler") -> PotentialSolution:
    """Potential equation with the oblique Robin row at r0 and Dirichlet at r1.

    G3 is given on (r, eta); it is divided by A11 and resampled at
    eta = y2 - f(r) by an exact Fourier phase shift.
    """
    if abs(bc.q3.mean) > 1e-12:
        raise ZeroMeanViolation("q3 must have zero mean")
    w = grid.omega
    g = np.fft.rfft(G3 / table.A11[:, None], axis=-1)
    shift = np.exp(-1j * np.outer(table.f, w))
    shift[:, -1] = 0.0
    Ghat = np.fft.irfft(g * shift, n=grid.N_eta, axis=-1)
    eta = grid.eta
    robin = bc.eps * bc.q1(eta, bc.sigma)
    dirichlet = bc.eps * bc.q3.antiderivative(eta - table.f[-1], bc.sigma)
    return solve_sheared(Ghat, table, grid, robin, dirichlet, variant)
