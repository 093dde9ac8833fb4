"""Discrete calculus on the periodic annulus [r0, r1] x T_sigma.

A field is a plain ``(N_r, N_eta)`` float array bound to an
:class:`AnnulusGrid`: row ``i`` is the radius ``r_i``, column ``j`` the
helical coordinate ``eta_j``. There is no duplicated seam column; periodicity
in eta is by index arithmetic (and by the FFT).

Derivatives are spectral in eta and second-order finite differences in r.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class AnnulusGrid:
    r0: float
    r1: float
    N_r: int
    sigma: float
    N_eta: int

    def __post_init__(self):
        if self.N_r < 16:
            raise ValueError(f"N_r must be >= 16, got {self.N_r}")
        if self.N_eta < 8 or self.N_eta & (self.N_eta - 1):
            raise ValueError(f"N_eta must be a power of two >= 8, got {self.N_eta}")
        if not 0 < self.r0 < self.r1:
            raise ValueError("need 0 < r0 < r1")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")

    @property
    def h_r(self) -> float:
        return (self.r1 - self.r0) / (self.N_r - 1)

    @property
    def h_eta(self) -> float:
        return self.sigma / self.N_eta

    @property
    def r(self) -> np.ndarray:
        return np.linspace(self.r0, self.r1, self.N_r)

    @property
    def eta(self) -> np.ndarray:
        return np.arange(self.N_eta) * self.h_eta

    @property
    def omega(self) -> np.ndarray:
        """Angular wavenumbers 2 pi n / sigma of the rfft modes n = 0..N_eta/2."""
        return 2 * np.pi * np.arange(self.N_eta // 2 + 1) / self.sigma

    @property
    def shape(self) -> tuple[int, int]:
        return (self.N_r, self.N_eta)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Broadcast-ready ``(R, ETA)`` arrays of shape (N_r, N_eta)."""
        return np.meshgrid(self.r, self.eta, indexing="ij")

    def column(self, profile: np.ndarray) -> np.ndarray:
        """Replicate a radial profile across eta."""
        return np.repeat(np.asarray(profile, dtype=float)[:, None], self.N_eta, axis=1)

    def zeros(self) -> np.ndarray:
        return np.zeros(self.shape)

    def refined(self, factor_r: int = 2, factor_eta: int = 1) -> "AnnulusGrid":
        """Grid with ``h_r`` divided by ``factor_r`` (endpoints kept)."""
        return AnnulusGrid(self.r0, self.r1, (self.N_r - 1) * factor_r + 1,
                           self.sigma, self.N_eta * factor_eta)


def d_eta(u: np.ndarray, grid: AnnulusGrid, order: int = 1) -> np.ndarray:
    """Spectral eta-derivative of every radial row.

    The Nyquist mode is dropped for odd orders (its derivative is not
    representable on the grid); even orders keep it.
    """
    coeffs = np.fft.rfft(u, axis=-1)
    factor = (1j * grid.omega) ** order
    if order % 2:
        factor[-1] = 0.0
    return np.fft.irfft(coeffs * factor, n=grid.N_eta, axis=-1)


def d_r(u: np.ndarray, grid: AnnulusGrid) -> np.ndarray:
    """Central differences inside, second-order one-sided at r0 and r1."""
    return np.gradient(u, grid.h_r, axis=0, edge_order=2)


def d_rr(u: np.ndarray, grid: AnnulusGrid) -> np.ndarray:
    """Second r-derivative, second order everywhere (4-point one-sided ends)."""
    h2 = grid.h_r ** 2
    out = np.empty_like(u, dtype=float)
    out[1:-1] = (u[:-2] - 2 * u[1:-1] + u[2:]) / h2
    out[0] = (2 * u[0] - 5 * u[1] + 4 * u[2] - u[3]) / h2
    out[-1] = (2 * u[-1] - 5 * u[-2] + 4 * u[-3] - u[-4]) / h2
    return out


def c_norms(u, grid: AnnulusGrid) -> tuple[float, float]:
    """Discrete ``(C0, C1-proxy)`` norms.

    ``u`` may be a single field or an iterable of fields; for several fields the
    maximum over them is returned.
    """
    arrays = [u] if isinstance(u, np.ndarray) else list(u)
    c0 = c1 = 0.0
    for a in arrays:
        a0 = float(np.max(np.abs(a)))
        a1 = a0 + float(np.max(np.abs(d_r(a, grid)))) + float(np.max(np.abs(d_eta(a, grid))))
        c0, c1 = max(c0, a0), max(c1, a1)
    return c0, c1


# --- trigonometric interpolation helpers -------------------------------------

def row_coefficients(u: np.ndarray) -> np.ndarray:
    """Normalised rfft coefficients (last axis) so that u = sum c_n e^{i w_n eta}."""
    n = u.shape[-1]
    return np.fft.rfft(u, axis=-1) / n


def eval_trig(coeffs: np.ndarray, x: np.ndarray, sigma: float) -> np.ndarray:
    """Evaluate real trigonometric interpolants at arbitrary points.

    ``coeffs`` has shape (..., M) from :func:`row_coefficients`; ``x`` has shape
    (..., K) with matching leading axes. The Nyquist term is ignored.
    """
    m = coeffs.shape[-1]
    omega = 2 * np.pi * np.arange(m - 1) / sigma
    phase = np.exp(1j * x[..., :, None] * omega)
    weights = coeffs[..., None, : m - 1].copy()
    weights[..., 1:] *= 2.0
    return np.einsum("...km,...km->...k", phase, np.broadcast_to(weights, phase.shape)).real


def shift_rows(u: np.ndarray, shift: np.ndarray, grid: AnnulusGrid) -> np.ndarray:
    """Return ``v[i, j] = u_i(eta_j + shift[i])`` by exact Fourier phase shift."""
    coeffs = np.fft.rfft(u, axis=-1)
    phase = np.exp(1j * np.outer(shift, grid.omega))
    phase[:, -1] = 0.0
    return np.fft.irfft(coeffs * phase, n=grid.N_eta, axis=-1)


def write_field_csv(path, u: np.ndarray, grid: AnnulusGrid) -> None:
    """Write ``r,eta,value`` triples, one row per node, 17 significant digits."""
    R, E = grid.mesh()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["r", "eta", "value"])
        for r, e, v in zip(R.ravel(), E.ravel(), np.asarray(u).ravel()):
            w.writerow([f"{r:.17g}", f"{e:.17g}", f"{v:.17g}"])


def read_field_csv(path, grid: AnnulusGrid) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return np.array([float(row["value"]) for row in rows]).reshape(grid.shape)
