"""Transport of V_c, A and B along the projected streamlines.

Each of W2, W4, W5 is constant along the curves

    d eta / d tau = [a(tau) (W2bar + kappa2) + b(tau) W3bar] / (W1bar + U1(tau))

so its value at (r, eta) is the outer boundary datum at the exit point
eta(r1; r, eta). Two tracers share one slope interpolant (cubic spline in r
of the per-row Fourier coefficients, trigonometric in eta):

* :func:`trace_characteristic` integrates one full path with RK4;
* :func:`exit_map` builds the whole exit map row by row, composing the
  one-cell flow r_i -> r_{i+1} with the already known map at r_{i+1}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .assembly import PerturbationState, RADIAL_FLOOR, helical_factors
from .background import BackgroundFlow
from .boundary import HelicalBC
from .errors import DegenerateRadialVelocity
from .fields import AnnulusGrid, row_coefficients

SUBSTEPS = 4


class SlopeField:
    """Interpolated characteristic slope d eta / d tau on the annulus."""

    def __init__(self, Wbar: PerturbationState, bg: BackgroundFlow, sigma: float):
        grid = Wbar.grid
        self.grid = grid
        self.sigma = sigma
        self.bg = bg
        V1 = bg.U1_bar[:, None] + Wbar.W1
        if np.max(V1) > -RADIAL_FLOOR:
            raise DegenerateRadialVelocity(
                f"U1 + W1 must be negative on the grid (max {np.max(V1):.3e})")
        coeffs = np.stack([row_coefficients(w) for w in (Wbar.W1, Wbar.W2, Wbar.W3)], axis=1)
        m = coeffs.shape[-1] - 1  # Nyquist dropped
        self._m = m
        flat = np.concatenate([coeffs[..., :m].real, coeffs[..., :m].imag], axis=-1)
        self._spline = CubicSpline(grid.r, flat, axis=0)
        self._omega = 2 * np.pi * np.arange(m) / sigma

    def perturbation_at(self, tau, eta):
        """``(W1, W2, W3)`` at radii ``tau`` (shape (n,)) and ``eta`` (shape (n, K))."""
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        eta = np.asarray(eta, dtype=float).reshape(tau.shape[0], -1)
        flat = self._spline(tau)
        c = flat[..., : self._m] + 1j * flat[..., self._m:]
        c[..., 1:] *= 2.0
        phase = np.exp(1j * eta[..., None] * self._omega)
        vals = np.einsum("nkm,nfm->fnk", phase, c).real
        return vals[0], vals[1], vals[2]

    def __call__(self, tau, eta):
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        W1, W2, W3 = self.perturbation_at(tau, eta)
        _, U1, _, _ = self.bg.at(tau)
        V1 = U1[:, None] + W1
        if np.min(np.abs(V1)) < RADIAL_FLOOR:
            raise DegenerateRadialVelocity("radial velocity vanishes on a characteristic")
        a, b = helical_factors(tau, self.sigma)
        return (a[:, None] * (W2 + self.bg.kappa2) + b[:, None] * W3) / V1


class ConstantSlope:
    """Manufactured slope field, for checks of the integrators."""

    def __init__(self, value: float):
        self.value = float(value)

    def __call__(self, tau, eta):
        return np.full(np.shape(np.asarray(eta, dtype=float).reshape(np.size(tau), -1)), self.value)


def _rk4(slope, tau0, eta0, step, n_steps, record=False):
    """Fixed-step RK4 for d eta/d tau = slope(tau, eta); ``tau0`` is per row."""
    tau = np.asarray(tau0, dtype=float).copy()
    eta = np.asarray(eta0, dtype=float).copy()
    path = [(tau.copy(), eta.copy())] if record else None
    for _ in range(n_steps):
        k1 = slope(tau, eta)
        k2 = slope(tau + step / 2, eta + step / 2 * k1)
        k3 = slope(tau + step / 2, eta + step / 2 * k2)
        k4 = slope(tau + step, eta + step * k3)
        eta = eta + step / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        tau = tau + step
        if record:
            path.append((tau.copy(), eta.copy()))
    return eta, path


@dataclass
class CharacteristicTrace:
    start: tuple[float, float]
    tau: np.ndarray
    eta: np.ndarray
    exit_eta: float          # unwrapped
    exit_eta_wrapped: float  # reduced to [0, sigma)


def _wrap(e: float, sigma: float) -> float:
    w = e % sigma
    return 0.0 if w >= sigma else w  # a tiny negative e rounds up to sigma


def trace_characteristic(Wbar: PerturbationState | None, bg: BackgroundFlow, sigma: float,
                         node: tuple[float, float], slope=None,
                         substeps: int = SUBSTEPS, grid: AnnulusGrid | None = None
                         ) -> CharacteristicTrace:
    """Trace one characteristic from ``node = (r, eta)`` out to r1.

    The step is h_r / ``substeps`` (rounded so the path ends exactly at r1).
    ``slope`` overrides the field built from ``Wbar``; ``grid`` is needed only
    when neither carries one.
    """
    if slope is None:
        slope = SlopeField(Wbar, bg, sigma)
    grid = grid or getattr(slope, "grid", None) or Wbar.grid
    r, eta0 = float(node[0]), float(node[1])
    length = grid.r1 - r
    n = max(int(math.ceil(length / (grid.h_r / substeps) - 1e-9)), 0)
    if n == 0:
        tau = np.array([r])
        return CharacteristicTrace((r, eta0), tau, np.array([eta0]), eta0, _wrap(eta0, sigma))
    step = length / n
    exit_eta, path = _rk4(slope, np.array([r]), np.array([[eta0]]), step, n, record=True)
    tau = np.array([p[0][0] for p in path])
    etas = np.array([p[1][0, 0] for p in path])
    e = float(exit_eta[0, 0])
    return CharacteristicTrace((r, eta0), tau, etas, e, _wrap(e, sigma))


def exit_map(slope, grid: AnnulusGrid, substeps: int = SUBSTEPS) -> np.ndarray:
    """Unwrapped exit positions eta(r1; r_i, eta_j) for every node.

    Row N_r - 1 is the identity. Row i follows each node one cell outward with
    RK4 and reads the periodic part of row i+1's map there by trigonometric
    interpolation. The one-cell flows are computed for all rows at once; only
    the composition is sequential.
    """
    r, eta = grid.r, grid.eta
    n_eta = grid.N_eta
    step = grid.h_r / substeps
    moved, _ = _rk4(slope, r[:-1], np.broadcast_to(eta, (grid.N_r - 1, n_eta)), step, substeps)
    m = n_eta // 2
    w = 2 * np.pi * np.arange(m) / grid.sigma
    phases = np.exp(1j * moved[..., None] * w)
    out = np.empty(grid.shape)
    out[-1] = eta
    for i in range(grid.N_r - 2, -1, -1):
        c = np.fft.rfft(out[i + 1] - eta)[:m] / n_eta
        c[1:] *= 2.0
        out[i] = moved[i] + (phases[i] @ c).real
    return out


def solve_transport(Wbar: PerturbationState, bc: HelicalBC, bg: BackgroundFlow,
                    slope=None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(W2, W4, W5)`` as the boundary data read at the exit points."""
    grid = Wbar.grid
    if bc.eps == 0.0:
        return grid.zeros(), grid.zeros(), grid.zeros()
    if slope is None:
        slope = SlopeField(Wbar, bg, bc.sigma)
    exits = exit_map(slope, grid)
    s = bc.sigma
    return (bc.eps * bc.q_c(exits, s), bc.eps * bc.A_tilde(exits, s),
            bc.eps * bc.B_tilde(exits, s))
