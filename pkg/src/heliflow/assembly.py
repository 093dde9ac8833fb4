"""Nonlinear closures and source terms of the perturbation system.

Notation: a = sigma / (2 pi r^2), b = 1 + sigma^2 / (4 pi^2 r^2). The
perturbation W = (W1..W5) = (V1 - U1, V_c - kappa2, V3, A - A0, B - B0).

The source G1 is assembled line by line from the reduced continuity
equation. That reduction drops the centrifugal term V1 V2^2 / r (without it
even the background fails continuity), so :func:`g1_centrifugal` supplies
the missing part; its linear W1/W3 pieces live in the
``*_euler`` coefficients of the table instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields as dc_fields

import numpy as np

from .background import BackgroundFlow, CoefficientTable
from .errors import DegenerateRadialVelocity, VacuumState
from .fields import AnnulusGrid, d_eta, d_r, d_rr

RADIAL_FLOOR = 1e-8
VACUUM_FRACTION = 0.1


@dataclass
class PerturbationState:
    grid: AnnulusGrid
    W1: np.ndarray
    W2: np.ndarray
    W3: np.ndarray
    W4: np.ndarray
    W5: np.ndarray

    @classmethod
    def zeros(cls, grid: AnnulusGrid) -> "PerturbationState":
        return cls(grid, *(grid.zeros() for _ in range(5)))

    def arrays(self) -> tuple[np.ndarray, ...]:
        return (self.W1, self.W2, self.W3, self.W4, self.W5)

    def __sub__(self, other: "PerturbationState") -> "PerturbationState":
        return PerturbationState(self.grid, *(a - b for a, b in zip(self.arrays(), other.arrays())))

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(a)) for a in self.arrays())


@dataclass
class FlowField:
    V1: np.ndarray
    V2: np.ndarray
    V3: np.ndarray
    rho: np.ndarray
    p: np.ndarray
    A: np.ndarray
    B: np.ndarray
    mach: np.ndarray
    sigma: float
    grid: AnnulusGrid

    @property
    def Vc(self) -> np.ndarray:
        r = self.grid.r[:, None]
        return r * self.V2 - self.sigma / (2 * math.pi) * self.V3

    def columns(self):
        return {f.name: getattr(self, f.name) for f in dc_fields(self)
                if f.name not in ("sigma", "grid")}


def helical_factors(r, sigma):
    """``(a, b)`` with a = sigma/(2 pi r^2), b = 1 + sigma^2/(4 pi^2 r^2)."""
    r = np.asarray(r, dtype=float)
    return sigma / (2 * math.pi * r ** 2), 1 + sigma ** 2 / (4 * math.pi ** 2 * r ** 2)


def bernoulli_bracket(B, V1, V3, Vc, r, sigma):
    """B - |u|^2 / 2 written in (V1, V3, V_c); equals c^2 / (gamma - 1)."""
    a, b = helical_factors(r, sigma)
    return B - 0.5 * (V1 ** 2 + Vc ** 2 / r ** 2 + 2 * a * Vc * V3 + b * V3 ** 2)


def density_from(B, V1, V3, Vc, A, r, sigma, gamma):
    br = bernoulli_bracket(B, V1, V3, Vc, r, sigma)
    return ((gamma - 1) / (A * gamma)) ** (1 / (gamma - 1)) * br ** (1 / (gamma - 1))


def _guard(bracket, bg: BackgroundFlow):
    floor = VACUUM_FRACTION * float(np.min(bg.c2_bar)) / (bg.gamma - 1)
    if np.min(bracket) <= floor:
        raise VacuumState(f"Bernoulli bracket fell to {np.min(bracket):.3e} (guard {floor:.3e})")


def _physical(W: PerturbationState, bg: BackgroundFlow):
    r = W.grid.r[:, None]
    V1 = bg.U1_bar[:, None] + W.W1
    Vc = bg.kappa2 + W.W2
    return r, V1, W.W3, Vc, bg.A0 + W.W4, bg.B0 + W.W5


def sound_speed_sq(W: PerturbationState, bg: BackgroundFlow, sigma: float) -> np.ndarray:
    r, V1, V3, Vc, _, B = _physical(W, bg)
    br = bernoulli_bracket(B, V1, V3, Vc, r, sigma)
    _guard(br, bg)
    return (bg.gamma - 1) * br


def density(W: PerturbationState, bg: BackgroundFlow, sigma: float) -> np.ndarray:
    r, V1, V3, Vc, A, B = _physical(W, bg)
    _guard(bernoulli_bracket(B, V1, V3, Vc, r, sigma), bg)
    return density_from(B, V1, V3, Vc, A, r, sigma, bg.gamma)


def _radial_velocity(U1, W1):
    V1 = U1 + W1
    if np.min(np.abs(V1)) < RADIAL_FLOOR:
        raise DegenerateRadialVelocity("radial velocity U1 + W1 vanishes somewhere")
    return V1


def assemble_G2(Wb1, Wb3, W2, W4, W5, bg: BackgroundFlow, grid: AnnulusGrid, sigma: float):
    """Right side of d_r W3 - d_eta W1 = G2 (the vorticity equation over V1)."""
    r = grid.r[:, None]
    V1 = _radial_velocity(bg.U1_bar[:, None], Wb1)
    Vc = bg.kappa2 + W2
    br = bernoulli_bracket(bg.B0 + W5, V1, Wb3, Vc, r, sigma)
    _guard(br, bg)
    braces = (-d_eta(W5, grid)
              + (Vc + sigma / (2 * math.pi) * Wb3) / r ** 2 * d_eta(W2, grid)
              + br / (bg.gamma * (bg.A0 + W4)) * d_eta(W4, grid))
    return braces / V1


def _jay(W1, W2, W3, W5, r, sigma, bg):
    _, b = helical_factors(r, sigma)
    k2 = bg.kappa2
    return (bg.gamma - 1) * (W5 - k2 / r ** 2 * W2
                             - 0.5 * (W1 ** 2 + W2 ** 2 / r ** 2 + b * W3 ** 2
                                      + sigma / (math.pi * r ** 2) * W2 * W3))


def g1_reduced(Wb1, Wb3, W2, W4, W5, bg: BackgroundFlow, grid: AnnulusGrid, sigma: float):
    """Term-by-term G1 of the reduced form; returns ``(total, {line_name: array})``."""
    g = bg.gamma
    r = grid.r[:, None]
    a, b = helical_factors(r, sigma)
    U1 = bg.U1_bar[:, None]
    U1p = bg.U1_prime[:, None]
    k2 = bg.kappa2
    W1, W3 = Wb1, Wb3
    V1 = U1 + W1
    Vc = k2 + W2
    br = bernoulli_bracket(bg.B0 + W5, V1, W3, Vc, r, sigma)
    _guard(br, bg)
    c2 = (g - 1) * br
    J = _jay(W1, W2, W3, W5, r, sigma, bg)
    e1, e2, e3, e4, e5 = (d_eta(x, grid) for x in (W1, W2, W3, W4, W5))
    r1, r3 = d_r(W1, grid), d_r(W3, grid)
    lin = (g - 1) * U1 * W1 + (g - 1) * a * k2 * W3 - J

    lines = {
        "swirl_flux": -a * c2 * e2 + b * V1 * W3 * e1,
        "axial_transport": a * b * Vc * W3 * e3 + b * W3 * (V1 * r3 + b * W3 * e3),
        "bernoulli_entropy": -a * Vc * (e5 - c2 * e4 / ((g - 1) * (bg.A0 + W4))
                                        - b * W3 * e3 - (Vc / r ** 2 + a * W3) * e2),
        "radial_quadratic": (U1p * W1 ** 2 - U1p * J - U1 * J / r
                             + ((g + 1) * U1 * W1 + (g - 1) * a * k2 * W3 + W1 ** 2 - J) * r1),
        "geometric": W1 / r * lin,
        "axial_sound": b * lin * e3,
        "cross_radial": a * (k2 * W1 * r3 + V1 * W2 * r3),
        "cross_eta": a * W2 * (V1 * e1 + a * Vc * e3) + a * k2 * (W1 * e1 + a * W2 * e3),
    }
    return sum(lines.values()), lines


def g1_centrifugal(Wb1, Wb3, W2, W4, W5, bg: BackgroundFlow, grid: AnnulusGrid, sigma: float):
    """Terms restoring the exact continuity equation (see module docstring).

    Linear W1, W3 parts are excluded; they are carried by e1_euler, e3_euler.
    """
    g = bg.gamma
    r = grid.r[:, None]
    a, _ = helical_factors(r, sigma)
    U1 = bg.U1_bar[:, None]
    U2 = bg.U2_bar[:, None]
    W1, W3 = Wb1, Wb3
    V1 = U1 + W1
    Vc = bg.kappa2 + W2
    s3 = sigma / (2 * math.pi) * W3
    br = bernoulli_bracket(bg.B0 + W5, V1, W3, Vc, r, sigma)
    c2 = (g - 1) * br
    centrifugal = (2 * U2 * V1 * W2 / r ** 2 + sigma * U2 * W1 * W3 / (math.pi * r ** 2)
                   + V1 * (W2 + s3) ** 2 / r ** 3)
    transported = a * Vc * (-d_eta(W5, grid) + (Vc + s3) / r ** 2 * d_eta(W2, grid)
                            + c2 / ((g - 1) * (bg.A0 + W4)) * d_eta(W4, grid))
    return -centrifugal - transported


def assemble_G1(Wb1, Wb3, W2, W4, W5, bg: BackgroundFlow, grid: AnnulusGrid, sigma: float,
                centrifugal: bool = True):
    """G1 at the mixed arguments (previous W1, W3; current W2, W4, W5)."""
    _radial_velocity(bg.U1_bar[:, None], Wb1)
    total, _ = g1_reduced(Wb1, Wb3, W2, W4, W5, bg, grid, sigma)
    if centrifugal:
        total = total + g1_centrifugal(Wb1, Wb3, W2, W4, W5, bg, grid, sigma)
    return total


def assemble_G3(G1, phi1, table: CoefficientTable, bg: BackgroundFlow, grid: AnnulusGrid,
                variant: str = "euler"):
    """Source of the curl-free system after removing the Poisson correction phi1."""
    r = grid.r
    s2 = table.sigma ** 2 / (4 * math.pi ** 2 * r ** 2)
    mixed = bg.U1_bar ** 2 + s2 * (bg.c2_bar - bg.U2_bar ** 2)
    e1, e3 = (table.e1_euler, table.e3_euler) if variant == "euler" else (table.e1, table.e3)
    col = lambda v: v[:, None]
    phi_eta = d_eta(phi1, grid)
    return (G1 - col(mixed) * d_r(phi_eta, grid)
            - col(table.A13) * (d_rr(phi1, grid) - d_eta(phi1, grid, order=2))
            + col(e1) * phi_eta - col(e3) * d_r(phi1, grid))


def reconstruct_flow(W: PerturbationState, bg: BackgroundFlow, sigma: float) -> FlowField:
    """Primitive fields of U + W.

    The density is scaled from the integrated background profile, so W = 0
    returns that profile exactly; otherwise it agrees with the pure closure to
    the background's own Bernoulli defect.
    """
    r, V1, V3, Vc, A, B = _physical(W, bg)
    br = bernoulli_bracket(B, V1, V3, Vc, r, sigma)
    _guard(br, bg)
    g = bg.gamma
    br_bar = bg.c2_bar[:, None] / (g - 1)
    br0 = bernoulli_bracket(bg.B0, bg.U1_bar[:, None], 0.0, bg.kappa2, r, sigma)
    rho = bg.rho_bar[:, None] * ((1 + (br - br0) / br_bar) * (bg.A0 / A)) ** (1 / (g - 1))
    p = A * rho ** g
    V2 = (Vc + sigma / (2 * math.pi) * V3) / r
    c2 = g * A * rho ** (g - 1)
    mach = np.sqrt(V1 ** 2 + V2 ** 2 + V3 ** 2) / np.sqrt(c2)
    return FlowField(V1=V1, V2=V2, V3=np.array(V3, dtype=float), rho=rho, p=p, A=A, B=B,
                     mach=mach, sigma=sigma, grid=W.grid)
