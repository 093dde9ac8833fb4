"""Cylindrically symmetric transonic background flow and its coefficients.

The background is obtained by integrating the regular radial ODEs

    rho' = (M1^2 + M2^2) / (r (1 - M1^2)) * rho
    U1'  = -(1 + M2^2) / (r (1 - M1^2)) * U1

inward from the outer cylinder with fixed-step RK4 on a uniform grid; the
swirl is U2 = kappa2 / r and the entropy function stays A0. Only 1 - M1^2
appears in a denominator, so nothing degenerates at the sonic radius.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import optimize
from scipy.integrate import cumulative_simpson
from scipy.interpolate import CubicHermiteSpline, CubicSpline

from .errors import (NoSonicPoint, NoSupersonicRegion, SonicRadialVelocity,
                     VacuumOrInvalid, ValidationError)

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class GasInflow:
    """Gas constants and the inflow state on the outer cylinder r = r1."""

    gamma: float
    A0: float
    rho0: float
    U10: float
    U20: float
    r0: float
    r1: float

    def validate(self) -> None:
        if not self.gamma > 1:
            raise ValidationError("gamma must exceed 1")
        if not self.rho0 > 0:
            raise ValidationError("rho0 must be positive")
        if not self.A0 > 0:
            raise ValidationError("A0 must be positive")
        if self.U20 == 0:
            raise ValidationError("U20 must be nonzero")
        if self.U10 > 0:
            raise ValidationError("U10 must be <= 0 (flow moves inward)")
        if not 0 < self.r0 < self.r1:
            raise ValidationError("need 0 < r0 < r1")
        if not self.c0_sq > self.U10 ** 2 + self.U20 ** 2:
            raise ValidationError("inflow must be subsonic: A0 gamma rho0^(gamma-1) > U10^2 + U20^2")

    @property
    def c0_sq(self) -> float:
        return self.gamma * self.A0 * self.rho0 ** (self.gamma - 1)

    @property
    def kappa1(self) -> float:
        return self.r1 * self.rho0 * self.U10

    @property
    def kappa2(self) -> float:
        return self.r1 * self.U20

    @property
    def B0(self) -> float:
        g = self.gamma
        return 0.5 * (self.U10 ** 2 + self.U20 ** 2) + g / (g - 1) * self.A0 * self.rho0 ** (g - 1)


def sonic_radius_closed_form(inflow: GasInflow) -> float:
    """Closed-form sonic radius of the background (independent of r0)."""
    g, B0 = inflow.gamma, inflow.B0
    rho_c = (2 * (g - 1) * B0 / ((g + 1) * g * inflow.A0)) ** (1 / (g - 1))
    k1, k2 = inflow.kappa1, inflow.kappa2
    return math.sqrt((g + 1) * (k1 ** 2 + k2 ** 2 * rho_c ** 2) / (2 * (g - 1) * B0 * rho_c ** 2))


def _rhs(r, rho, U1, inflow: GasInflow):
    c2 = inflow.gamma * inflow.A0 * rho ** (inflow.gamma - 1)
    U2 = inflow.kappa2 / r
    m1, m2 = U1 ** 2 / c2, U2 ** 2 / c2
    den = r * (1 - m1)
    return (m1 + m2) / den * rho, -(1 + m2) / den * U1, m1


@dataclass
class BackgroundFlow:
    inflow: GasInflow
    r_grid: np.ndarray
    rho_bar: np.ndarray
    U1_bar: np.ndarray
    U2_bar: np.ndarray
    c2_bar: np.ndarray
    M1_sq: np.ndarray
    M2_sq: np.ndarray
    rho_prime: np.ndarray
    U1_prime: np.ndarray
    r_c: float | None = None
    r_sharp_u10zero: float | None = None

    @property
    def gamma(self) -> float:
        return self.inflow.gamma

    @property
    def A0(self) -> float:
        return self.inflow.A0

    @property
    def kappa1(self) -> float:
        return self.inflow.kappa1

    @property
    def kappa2(self) -> float:
        return self.inflow.kappa2

    @property
    def B0(self) -> float:
        return self.inflow.B0

    @property
    def N_r(self) -> int:
        return len(self.r_grid)

    @property
    def M_sq(self) -> np.ndarray:
        return self.M1_sq + self.M2_sq

    @property
    def U2_prime(self) -> np.ndarray:
        return -self.U2_bar / self.r_grid

    @property
    def c2_prime(self) -> np.ndarray:
        return (self.gamma - 1) * self.c2_bar * self.rho_prime / self.rho_bar

    @property
    def p_bar(self) -> np.ndarray:
        return self.A0 * self.rho_bar ** self.gamma

    @cached_property
    def _dense(self):
        r = self.r_grid
        return (CubicHermiteSpline(r, self.rho_bar, self.rho_prime),
                CubicHermiteSpline(r, self.U1_bar, self.U1_prime))

    def at(self, r):
        """Dense (cubic Hermite) evaluation: returns ``(rho, U1, U2, c2)`` at r."""
        rho_s, u1_s = self._dense
        rho, U1 = rho_s(r), u1_s(r)
        return rho, U1, self.kappa2 / np.asarray(r), self.gamma * self.A0 * rho ** (self.gamma - 1)

    def mach_sq_at(self, r):
        """Dense ``(M1^2, |M|^2)`` at r."""
        _, U1, U2, c2 = self.at(r)
        return U1 ** 2 / c2, (U1 ** 2 + U2 ** 2) / c2


def solve_background(inflow: GasInflow, N_r: int = 1024, tol_margin: float = 1e-6) -> BackgroundFlow:
    """Integrate the background from r1 down to r0 with fixed-step RK4."""
    inflow.validate()
    if N_r < 16:
        raise ValidationError("N_r must be >= 16")
    r = np.linspace(inflow.r0, inflow.r1, N_r)
    h = r[1] - r[0]
    rho = np.empty(N_r)
    U1 = np.empty(N_r)
    rho[-1], U1[-1] = inflow.rho0, inflow.U10

    def f(rr, y0, y1):
        d0, d1, m1 = _rhs(rr, y0, y1, inflow)
        if not m1 < 1 - tol_margin:
            raise SonicRadialVelocity(
                f"radial Mach number reached 1 near r={rr:.6g}; r0={inflow.r0} lies below the admissible range")
        return d0, d1

    for i in range(N_r - 1, 0, -1):
        ri, y0, y1 = r[i], rho[i], U1[i]
        k1 = f(ri, y0, y1)
        k2 = f(ri - h / 2, y0 - h / 2 * k1[0], y1 - h / 2 * k1[1])
        k3 = f(ri - h / 2, y0 - h / 2 * k2[0], y1 - h / 2 * k2[1])
        k4 = f(ri - h, y0 - h * k3[0], y1 - h * k3[1])
        rho[i - 1] = y0 - h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        U1[i - 1] = y1 - h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        if not rho[i - 1] > 0:
            raise VacuumOrInvalid(f"density became nonpositive at r={r[i - 1]:.6g}")

    rho_p, U1_p, _ = _rhs(r, rho, U1, inflow)
    c2 = inflow.gamma * inflow.A0 * rho ** (inflow.gamma - 1)
    U2 = inflow.kappa2 / r
    bg = BackgroundFlow(inflow=inflow, r_grid=r, rho_bar=rho, U1_bar=U1, U2_bar=U2, c2_bar=c2,
                        M1_sq=U1 ** 2 / c2, M2_sq=U2 ** 2 / c2, rho_prime=rho_p, U1_prime=U1_p)
    if inflow.U10 == 0:
        bg.r_sharp_u10zero = abs(inflow.kappa2) / math.sqrt(2 * inflow.B0)
    try:
        bg.r_c = find_sonic_radius(bg)
    except NoSonicPoint:
        bg.r_c = None
    return bg


def background_defects(bg: BackgroundFlow) -> dict[str, float]:
    """Relative max-node defects of the conserved quantities."""
    r = bg.r_grid
    g = bg.gamma
    bern = 0.5 * (bg.U1_bar ** 2 + bg.U2_bar ** 2) + g / (g - 1) * bg.A0 * bg.rho_bar ** (g - 1)
    mass_scale = abs(bg.kappa1) if bg.kappa1 != 0 else 1.0
    return {
        "mass_flux": float(np.max(np.abs(r * bg.rho_bar * bg.U1_bar - bg.kappa1)) / mass_scale),
        "swirl": float(np.max(np.abs(r * bg.U2_bar - bg.kappa2)) / abs(bg.kappa2)),
        "bernoulli": float(np.max(np.abs(bern - bg.B0)) / bg.B0),
        # the entropy function is held at A0 by construction
        "entropy": 0.0,
    }


def find_sonic_radius(bg: BackgroundFlow) -> float:
    """Root of |M|^2 = 1, bracketed on the grid and bisected on the dense profile."""
    excess = bg.M_sq - 1
    idx = np.nonzero(np.sign(excess[:-1]) != np.sign(excess[1:]))[0]
    if len(idx) == 0:
        raise NoSonicPoint("flow is subsonic (or supersonic) on all of [r0, r1]")
    i = idx[0]
    a, b = bg.r_grid[i], bg.r_grid[i + 1]
    if excess[i] == 0:
        return float(a)

    def g(rr):
        return float(bg.mach_sq_at(rr)[1]) - 1.0

    return optimize.bisect(g, a, b, xtol=1e-13, rtol=1e-14, maxiter=200)


def critical_step_profile(bg: BackgroundFlow, r) -> np.ndarray:
    """2 pi r sqrt((1 - M1^2) / (|M|^2 - 1)); NaN where subsonic."""
    m1, m = bg.mach_sq_at(r)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = TWO_PI * np.asarray(r) * np.sqrt((1 - m1) / (m - 1))
    return np.where(m > 1, out, np.nan)


def critical_step(bg: BackgroundFlow) -> tuple[float, float]:
    """Critical step sigma* and the radius attaining it.

    The minimum is taken over the supersonic radii, the only place where the
    ellipticity coefficient can change sign.
    """
    sup = np.nonzero(bg.M_sq > 1)[0]
    if len(sup) == 0:
        raise NoSupersonicRegion("|M| <= 1 everywhere; no critical step")
    r = bg.r_grid
    vals = TWO_PI * r[sup] * np.sqrt((1 - bg.M1_sq[sup]) / (bg.M_sq[sup] - 1))
    j = int(np.argmin(vals))
    best_r, best = float(r[sup[j]]), float(vals[j])
    lo = r[max(sup[j] - 1, 0)]
    hi = r[min(sup[j] + 1, len(r) - 1)]
    if bg.r_c is not None:
        hi = min(hi, bg.r_c)

    def obj(x):
        v = critical_step_profile(bg, x)
        return float(v) if np.isfinite(v) else np.inf

    res = optimize.minimize_scalar(obj, bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-10})
    if res.fun < best:
        best_r, best = float(res.x), float(res.fun)
    return best, best_r


@dataclass
class CoefficientTable:
    """Linearisation coefficients on the background grid for a given step.

    ``e1, e3, k1, k2`` follow the reduced definitions (those satisfy the
    closed-form identities). ``e1_euler, e3_euler, k1_euler, k2_euler`` add
    the centrifugal contribution V1 V2^2 / r of the continuity equation and
    are the ones the solver uses.
    """

    sigma: float
    r: np.ndarray
    A11: np.ndarray
    A13: np.ndarray
    A33: np.ndarray
    e1: np.ndarray
    e3: np.ndarray
    f: np.ndarray
    f_prime: np.ndarray
    f_second: np.ndarray
    k1: np.ndarray
    k2: np.ndarray
    k22: np.ndarray
    e1_euler: np.ndarray
    e3_euler: np.ndarray
    k1_euler: np.ndarray
    k2_euler: np.ndarray
    sigma_star: float | None = None
    sigma_star_argmin: float | None = None
    forms: dict = field(default_factory=dict, repr=False)

    @property
    def k12(self) -> np.ndarray:
        return (self.A13 + self.A11 * self.f_prime) / self.A11

    @cached_property
    def _f_spline(self):
        return CubicSpline(self.r, self.f)

    def f_at(self, r):
        return self._f_spline(r)


def coefficient_table(bg: BackgroundFlow, sigma: float) -> CoefficientTable:
    if sigma < 0:
        raise ValidationError("sigma must be nonnegative")
    g = bg.gamma
    r = bg.r_grid
    U1, U2, c2 = bg.U1_bar, bg.U2_bar, bg.c2_bar
    U1p = bg.U1_prime
    m1, m2 = bg.M1_sq, bg.M2_sq
    msq = m1 + m2
    k2c = bg.kappa2
    s2 = sigma ** 2 / (4 * math.pi ** 2 * r ** 2)

    A11 = c2 - U1 ** 2
    A13 = -sigma / (TWO_PI * r) * U1 * U2
    A33 = (1 + s2) * c2 - s2 * U2 ** 2
    e1 = c2 / r - (g + 1) * U1 * U1p - (g - 1) / r * U1 ** 2
    e3 = -(g - 1) * sigma * k2c / (TWO_PI * r ** 2) * (U1 / r + U1p)

    # f' = sigma M1 M2 / (2 pi r (1 - M1^2)); f'' by differentiating with the ODE.
    num = U1 * U2
    den = r * A11
    fp = sigma / TWO_PI * num / den
    num_p = U1p * U2 - U1 * U2 / r
    den_p = A11 + r * (bg.c2_prime - 2 * U1 * U1p)
    fpp = sigma / TWO_PI * (num_p * den - num * den_p) / den ** 2
    f = cumulative_simpson(fp, x=r, initial=0.0)

    k1 = e1 / A11
    k2 = fpp + (e1 * fp + e3) / A11
    k22 = (A33 + 2 * A13 * fp) / A11 + fp ** 2

    e1_euler = e1 + U2 ** 2 / r
    e3_euler = e3 + sigma * U1 * U2 / (math.pi * r ** 2)
    k1_euler = e1_euler / A11
    k2_euler = fpp + (e1_euler * fp + e3_euler) / A11

    forms = {
        "A13_alt": -sigma * k2c / (TWO_PI * r ** 2) * U1,
        "A33_alt": (1 + s2) * c2 - sigma ** 2 * k2c ** 2 / (4 * math.pi ** 2 * r ** 4),
        "e1_alt": c2 / r + (g + 1) * (1 + m2) / (r * (1 - m1)) * U1 ** 2 - (g - 1) / r * U1 ** 2,
        "e3_alt": (g - 1) * sigma / (TWO_PI * r ** 2) * msq / (1 - m1) * U1 * U2,
        "k1_alt": (1 + 2 * m1 + (g + 1) * m1 * msq / (1 - m1)) / (r * (1 - m1)),
        "k2_alt": -sigma / (TWO_PI * r ** 2) * (U1 * U2 / c2) * (2 - 2 * m1 + m2) / (1 - m1) ** 2,
        "k22_alt": 1 / (1 - m1) + s2 * (1 - msq) / (1 - m1) ** 2,
        "f_prime_alt": -A13 / A11,
    }
    table = CoefficientTable(sigma=sigma, r=r, A11=A11, A13=A13, A33=A33, e1=e1, e3=e3,
                             f=f, f_prime=fp, f_second=fpp, k1=k1, k2=k2, k22=k22,
                             e1_euler=e1_euler, e3_euler=e3_euler, k1_euler=k1_euler,
                             k2_euler=k2_euler, forms=forms)
    try:
        table.sigma_star, table.sigma_star_argmin = critical_step(bg)
    except NoSupersonicRegion:
        pass
    return table


BACKGROUND_COLUMNS = ["r", "rho", "U1", "U2", "c2", "M1sq", "M2sq", "A11", "A13", "A33",
                      "e1", "e3", "f", "k1", "k2", "k22"]


def write_background_csv(path, bg: BackgroundFlow, table: CoefficientTable) -> None:
    cols = [bg.r_grid, bg.rho_bar, bg.U1_bar, bg.U2_bar, bg.c2_bar, bg.M1_sq, bg.M2_sq,
            table.A11, table.A13, table.A33, table.e1, table.e3, table.f, table.k1,
            table.k2, table.k22]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(BACKGROUND_COLUMNS)
        for row in zip(*cols):
            w.writerow([f"{v:.17g}" for v in row])
