"""Pointwise residuals of the helical Euler system and of its reformulation.

Everything here is algebra on arrays: callers pass field values together with
their r- and eta-derivatives (``dr``/``de`` dicts keyed by field name), so the
same formulas serve grid derivatives and exact analytic ones.

Reformulated residuals, with slope = a V_c + b V3 and L = V1 d_r + slope d_eta:

* ``B``, ``A``, ``Vc``: L B, L A, L V_c (transport);
* ``vort``: V1 (d_r V3 - d_eta V1) + d_eta B - V2/r d_eta V_c - rho^(g-1)/(g-1) d_eta A;
* ``cont``: continuity times c^2/rho with the three transport laws substituted;
* ``cont_reduced``: the same reduction without the centrifugal term V1 V2^2/r
  and in the reduced arrangement (kept for diagnostics).
"""

from __future__ import annotations

import math

import numpy as np

from .fields import AnnulusGrid, d_eta, d_r

EULER_NAMES = ("continuity", "r_momentum", "theta_momentum", "z_momentum", "entropy")
REFORM_NAMES = ("B", "A", "Vc", "vort", "cont")


def _ab(r, sigma):
    return sigma / (2 * math.pi * r ** 2), 1 + sigma ** 2 / (4 * math.pi ** 2 * r ** 2)


def euler_system(f, dr, de, r, sigma):
    """The five equations in (V1, V2, V3, rho, p, A) form; returns a dict."""
    V1, V2, V3, rho = f["V1"], f["V2"], f["V3"], f["rho"]
    s = sigma / (2 * math.pi * r)
    conv = lambda x: V1 * dr[x] + (s * V2 + V3) * de[x]
    return {
        "continuity": (dr["rho"] * V1 + rho * dr["V1"] + s * (de["rho"] * V2 + rho * de["V2"])
                       + rho * V1 / r + de["rho"] * V3 + rho * de["V3"]),
        "r_momentum": conv("V1") + dr["p"] / rho - V2 ** 2 / r,
        "theta_momentum": conv("V2") + s * de["p"] / rho + V1 * V2 / r,
        "z_momentum": conv("V3") + de["p"] / rho,
        "entropy": conv("A"),
    }


def reformulated_system(f, dr, de, r, sigma, gamma):
    """Residuals of the transport / vorticity / reduced continuity equations.

    ``f`` holds V1, V3, Vc, B, A; c^2 and rho are closed from them.
    """
    a, b = _ab(r, sigma)
    V1, V3, Vc, B, A = f["V1"], f["V3"], f["Vc"], f["B"], f["A"]
    br = B - 0.5 * (V1 ** 2 + Vc ** 2 / r ** 2 + 2 * a * Vc * V3 + b * V3 ** 2)
    c2 = (gamma - 1) * br
    rho_gm1 = (gamma - 1) / (A * gamma) * br
    slope = a * Vc + b * V3
    V2 = (Vc + sigma / (2 * math.pi) * V3) / r
    L = lambda x: V1 * dr[x] + slope * de[x]
    lhs = ((c2 - V1 ** 2) * dr["V1"] - a * V1 * Vc * de["V1"] - a * V1 * Vc * dr["V3"]
           + (b * c2 - a ** 2 * Vc ** 2) * de["V3"] + c2 / r * V1)
    rhs_reduced = (b * V1 * V3 * (de["V1"] + dr["V3"])
                   + b * (2 * a * Vc + b * V3) * V3 * de["V3"]
                   - a * (c2 - a * V3 * Vc - Vc ** 2 / r ** 2) * de["Vc"]
                   - a * Vc * de["B"] + a * c2 / ((gamma - 1) * A) * Vc * de["A"])
    cont = (lhs - b * V1 * V3 * (de["V1"] + dr["V3"]) - b * (2 * a * Vc + b * V3) * V3 * de["V3"]
            + a * c2 * de["Vc"] + V1 * V2 ** 2 / r)
    return {
        "B": L("B"),
        "A": L("A"),
        "Vc": L("Vc"),
        "vort": (V1 * (dr["V3"] - de["V1"]) + de["B"] - V2 / r * de["Vc"]
                 - rho_gm1 / (gamma - 1) * de["A"]),
        "cont": cont,
        "cont_reduced": lhs - rhs_reduced,
    }


def euler_combination(R, f, r, sigma, gamma):
    """Predict the five Euler residuals from the reformulated ones.

    Returns ``{name: (lhs_scale, combination)}``: each Euler residual times
    ``lhs_scale`` must equal ``combination`` identically.
    """
    a, b = _ab(r, sigma)
    V1, V3, Vc, B, A = f["V1"], f["V3"], f["Vc"], f["B"], f["A"]
    br = B - 0.5 * (V1 ** 2 + Vc ** 2 / r ** 2 + 2 * a * Vc * V3 + b * V3 ** 2)
    c2 = (gamma - 1) * br
    rho = ((gamma - 1) / (A * gamma) * br) ** (1 / (gamma - 1))
    h = c2 / (gamma * A)  # rho^(gamma-1)
    slope = a * Vc + b * V3
    V2 = (Vc + sigma / (2 * math.pi) * V3) / r
    return {
        "continuity": (c2 / rho, R["cont"] + R["B"] - (Vc / r ** 2 + a * V3) * R["Vc"]
                       - c2 / ((gamma - 1) * A) * R["A"]),
        "r_momentum": (V1, R["B"] - V2 / r * R["Vc"] - h / (gamma - 1) * R["A"] - slope * R["vort"]),
        "theta_momentum": (np.ones_like(V1), R["Vc"] / r + sigma / (2 * math.pi * r) * R["vort"]),
        "z_momentum": (np.ones_like(V1), R["vort"]),
        "entropy": (np.ones_like(V1), R["A"]),
    }


def grid_derivatives(f, grid: AnnulusGrid, background=None):
    """``(dr, de)`` dicts of FD r-derivatives and spectral eta-derivatives.

    ``background`` maps a field name to ``(profile, profile_prime)``; that
    radial part is differentiated exactly and only the remainder by FD.
    """
    background = background or {}
    dr, de = {}, {}
    for name, u in f.items():
        if name in background:
            prof, prime = background[name]
            dr[name] = prime[:, None] + d_r(u - prof[:, None], grid)
        else:
            dr[name] = d_r(u, grid)
        de[name] = d_eta(u, grid)
    return dr, de


def background_split(bg):
    """Radial profiles and exact derivatives of the background, by field."""
    r = bg.r_grid
    zero = np.zeros_like(r)
    return {
        "V1": (bg.U1_bar, bg.U1_prime),
        "V2": (bg.U2_bar, -bg.U2_bar / r),
        "V3": (zero, zero),
        "rho": (bg.rho_bar, bg.rho_prime),
        "p": (bg.p_bar, bg.c2_bar * bg.rho_prime),
        "A": (zero + bg.A0, zero),
        "B": (zero + bg.B0, zero),
        "Vc": (zero + bg.kappa2, zero),
    }


INTERIOR = slice(2, -2)


def max_norm(u) -> float:
    """Max norm over interior rows 2..N-3 (away from one-sided stencils)."""
    return float(np.max(np.abs(u[INTERIOR])))
