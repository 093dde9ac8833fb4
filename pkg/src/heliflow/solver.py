"""Fixed-point iteration W -> X(W) for the perturbed transonic flow."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .assembly import (FlowField, PerturbationState, assemble_G1, assemble_G2, assemble_G3,
                       reconstruct_flow)
from .background import (BackgroundFlow, CoefficientTable, GasInflow, coefficient_table,
                         critical_step, solve_background)
from .boundary import HelicalBC
from .elliptic import solve_poisson, solve_potential
from .errors import HeliflowError, NoConvergence, StepTooLarge, ValidationError
from .fields import AnnulusGrid, c_norms, d_eta, d_r
from .transport import solve_transport


@dataclass
class SolverConfig:
    inflow: GasInflow
    bc: HelicalBC
    N_r: int = 257
    N_eta: int = 64
    tol: float = 1e-11
    max_iters: int = 100
    eps_max: float = 1e-2
    variant: str = "euler"

    def grid(self) -> AnnulusGrid:
        return AnnulusGrid(self.inflow.r0, self.inflow.r1, self.N_r, self.bc.sigma, self.N_eta)

    def validate(self) -> None:
        self.inflow.validate()
        self.bc.validate(self.N_eta)
        if not 0 <= self.bc.eps <= self.eps_max:
            raise ValidationError(f"eps = {self.bc.eps} outside [0, {self.eps_max}]")
        if not self.tol > 0 or self.max_iters < 1:
            raise ValidationError("tol must be positive and max_iters >= 1")


@dataclass
class Context:
    """Everything the map needs besides the iterate."""

    bg: BackgroundFlow
    table: CoefficientTable
    bc: HelicalBC
    grid: AnnulusGrid
    variant: str = "euler"

    @property
    def sigma(self) -> float:
        return self.bc.sigma


@dataclass
class SolveReport:
    iterations: int = 0
    converged: bool = False
    deltas: list = field(default_factory=list)       # C1 proxy of successive differences
    deltas_c0: list = field(default_factory=list)
    ratios: list = field(default_factory=list)
    residuals: dict = field(default_factory=dict)
    transport_defects: dict = field(default_factory=dict)
    sigma: float = 0.0
    sigma_star: float = 0.0
    r_c: float | None = None
    eps: float = 0.0
    c_star_empirical: float | None = None
    norm_c1: float = 0.0
    in_ball: bool | None = None
    wall_time: float = 0.0
    grid: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "iterations": self.iterations,
            "converged": self.converged,
            "deltas": list(self.deltas),
            "deltas_c0": list(self.deltas_c0),
            "ratios": list(self.ratios),
            "residuals": dict(self.residuals),
            "transport_defects": dict(self.transport_defects),
            "sigma": self.sigma,
            "sigma_star": self.sigma_star,
            "r_c": self.r_c,
            "eps": self.eps,
            "c_star_empirical": self.c_star_empirical,
            "norm_c1": self.norm_c1,
            "in_ball": self.in_ball,
            "grid": dict(self.grid),
        }


def build_context(cfg: SolverConfig) -> tuple[Context, float]:
    """Background on the solver grid, sigma* check and coefficient table."""
    cfg.validate()
    grid = cfg.grid()
    bg = solve_background(cfg.inflow, N_r=grid.N_r)
    sigma_star, _ = critical_step(bg)
    if cfg.bc.sigma >= sigma_star:
        raise StepTooLarge(f"helical.sigma = {cfg.bc.sigma:.6g} is not below "
                           f"sigma* = {sigma_star:.6g}")
    table = coefficient_table(bg, cfg.bc.sigma)
    return Context(bg, table, cfg.bc, grid, cfg.variant), sigma_star


class _stage:
    def __init__(self, name):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and isinstance(exc, HeliflowError) and exc.stage is None:
            exc.stage = self.name
        return False


def apply_map_once(Wbar: PerturbationState, ctx: Context) -> PerturbationState:
    """One application of the map: transport, Poisson, potential, reconstruction."""
    bg, grid, s = ctx.bg, ctx.grid, ctx.sigma
    with _stage("transport"):
        W2, W4, W5 = solve_transport(Wbar, ctx.bc, bg)
    with _stage("G2"):
        G2 = assemble_G2(Wbar.W1, Wbar.W3, W2, W4, W5, bg, grid, s)
    with _stage("poisson"):
        phi1 = solve_poisson(G2, grid)
    with _stage("G1"):
        G1 = assemble_G1(Wbar.W1, Wbar.W3, W2, W4, W5, bg, grid, s,
                         centrifugal=ctx.variant == "euler")
    with _stage("G3"):
        G3 = assemble_G3(G1, phi1, ctx.table, bg, grid, ctx.variant)
    with _stage("potential"):
        pot = solve_potential(G3, ctx.table, ctx.bc, grid, ctx.variant)
    W1 = pot.phi_r - d_eta(phi1, grid)
    W3 = pot.phi_eta + d_r(phi1, grid)
    return PerturbationState(grid, W1, W2, W3, W4, W5)


def fixed_point_solve(cfg: SolverConfig, residuals: bool = True
                      ) -> tuple[PerturbationState, FlowField, SolveReport]:
    """Iterate from W = 0 until the C1-proxy step falls below ``cfg.tol``."""
    t0 = time.perf_counter()
    ctx, sigma_star = build_context(cfg)
    grid = ctx.grid
    report = SolveReport(sigma=cfg.bc.sigma, sigma_star=sigma_star, r_c=ctx.bg.r_c,
                         eps=cfg.bc.eps,
                         grid={"N_r": grid.N_r, "N_eta": grid.N_eta, "h_r": grid.h_r})
    W = PerturbationState.zeros(grid)
    for k in range(1, cfg.max_iters + 1):
        Wn = apply_map_once(W, ctx)
        if not Wn.is_finite():
            raise NoConvergence(f"non-finite iterate at iteration {k}")
        c0, c1 = c_norms((Wn - W).arrays(), grid)
        report.deltas.append(c1)
        report.deltas_c0.append(c0)
        if len(report.deltas) > 1 and report.deltas[-2] > 0:
            report.ratios.append(c1 / report.deltas[-2])
        if k == 1 and cfg.bc.eps > 0:
            report.c_star_empirical = c_norms(Wn.arrays(), grid)[1] / cfg.bc.eps
        W = Wn
        report.iterations = k
        if c1 < cfg.tol:
            report.converged = True
            break
    if not report.converged and report.ratios and report.ratios[-1] >= 1:
        raise NoConvergence(f"no contraction after {cfg.max_iters} iterations "
                            f"(last ratio {report.ratios[-1]:.3g})")
    flow = reconstruct_flow(W, ctx.bg, cfg.bc.sigma)
    report.norm_c1 = c_norms(W.arrays(), grid)[1]
    if report.c_star_empirical is not None:
        report.in_ball = report.norm_c1 <= 2 * report.c_star_empirical * cfg.bc.eps
    if residuals:
        from .verify import euler_residual
        res = euler_residual(flow, ctx.bg)
        report.residuals = res.euler
        report.transport_defects = res.transport
    report.wall_time = time.perf_counter() - t0
    return W, flow, report
