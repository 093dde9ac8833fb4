"""JSON run configuration.

Schema (all sections are objects; unknown keys anywhere are rejected)::

    gas      {gamma, A0}
    inflow   {rho0, U10, U20}
    annulus  {r0, r1}
    helical  {sigma, eps}
    boundary {qc, q1, q3, Atilde, Btilde}   each {cos: [...], sin: [...]} (+ optional mean,
                                            except q3 which must have zero mean)
    grid     {N_r, N_eta}                   optional, defaults 257 x 64
    solver   {tol, max_iters}               optional, defaults 1e-11, 100
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .background import GasInflow
from .boundary import FourierSeries, HelicalBC
from .errors import ConfigError

BOUNDARY_KEYS = {"qc": "q_c", "q1": "q1", "q3": "q3", "Atilde": "A_tilde", "Btilde": "B_tilde"}

_SCHEMA = {
    "gas": ({"gamma", "A0"}, set()),
    "inflow": ({"rho0", "U10", "U20"}, set()),
    "annulus": ({"r0", "r1"}, set()),
    "helical": ({"sigma", "eps"}, set()),
    "boundary": (set(), set(BOUNDARY_KEYS)),
    "grid": (set(), {"N_r", "N_eta"}),
    "solver": (set(), {"tol", "max_iters"}),
}
_REQUIRED_SECTIONS = ("gas", "inflow", "annulus", "helical")


@dataclass
class RunConfig:
    gamma: float
    A0: float
    rho0: float
    U10: float
    U20: float
    r0: float
    r1: float
    sigma: float
    eps: float
    boundary: dict = field(default_factory=lambda: {k: FourierSeries() for k in BOUNDARY_KEYS})
    N_r: int = 257
    N_eta: int = 64
    tol: float = 1e-11
    max_iters: int = 100

    # --- conversions ---------------------------------------------------------
    def inflow(self) -> GasInflow:
        return GasInflow(self.gamma, self.A0, self.rho0, self.U10, self.U20, self.r0, self.r1)

    def bc(self) -> HelicalBC:
        b = self.boundary
        return HelicalBC(self.sigma, self.eps, q_c=b["qc"], q1=b["q1"], q3=b["q3"],
                         A_tilde=b["Atilde"], B_tilde=b["Btilde"])

    def solver_config(self):
        from .solver import SolverConfig
        return SolverConfig(self.inflow(), self.bc(), N_r=self.N_r, N_eta=self.N_eta,
                            tol=self.tol, max_iters=self.max_iters)

    # --- serialisation -------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "gas": {"gamma": self.gamma, "A0": self.A0},
            "inflow": {"rho0": self.rho0, "U10": self.U10, "U20": self.U20},
            "annulus": {"r0": self.r0, "r1": self.r1},
            "helical": {"sigma": self.sigma, "eps": self.eps},
            "boundary": {k: self.boundary[k].to_dict() for k in BOUNDARY_KEYS},
            "grid": {"N_r": self.N_r, "N_eta": self.N_eta},
            "solver": {"tol": self.tol, "max_iters": self.max_iters},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.dumps())

    @classmethod
    def from_dict(cls, doc) -> "RunConfig":
        if not isinstance(doc, dict):
            raise ConfigError("configuration must be a JSON object", "<root>")
        unknown = set(doc) - set(_SCHEMA)
        if unknown:
            raise ConfigError(f"unknown section(s) {sorted(unknown)}", sorted(unknown)[0])
        for name in _REQUIRED_SECTIONS:
            if name not in doc:
                raise ConfigError("missing section", name)
        sec = {name: _section(doc, name) for name in _SCHEMA}

        def num(section, key, default=None):
            path = f"{section}.{key}"
            v = sec[section].get(key, default)
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ConfigError(f"expected a finite number, got {v!r}", path)
            return float(v)

        def integer(section, key, default):
            path = f"{section}.{key}"
            v = sec[section].get(key, default)
            if isinstance(v, bool) or not isinstance(v, int):
                raise ConfigError(f"expected an integer, got {v!r}", path)
            return v

        boundary = {k: _series(sec["boundary"].get(k, {}), f"boundary.{k}", k != "q3")
                    for k in BOUNDARY_KEYS}
        cfg = cls(
            gamma=num("gas", "gamma"), A0=num("gas", "A0"),
            rho0=num("inflow", "rho0"), U10=num("inflow", "U10"), U20=num("inflow", "U20"),
            r0=num("annulus", "r0"), r1=num("annulus", "r1"),
            sigma=num("helical", "sigma"), eps=num("helical", "eps"),
            boundary=boundary,
            N_r=integer("grid", "N_r", 257), N_eta=integer("grid", "N_eta", 64),
            tol=num("solver", "tol", 1e-11), max_iters=integer("solver", "max_iters", 100),
        )
        cfg.validate()
        return cfg

    @classmethod
    def loads(cls, text: str) -> "RunConfig":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON ({exc})", "<file>") from exc
        return cls.from_dict(doc)

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path) as fh:
            return cls.loads(fh.read())

    def validate(self) -> None:
        checks = [
            (self.gamma > 1, "gas.gamma", "gamma must exceed 1"),
            (self.A0 > 0, "gas.A0", "A0 must be positive"),
            (self.rho0 > 0, "inflow.rho0", "rho0 must be positive"),
            (self.U10 <= 0, "inflow.U10", "U10 must be <= 0 (inflow at the outer wall)"),
            (0 < self.r0 < self.r1, "annulus.r0", "need 0 < r0 < r1"),
            (self.sigma > 0, "helical.sigma", "sigma must be positive"),
            (self.eps >= 0, "helical.eps", "eps must be nonnegative"),
            (self.N_r >= 16, "grid.N_r", "N_r must be >= 16"),
            (self.N_eta >= 8 and self.N_eta & (self.N_eta - 1) == 0, "grid.N_eta",
             "N_eta must be a power of two >= 8"),
            (self.tol > 0, "solver.tol", "tol must be positive"),
            (self.max_iters >= 1, "solver.max_iters", "max_iters must be >= 1"),
        ]
        for ok, path, msg in checks:
            if not ok:
                raise ConfigError(msg, path)
        top = max(s.n_max for s in self.boundary.values())
        if top >= self.N_eta // 2:
            raise ConfigError(f"boundary modes up to {top} need N_eta > {2 * top}", "grid.N_eta")


def _section(doc, name):
    allowed_req, allowed_opt = _SCHEMA[name]
    sec = doc.get(name, {})
    if not isinstance(sec, dict):
        raise ConfigError("expected an object", name)
    unknown = set(sec) - allowed_req - allowed_opt
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigError("unknown key", f"{name}.{key}")
    for key in sorted(allowed_req):
        if key not in sec:
            raise ConfigError("missing key", f"{name}.{key}")
    return sec


def _series(entry, path, allow_mean: bool) -> FourierSeries:
    if not isinstance(entry, dict):
        raise ConfigError("expected {cos: [...], sin: [...]}", path)
    allowed = {"cos", "sin"} | ({"mean"} if allow_mean else set())
    unknown = set(entry) - allowed
    if unknown:
        key = sorted(unknown)[0]
        hint = " (q3 must have zero mean)" if key == "mean" else ""
        raise ConfigError(f"unknown key{hint}", f"{path}.{key}")
    for key in ("cos", "sin"):
        arr = entry.get(key, [])
        if not isinstance(arr, list) or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)
                for v in arr):
            raise ConfigError("expected a list of finite numbers", f"{path}.{key}")
    mean = entry.get("mean", 0.0)
    if isinstance(mean, bool) or not isinstance(mean, (int, float)) or not math.isfinite(mean):
        raise ConfigError("expected a finite number", f"{path}.mean")
    return FourierSeries(tuple(entry.get("cos", [])), tuple(entry.get("sin", [])), float(mean))


# Reference transonic configuration. The inner radius sits inside the window
# (r_sharp, r_c) ~ (1.011, 1.080) of transonic annuli for this inflow.
REFERENCE = {"gamma": 2.0, "A0": 1.0, "rho0": 1.0, "U10": -0.3, "U20": 0.5, "r0": 1.07, "r1": 2.0}


def reference_config(eps: float = 1e-3, sigma_fraction: float = 0.5, N_r: int = 257,
                     N_eta: int = 64, sigma_grid: int | None = None) -> RunConfig:
    """Reference run with single-mode data and sigma = sigma_fraction * sigma*.

    sigma* is taken from the background on ``sigma_grid`` radial nodes
    (default: the run's own N_r, so the solver's entry check sees the same value).
    """
    from .background import critical_step, solve_background
    from .boundary import single_mode_bc
    inflow = GasInflow(**REFERENCE)
    sigma_star, _ = critical_step(solve_background(inflow, N_r=sigma_grid or N_r))
    sigma = sigma_fraction * sigma_star
    bc = single_mode_bc(sigma, eps)
    boundary = {"qc": bc.q_c, "q1": bc.q1, "q3": bc.q3, "Atilde": bc.A_tilde, "Btilde": bc.B_tilde}
    return RunConfig(sigma=sigma, eps=eps, boundary=boundary, N_r=N_r, N_eta=N_eta, **REFERENCE)
