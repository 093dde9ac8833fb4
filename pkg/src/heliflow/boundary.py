"""Boundary data: finite Fourier series on T_sigma and the helical BC bundle."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError, ZeroMeanViolation


@dataclass(frozen=True)
class FourierSeries:
    """``mean + sum_n cos[n-1] cos(w_n eta) + sin[n-1] sin(w_n eta)``, w_n = 2 pi n / sigma."""

    cos: tuple = ()
    sin: tuple = ()
    mean: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "cos", tuple(float(c) for c in self.cos))
        object.__setattr__(self, "sin", tuple(float(s) for s in self.sin))
        vals = (self.mean,) + self.cos + self.sin
        if not all(math.isfinite(v) for v in vals):
            raise ValidationError("Fourier coefficients must be finite")

    @property
    def n_max(self) -> int:
        return max(len(self.cos), len(self.sin))

    def _ab(self):
        n = self.n_max
        a = np.zeros(n)
        b = np.zeros(n)
        a[: len(self.cos)] = self.cos
        b[: len(self.sin)] = self.sin
        return a, b, 2 * np.pi * np.arange(1, n + 1)

    def __call__(self, eta, sigma: float) -> np.ndarray:
        eta = np.asarray(eta, dtype=float)
        a, b, k = self._ab()
        arg = np.multiply.outer(eta, k / sigma)
        return self.mean + np.cos(arg) @ a + np.sin(arg) @ b

    def derivative(self, eta, sigma: float) -> np.ndarray:
        eta = np.asarray(eta, dtype=float)
        a, b, k = self._ab()
        w = k / sigma
        arg = np.multiply.outer(eta, w)
        return np.cos(arg) @ (b * w) - np.sin(arg) @ (a * w)

    def antiderivative(self, eta, sigma: float) -> np.ndarray:
        """``int_0^eta`` of the series; periodic only when the mean vanishes."""
        eta = np.asarray(eta, dtype=float)
        a, b, k = self._ab()
        w = k / sigma
        arg = np.multiply.outer(eta, w)
        return self.mean * eta + np.sin(arg) @ (a / w) + (1 - np.cos(arg)) @ (b / w)

    def scaled(self, factor: float) -> "FourierSeries":
        return FourierSeries(tuple(factor * c for c in self.cos),
                             tuple(factor * s for s in self.sin), factor * self.mean)

    def to_dict(self, with_mean: bool = True) -> dict:
        d = {"cos": list(self.cos), "sin": list(self.sin)}
        if with_mean and self.mean != 0.0:
            d["mean"] = self.mean
        return d


ZERO = FourierSeries()


@dataclass(frozen=True)
class HelicalBC:
    """Boundary data: V_c, V3, A, B on r = r1 and V1 on r = r0, each ``eps * series``."""

    sigma: float
    eps: float
    q_c: FourierSeries = field(default_factory=FourierSeries)
    q1: FourierSeries = field(default_factory=FourierSeries)
    q3: FourierSeries = field(default_factory=FourierSeries)
    A_tilde: FourierSeries = field(default_factory=FourierSeries)
    B_tilde: FourierSeries = field(default_factory=FourierSeries)

    def validate(self, n_eta: int | None = None) -> None:
        if not self.sigma > 0:
            raise ValidationError("sigma must be positive")
        if not math.isfinite(self.eps) or self.eps < 0:
            raise ValidationError("eps must be finite and nonnegative")
        if abs(self.q3.mean) > 1e-12:
            raise ZeroMeanViolation("q3 must have zero mean over one period")
        if n_eta is not None:
            top = max(s.n_max for s in self.series().values())
            if top >= n_eta // 2:
                raise ValidationError(f"boundary modes up to {top} are not resolved by N_eta={n_eta}")

    def series(self) -> dict[str, FourierSeries]:
        return {"q_c": self.q_c, "q1": self.q1, "q3": self.q3,
                "A_tilde": self.A_tilde, "B_tilde": self.B_tilde}

    def with_eps(self, eps: float) -> "HelicalBC":
        return HelicalBC(self.sigma, eps, self.q_c, self.q1, self.q3, self.A_tilde, self.B_tilde)

    def with_sigma(self, sigma: float) -> "HelicalBC":
        return HelicalBC(sigma, self.eps, self.q_c, self.q1, self.q3, self.A_tilde, self.B_tilde)


def single_mode_bc(sigma: float, eps: float) -> HelicalBC:
    """Smooth first-harmonic data used by the reference runs."""
    return HelicalBC(
        sigma=sigma, eps=eps,
        q_c=FourierSeries(cos=(1.0,)),
        q1=FourierSeries(sin=(1.0,)),
        q3=FourierSeries(cos=(1.0,)),
        A_tilde=FourierSeries(cos=(0.5,)),
        B_tilde=FourierSeries(sin=(1.0,)),
    )
