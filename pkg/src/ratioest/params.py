"""Parameter and data types shared across the package."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class ParameterError(ValueError):
    """Raised when model, design or population inputs violate their constraints."""


@dataclass(frozen=True)
class SuperPopulationParams:
    """Constants of the linear gamma superpopulation model.

    y_i = alpha + beta * x_i + u_i, with E(u_i | x_i) = 0,
    E(u_i^2 | x_i) = delta * x_i**g and x_i ~ Gamma(theta, scale=1).
    """

    alpha: float
    beta: float
    delta: float
    g: float
    theta: float

    def check(self) -> None:
        if not math.isfinite(self.theta) or self.theta <= 2:
            raise ParameterError(f"theta must exceed 2 (got {self.theta})")
        if not 0 <= self.g <= 2:
            raise ParameterError(f"g must lie in [0, 2] (got {self.g})")
        if not math.isfinite(self.delta) or self.delta < 0:
            raise ParameterError(f"delta must be finite and non-negative (got {self.delta})")
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise ParameterError("alpha and beta must be finite")


@dataclass(frozen=True)
class DesignParams:
    """Population size ``N`` and sample size ``n`` for SRSWOR."""

    N: int
    n: int

    def check(self) -> None:
        if self.N < 2:
            raise ParameterError(f"N must be at least 2 (got {self.N})")
        if not 1 <= self.n:
            raise ParameterError(f"n must be at least 1 (got {self.n})")
        if self.n >= self.N:
            raise ParameterError(f"n < N required (got n={self.n}, N={self.N})")

    @property
    def lam(self) -> float:
        """Finite population correction (N - n) / (n N)."""
        return (self.N - self.n) / (self.n * self.N)


def validate_params(
    sp: SuperPopulationParams,
    dp: DesignParams,
    closed_form: bool = True,
) -> tuple[SuperPopulationParams, DesignParams]:
    """Check model and design constraints and return the pair unchanged.

    The ``n * theta > 2`` requirement only applies to the closed-form
    expressions; pass ``closed_form=False`` for the estimator and
    simulation paths.
    """
    sp.check()
    dp.check()
    if closed_form and dp.n * sp.theta <= 2:
        raise ParameterError(
            f"n*theta must exceed 2 for closed forms (got {dp.n * sp.theta})"
        )
    return sp, dp


@dataclass(frozen=True, eq=False)
class Population:
    """A realized finite population of (x_i, y_i) pairs."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.ndim != 1 or x.shape != y.shape:
            raise ParameterError("x and y must be 1-d arrays of equal length")
        if x.size < 2:
            raise ParameterError("a population needs at least 2 units")
        if not np.all(x > 0):
            raise ParameterError("all x values must be positive")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def N(self) -> int:
        return int(self.x.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Population):
            return NotImplemented
        return np.array_equal(self.x, other.x) and np.array_equal(self.y, other.y)


@dataclass(frozen=True)
class FinitePopulationMoments:
    """Population means, (N-1)-divisor second moments, and the design factor lambda."""

    ybar: float
    xbar: float
    sy2: float
    sx2: float
    syx: float
    r_ratio: float
    beta_reg: float
    lam: float

    def ratio_is_optimal(self, rtol: float = 1e-9) -> bool:
        """True when R equals the regression slope, which minimizes the ratio MSE."""
        return math.isclose(self.r_ratio, self.beta_reg, rel_tol=rtol, abs_tol=rtol)


@dataclass(frozen=True)
class EstimateSet:
    mean_est: float
    ratio_est: float
    alt_est: float
    a_value: float
