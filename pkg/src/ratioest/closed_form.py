"""Model expectations of design bias and MSE under the gamma superpopulation model.

All expressions assume SRSWOR of n out of N units, x_i i.i.d. Gamma(theta),
and y_i = alpha + beta x_i + u_i with E(u_i^2 | x_i) = delta x_i**g.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import gammaln

from .params import DesignParams, ParameterError, SuperPopulationParams, validate_params


@dataclass(frozen=True)
class ClosedFormInputs:
    sp: SuperPopulationParams
    dp: DesignParams
    A: float = 0.0

    def __post_init__(self) -> None:
        validate_params(self.sp, self.dp, closed_form=True)
        if not math.isfinite(self.A):
            raise ParameterError("A must be finite")

    def with_A(self, A: float) -> "ClosedFormInputs":
        return ClosedFormInputs(self.sp, self.dp, float(A))


def gamma_ratio(theta: float, g: float) -> float:
    """Gamma(theta + g) / Gamma(theta) via a log-gamma difference."""
    if theta <= 2:
        raise ParameterError(f"theta must exceed 2 (got {theta})")
    if not 0 <= g <= 2:
        raise ParameterError(f"g must lie in [0, 2] (got {g})")
    return math.exp(gammaln(theta + g) - gammaln(theta))


def intercept_coefficient(inp: ClosedFormInputs) -> float:
    """(N-n)(N n theta + 2N - 2n) / (N^2 (n theta - 1)(n theta - 2)).

    The model-expected squared error of X/x - 1 scaled by N; it multiplies
    alpha^2 in the ratio MSE and (A^2 - 2 A alpha) in the alternative MSE.
    """
    N, n, theta = inp.dp.N, inp.dp.n, inp.sp.theta
    k = n * theta
    return (N - n) * (N * k + 2 * N - 2 * n) / (N**2 * (k - 1) * (k - 2))


def error_term(inp: ClosedFormInputs, gamma_ratio_value: float | None = None) -> float:
    """Contribution of the heteroscedastic errors to the ratio-type MSE.

    ``gamma_ratio_value`` overrides Gamma(theta+g)/Gamma(theta); the table
    harness uses it to mimic the rounded constant behind the published tables.
    """
    N, n = inp.dp.N, inp.dp.n
    theta, g, delta = inp.sp.theta, inp.sp.g, inp.sp.delta
    k = n * theta
    gr = gamma_ratio(theta, g) if gamma_ratio_value is None else gamma_ratio_value
    d1 = (k + g - 1) * (k + g - 2)
    return (N - n) / N**2 * delta * (d1 + k * (N * theta - k + 1)) / d1 * gr


def em_bias_alt(inp: ClosedFormInputs) -> float:
    N, n = inp.dp.N, inp.dp.n
    return (N - n) * (inp.sp.alpha - inp.A) / (N * (n * inp.sp.theta - 1))


def em_bias_ratio(inp: ClosedFormInputs) -> float:
    """Expected bias of the ratio estimator: the alternative's bias at A = 0."""
    return em_bias_alt(inp.with_A(0.0))


def em_bias_ratio_printed(inp: ClosedFormInputs) -> float:
    """The bias expression as typeset in the source, missing the 1/N factor.

    Kept only so Monte Carlo runs can show it is wrong.
    """
    n = inp.dp.n
    return (inp.dp.N - n) * inp.sp.alpha / (n * inp.sp.theta - 1)


def em_mse_ratio(inp: ClosedFormInputs, *, mse_gamma_ratio: float | None = None) -> float:
    alpha = inp.sp.alpha
    return intercept_coefficient(inp) * alpha**2 + error_term(inp, mse_gamma_ratio)


def em_mse_alt(inp: ClosedFormInputs, *, mse_gamma_ratio: float | None = None) -> float:
    """Expected MSE of the alternative estimator.

    Equal to ``em_mse_ratio + c * (A^2 - 2 A alpha)``; evaluated as
    ``c * (alpha - A)^2 + error`` so the minimum at A = alpha is exact.
    """
    shift = inp.sp.alpha - inp.A
    return intercept_coefficient(inp) * shift**2 + error_term(inp, mse_gamma_ratio)


def em_mse_alt_additive(inp: ClosedFormInputs) -> float:
    """Same quantity as :func:`em_mse_alt`, written as ratio MSE plus a correction."""
    A, alpha = inp.A, inp.sp.alpha
    return em_mse_ratio(inp) + intercept_coefficient(inp) * (A * A - 2 * A * alpha)


def em_mse_alt_min(inp: ClosedFormInputs, *, mse_gamma_ratio: float | None = None) -> float:
    """Minimum over A of the alternative MSE, reached at A = alpha."""
    return error_term(inp, mse_gamma_ratio)


def em_mse_alt_min_printed(inp: ClosedFormInputs) -> float:
    """The minimum as typeset, with leading factor (N - 1) in place of (N - n)."""
    N, n = inp.dp.N, inp.dp.n
    return error_term(inp) * (N - 1) / (N - n)


def optimal_A(inp: ClosedFormInputs) -> float:
    return inp.sp.alpha


def em_var_mean(inp: ClosedFormInputs) -> float:
    N, n = inp.dp.N, inp.dp.n
    sp = inp.sp
    return (N - n) * (sp.beta**2 * sp.theta + sp.delta * gamma_ratio(sp.theta, sp.g)) / (n * N)


def rel_efficiencies(
    inp: ClosedFormInputs, *, mse_gamma_ratio: float | None = None
) -> tuple[float, float]:
    """Percent efficiencies (E1, E2) of the alternative estimator.

    E1 compares against the sample mean, E2 against the ratio estimator;
    both use the alternative's expected MSE as denominator.
    """
    denom = em_mse_alt(inp, mse_gamma_ratio=mse_gamma_ratio)
    if denom <= 0:
        raise ZeroDivisionError("expected MSE of the alternative estimator is zero")
    e1 = 100.0 * em_var_mean(inp) / denom
    e2 = 100.0 * em_mse_ratio(inp, mse_gamma_ratio=mse_gamma_ratio) / denom
    return e1, e2


@dataclass(frozen=True)
class OpenInterval:
    lower: float
    upper: float

    @property
    def empty(self) -> bool:
        return not self.lower < self.upper

    def __contains__(self, value: float) -> bool:
        return self.lower < value < self.upper


def dominance_interval(alpha: float) -> OpenInterval:
    """Values of A for which the alternative beats the ratio estimator in bias and MSE.

    The interval is (0, 2 alpha) for positive alpha and empty otherwise.
    """
    if alpha > 0:
        return OpenInterval(0.0, 2.0 * alpha)
    return OpenInterval(0.0, 0.0)
