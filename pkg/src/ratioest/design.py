"""Design expectations under simple random sampling without replacement.

Exact expectations come from enumerating every n-subset of the population;
for populations where C(N, n) is out of reach, ``sampled_design_expectation``
gives an unbiased Monte Carlo estimate of the same quantities.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .estimators import alternative_estimate, ratio_estimate
from .params import DesignParams, FinitePopulationMoments, ParameterError, Population

ENUMERATION_CAP = 10**7
_CHUNK = 1 << 16


class EnumerationCapExceeded(ParameterError):
    pass


@dataclass(frozen=True)
class Estimator:
    """Which estimator to evaluate: ``mean``, ``ratio`` or ``alternative`` with scalar ``A``."""

    kind: str
    A: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("mean", "ratio", "alternative"):
            raise ParameterError(f"unknown estimator kind {self.kind!r}")

    @classmethod
    def mean(cls) -> "Estimator":
        return cls("mean")

    @classmethod
    def ratio(cls) -> "Estimator":
        return cls("ratio")

    @classmethod
    def alternative(cls, A: float) -> "Estimator":
        return cls("alternative", float(A))

    def evaluate(self, ybar, xbar, Xbar):
        if self.kind == "mean":
            return ybar
        if self.kind == "ratio":
            return ratio_estimate(ybar, xbar, Xbar)
        return alternative_estimate(ybar, xbar, Xbar, self.A)

    def __str__(self) -> str:
        return f"alternative(A={self.A:g})" if self.kind == "alternative" else self.kind


@dataclass(frozen=True)
class DesignExpectation:
    """Design bias and MSE of an estimator about the population mean.

    ``bias_se`` and ``mse_se`` are zero for exhaustive enumeration and are
    Monte Carlo standard errors otherwise.
    """

    bias: float
    mse: float
    n_samples_enumerated: int
    exhaustive: bool = True
    bias_se: float = 0.0
    mse_se: float = 0.0

    @property
    def variance(self) -> float:
        return self.mse - self.bias**2


def finite_population_moments(pop: Population, dp: DesignParams) -> FinitePopulationMoments:
    """Population moments with (N-1) divisors.

    When every x is equal S_x^2 is zero and ``beta_reg`` is returned as NaN;
    the remaining fields are still filled in.
    """
    if dp.N != pop.N:
        raise ParameterError(f"design N={dp.N} does not match population size {pop.N}")
    dp.check()
    x, y = pop.x, pop.y
    N = pop.N
    xbar = math.fsum(x) / N
    ybar = math.fsum(y) / N
    dx = x - xbar
    dy = y - ybar
    sx2 = math.fsum(dx * dx) / (N - 1)
    sy2 = math.fsum(dy * dy) / (N - 1)
    syx = math.fsum(dx * dy) / (N - 1)
    beta_reg = syx / sx2 if sx2 > 0 else math.nan
    return FinitePopulationMoments(
        ybar=ybar,
        xbar=xbar,
        sy2=sy2,
        sx2=sx2,
        syx=syx,
        r_ratio=ybar / xbar,
        beta_reg=beta_reg,
        lam=dp.lam,
    )


def approx_bias_ratio(m: FinitePopulationMoments) -> float:
    """Second-order approximation lambda * (R S_x^2 - S_yx) / Xbar."""
    if m.xbar <= 0:
        raise ParameterError("population mean of x must be positive")
    return m.lam * (m.r_ratio * m.sx2 - m.syx) / m.xbar


def approx_mse_ratio(m: FinitePopulationMoments) -> float:
    """Second-order approximation lambda * (S_y^2 + R^2 S_x^2 - 2 R S_yx)."""
    if m.xbar <= 0:
        raise ParameterError("population mean of x must be positive")
    R = m.r_ratio
    return m.lam * (m.sy2 + R * R * m.sx2 - 2.0 * R * m.syx)


def iter_subset_chunks(N: int, n: int):
    combos = itertools.combinations(range(N), n)
    while True:
        flat = np.fromiter(
            itertools.chain.from_iterable(itertools.islice(combos, _CHUNK)),
            dtype=np.intp,
        )
        if flat.size == 0:
            return
        yield flat.reshape(-1, n)


def exact_design_expectation(
    pop: Population,
    dp: DesignParams,
    estimator: Estimator,
    cap: int = ENUMERATION_CAP,
) -> DesignExpectation:
    """Average the estimator's error over all C(N, n) equally likely samples."""
    if dp.N != pop.N:
        raise ParameterError(f"design N={dp.N} does not match population size {pop.N}")
    dp.check()
    total = math.comb(dp.N, dp.n)
    if total > cap:
        raise EnumerationCapExceeded(
            f"C({dp.N}, {dp.n}) = {total} subsets exceeds the enumeration cap {cap}; "
            "use sampled_design_expectation instead"
        )
    Xbar = math.fsum(pop.x) / dp.N
    Ybar = math.fsum(pop.y) / dp.N
    err_parts: list[float] = []
    sq_parts: list[float] = []
    seen = 0
    for idx in iter_subset_chunks(dp.N, dp.n):
        xbar = pop.x[idx].mean(axis=1)
        ybar = pop.y[idx].mean(axis=1)
        err = estimator.evaluate(ybar, xbar, Xbar) - Ybar
        err_parts.append(float(np.sum(err)))
        sq_parts.append(float(np.sum(err * err)))
        seen += idx.shape[0]
    assert seen == total
    return DesignExpectation(
        bias=math.fsum(err_parts) / total,
        mse=math.fsum(sq_parts) / total,
        n_samples_enumerated=total,
    )


def draw_srswor(rng: np.random.Generator, N: int, n: int, size: int) -> np.ndarray:
    """``size`` independent SRSWOR samples of n labels out of N, one per row."""
    return np.argsort(rng.random((size, N)), axis=1)[:, :n]


def sampled_design_expectation(
    pop: Population,
    dp: DesignParams,
    estimator: Estimator,
    n_draws: int,
    seed: int,
) -> DesignExpectation:
    """Monte Carlo estimate of the design bias and MSE from ``n_draws`` SRSWOR samples."""
    if n_draws < 1:
        raise ParameterError("n_draws must be at least 1")
    if dp.N != pop.N:
        raise ParameterError(f"design N={dp.N} does not match population size {pop.N}")
    dp.check()
    rng = np.random.default_rng(seed)
    Xbar = math.fsum(pop.x) / dp.N
    Ybar = math.fsum(pop.y) / dp.N
    errors = np.empty(n_draws)
    for start in range(0, n_draws, _CHUNK):
        size = min(_CHUNK, n_draws - start)
        idx = draw_srswor(rng, dp.N, dp.n, size)
        xbar = pop.x[idx].mean(axis=1)
        ybar = pop.y[idx].mean(axis=1)
        errors[start : start + size] = estimator.evaluate(ybar, xbar, Xbar) - Ybar
    sq = errors * errors
    if n_draws > 1:
        bias_se = float(errors.std(ddof=1)) / math.sqrt(n_draws)
        mse_se = float(sq.std(ddof=1)) / math.sqrt(n_draws)
    else:
        bias_se = mse_se = math.inf
    return DesignExpectation(
        bias=math.fsum(errors) / n_draws,
        mse=math.fsum(sq) / n_draws,
        n_samples_enumerated=n_draws,
        exhaustive=False,
        bias_se=bias_se,
        mse_se=mse_se,
    )
