"""Point estimators of the population mean of y under SRSWOR.

The estimators take precomputed sample and population means so the
enumeration and simulation engines can pass vectors of sample means
directly; every function here broadcasts over numpy arrays.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from .params import EstimateSet, ParameterError, Population


def sample_mean(sample_y: Sequence[float] | np.ndarray) -> float:
    values = np.asarray(sample_y, dtype=float)
    if values.size == 0:
        raise ParameterError("sample mean of an empty sample is undefined")
    return float(values.mean())


def _check_positive(xbar, Xbar) -> None:
    if np.any(np.asarray(xbar) <= 0):
        raise ParameterError(
            "ratio estimator undefined for non-positive sample mean of x"
        )
    if np.any(np.asarray(Xbar) <= 0):
        raise ParameterError("population mean of x must be positive")


def ratio_estimate(ybar, xbar, Xbar):
    """Classical ratio estimator ``ybar * (Xbar / xbar)``."""
    _check_positive(xbar, Xbar)
    return ybar * (Xbar / xbar)


def transform(ybar, A):
    """Shift the study variable: z = y - A."""
    return ybar - A


def alternative_estimate(ybar, xbar, Xbar, A):
    """Ratio estimator applied to ``z = y - A`` and shifted back by ``A``.

    Equivalent to ``ratio_estimate(ybar, xbar, Xbar) - A * (Xbar / xbar - 1)``.
    With ``A = 0`` the result is bit-for-bit the ratio estimate.
    """
    _check_positive(xbar, Xbar)
    return transform(ybar, A) * (Xbar / xbar) + A


def alternative_estimate_shift_form(ybar, xbar, Xbar, A):
    """Second algebraic form of the alternative estimator, used as a cross-check."""
    return ratio_estimate(ybar, xbar, Xbar) - A * (Xbar / xbar - 1.0)


def estimate_from_sample(pop: Population, index: Sequence[int], A: float = 0.0) -> EstimateSet:
    """Compute all three estimates from the units of ``pop`` listed in ``index``."""
    idx = np.asarray(index, dtype=np.intp)
    if idx.size == 0:
        raise ParameterError("empty sample")
    if np.unique(idx).size != idx.size:
        raise ParameterError("sample labels must be distinct (SRSWOR)")
    ybar = sample_mean(pop.y[idx])
    xbar = sample_mean(pop.x[idx])
    Xbar = float(pop.x.mean())
    return EstimateSet(
        mean_est=ybar,
        ratio_est=float(ratio_estimate(ybar, xbar, Xbar)),
        alt_est=float(alternative_estimate(ybar, xbar, Xbar, A)),
        a_value=float(A),
    )
