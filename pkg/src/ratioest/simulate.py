"""Monte Carlo over the gamma superpopulation model.

Each replicate draws a finite population from the model, takes the design
expectation of every estimator's error on it (exactly or from sampled SRSWOR
draws), and the replicates are averaged to estimate model expectations.
Replicate ``r`` always uses the random stream ``SeedSequence(seed,
spawn_key=(r,))`` and replicates are processed in fixed-size blocks, so the
output does not depend on how many threads run the blocks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .design import EnumerationCapExceeded, ENUMERATION_CAP, iter_subset_chunks, draw_srswor
from .estimators import alternative_estimate, ratio_estimate
from .params import DesignParams, ParameterError, Population, SuperPopulationParams, validate_params

ERROR_LAWS = ("normal", "shifted_exponential")
QUANTITIES = ("bias_ratio", "mse_ratio", "bias_alt", "mse_alt", "var_mean", "bias_mean")
# the alternative estimator at A = alpha, recorded on every run for the optimum checks
OPTIMUM_QUANTITIES = ("bias_alt_opt", "mse_alt_opt")
# per-block budget of sample-label entries, keeps peak memory around tens of MB
_BLOCK_ENTRIES = 1 << 20
_MAX_BLOCK = 256


@dataclass(frozen=True)
class McConfig:
    n_populations: int
    designs_per_population: int = 50
    seed: int = 0
    error_law: str = "normal"

    def __post_init__(self) -> None:
        if self.n_populations < 1:
            raise ParameterError("n_populations must be at least 1")
        if self.designs_per_population < 0:
            raise ParameterError("designs_per_population must be non-negative")
        if self.error_law not in ERROR_LAWS:
            raise ParameterError(f"error_law must be one of {ERROR_LAWS}")


@dataclass(frozen=True)
class McEstimate:
    value: float
    std_error: float
    n_replicates: int


def _draw_errors(rng: np.random.Generator, scale: np.ndarray, law: str) -> np.ndarray:
    if law == "normal":
        z = rng.standard_normal(scale.shape)
    else:
        z = rng.standard_exponential(scale.shape) - 1.0
    return scale * z


def _draw_xy(sp: SuperPopulationParams, N: int, rng: np.random.Generator, law: str):
    x = rng.standard_gamma(sp.theta, N)
    u = _draw_errors(rng, np.sqrt(sp.delta * x**sp.g), law)
    return x, sp.alpha + sp.beta * x + u


def draw_population(
    sp: SuperPopulationParams,
    N: int,
    seed: int,
    error_law: str = "normal",
) -> Population:
    """Draw N units from the model: x ~ Gamma(theta, 1), y = alpha + beta x + u."""
    sp.check()
    if N < 2:
        raise ParameterError("N must be at least 2")
    if error_law not in ERROR_LAWS:
        raise ParameterError(f"error_law must be one of {ERROR_LAWS}")
    x, y = _draw_xy(sp, N, np.random.default_rng(seed), error_law)
    return Population(x, y)


def replicate_rng(seed: int, replicate: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(replicate,)))


def _all_subsets(N: int, n: int) -> np.ndarray:
    total = math.comb(N, n)
    if total > ENUMERATION_CAP:
        raise EnumerationCapExceeded(
            f"C({N}, {n}) = {total} subsets exceeds the enumeration cap; "
            "set designs_per_population > 0"
        )
    return np.concatenate(list(iter_subset_chunks(N, n)))


def _block_moments(sp, dp, A, cfg, reps, subsets):
    xs, ys, idxs = [], [], []
    for r in reps:
        rng = replicate_rng(cfg.seed, r)
        x, y = _draw_xy(sp, dp.N, rng, cfg.error_law)
        xs.append(x)
        ys.append(y)
        if subsets is None:
            idxs.append(draw_srswor(rng, dp.N, dp.n, cfg.designs_per_population))
    x = np.stack(xs)
    y = np.stack(ys)
    idx = np.broadcast_to(subsets, (len(reps),) + subsets.shape) if subsets is not None else np.stack(idxs)

    rows = np.arange(len(reps))[:, None, None]
    xbar = x[rows, idx].mean(axis=-1)
    ybar = y[rows, idx].mean(axis=-1)
    Xbar = x.mean(axis=1)[:, None]
    Ybar = y.mean(axis=1)[:, None]

    err_mean = ybar - Ybar
    err_ratio = ratio_estimate(ybar, xbar, Xbar) - Ybar
    err_alt = alternative_estimate(ybar, xbar, Xbar, A) - Ybar
    err_opt = alternative_estimate(ybar, xbar, Xbar, sp.alpha) - Ybar
    return {
        "bias_mean": err_mean.mean(axis=1),
        "var_mean": (err_mean**2).mean(axis=1),
        "bias_ratio": err_ratio.mean(axis=1),
        "mse_ratio": (err_ratio**2).mean(axis=1),
        "bias_alt": err_alt.mean(axis=1),
        "mse_alt": (err_alt**2).mean(axis=1),
        "bias_alt_opt": err_opt.mean(axis=1),
        "mse_alt_opt": (err_opt**2).mean(axis=1),
    }


def simulate_design_moments(
    sp: SuperPopulationParams,
    dp: DesignParams,
    A: float,
    cfg: McConfig,
    threads: int = 1,
) -> dict[str, np.ndarray]:
    """Per-replicate design expectations for ``QUANTITIES`` and ``OPTIMUM_QUANTITIES``.

    Returns arrays of length ``cfg.n_populations`` indexed by replicate.
    """
    validate_params(sp, dp, closed_form=False)
    subsets = _all_subsets(dp.N, dp.n) if cfg.designs_per_population == 0 else None
    per_rep = (subsets.shape[0] if subsets is not None else cfg.designs_per_population) * dp.n
    block = max(1, min(_MAX_BLOCK, _BLOCK_ENTRIES // per_rep))
    blocks = [range(s, min(s + block, cfg.n_populations)) for s in range(0, cfg.n_populations, block)]

    def run(reps):
        return _block_moments(sp, dp, float(A), cfg, reps, subsets)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, blocks))
    else:
        parts = [run(b) for b in blocks]
    return {q: np.concatenate([p[q] for p in parts]) for q in QUANTITIES + OPTIMUM_QUANTITIES}


def summarize(values: np.ndarray) -> McEstimate:
    n = values.size
    mean = math.fsum(values) / n
    se = float(np.std(values, ddof=1)) / math.sqrt(n) if n > 1 else math.inf
    return McEstimate(value=mean, std_error=se, n_replicates=n)


def mc_model_expectation(
    sp: SuperPopulationParams,
    dp: DesignParams,
    quantity: str,
    cfg: McConfig,
    A: float = 0.0,
    threads: int = 1,
) -> McEstimate:
    """Monte Carlo estimate of the model expectation of a design bias or MSE.

    ``quantity`` is one of ``QUANTITIES``; ``A`` only matters for the
    ``*_alt`` quantities.
    """
    if quantity not in QUANTITIES:
        raise ParameterError(f"quantity must be one of {QUANTITIES}")
    return summarize(simulate_design_moments(sp, dp, A, cfg, threads)[quantity])
