import numpy as np
import pytest

from ratioest.params import (
    DesignParams,
    ParameterError,
    Population,
    SuperPopulationParams,
    validate_params,
)

TABLE_SP = SuperPopulationParams(alpha=0.5, beta=0.5, delta=2.0, g=0.0, theta=8.0)


def test_paper_table_parameters_are_valid():
    sp, dp = validate_params(TABLE_SP, DesignParams(60, 10))
    assert sp is TABLE_SP and dp == DesignParams(60, 10)


def test_validation_is_idempotent():
    pair = validate_params(TABLE_SP, DesignParams(60, 20))
    assert validate_params(*pair) == pair


@pytest.mark.parametrize(
    "sp, dp, message",
    [
        (SuperPopulationParams(1, 1, 2, 0, 2.0), DesignParams(60, 10), "theta must exceed 2"),
        (SuperPopulationParams(1, 1, 2, 0, 2.5), DesignParams(5, 5), "n < N required"),
        (SuperPopulationParams(1, 1, 2, 2.5, 8), DesignParams(60, 10), "g must lie in"),
        (SuperPopulationParams(1, 1, -1, 0, 8), DesignParams(60, 10), "delta"),
        (SuperPopulationParams(1, 1, float("inf"), 0, 8), DesignParams(60, 10), "delta"),
        (SuperPopulationParams(1, 1, 2, 0, 8), DesignParams(1, 1), "N must be at least 2"),
        (SuperPopulationParams(1, 1, 2, 0, 8), DesignParams(10, 0), "n must be at least 1"),
    ],
)
def test_violations_name_the_constraint(sp, dp, message):
    with pytest.raises(ParameterError, match=message):
        validate_params(sp, dp)


def test_n_theta_guard_is_implied_by_theta_bound():
    # with theta > 2 and n >= 1 the product already exceeds 2, so n=1 is accepted
    sp = SuperPopulationParams(1, 1, 2, 0, 2.05)
    assert validate_params(sp, DesignParams(5, 1)) == (sp, DesignParams(5, 1))


def test_lambda():
    assert DesignParams(4, 2).lam == 0.25
    assert DesignParams(60, 10).lam == pytest.approx(50 / 600)


def test_population_invariants():
    pop = Population([1.0, 2.0], [3.0, 4.0])
    assert pop.N == 2
    with pytest.raises(ValueError):
        pop.x[0] = 5.0
    with pytest.raises(ParameterError, match="positive"):
        Population([1.0, 0.0], [1.0, 1.0])
    with pytest.raises(ParameterError, match="equal length"):
        Population([1.0, 2.0], [1.0])
    with pytest.raises(ParameterError, match="at least 2"):
        Population([1.0], [1.0])
    assert Population(np.array([1, 2]), [3, 4]) == pop
