"""Acceptance gate. One test per criterion; each records a PASS/FAIL line
that is printed in the pytest terminal summary."""

import dataclasses
import math
import time

import numpy as np
import pytest

from ratioest import closed_form as cf
from ratioest import tables
from ratioest.design import Estimator, exact_design_expectation, sampled_design_expectation
from ratioest.params import DesignParams, SuperPopulationParams
from ratioest.simulate import McConfig, draw_population

MC_SEED = 424242
MC_SP = SuperPopulationParams(alpha=1.0, beta=1.0, delta=2.0, g=1.0, theta=8.0)
MC_DP = DesignParams(60, 10)
MC_A = 0.5
MC_CFG = McConfig(n_populations=20_000, designs_per_population=50, seed=MC_SEED)

ENUM_POP_SEED = 8
ENUM_DRAW_SEED = 80


@pytest.fixture(scope="module")
def mc_run():
    start = time.perf_counter()
    rows = tables.mc_crosscheck(MC_SP, MC_DP, MC_A, MC_CFG, threads=1)
    return {r.quantity: r for r in rows}, time.perf_counter() - start


def test_criterion_1_spot_cell(criterion):
    start = time.perf_counter()
    inp = cf.ClosedFormInputs(SuperPopulationParams(0.5, 0.5, 2.0, 0.0, 8.0), DesignParams(60, 10), 0.3)
    e1, e2 = cf.rel_efficiencies(inp)
    r1, r2 = float(tables.round_half_away(e1)), float(tables.round_half_away(e2))
    elapsed = time.perf_counter() - start
    ok = abs(r1 - 192.86) <= 0.01 and abs(r2 - 101.34) <= 0.01 and elapsed < 1.0
    criterion(1, ok, f"E1={r1:.2f} (192.86), E2={r2:.2f} (101.34), {elapsed * 1e3:.1f} ms")
    assert ok


def test_criterion_2_full_tables(criterion):
    start = time.perf_counter()
    cells = tables.generate_table(tables.paper_grid())
    reference = [c for t in (1, 2, 3) for c in tables.reference_cells(t)]
    report = tables.verify_against_reference(cells, reference, 0.02, tables.known_typos())
    elapsed = time.perf_counter() - start
    share = len(report.excluded_known_typos) / report.total_cells
    rows_hit = len({key[:5] for key in report.excluded_known_typos})
    ok = report.ok and share < 0.05 and elapsed < 10.0
    criterion(
        2,
        ok,
        f"{report.summary()}; excluded share {share:.1%} of printed values "
        f"({rows_hit} of {len(reference)} rows); {elapsed:.2f} s",
    )
    assert report.matched + len(report.mismatched) + len(report.excluded_known_typos) == report.total_cells
    assert ok, report.mismatched


@pytest.mark.slow
def test_criterion_3_monte_carlo_vs_closed_form(criterion, mc_run):
    rows, elapsed = mc_run
    parts, ok = [], True
    for q in ("bias_alt", "mse_alt", "mse_ratio", "var_mean"):
        r = rows[q]
        good = abs(r.z) <= 3 and abs(r.rel_diff) <= 0.02
        ok &= good
        parts.append(f"{q} z={r.z:+.2f} rel={r.rel_diff:+.2%}")
    criterion(3, ok, "; ".join(parts) + f"; {elapsed:.1f} s")
    assert ok


@pytest.mark.slow
def test_criterion_4_errata_arbitration(criterion, mc_run):
    rows, _ = mc_run
    derived, printed = rows["bias_ratio"], rows["bias_ratio_printed"]
    inp = cf.ClosedFormInputs(MC_SP, MC_DP, MC_A)
    at_opt = cf.em_mse_alt(inp.with_A(MC_SP.alpha))
    minimum = cf.em_mse_alt_min(inp)
    gap = cf.em_mse_ratio(inp) - minimum
    gap_formula = (
        (MC_DP.N - MC_DP.n) * (MC_DP.N * MC_DP.n * MC_SP.theta + 2 * MC_DP.N - 2 * MC_DP.n) * MC_SP.alpha**2
        / (MC_DP.N**2 * (MC_DP.n * MC_SP.theta - 1) * (MC_DP.n * MC_SP.theta - 2))
    )
    ok = (
        abs(derived.z) <= 3
        and abs(printed.z) > 10
        and at_opt == minimum
        and math.isclose(gap, gap_formula, rel_tol=1e-12)
    )
    criterion(
        4,
        ok,
        f"derived bias z={derived.z:+.2f}, printed bias z={printed.z:+.1f}; "
        f"mse_alt(A=alpha) == (N-n) minimum: {at_opt == minimum}; "
        f"gap rel err {abs(gap - gap_formula) / gap_formula:.1e}; "
        f"printed (N-1) minimum z={rows['mse_alt_min_printed'].z:+.1f}",
    )
    assert ok


def test_criterion_5_enumeration_oracle(criterion):
    start = time.perf_counter()
    pop = draw_population(MC_SP, 8, seed=ENUM_POP_SEED)
    dp = DesignParams(8, 3)
    parts, ok = [], True
    for est in (Estimator.mean(), Estimator.ratio(), Estimator.alternative(MC_A)):
        exact = exact_design_expectation(pop, dp, est)
        samp = sampled_design_expectation(pop, dp, est, n_draws=200_000, seed=ENUM_DRAW_SEED)
        zb = (samp.bias - exact.bias) / samp.bias_se
        zm = (samp.mse - exact.mse) / samp.mse_se
        good = exact.n_samples_enumerated == 56 and abs(zb) <= 3 and abs(zm) <= 3
        ok &= good
        parts.append(f"{est}: z_bias={zb:+.2f} z_mse={zm:+.2f}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 30
    criterion(5, ok, "; ".join(parts) + f"; {elapsed:.1f} s")
    assert ok


def test_criterion_6_dominance_theorem(criterion):
    checked = failures = 0
    for alpha in (0.25, 0.5, 1.0, 1.5, 3.0):
        grid = np.linspace(-alpha, 3 * alpha, 50)
        for g in (0.0, 1.0, 2.0):
            for n in (10, 20):
                inp = cf.ClosedFormInputs(SuperPopulationParams(alpha, 1.0, 2.0, g, 8.0), DesignParams(60, n))
                b_r, m_r = abs(cf.em_bias_ratio(inp)), cf.em_mse_ratio(inp)
                for A in grid:
                    cur = inp.with_A(float(A))
                    b_a, m_a = abs(cf.em_bias_alt(cur)), cf.em_mse_alt(cur)
                    if 0 < A < 2 * alpha:
                        good = b_a < b_r and m_a < m_r
                    else:
                        good = not (b_a < b_r) and not (m_a < m_r) and m_a > m_r
                    checked += 1
                    failures += not good
                for A in (0.0, 2 * alpha):
                    m_a = cf.em_mse_alt(inp.with_A(A))
                    checked += 1
                    failures += not math.isclose(m_a, m_r, rel_tol=1e-12)
    ok = failures == 0
    criterion(6, ok, f"{checked} grid checks, {failures} failures")
    assert ok


def test_criterion_7_structural(criterion):
    grid = dataclasses.replace(tables.paper_grid(), mse_gamma_decimals=None)
    cells = tables.generate_table(grid)
    problems = []

    sym_worst = 0.0
    for alpha, As in grid.A_values_per_alpha.items():
        for g in grid.gs:
            for n in grid.ns:
                inp = cf.ClosedFormInputs(SuperPopulationParams(alpha, 1.0, 2.0, g, 8.0), DesignParams(60, n))
                for A in As + (0.0, alpha / 3, 5 * alpha):
                    a = cf.em_mse_alt(inp.with_A(A))
                    b = cf.em_mse_alt(inp.with_A(2 * alpha - A))
                    sym_worst = max(sym_worst, abs(a - b) / a)
    if sym_worst > 1e-12:
        problems.append(f"symmetry {sym_worst:.1e}")

    by_beta = {}
    for c in cells:
        by_beta.setdefault((c.alpha, c.g, c.n, c.A), []).append(c.e2)
    beta_worst = max((max(v) - min(v)) / min(v) for v in by_beta.values())
    if beta_worst > 1e-12:
        problems.append(f"E2 beta spread {beta_worst:.1e}")

    scan_fail = 0
    for alpha in (0.5, 1.0, 1.5):
        for g in grid.gs:
            inp = cf.ClosedFormInputs(SuperPopulationParams(alpha, 1.0, 2.0, g, 8.0), DesignParams(60, 10))
            As = np.linspace(-alpha, 3 * alpha, 1000)
            values = np.array([cf.em_mse_alt(inp.with_A(float(A))) for A in As])
            best = As[np.argmin(values)]
            at_alpha = cf.em_mse_alt(inp.with_A(alpha))
            step = As[1] - As[0]
            if not (abs(best - alpha) <= step / 2 + 1e-15 and np.all(values >= at_alpha)):
                scan_fail += 1
    if scan_fail:
        problems.append(f"{scan_fail} grid scans missed A=alpha")

    by_g = {}
    for c in cells:
        by_g.setdefault((c.alpha, c.beta, c.n, c.A), []).append((c.g, c.e1, c.e2))
    mono_fail = 0
    for seq in by_g.values():
        seq.sort()
        mono_fail += sum(not (b[1] < a[1] and b[2] < a[2]) for a, b in zip(seq, seq[1:]))
    if mono_fail:
        problems.append(f"{mono_fail} g-steps not strictly decreasing")

    ok = not problems
    criterion(
        7,
        ok,
        f"symmetry max rel {sym_worst:.1e}, E2 beta spread {beta_worst:.1e}, "
        f"scan misses {scan_fail}, g-monotonicity violations {mono_fail}",
    )
    assert ok, problems


@pytest.mark.slow
def test_criterion_8_thread_determinism(criterion, mc_run):
    base, _ = mc_run
    results = {}
    for threads in (1, 4, 8):
        rows = tables.mc_crosscheck(MC_SP, MC_DP, MC_A, MC_CFG, threads=threads)
        results[threads] = [(r.quantity, r.mc.hex(), r.std_error.hex()) for r in rows]
    reference = [(q, r.mc.hex(), r.std_error.hex()) for q, r in base.items()]
    ok = all(v == reference for v in results.values())
    criterion(8, ok, "threads 1/4/8 give bitwise-identical estimates" if ok else "estimates differ across thread counts")
    assert ok
