"""Command line interface: ``ratioest {generate,verify,mc-check,enumerate,repro}``."""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from pathlib import Path

from . import tables
from .design import (
    Estimator,
    approx_bias_ratio,
    approx_mse_ratio,
    exact_design_expectation,
    finite_population_moments,
)
from .params import DesignParams, ParameterError, Population, SuperPopulationParams
from .repro import emit_repro_script, TARGETS
from .simulate import ERROR_LAWS, McConfig

log = logging.getLogger("ratioest")

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2

DEFAULT_SEED = 424242
MC_DEFAULTS = dict(
    alpha=1.0, beta=1.0, delta=2.0, g=1.0, theta=8.0, N=60, n=10, A=0.5,
    n_populations=20000, designs_per_population=50, error_law="normal",
)


class UsageError(Exception):
    pass


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", type=Path, help="JSON config file; flags override its values")
    p.add_argument("--seed", type=int, help=f"master seed for Monte Carlo (default {DEFAULT_SEED})")
    p.add_argument("--out", type=Path, help="write output here instead of stdout")
    p.add_argument("--format", choices=("csv", "markdown"), default="csv")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _grid_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--table", choices=("1", "2", "3", "all"), help="published grid to use (default all)")
    p.add_argument(
        "--exact",
        action="store_true",
        help="use the exact gamma ratio everywhere instead of the rounded one behind the printed tables",
    )


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="ratioest",
        description="Transformed ratio estimator: closed forms, tables and Monte Carlo checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", parents=[common], help="compute relative-efficiency tables")
    _grid_args(gen)
    gen.add_argument("--full-precision", action="store_true", help="do not round E1/E2 in CSV output")

    ver = sub.add_parser("verify", parents=[common], help="compare computed tables with references")
    _grid_args(ver)
    ver.add_argument("--reference", type=Path, help="reference CSV (default: the built-in transcription)")
    ver.add_argument("--exclusions", type=Path, help="known-typo CSV (default: built-in list)")
    ver.add_argument("--no-exclusions", action="store_true")
    ver.add_argument("--tolerance", type=float, default=0.02)

    mc = sub.add_parser("mc-check", parents=[common], help="closed forms against Monte Carlo")
    for name in ("alpha", "beta", "delta", "g", "theta", "A"):
        mc.add_argument(f"--{name}", type=float)
    mc.add_argument("--N", type=int)
    mc.add_argument("--n", type=int)
    mc.add_argument("--populations", type=int, dest="n_populations")
    mc.add_argument("--designs", type=int, dest="designs_per_population",
                    help="SRSWOR draws per population; 0 enumerates every sample")
    mc.add_argument("--error-law", choices=ERROR_LAWS, dest="error_law")

    en = sub.add_parser("enumerate", parents=[common], help="exact design expectations for a population file")
    en.add_argument("population", type=Path, help="CSV with header x,y")
    en.add_argument("--n", type=int, required=True, help="sample size")
    en.add_argument("--A", type=float, default=0.0, help="transformation scalar for the alternative estimator")

    rp = sub.add_parser("repro", parents=[common], help="print the commands that reproduce a result")
    rp.add_argument("target", help=f"one of {', '.join(TARGETS)}")
    return parser


def _emit(args, text: str) -> None:
    if args.out:
        args.out.write_text(text)
        log.info("wrote %s", args.out)
    else:
        sys.stdout.write(text)


def _resolve_grid(args, config: dict) -> tuple[tables.GridSpec, list[int]]:
    """Grid to compute and the built-in reference tables that go with it."""
    if args.table:
        which = None if args.table == "all" else int(args.table)
        grid, refs = tables.paper_grid(which), [1, 2, 3] if which is None else [which]
    elif "grid" in config:
        grid = tables.GridSpec.from_dict(config["grid"])
        refs = [int(t) for t in config.get("tables", [])]
    else:
        table = config.get("table")
        grid = tables.paper_grid(table)
        refs = [1, 2, 3] if table is None else [int(table)]
    if args.exact:
        grid = tables.GridSpec(**{**grid.__dict__, "mse_gamma_decimals": None})
    return grid, refs


def cmd_generate(args, config) -> int:
    grid, _ = _resolve_grid(args, config)
    cells = tables.generate_table(grid, threads=args.threads)
    if args.format == "markdown":
        _emit(args, tables.format_markdown(cells))
    else:
        buf = io.StringIO()
        tables.write_cells_csv(cells, buf, full_precision=args.full_precision)
        _emit(args, buf.getvalue())
    return EXIT_OK


def cmd_verify(args, config) -> int:
    grid, refs = _resolve_grid(args, config)
    cells = tables.generate_table(grid, threads=args.threads)
    ref_path = args.reference or config.get("reference")
    if ref_path:
        reference = tables.read_cells_csv(ref_path)
    elif refs:
        reference = [c for t in refs for c in tables.reference_cells(t)]
    else:
        raise UsageError("no reference given: pass --reference or use a published grid")
    exc_path = args.exclusions or config.get("exclusions")
    if args.no_exclusions:
        exclusions = []
    elif exc_path:
        exclusions = tables.read_exclusions(exc_path)
    else:
        exclusions = tables.known_typos()
    report = tables.verify_against_reference(cells, reference, args.tolerance, exclusions)
    lines = [report.summary()]
    for key, expected, got in report.mismatched:
        alpha, g, beta, n, A, col = key
        lines.append(
            f"MISMATCH alpha={alpha:g} g={g:g} beta={beta:g} n={n} A={A:g} {col}: "
            f"printed {expected:.2f}, computed {tables.round_half_away(got)}"
        )
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK if report.ok else EXIT_MISMATCH


def _mc_settings(args, config) -> dict:
    settings = dict(MC_DEFAULTS)
    settings["seed"] = DEFAULT_SEED
    settings.update(config.get("mc", {}))
    for key in list(MC_DEFAULTS) + ["seed"]:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    return settings


def cmd_mc_check(args, config) -> int:
    s = _mc_settings(args, config)
    sp = SuperPopulationParams(s["alpha"], s["beta"], s["delta"], s["g"], s["theta"])
    dp = DesignParams(int(s["N"]), int(s["n"]))
    cfg = McConfig(int(s["n_populations"]), int(s["designs_per_population"]), int(s["seed"]), s["error_law"])
    log.info("Monte Carlo: %s %s A=%s %s", sp, dp, s["A"], cfg)
    rows = tables.mc_crosscheck(sp, dp, float(s["A"]), cfg, threads=args.threads)
    header = ["quantity", "closed_form", "monte_carlo", "std_error", "z", "rel_diff"]
    body = [
        [r.quantity, f"{r.closed_form:.6g}", f"{r.mc:.6g}", f"{r.std_error:.3g}", f"{r.z:.2f}", f"{r.rel_diff:.4f}"]
        for r in rows
    ]
    if args.format == "markdown":
        text = "| " + " | ".join(header) + " |\n|" + "---|" * len(header) + "\n"
        text += "".join("| " + " | ".join(b) + " |\n" for b in body)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(body)
        text = buf.getvalue()
    _emit(args, text)
    failed = [r for r in rows if not r.quantity.endswith("_printed") and abs(r.z) > 3]
    return EXIT_MISMATCH if failed else EXIT_OK


def read_population_csv(path: Path) -> Population:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["x", "y"]:
            raise UsageError(f"{path}: expected header x,y")
        xs, ys = [], []
        for row in reader:
            try:
                xs.append(float(row["x"]))
                ys.append(float(row["y"]))
            except (TypeError, ValueError):
                raise UsageError(f"{path}: line {reader.line_num}: bad number") from None
    return Population(xs, ys)


def cmd_enumerate(args, config) -> int:
    pop = read_population_csv(args.population)
    dp = DesignParams(pop.N, args.n)
    m = finite_population_moments(pop, dp)
    rows = [["estimator", "bias", "mse", "samples"]]
    for est in (Estimator.mean(), Estimator.ratio(), Estimator.alternative(args.A)):
        de = exact_design_expectation(pop, dp, est)
        rows.append([str(est), repr(de.bias), repr(de.mse), str(de.n_samples_enumerated)])
    rows.append(["ratio (second-order approx.)", repr(approx_bias_ratio(m)), repr(approx_mse_ratio(m)), ""])
    if args.format == "markdown":
        text = "| " + " | ".join(rows[0]) + " |\n|" + "---|" * 4 + "\n"
        text += "".join("| " + " | ".join(r) + " |\n" for r in rows[1:])
    else:
        text = "".join(",".join(r) + "\n" for r in rows)
    _emit(args, text)
    return EXIT_OK


def cmd_repro(args, config) -> int:
    _emit(args, emit_repro_script(args.target))
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "verify": cmd_verify,
    "mc-check": cmd_mc_check,
    "enumerate": cmd_enumerate,
    "repro": cmd_repro,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        config = tables.load_config(args.config) if args.config else {}
        if args.threads < 1:
            raise UsageError("--threads must be at least 1")
        return COMMANDS[args.command](args, config)
    except (UsageError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
