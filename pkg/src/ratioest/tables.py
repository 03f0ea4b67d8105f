"""Regenerate the relative-efficiency tables and compare them with the published values.

The published tables were computed with Gamma(theta+g)/Gamma(theta) rounded
to three decimals inside the MSE expressions (it shows up at g = 0.5, where
the exact value 2.78460 and the rounded 2.785 differ in the second decimal
of E1). ``GridSpec.mse_gamma_decimals`` reproduces that; leave it as ``None``
for exact values.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from importlib import resources
from pathlib import Path

from . import closed_form as cf
from .params import DesignParams, ParameterError, SuperPopulationParams
from .simulate import McConfig, simulate_design_moments, summarize

CSV_HEADER = ("alpha", "g", "beta", "n", "A", "E1", "E2")
COLUMNS = ("E1", "E2")


@dataclass(frozen=True)
class GridSpec:
    N: int
    delta: float
    theta: float
    alphas: tuple[float, ...]
    betas: tuple[float, ...]
    gs: tuple[float, ...]
    ns: tuple[int, ...]
    A_values_per_alpha: dict[float, tuple[float, ...]] = field(hash=False)
    mse_gamma_decimals: int | None = None

    def check(self) -> None:
        for n in self.ns:
            if n * self.theta <= 2:
                raise ParameterError(f"n*theta must exceed 2 (n={n}, theta={self.theta})")
        for alpha in self.alphas:
            if not self.A_values_per_alpha.get(alpha):
                raise ParameterError(f"no A values given for alpha={alpha}")
        for alpha, g, beta, n in self._points():
            cf.validate_params(
                SuperPopulationParams(alpha, beta, self.delta, g, self.theta),
                DesignParams(self.N, n),
            )

    def _points(self):
        for alpha in self.alphas:
            for n in self.ns:
                for g in self.gs:
                    for beta in self.betas:
                        yield alpha, g, beta, n

    @classmethod
    def from_dict(cls, d: dict) -> "GridSpec":
        try:
            return cls(
                N=int(d["N"]),
                delta=float(d["delta"]),
                theta=float(d["theta"]),
                alphas=tuple(float(a) for a in d["alphas"]),
                betas=tuple(float(b) for b in d["betas"]),
                gs=tuple(float(g) for g in d["gs"]),
                ns=tuple(int(n) for n in d["ns"]),
                A_values_per_alpha={
                    float(k): tuple(float(a) for a in v)
                    for k, v in d["A_values_per_alpha"].items()
                },
                mse_gamma_decimals=d.get("mse_gamma_decimals"),
            )
        except KeyError as exc:
            raise ParameterError(f"grid is missing field {exc.args[0]!r}") from None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["A_values_per_alpha"] = {str(k): list(v) for k, v in self.A_values_per_alpha.items()}
        return d


_PAPER_COMMON = dict(
    N=60,
    delta=2.0,
    theta=8.0,
    betas=(0.5, 1.0, 1.5),
    gs=(0.0, 0.5, 1.0, 1.5, 2.0),
    ns=(10, 20),
    mse_gamma_decimals=3,
)
PAPER_A_VALUES = {
    0.5: (0.3, 0.6, 0.9),
    1.0: (0.5, 1.0, 1.5, 1.9),
    1.5: (0.6, 1.2, 1.8, 2.4, 2.9),
}
TABLE_ALPHAS = {1: 0.5, 2: 1.0, 3: 1.5}


def paper_grid(table: int | None = None) -> GridSpec:
    """The published grid for one table (1, 2, 3) or all three."""
    alphas = tuple(TABLE_ALPHAS.values()) if table is None else (TABLE_ALPHAS[table],)
    return GridSpec(
        alphas=alphas,
        A_values_per_alpha={a: PAPER_A_VALUES[a] for a in alphas},
        **_PAPER_COMMON,
    )


@dataclass(frozen=True)
class EfficiencyCell:
    alpha: float
    g: float
    beta: float
    n: int
    A: float
    e1: float
    e2: float

    @property
    def coords(self) -> tuple:
        return _coords(self.alpha, self.g, self.beta, self.n, self.A)


def _coords(alpha, g, beta, n, A) -> tuple:
    return (round(float(alpha), 9), round(float(g), 9), round(float(beta), 9), int(n), round(float(A), 9))


def _cell(grid: GridSpec, alpha, g, beta, n, A) -> EfficiencyCell:
    sp = SuperPopulationParams(alpha, beta, grid.delta, g, grid.theta)
    inp = cf.ClosedFormInputs(sp, DesignParams(grid.N, n), A)
    gr = None
    if grid.mse_gamma_decimals is not None:
        gr = round(cf.gamma_ratio(grid.theta, g), grid.mse_gamma_decimals)
    e1, e2 = cf.rel_efficiencies(inp, mse_gamma_ratio=gr)
    return EfficiencyCell(alpha, g, beta, n, A, e1, e2)


def generate_table(grid: GridSpec, threads: int = 1) -> list[EfficiencyCell]:
    """One cell per (alpha, n, g, beta, A), in that nesting order."""
    grid.check()
    points = [
        (alpha, g, beta, n, A)
        for alpha, g, beta, n in grid._points()
        for A in grid.A_values_per_alpha[alpha]
    ]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda p: _cell(grid, *p), points))
    return [_cell(grid, *p) for p in points]


def round_half_away(value: float, places: int = 2) -> Decimal:
    return Decimal(repr(value)).quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP)


def write_cells_csv(cells, out, full_precision: bool = False) -> None:
    """Write cells with header ``alpha,g,beta,n,A,E1,E2``; ``out`` is a path or text stream."""
    if isinstance(out, (str, Path)):
        with open(out, "w", newline="") as fh:
            write_cells_csv(cells, fh, full_precision)
        return
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_HEADER)
    fmt = repr if full_precision else (lambda v: str(round_half_away(v)))
    for c in cells:
        w.writerow([repr(c.alpha), repr(c.g), repr(c.beta), c.n, repr(c.A), fmt(c.e1), fmt(c.e2)])


def read_cells_csv(source) -> list[EfficiencyCell]:
    """Parse a cells CSV; errors name the offending line."""
    if isinstance(source, (str, Path)):
        with open(source, newline="") as fh:
            return read_cells_csv(fh)
    reader = csv.reader(source)
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
        raise ParameterError(f"line 1: expected header {','.join(CSV_HEADER)}, got {header}")
    cells = []
    for row in reader:
        if not row:
            continue
        if len(row) != len(CSV_HEADER):
            raise ParameterError(f"line {reader.line_num}: expected {len(CSV_HEADER)} fields, got {len(row)}")
        try:
            alpha, g, beta = float(row[0]), float(row[1]), float(row[2])
            n = int(row[3])
            A, e1, e2 = float(row[4]), float(row[5]), float(row[6])
        except ValueError as exc:
            raise ParameterError(f"line {reader.line_num}: {exc}") from None
        cells.append(EfficiencyCell(alpha, g, beta, n, A, e1, e2))
    return cells


def format_markdown(cells) -> str:
    """Panels by (alpha, n) with rows (g, beta) and E1 | E2 columns per A, like the printed tables."""
    panels: dict[tuple, list[EfficiencyCell]] = {}
    for c in cells:
        panels.setdefault((c.alpha, c.n), []).append(c)
    out = io.StringIO()
    for (alpha, n), group in panels.items():
        As = list(dict.fromkeys(c.A for c in group))
        rows: dict[tuple, dict] = {}
        for c in group:
            rows.setdefault((c.g, c.beta), {})[c.A] = c
        out.write(f"alpha = {alpha:g}, n = {n}\n\n")
        head = ["g", "beta"] + [f"E1 A={a:.2f}" for a in As] + [f"E2 A={a:.2f}" for a in As]
        out.write("| " + " | ".join(head) + " |\n")
        out.write("|" + "---|" * len(head) + "\n")
        for (g, beta), by_a in rows.items():
            vals = [f"{g:.1f}", f"{beta:.1f}"]
            vals += [str(round_half_away(by_a[a].e1)) if a in by_a else "" for a in As]
            vals += [str(round_half_away(by_a[a].e2)) if a in by_a else "" for a in As]
            out.write("| " + " | ".join(vals) + " |\n")
        out.write("\n")
    return out.getvalue()


@dataclass(frozen=True)
class Exclusion:
    coords: tuple
    column: str
    printed: str
    reason: str


def read_exclusions(source) -> list[Exclusion]:
    if isinstance(source, (str, Path)):
        with open(source, newline="") as fh:
            return read_exclusions(fh)
    reader = csv.DictReader(source)
    need = {"alpha", "g", "beta", "n", "A", "column", "reason"}
    if reader.fieldnames is None or not need <= set(reader.fieldnames):
        raise ParameterError(f"line 1: exclusions header must contain {sorted(need)}")
    out = []
    for row in reader:
        try:
            coords = _coords(row["alpha"], row["g"], row["beta"], row["n"], row["A"])
        except ValueError as exc:
            raise ParameterError(f"line {reader.line_num}: {exc}") from None
        if row["column"] not in COLUMNS:
            raise ParameterError(f"line {reader.line_num}: column must be E1 or E2")
        out.append(Exclusion(coords, row["column"], row.get("printed", ""), row["reason"]))
    return out


def _data_file(name: str):
    return resources.files("ratioest").joinpath("data", name)


def reference_cells(table: int) -> list[EfficiencyCell]:
    """Values as printed in published table 1, 2 or 3."""
    with _data_file(f"table{table}.csv").open(newline="") as fh:
        return read_cells_csv(fh)


def known_typos() -> list[Exclusion]:
    with _data_file("exclusions.csv").open(newline="") as fh:
        return read_exclusions(fh)


@dataclass
class ComparisonReport:
    """Outcome of checking every printed value (an E1 or E2 entry of a row) against the computation."""

    total_cells: int
    matched: int
    mismatched: list[tuple[tuple, float, float]]
    excluded_known_typos: list[tuple]

    @property
    def ok(self) -> bool:
        return not self.mismatched

    def summary(self) -> str:
        return (
            f"{self.total_cells} values: {self.matched} matched, "
            f"{len(self.mismatched)} mismatched, {len(self.excluded_known_typos)} excluded as known typos"
        )


def verify_against_reference(
    cells,
    reference,
    tolerance: float = 0.02,
    exclusions=(),
) -> ComparisonReport:
    """Compare computed cells with reference cells, both E1 and E2.

    ``reference`` is a list of cells or a CSV path. A value matches when its
    computed value rounded half away from zero to 2 decimals is within
    ``tolerance`` of the reference. Excluded (coords, column) pairs are
    reported but not compared.
    """
    if isinstance(reference, (str, Path)):
        reference = read_cells_csv(reference)
    got = {c.coords: c for c in cells}
    skip = {(e.coords, e.column) for e in exclusions}
    tol = Decimal(repr(float(tolerance)))
    matched = 0
    mismatched, excluded = [], []
    for ref in reference:
        mine = got.get(ref.coords)
        if mine is None:
            raise ParameterError(f"reference cell {ref.coords} is not in the computed grid")
        for col, expected, value in (("E1", ref.e1, mine.e1), ("E2", ref.e2, mine.e2)):
            key = ref.coords + (col,)
            if (ref.coords, col) in skip:
                excluded.append(key)
            elif abs(round_half_away(value) - Decimal(repr(expected))) <= tol:
                matched += 1
            else:
                mismatched.append((key, expected, value))
    return ComparisonReport(2 * len(reference), matched, mismatched, excluded)


@dataclass(frozen=True)
class CrosscheckRow:
    quantity: str
    closed_form: float
    mc: float
    std_error: float

    @property
    def z(self) -> float:
        return (self.mc - self.closed_form) / self.std_error if self.std_error > 0 else math.inf

    @property
    def rel_diff(self) -> float:
        return (self.mc - self.closed_form) / abs(self.closed_form) if self.closed_form else math.inf


def mc_crosscheck(
    sp: SuperPopulationParams,
    dp: DesignParams,
    A: float,
    cfg: McConfig,
    threads: int = 1,
) -> list[CrosscheckRow]:
    """Compare every closed form with one Monte Carlo run at the same parameters.

    Rows ending in ``_printed`` evaluate the expressions exactly as typeset
    (see :func:`closed_form.em_bias_ratio_printed` and
    :func:`closed_form.em_mse_alt_min_printed`).
    """
    inp = cf.ClosedFormInputs(sp, dp, A)
    sims = simulate_design_moments(sp, dp, A, cfg, threads)
    targets = [
        ("bias_alt", cf.em_bias_alt(inp), "bias_alt"),
        ("mse_alt", cf.em_mse_alt(inp), "mse_alt"),
        ("bias_ratio", cf.em_bias_ratio(inp), "bias_ratio"),
        ("bias_ratio_printed", cf.em_bias_ratio_printed(inp), "bias_ratio"),
        ("mse_ratio", cf.em_mse_ratio(inp), "mse_ratio"),
        ("var_mean", cf.em_var_mean(inp), "var_mean"),
        ("mse_alt_min", cf.em_mse_alt_min(inp), "mse_alt_opt"),
        ("mse_alt_min_printed", cf.em_mse_alt_min_printed(inp), "mse_alt_opt"),
    ]
    rows = []
    for name, closed, key in targets:
        est = summarize(sims[key])
        rows.append(CrosscheckRow(name, closed, est.value, est.std_error))
    return rows


def load_config(path) -> dict:
    """Read a JSON config with optional ``grid`` and ``mc`` sections."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParameterError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ParameterError(f"config {path} must hold a JSON object")
    return data
