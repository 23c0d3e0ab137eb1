"""Experiment driver: traces, cross-validation suites, summary table, figure data."""

from __future__ import annotations

import io
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import spectral
from .graph import InvalidArgument, build_graph, mark
from .reduced import (
    DegenerateBasisError,
    basis_bothsets,
    basis_oneset,
    conjugated_operator,
    reduced_operator_bothsets,
    reduced_operator_oneset,
    simulate_reduced,
)
from .walk import (
    ProbabilityTrace,
    initial_state,
    evolve,
    random_state,
    _step,
)

log = logging.getLogger(__name__)

ENGINES = ("full", "reduced", "analytic")
CSV_HEADER = "t,p_x,p_y,p_total"

TOL_EXACT = 1e-9
TOL_OPERATOR = 1e-12
TOL_NORM_DRIFT = 1e-10
ASYMPTOTIC_TOL_FACTOR = 1.25
CONJUGATION_MAX_ARCS = 200_000


@dataclass
class ExperimentConfig:
    n1: int = 0
    n2: int = 0
    k1: int = 0
    k2: int = 0
    init: str = "vertices"
    engine: str = "full"
    steps: int = 40
    output_path: str | None = None
    seed: int = 0

    def check(self) -> None:
        """Raise :class:`InvalidArgument` naming the first violated precondition."""
        if self.init not in spectral.INITS:
            raise InvalidArgument(f"init must be one of {spectral.INITS}, got {self.init!r}")
        if self.engine not in ENGINES:
            raise InvalidArgument(f"engine must be one of {ENGINES}, got {self.engine!r}")
        if self.steps < 1:
            raise InvalidArgument(f"steps must be >= 1, got {self.steps}")
        mark(build_graph(self.n1, self.n2), self.k1, self.k2)


_KEY_ALIASES = {"out": "output_path", "output": "output_path"}


def parse_config_text(text: str) -> dict:
    """Parse ``key=value`` lines; ``#`` starts a comment."""
    types = {f.name: f.type for f in fields(ExperimentConfig)}
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidArgument(f"config line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = _KEY_ALIASES.get(key, key)
        if key not in types:
            raise InvalidArgument(f"config line {lineno}: unknown key {key!r}")
        if types[key] in ("int", int):
            try:
                values[key] = int(value)
            except ValueError:
                raise InvalidArgument(f"config line {lineno}: {key} must be an integer") from None
        else:
            values[key] = value
    return values


def load_config(path: str | None = None, **overrides) -> ExperimentConfig:
    """Config from an optional file, with non-None ``overrides`` taking precedence."""
    values = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            values.update(parse_config_text(fh.read()))
    values.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**values)


# Traces ------------------------------------------------------------------------


def analytic_trace(n1: int, n2: int, k1: int, k2: int, which: str, steps: int) -> ProbabilityTrace:
    """Closed-form trace: exact with marks in one set, asymptotic with marks in both."""
    if k1 == 0 or k2 == 0:
        nm, no, k = (n1, n2, k1) if k2 == 0 else (n2, n1, k2)
        if k >= nm:
            raise DegenerateBasisError(
                "every vertex of the marked set is marked: no closed form, use engine=full"
            )
        p = np.array([spectral.closed_form_prob_oneset(nm, no, k, which, t) for t in range(steps + 1)])
        zeros = np.zeros_like(p)
        return ProbabilityTrace.from_columns(p, zeros) if k2 == 0 else ProbabilityTrace.from_columns(zeros, p)
    if k1 >= n1 or k2 >= n2:
        raise DegenerateBasisError("a partite set is fully marked: no closed form, use engine=full")
    rows = np.array([spectral.asymptotic_prob_bothsets(n1, n2, k1, k2, which, t) for t in range(steps + 1)])
    return ProbabilityTrace.from_columns(rows[:, 0], rows[:, 1])


def full_trace(n1: int, n2: int, k1: int, k2: int, which: str, steps: int) -> ProbabilityTrace:
    g = build_graph(n1, n2)
    return evolve(initial_state(g, which), mark(g, k1, k2), steps)


def compute_trace(cfg: ExperimentConfig) -> ProbabilityTrace:
    cfg.check()
    args = (cfg.n1, cfg.n2, cfg.k1, cfg.k2, cfg.init, cfg.steps)
    if cfg.engine == "full":
        return full_trace(*args)
    if cfg.engine == "reduced":
        return simulate_reduced(*args)
    return analytic_trace(*args)


def format_csv(trace: ProbabilityTrace) -> str:
    out = io.StringIO()
    out.write(CSV_HEADER + "\n")
    for t, px, py, pt in trace.rows:
        out.write(f"{t},{px:.12g},{py:.12g},{pt:.12g}\n")
    return out.getvalue()


def read_csv(path: str) -> ProbabilityTrace:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != CSV_HEADER:
            raise InvalidArgument(f"unexpected CSV header {header!r}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return ProbabilityTrace(data[:, 0].astype(int), data[:, 1], data[:, 2], data[:, 3])


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def run(cfg: ExperimentConfig) -> ProbabilityTrace:
    trace = compute_trace(cfg)
    if cfg.output_path:
        _write_text(cfg.output_path, format_csv(trace))
    return trace


# Peak detection ------------------------------------------------------------------


def first_peak(values, parity: int | None = None) -> int | None:
    """First ``t >= 1`` with ``p[t-2] <= p[t] >= p[t+2]`` inside its parity class.

    A missing ``p[t-2]`` (t = 1) counts as satisfied; a missing ``p[t+2]`` does
    not.  With ``parity`` given, only steps of that parity are considered.
    """
    p = np.asarray(values)
    for t in range(1, len(p) - 2):
        if parity is not None and t % 2 != parity:
            continue
        if (t < 2 or p[t - 2] <= p[t]) and p[t] >= p[t + 2]:
            return t
    return None


def best_peak(values, tie_tol: float = 1e-12) -> tuple[int, float] | tuple[None, None]:
    """The higher of the first even-step and first odd-step peaks; ties go to the earlier."""
    p = np.asarray(values)
    cands = [t for t in (first_peak(p, 0), first_peak(p, 1)) if t is not None]
    if not cands:
        return None, None
    top = max(p[t] for t in cands)
    t = min(t for t in cands if p[t] >= top - tie_tol)
    return t, float(p[t])


# Validation ----------------------------------------------------------------------

FIGURE_PANELS: dict[str, tuple[int, int, int, int, str]] = {
    "fig2a": (400, 400, 3, 0, "vertices"),
    "fig2b": (400, 200, 3, 0, "vertices"),
    "fig2c": (400, 1, 3, 0, "vertices"),
    "fig2d": (200, 400, 3, 0, "vertices"),
    "fig2e": (3, 400, 3, 0, "vertices"),
    "fig4a": (400, 400, 3, 0, "edges"),
    "fig4b": (400, 200, 3, 0, "edges"),
    "fig4c": (400, 1, 3, 0, "edges"),
    "fig4d": (200, 400, 3, 0, "edges"),
    "fig4e": (3, 400, 3, 0, "edges"),
    "fig5a": (400, 600, 3, 2, "vertices"),
    "fig5b": (600, 400, 3, 2, "vertices"),
    "fig5c": (3, 997, 3, 2, "vertices"),
    "fig6a": (400, 600, 3, 2, "edges"),
    "fig6b": (600, 400, 3, 2, "edges"),
    "fig6c": (3, 997, 3, 2, "edges"),
}


@dataclass
class Check:
    config: str
    suite: str
    deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.deviation <= self.tolerance)


@dataclass
class ValidationReport:
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_text(self) -> str:
        lines = []
        for c in self.checks:
            key = f"{c.config}.{c.suite}"
            lines.append(f"{key}.deviation={c.deviation:.6e}")
            lines.append(f"{key}.tolerance={c.tolerance:.6e}")
            lines.append(f"{key}.pass={'true' if c.passed else 'false'}")
        lines.append(f"checks={len(self.checks)}")
        lines.append(f"failures={len(self.failures)}")
        lines.append(f"pass={'true' if self.passed else 'false'}")
        return "\n".join(lines) + "\n"


def random_grid(seed: int, count: int, n_max: int = 200) -> list[tuple[int, int, int, int]]:
    """Seeded configurations whose reduced bases exist; half with marks in both sets."""
    rng = np.random.default_rng(seed)
    grid = []
    for i in range(count):
        n1, n2 = (int(x) for x in rng.integers(10, n_max + 1, size=2))
        k1 = int(rng.integers(1, n1))
        k2 = int(rng.integers(1, n2)) if i % 2 else 0
        grid.append((n1, n2, k1, k2))
    return grid


def default_grid(seed: int, count: int = 6) -> list[tuple[int, int, int, int]]:
    figs = []
    for n1, n2, k1, k2, _ in FIGURE_PANELS.values():
        if (n1, n2, k1, k2) not in figs:
            figs.append((n1, n2, k1, k2))
    return figs + random_grid(seed, count)


def _reduced_valid(n1, n2, k1, k2) -> bool:
    if k2 == 0:
        return k1 < n1
    if k1 == 0:
        return k2 < n2
    return k1 < n1 and k2 < n2


def validate_config(n1: int, n2: int, k1: int, k2: int, seed: int = 0, steps: int = 100) -> list[Check]:
    """Every applicable cross-check for one configuration."""
    name = f"{n1}_{n2}_{k1}_{k2}"
    checks: list[Check] = []
    g = build_graph(n1, n2)
    marks = mark(g, k1, k2)

    # Norm drift of the full-space step from a seeded random state.
    vec = random_state(g, np.random.default_rng([seed, n1, n2, k1, k2])).amplitudes
    for _ in range(steps):
        vec = _step(vec, g, marks)
    checks.append(Check(name, "full_norm_drift", abs(np.linalg.norm(vec) - 1.0), TOL_NORM_DRIFT))

    reduced_ok = _reduced_valid(n1, n2, k1, k2)
    for which in spectral.INITS:
        full = full_trace(n1, n2, k1, k2, which, steps)
        if not reduced_ok:
            continue
        red = simulate_reduced(n1, n2, k1, k2, which, steps)
        checks.append(Check(f"{name}_{which}", "full_vs_reduced", full.max_deviation(red), TOL_EXACT))
        if k1 == 0 or k2 == 0:
            exact = analytic_trace(n1, n2, k1, k2, which, steps)
            checks.append(Check(f"{name}_{which}", "reduced_vs_exact", red.max_deviation(exact), TOL_EXACT))
        elif n1 >= 100 * k1 and n2 >= 100 * k2:
            horizon = int(2 * spectral.runtimes_bothsets(n1, n2, k1, k2, which).t_x)
            red_h = simulate_reduced(n1, n2, k1, k2, which, horizon)
            asym = analytic_trace(n1, n2, k1, k2, which, horizon)
            tol = ASYMPTOTIC_TOL_FACTOR * spectral.regime_quality(n1, n2, k1, k2)
            checks.append(Check(f"{name}_{which}", "reduced_vs_asymptotic", red_h.max_deviation(asym), tol))

    if not reduced_ok:
        return checks

    if k2 == 0 or k1 == 0:
        nm, k = (n1, k1) if k2 == 0 else (n2, k2)
        op = reduced_operator_oneset(nm, k)
        eig = spectral.exact_eigensystem_oneset(nm, k)
        res = max(p.residual(op.matrix) for p in eig.pairs)
        checks.append(Check(name, "eigen_residual_exact", res, TOL_OPERATOR))
    else:
        op = reduced_operator_bothsets(n1, n2, k1, k2)
        num = spectral.exact_eigensystem_bothsets(n1, n2, k1, k2)
        res = max(p.residual(op.matrix) for p in num.pairs)
        checks.append(Check(name, "eigen_residual_numerical", res, TOL_OPERATOR))
        if math.sqrt(k1 / n1) + math.sqrt(k2 / n2) <= 1.0:
            pert = spectral.perturbative_eigensystem_bothsets(n1, n2, k1, k2)
            ref = spectral.asymptotic_eigensystem_bothsets(n1, n2, k1, k2)
            dev = max(
                np.max(np.abs(pert.eigenvalues - ref.eigenvalues)),
                np.max(np.abs(pert.eigenvectors - ref.eigenvectors)),
            )
            checks.append(Check(name, "perturbative_vs_closed_form", float(dev), 1e-10))
    unit = np.max(np.abs(op.matrix.conj().T @ op.matrix - np.eye(len(op.labels))))
    checks.append(Check(name, "reduced_unitarity", float(unit), TOL_OPERATOR))

    if g.arc_count <= CONJUGATION_MAX_ARCS and k1 > 0:
        basis = basis_oneset(g, marks) if k2 == 0 else basis_bothsets(g, marks)
        conj = conjugated_operator(basis, marks)
        dev = float(np.max(np.abs(conj.matrix - op.matrix)))
        checks.append(Check(name, "operator_vs_conjugation", dev, TOL_OPERATOR))
    return checks


def _validate_star(args):
    return validate_config(*args)


def validate(grid: list[tuple[int, int, int, int]], seed: int = 0, steps: int = 100, jobs: int = 1) -> ValidationReport:
    """Run every suite over ``grid``; output order follows ``grid`` regardless of ``jobs``."""
    tasks = [(*cfg, seed, steps) for cfg in grid]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_validate_star, tasks))
    else:
        results = [validate_config(*t) for t in tasks]
    report = ValidationReport()
    for checks in results:
        report.checks.extend(checks)
    return report


def parse_grid(text: str, seed: int, count: int = 6) -> list[tuple[int, int, int, int]]:
    """``default``, ``figures``, ``random`` or a comma list of ``n1xn2xk1xk2``."""
    if text == "default":
        return default_grid(seed, count)
    if text == "figures":
        return default_grid(seed, 0)
    if text == "random":
        return random_grid(seed, count)
    grid = []
    for item in text.split(","):
        parts = item.strip().split("x")
        if len(parts) != 4:
            raise InvalidArgument(f"grid entry {item!r} is not n1xn2xk1xk2")
        grid.append(tuple(int(p) for p in parts))
    return grid


# Summary table -------------------------------------------------------------------

TABLE_HEADER = "row,init,quantity,n1,n2,k1,k2,t_pred,p_pred,t_meas,p_meas,t_dev,p_dev"


def table_sizes(scale: int) -> dict[int, tuple[int, int, int, int]]:
    """Concrete sizes instantiating each summary-table row at ``scale``."""
    n, h = scale, scale // 2
    big = 3 * scale // 2
    return {
        1: (n, n, 3, 0),
        2: (n, 1, 3, 0),
        3: (h, n, 3, 0),
        4: (big, n, 3, 2),
        5: (n, big, 2, 2),
        6: (n, n, 2, 3),
        7: (n, big, 3, 2),
        8: (big, n, 2, 3),
    }


@dataclass
class TableLine:
    row: int
    init: str
    quantity: str
    config: tuple[int, int, int, int]
    t_pred: float
    p_pred: float
    t_meas: int | None
    p_meas: float | None

    def csv(self) -> str:
        n1, n2, k1, k2 = self.config
        t_dev = (self.t_meas - self.t_pred) if self.t_meas is not None else float("nan")
        p_dev = (self.p_meas - self.p_pred) if self.p_meas is not None else float("nan")
        return (
            f"{self.row},{self.init},{self.quantity},{n1},{n2},{k1},{k2},"
            f"{self.t_pred:.12g},{self.p_pred:.12g},{self.t_meas},{self.p_meas:.12g},"
            f"{t_dev:.12g},{p_dev:.12g}"
        )


def table(scale: int, engine: str = "reduced") -> list[TableLine]:
    """Predicted versus measured runtime and peak probability for every table row."""
    if scale % 2 or scale < 300:
        raise InvalidArgument("scale must be even and at least 100x the largest k (3)")
    lines = []
    for row, cfg in table_sizes(scale).items():
        summary = spectral.table_summary(*cfg)
        if summary.row != row:
            raise AssertionError(f"sizes for row {row} classify as row {summary.row}")
        for which in spectral.INITS:
            t_max = summary.t_star if summary.t_star is not None else max(summary.t_x, summary.t_y)
            steps = int(3 * t_max) + 10
            trace = compute_trace(ExperimentConfig(*cfg, init=which, engine=engine, steps=steps))
            if summary.t_star is not None:
                p_pred = summary.p_star_vertices if which == "vertices" else summary.p_star_edges
                t, p = best_peak(trace.p_total)
                lines.append(TableLine(row, which, "total", cfg, summary.t_star, p_pred, t, p))
            else:
                p_pred = summary.p_set_vertices if which == "vertices" else summary.p_set_edges
                for quantity, t_pred, col in (("x", summary.t_x, trace.p_x), ("y", summary.t_y, trace.p_y)):
                    t, p = best_peak(col)
                    lines.append(TableLine(row, which, quantity, cfg, t_pred, p_pred, t, p))
    return lines


def format_table(lines: list[TableLine]) -> str:
    return TABLE_HEADER + "\n" + "".join(line.csv() + "\n" for line in lines)


# Figures -------------------------------------------------------------------------


def figures(outdir: str, steps: int = 60, engine: str = "full") -> dict[str, str]:
    """Write one CSV per figure panel; returns panel -> path."""
    os.makedirs(outdir, exist_ok=True)
    written = {}
    for panel, (n1, n2, k1, k2, which) in FIGURE_PANELS.items():
        path = os.path.join(outdir, f"{panel}.csv")
        eng = engine if _reduced_valid(n1, n2, k1, k2) else "full"
        cfg = ExperimentConfig(n1, n2, k1, k2, which, eng, steps, path)
        run(cfg)
        log.info("wrote %s (%s)", path, eng)
        written[panel] = path
    return written


def with_overrides(cfg: ExperimentConfig, **kw) -> ExperimentConfig:
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})
