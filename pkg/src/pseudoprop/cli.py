"""Batch command-line front end.

Each experiment builds the relevant grid/family/transform, runs the
computation, and emits diff-able CSV (one-line header, floats at 17
significant digits).  Identical configuration always produces byte-identical
output; nothing here is randomized.

    pseudoprop table1 --out results/
    pseudoprop custom --operator convection --c 10 --N 50 --t 1,2,5

Experiments:
  table1   sup-norm reconstruction error p and propagation error q at t=5 for
           the pure-convection expansion, over seven (c, N) pairs.
  table2   convection-diffusion baseline: eigenprojection residual p and
           biorthogonal-series residual q for b in {2.5, 5.0}, N = 10..100.
  table3   pseudomode projection residual for b=20, c=5 over 2N+1 = 11..71.
  table4   gaussian peak height under propagation (c in {5, 10}, N=15)
           against the free-space value and a Crank-Nicolson reference.
  table5   leading exact eigenvalues next to the approximate eigenvalues.
  figure1  profiles of the propagated gaussian at t = 0, 4, 8, 12.
  figure2  same with constant initial data.
  gibbs    propagation of constant initial data under pure convection
           (N = 50 and 100): overshoot study near the moving jump.
  custom   one propagation job with user-chosen parameters.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bounds import GrowthBound, usefulness_check
from .errors import (
    FamilyFormatError,
    GridMismatchError,
    IllConditionedGramError,
    SolverFailureError,
)
from .families import (
    CutoffSpec,
    PseudomodeFamily,
    certify_family,
    convdiff_eigens,
    convdiff_family,
    convection_family,
    fourier_family,
)
from .grid import NORM_KINDS, Grid, SampledFunction, make_grid, norm
from .oracle import convection_exact, convdiff_reference_path, gaussian_free_max
from .spectral import SpectralExpansion, biorthogonal_expand, ortho_project
from .transform import Transform, build_transform, project, propagate

EXPERIMENTS = (
    "table1",
    "table2",
    "table3",
    "table4",
    "table5",
    "figure1",
    "figure2",
    "gibbs",
    "custom",
)

OPERATORS = ("convection", "convdiff", "fourier")

TABLE1_PAIRS = ((5.0, 30), (10.0, 30), (5.0, 40), (10.0, 40), (3.0, 50), (5.0, 50), (10.0, 50))

DEFAULTS = {
    "a": 20.0,
    "b": 20.0,
    "c": 5.0,
    "N": 15,
    "alpha": 1.0,
    "ppu": 10,
    "endpoints": True,
    "t": (0.0, 4.0, 8.0, 12.0),
    "f": "gauss",
    "norm": "sup",
    "out": "out",
    "family_cache": None,
    "operator": "convdiff",
}

PRESETS = {
    "table1": {"ppu": 50, "endpoints": False, "f": "gauss_pair", "t": (5.0,)},
    "table2": {"norm": "euclid"},
    "table3": {"norm": "euclid"},
    "table4": {"t": tuple(float(t) for t in range(0, 17, 2))},
    "table5": {},
    "figure1": {"f": "gauss"},
    "figure2": {"f": "constant_one"},
    "gibbs": {"ppu": 50, "endpoints": False, "c": 10.0, "N": 50, "f": "constant_one", "t": (5.0,)},
    "custom": {},
}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    a: float
    b: float
    c: float
    N: int
    alpha: float
    ppu: int
    endpoints: bool
    t: tuple
    f: str
    norm: str
    out: str
    family_cache: str | None
    operator: str


def _parse_bool(text: str) -> bool:
    lowered = str(text).strip().lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise ValueError(f"expected true/false, got {text!r}")


def _parse_times(text) -> tuple:
    if isinstance(text, tuple):
        return text
    try:
        times = tuple(float(part) for part in str(text).split(",") if part.strip())
    except ValueError as exc:
        raise ValueError(f"bad time list {text!r}: {exc}") from None
    if not times:
        raise ValueError("time list is empty")
    return times


_CONVERTERS = {
    "a": float,
    "b": float,
    "c": float,
    "alpha": float,
    "N": int,
    "ppu": int,
    "endpoints": _parse_bool,
    "t": _parse_times,
    "f": str,
    "norm": str,
    "out": str,
    "family_cache": str,
    "operator": str,
}


def parse_config_file(path: str) -> dict:
    """key=value lines; '#' starts a comment; unknown keys are rejected."""
    values = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{line_no}: expected key=value, got {raw.strip()!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in _CONVERTERS:
                raise ValueError(f"{path}:{line_no}: unknown key {key!r}")
            values[key] = _CONVERTERS[key](value)
    return values


def resolve_config(experiment: str, file_values: dict, flag_values: dict) -> ExperimentConfig:
    """Layer defaults, per-experiment presets, config file, and flags."""
    if experiment not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {experiment!r}; expected one of {EXPERIMENTS}")
    merged = dict(DEFAULTS)
    merged.update(PRESETS[experiment])
    merged.update(file_values)
    merged.update({k: v for k, v in flag_values.items() if v is not None})
    if merged["norm"] not in NORM_KINDS:
        raise ValueError(f"unknown norm kind {merged['norm']!r}")
    if merged["operator"] not in OPERATORS:
        raise ValueError(f"unknown operator {merged['operator']!r}")
    return ExperimentConfig(experiment=experiment, **merged)


def initial_function(cfg: ExperimentConfig, grid: Grid) -> SampledFunction:
    x = grid.x
    if cfg.f == "gauss_pair":
        # second hump read with a negative exponent; see README
        values = 2.0 * np.exp(-10.0 * (x - 5.0) ** 2) - np.exp(-((x - 5.0) ** 2) / 10.0)
    elif cfg.f == "gauss":
        values = np.exp(-((x - grid.a / 2.0) ** 2))
    elif cfg.f == "constant_one":
        values = np.ones_like(x)
    elif cfg.f.endswith(".csv"):
        data = np.loadtxt(cfg.f, delimiter=",", ndmin=2, dtype=float)
        if data.shape[0] != grid.n_points:
            raise GridMismatchError(
                f"{cfg.f}: {data.shape[0]} samples for a {grid.n_points}-point grid"
            )
        values = data[:, 0] + (1j * data[:, 1] if data.shape[1] > 1 else 0.0)
    else:
        raise ValueError(
            f"unknown initial function {cfg.f!r}; expected gauss_pair, gauss, "
            f"constant_one, or a .csv path"
        )
    return SampledFunction(grid, values)


def _certified_transform(
    cfg: ExperimentConfig, grid: Grid, operator: str, c: float, N: int
) -> Transform:
    """Build (or load), certify, and wrap a family; the cache directory is
    used only by single-family experiments."""
    cache = Path(cfg.family_cache) if cfg.family_cache else None
    if cache is not None and (cache / "lambdas.csv").exists():
        family = load_family(cache, grid)
        if family.epsilon is None:
            raise ValueError(f"cached family at {cache} was never certified")
        return build_transform(family, grid)
    if operator == "convection":
        family = convection_family(grid, c, N)
        cutoff = CutoffSpec("linear", cfg.alpha)
    elif operator == "fourier":
        family = fourier_family(grid, N)
        cutoff = CutoffSpec("linear", cfg.alpha)
    else:
        family = convdiff_family(grid, cfg.b, c, N)
        cutoff = CutoffSpec("exponential", cfg.alpha)
    certified, _ = certify_family(
        family, cutoff, "convection" if operator != "convdiff" else "convdiff"
    )
    if cache is not None:
        save_family(certified, cache)
    return build_transform(certified, grid)


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def _diff_norm(f: SampledFunction, g: SampledFunction, kind: str) -> float:
    return norm(SampledFunction(f.grid, f.values - g.values), kind)


# ---------------------------------------------------------------------------
# experiments


def run_table1(cfg: ExperimentConfig):
    grid = make_grid(cfg.a, cfg.ppu, cfg.endpoints)
    f = initial_function(cfg, grid)
    t = cfg.t[0]
    exact = convection_exact(f, t)
    rows = []
    for c, N in TABLE1_PAIRS:
        transform = _certified_transform(cfg, grid, "convection", c, N)
        report = propagate(transform, f, [t])[0]
        pr = project(transform, f)
        p = _diff_norm(f, pr.projection, cfg.norm)
        q = _diff_norm(exact, report.f_t, cfg.norm)
        err_l2 = _diff_norm(exact, report.f_t, "l2")
        rows.append([c, N, p, q, err_l2, report.bound])
    return [("table1.csv", ["c", "N", "p", "q", "err_l2", "bound"], rows)]


def run_table2(cfg: ExperimentConfig):
    grid = make_grid(cfg.a, cfg.ppu, cfg.endpoints)
    f = initial_function(cfg, grid)
    rows = []
    for b in (2.5, 5.0):
        eigens = convdiff_eigens(grid, b, 100)
        for N in range(10, 101, 10):
            expansion = SpectralExpansion(eigens, N)
            p = _diff_norm(f, ortho_project(expansion, f), cfg.norm)
            q = _diff_norm(f, biorthogonal_expand(expansion, f), cfg.norm)
            rows.append([b, N, p, q])
    return [("table2.csv", ["b", "N", "p", "q"], rows)]


def run_table3(cfg: ExperimentConfig):
    grid = make_grid(cfg.a, cfg.ppu, cfg.endpoints)
    f = initial_function(cfg, grid)
    rows = []
    for N in range(5, 36, 5):
        family = convdiff_family(grid, cfg.b, cfg.c, N)
        transform = build_transform(family, grid)
        pr = project(transform, f)
        rows.append([2 * N + 1, _diff_norm(f, pr.projection, cfg.norm)])
    return [("table3.csv", ["modes", "p"], rows)]


def run_table4(cfg: ExperimentConfig):
    grid = make_grid(cfg.a, cfg.ppu, cfg.endpoints)
    f = initial_function(cfg, grid)
    times = sorted(cfg.t)
    references = convdiff_reference_path(f, times, cfg.b, refine=4, dt=0.005)
    rows = []
    for c in (5.0, 10.0):
        transform = _certified_transform(cfg, grid, "convdiff", c, cfg.N)
        reports = propagate(transform, f, times)
        for report, reference in zip(reports, references):
            m = float(np.max(report.f_t.values.real))
            err_l2 = _diff_norm(reference, report.f_t, "l2")
            rows.append(
                [c, report.t, m, gaussian_free_max(report.t, cfg.b), err_l2, report.bound]
            )
    return [("table4.csv", ["c", "t", "m", "m_inf", "err_l2", "bound"], rows)]


def run_table5(cfg: ExperimentConfig):
    grid = make_grid(cfg.a, cfg.ppu, cfg.endpoints)
    eigens = convdiff_eigens(grid, cfg.b, 8)
    family = convdiff_family(grid, cfg.b, cfg.c, 7)
    rows = []
    for i in range(8):
        mu = family.eigenvalues[family.labels.tolist().index(i)]
        rows.append([i + 1, eigens.eigenvalues[i], i, mu.real, abs(mu.imag)])
    return [("table5.csv", ["n", "lambda_n", "s", "mu_re", "mu_im"], rows)]


def _run_figure(cfg: ExperimentConfig, name: str):
    grid = make_grid(cfg.a, cfg.ppu, cfg.endpoints)
    f = initial_function(cfg, grid)
    transform = _certified_transform(cfg, grid, "convdiff", cfg.c, cfg.N)
    reports = propagate(transform, f, cfg.t)
    header = ["x", "f"] + [f"f_{report.t:g}" for report in reports]
    columns = [grid.x, f.values.real] + [report.f_t.values.real for report in reports]
    rows = [list(point) for point in zip(*columns)]
    plot_parts = ", ".join(
        f"'{name}.csv' using 1:{i + 2} with lines" for i in range(len(header) - 1)
    )
    script = (
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        f"plot {plot_parts}\n"
    )
    return [(f"{name}.csv", header, rows), (f"{name}.gp", None, script)]


def run_figure1(cfg: ExperimentConfig):
    return _run_figure(cfg, "figure1")


def run_figure2(cfg: ExperimentConfig):
    return _run_figure(cfg, "figure2")


def run_gibbs(cfg: ExperimentConfig):
    grid = make_grid(cfg.a, cfg.ppu, cfg.endpoints)
    f = initial_function(cfg, grid)
    t = cfg.t[0]
    exact = convection_exact(f, t)
    rows = []
    for N in (50, 100):
        transform = _certified_transform(cfg, grid, "convection", cfg.c, N)
        report = propagate(transform, f, [t])[0]
        pr = project(transform, f)
        rows.append(
            [
                N,
                _diff_norm(f, pr.projection, cfg.norm),
                _diff_norm(exact, report.f_t, cfg.norm),
                float(np.max(report.f_t.values.real)),
                _diff_norm(exact, report.f_t, "l2"),
                report.bound,
            ]
        )
    return [("gibbs.csv", ["N", "p", "q", "max_f_t", "err_l2", "bound"], rows)]


def run_custom(cfg: ExperimentConfig):
    grid = make_grid(cfg.a, cfg.ppu, cfg.endpoints)
    f = initial_function(cfg, grid)
    transform = _certified_transform(cfg, grid, cfg.operator, cfg.c, cfg.N)
    reports = propagate(transform, f, sorted(cfg.t))
    growth = GrowthBound()
    rows = []
    for report in reports:
        if usefulness_check(report.mu, growth, report.phi_l1, report.t, report.bound):
            print(
                f"note: at t={report.t:g} the error bound {report.bound:.3e} exceeds "
                f"the natural state size; treat the propagated values as unverified",
                file=sys.stderr,
            )
        rows.append(
            [
                report.t,
                report.residual_l2,
                report.residual_sup,
                report.phi_l1,
                report.mu,
                report.bound,
                float(np.max(report.f_t.values.real)),
                float(np.min(report.f_t.values.real)),
            ]
        )
    header = ["t", "residual_l2", "residual_sup", "phi_l1", "mu", "bound", "max_f_t", "min_f_t"]
    return [("custom.csv", header, rows)]


DISPATCH = {
    "table1": run_table1,
    "table2": run_table2,
    "table3": run_table3,
    "table4": run_table4,
    "table5": run_table5,
    "figure1": run_figure1,
    "figure2": run_figure2,
    "gibbs": run_gibbs,
    "custom": run_custom,
}


def run(config: ExperimentConfig) -> int:
    """Execute one experiment and write its artifacts under config.out."""
    outputs = DISPATCH[config.experiment](config)
    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, header, payload in outputs:
        path = out_dir / name
        if header is None:
            path.write_text(payload, encoding="utf-8")
        else:
            lines = [",".join(header)]
            lines += [",".join(_fmt(cell) for cell in row) for row in payload]
            path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(f"wrote {path}")
    return 0


# ---------------------------------------------------------------------------
# family serialization


def save_family(family: PseudomodeFamily, path) -> None:
    """Write a family as a CSV bundle: lambdas.csv (metadata + eigenvalues)
    and modes.csv (abscissae + one re/im column pair per label)."""
    directory = Path(path)
    directory.mkdir(parents=True, exist_ok=True)
    grid = family.grid

    lines = ["# pseudoprop-family-v1", f"# kind,{family.kind}"]
    lines.append(
        f"# epsilon,{'none' if family.epsilon is None else _fmt(family.epsilon)}"
    )
    for key in sorted(family.params):
        lines.append(f"# param,{key},{_fmt(family.params[key])}")
    lines.append(f"# grid,a,{_fmt(grid.a)}")
    lines.append(f"# grid,points,{grid.n_points}")
    lines.append(f"# grid,endpoints,{'true' if grid.include_endpoints else 'false'}")
    lines.append("s,lambda_re,lambda_im")
    for s, lam in zip(family.labels, family.eigenvalues):
        lines.append(f"{int(s)},{_fmt(lam.real)},{_fmt(lam.imag)}")
    (directory / "lambdas.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    header = ["x"]
    for s in family.labels:
        header += [f"re_{int(s)}", f"im_{int(s)}"]
    rows = [",".join(header)]
    for i in range(grid.n_points):
        cells = [_fmt(grid.x[i])]
        for j in range(family.n_modes):
            cells += [_fmt(family.modes[i, j].real), _fmt(family.modes[i, j].imag)]
        rows.append(",".join(cells))
    (directory / "modes.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")


def load_family(path, grid: Grid) -> PseudomodeFamily:
    """Read a family bundle back; the target grid must match the one the
    family was sampled on."""
    directory = Path(path)
    lam_path = directory / "lambdas.csv"
    kind = None
    epsilon = None
    params = {}
    grid_meta = {}
    labels = []
    lam_values = []
    header_seen = False
    with open(lam_path, encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                fields = [part.strip() for part in line[1:].split(",")]
                if line_no == 1:
                    if fields[0] != "pseudoprop-family-v1":
                        raise FamilyFormatError("unrecognized family file version", line_no)
                    continue
                try:
                    if fields[0] == "kind":
                        kind = fields[1]
                    elif fields[0] == "epsilon":
                        epsilon = None if fields[1] == "none" else float(fields[1])
                    elif fields[0] == "param":
                        params[fields[1]] = float(fields[2])
                    elif fields[0] == "grid":
                        grid_meta[fields[1]] = fields[2]
                    else:
                        raise FamilyFormatError(f"unknown metadata {fields[0]!r}", line_no)
                except (IndexError, ValueError) as exc:
                    if isinstance(exc, FamilyFormatError):
                        raise
                    raise FamilyFormatError(f"bad metadata line: {exc}", line_no) from None
                continue
            if not header_seen:
                if line != "s,lambda_re,lambda_im":
                    raise FamilyFormatError("expected header s,lambda_re,lambda_im", line_no)
                header_seen = True
                continue
            parts = line.split(",")
            try:
                labels.append(int(parts[0]))
                lam_values.append(complex(float(parts[1]), float(parts[2])))
            except (IndexError, ValueError):
                raise FamilyFormatError(f"bad eigenvalue row {line!r}", line_no) from None
    if kind is None or not header_seen or not labels:
        raise FamilyFormatError("family file is incomplete", 1)

    try:
        meta_points = int(grid_meta["points"])
        meta_a = float(grid_meta["a"])
        meta_endpoints = _parse_bool(grid_meta["endpoints"])
    except (KeyError, ValueError) as exc:
        raise FamilyFormatError(f"bad grid metadata: {exc}", 1) from None
    if (
        meta_points != grid.n_points
        or meta_endpoints != grid.include_endpoints
        or abs(meta_a - grid.a) > 1e-12 * grid.a
    ):
        raise GridMismatchError(
            f"family was sampled on a {meta_points}-point grid "
            f"(endpoints={meta_endpoints}, a={meta_a}); target grid has "
            f"{grid.n_points} points (endpoints={grid.include_endpoints}, a={grid.a})"
        )

    modes_path = directory / "modes.csv"
    with open(modes_path, encoding="utf-8") as handle:
        lines = [line.strip() for line in handle if line.strip()]
    expected_header = ["x"]
    for s in labels:
        expected_header += [f"re_{s}", f"im_{s}"]
    if lines[0].split(",") != expected_header:
        raise FamilyFormatError("modes.csv header does not match the label set", 1)
    if len(lines) - 1 != grid.n_points:
        raise FamilyFormatError(
            f"modes.csv has {len(lines) - 1} sample rows, expected {grid.n_points}",
            len(lines),
        )
    x_read = np.empty(grid.n_points)
    modes = np.empty((grid.n_points, len(labels)), dtype=complex)
    for i, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 1 + 2 * len(labels):
            raise FamilyFormatError(f"expected {1 + 2 * len(labels)} columns", i)
        try:
            x_read[i - 2] = float(parts[0])
            values = np.array([float(p) for p in parts[1:]])
        except ValueError:
            raise FamilyFormatError(f"bad float in row {i}", i) from None
        modes[i - 2, :] = values[0::2] + 1j * values[1::2]
    if not np.array_equal(x_read, grid.x):
        raise GridMismatchError("modes.csv abscissae differ from the target grid")

    return PseudomodeFamily(
        kind=kind,
        grid=grid,
        labels=np.array(labels),
        eigenvalues=np.array(lam_values, dtype=complex),
        modes=modes,
        params=params,
        epsilon=epsilon,
    )


# ---------------------------------------------------------------------------
# entry point


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValueError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pseudoprop", description=__doc__.splitlines()[0])
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", help="key=value parameter file; flags override it")
    parser.add_argument("--a", type=float)
    parser.add_argument("--b", type=float)
    parser.add_argument("--c", type=float)
    parser.add_argument("--N", type=int)
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--ppu", type=int, help="grid points per unit interval")
    parser.add_argument("--endpoints", type=_parse_bool)
    parser.add_argument("--t", type=_parse_times, help="comma-separated times")
    parser.add_argument("--f", help="initial function: gauss_pair|gauss|constant_one|<path>.csv")
    parser.add_argument("--norm", choices=NORM_KINDS)
    parser.add_argument("--out", help="output directory (default ./out)")
    parser.add_argument("--family-cache", dest="family_cache", help="directory for reusing a built family")
    parser.add_argument("--operator", choices=OPERATORS, help="custom experiment only")
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        file_values = parse_config_file(args.config) if args.config else {}
        flag_values = {
            key: getattr(args, key)
            for key in _CONVERTERS
            if hasattr(args, key) and getattr(args, key) is not None
        }
        config = resolve_config(args.experiment, file_values, flag_values)
        return run(config)
    except (IllConditionedGramError, OverflowError, SolverFailureError, FloatingPointError) as exc:
        print(f"numerical failure [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"invalid input [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
