"""Command-line toolkit: CSV ingestion, synthetic data, decomposition, export.

Subcommands:
  synth      generate a synthetic series (plus its ground-truth record)
  decompose  fit windowed sinusoids to a CSV series (fixed or adaptive mode)
  profile    expand a result file into per-sample amplitude/frequency rows

Exit codes: 0 success, 1 usage error, 2 data/I-O error.  Every output file
is a pure function of the input bytes, the flags, and --seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .decomposition import (
    ComponentSpecs,
    DecompositionResult,
    decompose_adaptive,
    decompose_fixed,
)
from .encoding import ParameterSpec
from .ga import ConvergenceTrace, GAConfig
from .signal_model import TWO_PI, Grid, SinusoidalComponent, TimeSeries, synthesize


class UsageError(Exception):
    """Bad flags or flag combinations (exit code 1)."""


class DataError(Exception):
    """Unreadable, malformed, or inconsistent data files (exit code 2)."""


# ---------------------------------------------------------------------------
# ingestion

def load_series(path, dt: float | None = None) -> TimeSeries:
    """Read a headerless CSV series.

    Two accepted shapes: (t, value) rows with uniform spacing (relative
    tolerance 1e-6), or a single value column with the spacing supplied
    via dt.
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc

    rows: list[tuple[int, list[str]]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.strip():
            rows.append((lineno, [cell.strip() for cell in line.split(",")]))
    if not rows:
        raise DataError(f"{path}: no data rows")

    ncols = len(rows[0][1])
    if ncols not in (1, 2):
        raise DataError(f"{path}: row 1 has {ncols} columns, expected 1 or 2")

    def cell(lineno: int, col: int, text: str) -> float:
        try:
            return float(text)
        except ValueError:
            raise DataError(
                f"{path}: row {lineno}, column {col}: not a number: {text!r}"
            ) from None

    parsed: list[tuple[int, list[float]]] = []
    for lineno, cells in rows:
        if len(cells) != ncols:
            raise DataError(
                f"{path}: row {lineno} has {len(cells)} columns, expected {ncols}"
            )
        parsed.append((lineno, [cell(lineno, c + 1, s) for c, s in enumerate(cells)]))

    if ncols == 1:
        if dt is None:
            raise UsageError("single-column input requires --dt")
        values = [v[0] for _, v in parsed]
        return TimeSeries(0.0, dt, np.array(values))

    if dt is not None:
        raise UsageError("--dt only applies to single-column input")
    if len(parsed) < 2:
        raise DataError(f"{path}: need at least two rows to infer sample spacing")
    times = [v[0] for _, v in parsed]
    values = [v[1] for _, v in parsed]
    spacing = times[1] - times[0]
    if spacing <= 0:
        raise DataError(f"{path}: row {parsed[1][0]}: time does not increase")
    for i in range(2, len(times)):
        step = times[i] - times[i - 1]
        if abs(step - spacing) > 1e-6 * abs(spacing):
            raise DataError(
                f"{path}: row {parsed[i][0]}: non-uniform spacing "
                f"(step {step!r} vs {spacing!r})"
            )
    return TimeSeries(times[0], spacing, np.array(values))


# ---------------------------------------------------------------------------
# synthetic data

def generate_synthetic(
    components,
    length: int,
    dt: float,
    noise_amplitude: float = 0.0,
    seed: int = 0,
    t0: float = 0.0,
) -> tuple[TimeSeries, dict]:
    """Synthesize components on a grid, optionally adding uniform noise.

    Noise is drawn from [-noise_amplitude, +noise_amplitude]; with
    amplitude 0 no random numbers are consumed and the output equals the
    noise-free synthesis exactly.  Returns the series and a ground-truth
    record suitable for JSON export.
    """
    if noise_amplitude < 0:
        raise ValueError(f"noise amplitude must be >= 0, got {noise_amplitude}")
    grid = Grid(t0, dt, length)
    series = synthesize(components, grid)
    if noise_amplitude > 0:
        rng = np.random.default_rng(seed)
        noisy = series.values + rng.uniform(-noise_amplitude, noise_amplitude, length)
        series = TimeSeries(t0, dt, noisy)
    truth = {
        "components": [_component_dict(c) for c in components],
        "length": length,
        "dt": dt,
        "t0": t0,
        "noise_amplitude": noise_amplitude,
        "seed": seed,
    }
    return series, truth


def _component_dict(c: SinusoidalComponent) -> dict:
    return {
        "a": c.a,
        "f": c.f,
        "phi": c.phi,
        "t_start": c.t_start,
        "t_end": c.t_end,
    }


def write_series(series: TimeSeries, path) -> None:
    """Write a (t, value) CSV; floats keep full round-trip precision."""
    lines = [
        f"{t!r},{v!r}"
        for t, v in zip(series.times.tolist(), series.values.tolist())
    ]
    Path(path).write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# result documents

def result_document(result: DecompositionResult, config_echo: dict, seed: int) -> str:
    doc = {
        "components": [_component_dict(c) for c in result.components],
        "final_fitness": result.final_fitness,
        "seed": seed,
        "config": config_echo,
        "profile": {
            "counts": result.profile.counts.tolist(),
            "n_max": result.profile.n_max,
        },
    }
    return json.dumps(doc, indent=2) + "\n"


def write_result(result: DecompositionResult, path, config_echo: dict, seed: int) -> None:
    Path(path).write_text(result_document(result, config_echo, seed))


def read_result(path) -> tuple[tuple[SinusoidalComponent, ...], float, dict]:
    """Parse a result document back into components + stored fitness."""
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: not a valid result document: {exc}") from exc
    try:
        components = tuple(
            SinusoidalComponent(d["a"], d["f"], d["phi"], d["t_start"], d["t_end"])
            for d in doc["components"]
        )
        final_fitness = float(doc["final_fitness"])
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"{path}: not a valid result document: {exc}") from exc
    return components, final_fitness, doc


def emit_trace(trace: ConvergenceTrace, path) -> None:
    """Write the per-generation running-best records as a plottable CSV.

    Columns: generation, best_fitness, then a_n, f_n, phi_n, tstart_n,
    tend_n per component slot.  When entries carry fewer components than
    the widest one (adaptive runs), the missing cells are left blank.
    """
    if len(trace) == 0:
        raise ValueError("cannot emit an empty trace")
    width = max(len(e.components) for e in trace.entries)
    header = ["generation", "best_fitness"]
    for n in range(1, width + 1):
        header += [f"a_{n}", f"f_{n}", f"phi_{n}", f"tstart_{n}", f"tend_{n}"]
    lines = [",".join(header)]
    for e in trace.entries:
        row = [str(e.generation), repr(e.best_fitness)]
        for c in e.components:
            row += [repr(c.a), repr(c.f), repr(c.phi), str(c.t_start), str(c.t_end)]
        row += [""] * (5 * (width - len(e.components)))
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n")


def profile_rows(components, grid: Grid) -> list[str]:
    """Long-format per-sample rows: t, component, amplitude, angular_frequency."""
    lines = ["t,component,amplitude,angular_frequency"]
    times = (grid.t0 + np.arange(grid.n) * grid.dt).tolist()
    for t in range(grid.n):
        for i, c in enumerate(components, start=1):
            if c.t_start <= t <= c.t_end:
                lines.append(f"{times[t]!r},{i},{c.a!r},{(TWO_PI * c.f)!r}")
    return lines


# ---------------------------------------------------------------------------
# run configuration

@dataclass(frozen=True)
class RunConfig:
    """Everything a decompose run depends on besides the data itself."""

    mode: str
    n_components: int | None
    n_max: int | None
    specs: ComponentSpecs
    ga: GAConfig
    inner: GAConfig | None
    penalty: float | None
    metric: str

    def echo(self, data: TimeSeries) -> dict:
        doc = {
            "mode": self.mode,
            "metric": self.metric,
            "data": {"t0": data.t0, "dt": data.dt, "length": len(data)},
            "bounds": {
                name: {"lb": s.lb, "ub": s.ub, "step": s.step}
                for name, s in (
                    ("a", self.specs.a),
                    ("f", self.specs.f),
                    ("phi", self.specs.phi),
                )
            },
            "ga": _ga_dict(self.ga),
        }
        if self.mode == "fixed":
            doc["n"] = self.n_components
        else:
            doc["n_max"] = self.n_max
            doc["inner_ga"] = _ga_dict(self.inner)
            doc["penalty"] = self.penalty
        return doc


def _ga_dict(config: GAConfig) -> dict:
    return {
        "population_size": config.population_size,
        "max_generations": config.max_generations,
        "crossover_prob": config.crossover_prob,
        "mutation_prob_per_bit": config.mutation_prob_per_bit,
        "tournament_size": config.tournament_size,
        "elite_count": config.elite_count,
        "target_fitness": config.target_fitness,
        "stall_generations": config.stall_generations,
        "seed": config.seed,
    }


def _build_specs(data: TimeSeries, args) -> ComponentSpecs:
    base = ComponentSpecs.from_series(data)
    a, f, phi = base.a, base.f, base.phi
    if args.amp_max is not None or args.amp_step is not None:
        ub = args.amp_max if args.amp_max is not None else a.ub
        step = args.amp_step if args.amp_step is not None else a.step
        a = ParameterSpec("a", 0.0, ub, step)
    if args.freq_max is not None or args.freq_step is not None:
        ub = args.freq_max if args.freq_max is not None else f.ub
        step = args.freq_step if args.freq_step is not None else f.step
        f = ParameterSpec("f", 0.0, ub, step)
    if args.phase_step is not None:
        phi = ParameterSpec("phi", 0.0, TWO_PI - args.phase_step, args.phase_step)
    return ComponentSpecs(a=a, f=f, phi=phi)


# ---------------------------------------------------------------------------
# subcommands

def _parse_component(text: str) -> SinusoidalComponent:
    parts = text.split(",")
    if len(parts) != 5:
        raise UsageError(
            f"--component expects 'a,f,phi,t_start,t_end', got {text!r}"
        )
    try:
        a, f, phi = (float(p) for p in parts[:3])
        t_start, t_end = (int(p) for p in parts[3:])
        return SinusoidalComponent(a, f, phi, t_start, t_end)
    except ValueError as exc:
        raise UsageError(f"bad --component {text!r}: {exc}") from exc


def cmd_synth(args) -> int:
    components = [_parse_component(s) for s in args.component]
    try:
        series, truth = generate_synthetic(
            components, args.length, args.dt, args.noise, args.seed, args.t0
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    write_series(series, args.out)
    truth_path = args.truth if args.truth else Path(args.out).with_suffix(".truth.json")
    Path(truth_path).write_text(json.dumps(truth, indent=2) + "\n")
    return 0


def cmd_decompose(args) -> int:
    data = load_series(args.input, dt=args.dt)
    try:
        specs = _build_specs(data, args)
        ga_config = GAConfig(
            population_size=args.pop,
            max_generations=args.generations,
            crossover_prob=args.crossover,
            mutation_prob_per_bit=args.mutation,
            tournament_size=args.tournament,
            elite_count=args.elite,
            target_fitness=args.target_fitness,
            stall_generations=args.stall,
            seed=args.seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc

    if args.mode == "fixed":
        if args.n is None:
            raise UsageError("fixed mode requires --n")
        if args.n < 1:
            raise UsageError(f"--n must be >= 1, got {args.n}")
        if args.nmax is not None:
            raise UsageError("--nmax only applies to adaptive mode")
        config = RunConfig(
            "fixed", args.n, None, specs, ga_config, None, None, args.metric
        )
        result = decompose_fixed(data, args.n, specs, ga_config, metric=args.metric)
    else:
        if args.nmax is None:
            raise UsageError("adaptive mode requires --nmax")
        if args.nmax < 1:
            raise UsageError(f"--nmax must be >= 1, got {args.nmax}")
        if args.n is not None:
            raise UsageError("--n only applies to fixed mode")
        try:
            inner = GAConfig(
                population_size=args.inner_pop,
                max_generations=args.inner_generations,
                stall_generations=args.inner_stall,
                seed=args.seed,
            )
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        config = RunConfig(
            "adaptive", None, args.nmax, specs, ga_config, inner, args.penalty,
            args.metric,
        )
        result = decompose_adaptive(
            data,
            args.nmax,
            specs=specs,
            inner_config=inner,
            outer_config=ga_config,
            penalty=args.penalty,
            metric=args.metric,
        )

    document = result_document(result, config.echo(data), args.seed)
    if args.out:
        Path(args.out).write_text(document)
    else:
        sys.stdout.write(document)
    if args.trace:
        emit_trace(result.trace, args.trace)
    return 0


def cmd_profile(args) -> int:
    components, _, doc = read_result(args.result)
    try:
        grid_info = doc["config"]["data"]
        grid = Grid(grid_info["t0"], grid_info["dt"], grid_info["length"])
    except (KeyError, TypeError) as exc:
        raise DataError(f"{args.result}: missing grid information") from exc
    for c in components:
        if c.t_end >= grid.n:
            raise DataError(
                f"{args.result}: component window [{c.t_start}, {c.t_end}] "
                f"exceeds the {grid.n}-sample grid"
            )
    text = "\n".join(profile_rows(components, grid)) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# parser / entry point

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(self.format_usage() + f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="sinevolve",
        description="Decompose sampled series into time-windowed sinusoids.",
    )
    sub = parser.add_subparsers(dest="command")

    synth = sub.add_parser("synth", help="generate a synthetic series + ground truth")
    synth.add_argument("--length", type=int, required=True, help="number of samples")
    synth.add_argument("--dt", type=float, default=1.0, help="sample spacing")
    synth.add_argument("--t0", type=float, default=0.0, help="time of first sample")
    synth.add_argument(
        "--component", action="append", default=[], metavar="A,F,PHI,TS,TE",
        help="add one sinusoid (repeatable)",
    )
    synth.add_argument("--noise", type=float, default=0.0, help="uniform noise amplitude")
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--out", required=True, help="series CSV path")
    synth.add_argument("--truth", help="ground-truth JSON path (default: OUT.truth.json)")
    synth.set_defaults(func=cmd_synth)

    dec = sub.add_parser("decompose", help="fit windowed sinusoids to a CSV series")
    dec.add_argument("--input", required=True, help="series CSV (t,value or value-only)")
    dec.add_argument("--dt", type=float, help="sample spacing for value-only input")
    dec.add_argument("--mode", choices=("fixed", "adaptive"), default="fixed")
    dec.add_argument("--n", type=int, help="component count (fixed mode)")
    dec.add_argument("--nmax", type=int, help="max simultaneous components (adaptive)")
    dec.add_argument("--seed", type=int, default=0)
    dec.add_argument("--generations", type=int, default=2000)
    dec.add_argument("--pop", type=int, default=100)
    dec.add_argument("--stall", type=int, default=200)
    dec.add_argument("--crossover", type=float, default=0.9)
    dec.add_argument("--mutation", type=float, default=None,
                     help="per-bit flip probability (default 1/chromosome length)")
    dec.add_argument("--tournament", type=int, default=3)
    dec.add_argument("--elite", type=int, default=2)
    dec.add_argument("--target-fitness", type=float, default=1e-9)
    dec.add_argument("--metric", choices=("l1", "l2"), default="l1")
    dec.add_argument("--amp-max", type=float, help="amplitude upper bound")
    dec.add_argument("--amp-step", type=float, help="amplitude resolution")
    dec.add_argument("--freq-max", type=float, help="frequency upper bound")
    dec.add_argument("--freq-step", type=float, help="frequency resolution")
    dec.add_argument("--phase-step", type=float, help="phase resolution (radians)")
    dec.add_argument("--inner-pop", type=int, default=40)
    dec.add_argument("--inner-generations", type=int, default=200)
    dec.add_argument("--inner-stall", type=int, default=50)
    dec.add_argument("--penalty", type=float,
                     help="per-window fitness penalty (adaptive mode)")
    dec.add_argument("--out", help="result JSON path (default: stdout)")
    dec.add_argument("--trace", help="convergence trace CSV path")
    dec.set_defaults(func=cmd_decompose)

    prof = sub.add_parser("profile", help="per-sample amplitude/frequency of a result")
    prof.add_argument("--result", required=True, help="result JSON from decompose")
    prof.add_argument("--out", help="profile CSV path (default: stdout)")
    prof.set_defaults(func=cmd_profile)

    return parser


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "command", None) is None:
            raise UsageError(parser.format_usage() + "a subcommand is required")
        return args.func(args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        code = exc.code
        if code is None:
            return 0
        return code if isinstance(code, int) else 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
