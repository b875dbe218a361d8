"""Acceptance checks: one verdict line per shipped guarantee.

Each test prints `ACCEPTANCE <name>: PASS|FAIL` so the suite output doubles
as a checklist.  Stochastic searches run over fixed seed sets with success
quotas; runtime ceilings are asserted where the guarantee includes one.
"""

from __future__ import annotations

import time

import numpy as np
import pytest

from sinevolve import ga
from sinevolve.cli import cli_main, emit_trace, load_series, read_result
from sinevolve.decomposition import (
    ComponentSpecs,
    decompose_adaptive,
    decompose_fixed,
    profile_to_windows,
)
from sinevolve.encoding import (
    ParameterSpec,
    bit_count,
    decode_field,
    decode_level,
    encode_field,
    fixed_window_layout,
    sinusoid_layout,
)
from sinevolve.signal_model import (
    TWO_PI,
    Grid,
    SinusoidalComponent,
    fitness,
    synthesize,
)

from cases import enumerate_chromosomes


def _verdict(name: str, ok: bool, detail: str = "") -> None:
    tail = f"  [{detail}]" if detail else ""
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}{tail}")
    assert ok, f"{name}{tail}"


def _random_spec(rng) -> ParameterSpec:
    lb = float(rng.uniform(-50.0, 50.0))
    span = float(10.0 ** rng.uniform(-3.0, 3.0))
    ratio = float(10.0 ** rng.uniform(0.0, 5.0))  # span/step >= 1 keeps step valid
    return ParameterSpec("x", lb, lb + span, span / ratio)


# ---------------------------------------------------------------------------
# field encoding


def test_field_encoding_round_trip():
    rng = np.random.default_rng(12345)
    t0 = time.perf_counter()
    for _ in range(1000):
        spec = _random_spec(rng)
        width = bit_count(spec)
        x = float(rng.uniform(spec.lb, spec.ub))
        decoded = decode_field(encode_field(x, spec), spec)
        assert abs(decoded - x) <= spec.span / (2 * ((1 << width) - 1))
    for _ in range(1000):
        spec = _random_spec(rng)
        bits = rng.integers(0, 2, size=bit_count(spec), dtype=np.uint8)
        again = encode_field(decode_field(bits, spec), spec)
        assert np.array_equal(bits, again)
    elapsed = time.perf_counter() - t0
    _verdict("encoding round trip", elapsed < 1.0, f"{elapsed:.2f}s")


def test_field_width_minimality():
    rng = np.random.default_rng(54321)
    for _ in range(1000):
        spec = _random_spec(rng)
        b = bit_count(spec)
        assert spec.span <= ((1 << b) - 1) * spec.step
        assert ((1 << (b - 1)) - 1) * spec.step < spec.span
    worked = ParameterSpec("x", 0.0, 10.0, 0.01)
    _verdict("bit-width minimality", bit_count(worked) == 10)


# ---------------------------------------------------------------------------
# trace behavior


MONO_A = ParameterSpec("a", 0.0, 1.5, 0.1)
MONO_F = ParameterSpec("f", 0.0, 0.5, 0.5 / 31)
MONO_PHI = ParameterSpec("phi", 0.0, TWO_PI * 7 / 8, TWO_PI / 8)


def test_trace_monotonic_and_repeatable(tmp_path):
    # off-grid parameters keep the best fitness strictly positive, so the
    # zero target never ends a run early and every trace has 300 entries
    data = synthesize(
        [
            SinusoidalComponent(0.9, 0.07, 0.3, 5, 40),
            SinusoidalComponent(0.5, 0.21, 2.7, 25, 63),
        ],
        Grid(0.0, 1.0, 64),
    )
    layout = sinusoid_layout(2, len(data), MONO_A, MONO_F, MONO_PHI)
    t0 = time.perf_counter()
    for seed in range(20):
        config = ga.GAConfig(
            population_size=50,
            max_generations=300,
            stall_generations=300,
            target_fitness=0.0,
            seed=seed,
        )
        _, trace = ga.run(data, layout, config)
        assert len(trace) == 300
        fits = trace.best_fitnesses
        assert np.all(np.diff(fits) <= 0)

        _, again = ga.run(data, layout, config)
        first, second = tmp_path / f"t{seed}a.csv", tmp_path / f"t{seed}b.csv"
        emit_trace(trace, first)
        emit_trace(again, second)
        assert first.read_bytes() == second.read_bytes()
    elapsed = time.perf_counter() - t0
    _verdict("trace monotonic + repeatable", elapsed < 30.0, f"{elapsed:.1f}s")


# ---------------------------------------------------------------------------
# exhaustive oracle


def test_small_space_matches_exhaustive_minimum():
    a = ParameterSpec("a", 0.0, 1.5, 0.1)  # 4 bits
    f = ParameterSpec("f", 0.0, 0.5, 0.5 / 31)  # 5 bits
    phi = ParameterSpec("phi", 0.0, TWO_PI * 7 / 8, TWO_PI / 8)  # 3 bits
    layout = fixed_window_layout(1, a, f, phi)
    assert layout.total_bits == 12
    windows = [(7, 51)]
    data = synthesize([SinusoidalComponent(0.83, 0.137, 1.9, 7, 51)], Grid(0.0, 1.0, 64))

    t0 = time.perf_counter()
    evaluate = ga.make_evaluator(data, layout, windows)
    all_fits = evaluate(enumerate_chromosomes(layout.total_bits))
    oracle = float(all_fits.min())
    assert oracle > 0.0  # off-grid truth: no chromosome fits exactly

    hits = 0
    for seed in range(20):
        config = ga.GAConfig(
            population_size=60,
            max_generations=500,
            stall_generations=500,
            target_fitness=oracle,
            seed=seed,
        )
        best, _ = ga.run(data, layout, config, windows=windows)
        hits += best.fitness == oracle
    elapsed = time.perf_counter() - t0
    _verdict(
        "exhaustive-minimum match",
        hits >= 18 and elapsed < 20.0,
        f"{hits}/20, {elapsed:.1f}s",
    )


# ---------------------------------------------------------------------------
# three-sinusoid recovery at L=500


REC_A = ParameterSpec("a", 0.0, 2.0, 2.0 / 1023)  # 10 bits
REC_F = ParameterSpec("f", 0.0, 0.125, 0.125 / 15)  # 4 bits
REC_PHI = ParameterSpec("phi", 0.0, TWO_PI * 1023 / 1024, TWO_PI / 1024)  # 10 bits
REC_SPECS = ComponentSpecs(a=REC_A, f=REC_F, phi=REC_PHI)


def _rec_level(spec: ParameterSpec, v: int) -> float:
    return decode_level(v, spec, bit_count(spec))


# on-grid levels; windows overlap on [124, 187] only
REC_TRUTH = (
    SinusoidalComponent(_rec_level(REC_A, 512), _rec_level(REC_F, 5), _rec_level(REC_PHI, 341), 62, 187),
    SinusoidalComponent(_rec_level(REC_A, 512), _rec_level(REC_F, 10), _rec_level(REC_PHI, 682), 124, 249),
    SinusoidalComponent(_rec_level(REC_A, 512), _rec_level(REC_F, 13), _rec_level(REC_PHI, 597), 312, 437),
)
REC_DATA = synthesize(REC_TRUTH, Grid(0.0, 1.0, 500))
REC_MASS = float(np.abs(REC_DATA.values).sum())


def _phase_distance(x: float, y: float) -> float:
    d = abs(x - y) % TWO_PI
    return min(d, TWO_PI - d)


def _recovered(result) -> bool:
    if len(result.components) != 3:
        return False
    got = sorted(result.components, key=lambda c: c.f)
    want = sorted(REC_TRUTH, key=lambda c: c.f)
    for g, w in zip(got, want):
        if abs(g.a - w.a) > REC_A.step * (1 + 1e-9):
            return False
        if abs(g.f - w.f) > REC_F.step * (1 + 1e-9):
            return False
        if _phase_distance(g.phi, w.phi) > REC_PHI.step * (1 + 1e-9):
            return False
        if abs(g.t_start - w.t_start) > 2 or abs(g.t_end - w.t_end) > 2:
            return False
    return result.final_fitness <= 0.01 * REC_MASS


@pytest.fixture(scope="module")
def recovery_runs(tmp_path_factory):
    out = tmp_path_factory.mktemp("recovery")
    runs = []
    t0 = time.perf_counter()
    for seed in range(10):
        config = ga.GAConfig(
            population_size=600,
            max_generations=3000,
            stall_generations=3000,
            target_fitness=0.2,
            seed=seed,
        )
        result = decompose_fixed(REC_DATA, 3, specs=REC_SPECS, ga_config=config)
        trace_path = out / f"trace_{seed}.csv"
        emit_trace(result.trace, trace_path)
        runs.append((result, trace_path, _recovered(result)))
    return runs, time.perf_counter() - t0


def test_overlapping_sinusoid_recovery(recovery_runs):
    runs, elapsed = recovery_runs
    wins = sum(ok for _, _, ok in runs)
    _verdict(
        "three-sinusoid recovery",
        wins >= 7 and elapsed < 300.0,
        f"{wins}/10, {elapsed:.0f}s",
    )


def test_trace_terminal_row_equals_result(recovery_runs):
    runs, _ = recovery_runs
    checked = 0
    for result, trace_path, ok in runs:
        if not ok:
            continue
        checked += 1
        lines = trace_path.read_text().splitlines()
        header = lines[0].split(",")
        last = lines[-1].split(",")
        row = dict(zip(header, last))
        for n, c in enumerate(result.components, start=1):
            assert float(row[f"a_{n}"]) == c.a
            assert float(row[f"f_{n}"]) == c.f
            assert float(row[f"phi_{n}"]) == c.phi
            assert int(row[f"tstart_{n}"]) == c.t_start
            assert int(row[f"tend_{n}"]) == c.t_end
    _verdict("trace terminal equals result", checked >= 7, f"{checked} traces")


# ---------------------------------------------------------------------------
# adaptive mode at L=48


ADAPT_A = ParameterSpec("a", 0.0, 1.2, 1.2)  # 1 bit
ADAPT_F = ParameterSpec("f", 0.0, 0.5, 0.5 / 7)  # 3 bits
ADAPT_PHI = ParameterSpec("phi", 0.0, TWO_PI * 7 / 8, TWO_PI / 8)  # 3 bits
ADAPT_SPECS = ComponentSpecs(a=ADAPT_A, f=ADAPT_F, phi=ADAPT_PHI)
ADAPT_INNER = ga.GAConfig(
    population_size=16, max_generations=30, stall_generations=30, seed=0
)


def test_adaptive_window_recovery_and_empty_series():
    truth = SinusoidalComponent(
        _rec_level(ADAPT_A, 1), _rec_level(ADAPT_F, 2), _rec_level(ADAPT_PHI, 2), 16, 31
    )
    data = synthesize([truth], Grid(0.0, 1.0, 48))
    t0 = time.perf_counter()

    window_hits = 0
    for seed in range(10):
        outer = ga.GAConfig(
            population_size=80,
            max_generations=200,
            stall_generations=80,
            target_fitness=6.0,
            seed=seed,
        )
        result = decompose_adaptive(
            data, 2, specs=ADAPT_SPECS, inner_config=ADAPT_INNER,
            outer_config=outer, penalty=5.0,
        )
        windows = profile_to_windows(result.profile)
        if len(windows) == 1:
            ts, te = windows[0]
            window_hits += abs(ts - truth.t_start) <= 2 and abs(te - truth.t_end) <= 2

    zeros = synthesize([], Grid(0.0, 1.0, 48))
    empty_hits = 0
    for seed in range(10):
        outer = ga.GAConfig(
            population_size=40,
            max_generations=120,
            stall_generations=60,
            target_fitness=0.0,
            seed=seed,
        )
        result = decompose_adaptive(
            zeros, 2, specs=ADAPT_SPECS, inner_config=ADAPT_INNER,
            outer_config=outer, penalty=25.0,
        )
        empty_hits += (
            result.components == ()
            and result.final_fitness == 0.0
            and not result.profile.counts.any()
        )

    elapsed = time.perf_counter() - t0
    _verdict(
        "adaptive window recovery + empty series",
        window_hits >= 6 and empty_hits == 10 and elapsed < 300.0,
        f"windows {window_hits}/10, empty {empty_hits}/10, {elapsed:.0f}s",
    )


# ---------------------------------------------------------------------------
# synth -> decompose -> re-read pipeline


def test_pipeline_fitness_round_trip(tmp_path):
    series_csv = tmp_path / "series.csv"
    result_json = tmp_path / "result.json"
    assert cli_main([
        "synth", "--length", "200", "--dt", "1.0",
        "--component", "1.0,0.05,0.5,20,150",
        "--component", "0.6,0.11,2.0,60,199",
        "--noise", "0.02", "--seed", "3", "--out", str(series_csv),
    ]) == 0
    assert cli_main([
        "decompose", "--input", str(series_csv), "--mode", "fixed", "--n", "2",
        "--pop", "40", "--generations", "120", "--stall", "120",
        "--seed", "1", "--out", str(result_json),
    ]) == 0

    components, stored, _ = read_result(result_json)
    data = load_series(series_csv)
    recomputed = fitness(components, data)
    ok = stored > 0.0 and abs(recomputed - stored) <= 1e-12 * abs(stored)
    _verdict("pipeline fitness round trip", ok, f"stored={stored:.6f}")
