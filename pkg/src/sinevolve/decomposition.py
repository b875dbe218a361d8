"""Decomposition drivers.

Fixed mode searches the parameters of a given number of windowed sinusoids.
Adaptive mode additionally searches how many components are active at each
sample: an outer genetic search evolves a per-sample count profile, each
candidate profile is expanded into component windows by the layer rule, and
an inner (window-fixed) search fits the sinusoid parameters.  Inner fits
are memoized on the window multiset, with per-window-set derived seeds so
results do not depend on evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import ga
from .encoding import ParameterSpec, decode_components, fixed_window_layout, sinusoid_layout
from .signal_model import (
    TWO_PI,
    SinusoidalComponent,
    TimeSeries,
    component_value,
    fitness,
)


@dataclass(frozen=True)
class CountProfile:
    """Number of simultaneously active components at each sample."""

    counts: np.ndarray = field(repr=False)
    n_max: int

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 1 or counts.size == 0:
            raise ValueError("counts must be a non-empty 1-d sequence")
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")
        if counts.min() < 0 or counts.max() > self.n_max:
            raise ValueError(f"counts must lie in [0, {self.n_max}]")
        counts.flags.writeable = False
        object.__setattr__(self, "counts", counts)

    def __len__(self) -> int:
        return self.counts.size


@dataclass(frozen=True)
class ComponentSpecs:
    """Encoding bounds for the three sinusoid parameters."""

    a: ParameterSpec
    f: ParameterSpec
    phi: ParameterSpec

    @classmethod
    def from_series(
        cls,
        data: TimeSeries,
        amp_levels: int = 512,
        freq_levels: int = 1024,
        phase_levels: int = 256,
    ) -> ComponentSpecs:
        """Data-driven defaults.

        Amplitude spans [0, 2*max|R|] (unit range when the data is all
        zeros), frequency [0, Nyquist], phase one full turn on a
        phase_levels grid with the duplicate 2*pi endpoint left out.
        """
        peak = float(np.abs(data.values).max())
        if peak == 0.0:
            peak = 0.5
        nyquist = 1.0 / (2.0 * data.dt)
        phase_step = TWO_PI / phase_levels
        return cls(
            a=ParameterSpec("a", 0.0, 2.0 * peak, peak / amp_levels),
            f=ParameterSpec("f", 0.0, nyquist, nyquist / freq_levels),
            phi=ParameterSpec("phi", 0.0, TWO_PI - phase_step, phase_step),
        )


@dataclass(frozen=True)
class DecompositionResult:
    """Canonical decomposition: every component contributes to the model.

    A component whose windowed values are identically zero on the grid
    (zero amplitude, or a zero crossing at every sample, e.g. f=0 with
    sin(phi)=0) is the additive identity, so the drivers drop it before
    reporting; profile counts the returned components covering each
    sample.
    """

    components: tuple[SinusoidalComponent, ...]
    final_fitness: float
    trace: ga.ConvergenceTrace
    profile: CountProfile


def _contributes(c: SinusoidalComponent, dt: float) -> bool:
    if c.a == 0.0:
        return False
    return any(
        component_value(c, t, dt) != 0.0 for t in range(c.t_start, c.t_end + 1)
    )


def _canonical(components, dt: float) -> tuple[SinusoidalComponent, ...]:
    return tuple(c for c in components if _contributes(c, dt))


def profile_to_windows(profile: CountProfile) -> list[tuple[int, int]]:
    """Expand a count profile into component windows, one per layer run.

    For each layer k = 1..n_max, every maximal run of consecutive samples
    with count >= k becomes one (start, end) window; windows are emitted
    in (layer, start) order.
    """
    windows: list[tuple[int, int]] = []
    for k in range(1, profile.n_max + 1):
        active = np.concatenate(([False], profile.counts >= k, [False]))
        edges = np.flatnonzero(np.diff(active.astype(np.int8)))
        for start, stop in zip(edges[0::2], edges[1::2]):
            windows.append((int(start), int(stop) - 1))
    return windows


def windows_to_profile(
    windows, n_samples: int, n_max: int | None = None
) -> CountProfile:
    """Count, at each sample, how many windows contain it."""
    counts = np.zeros(n_samples, dtype=np.int64)
    for ts, te in windows:
        if not (0 <= ts <= te <= n_samples - 1):
            raise ValueError(f"window [{ts}, {te}] out of range for {n_samples} samples")
        counts[ts : te + 1] += 1
    if n_max is None:
        n_max = max(1, int(counts.max()))
    return CountProfile(counts, n_max)


def decompose_fixed(
    data: TimeSeries,
    n_components: int,
    specs: ComponentSpecs | None = None,
    ga_config: ga.GAConfig | None = None,
    metric: str = "l1",
) -> DecompositionResult:
    """Fit exactly n_components windowed sinusoids to the data.

    The reported final_fitness is re-evaluated through the reference
    fitness so it is exactly reproducible from the returned components.
    """
    if n_components < 1:
        raise ValueError(f"n_components must be >= 1, got {n_components}")
    if specs is None:
        specs = ComponentSpecs.from_series(data)
    if ga_config is None:
        ga_config = ga.GAConfig()
    layout = sinusoid_layout(n_components, len(data), specs.a, specs.f, specs.phi)
    best, trace = ga.run(data, layout, ga_config, metric=metric)
    components = _canonical(decode_components(best.bits, layout), data.dt)
    final = fitness(components, data, metric)
    profile = windows_to_profile(
        [c.window for c in components], len(data), n_max=n_components
    )
    return DecompositionResult(components, final, trace, profile)


def count_field_bits(n_max: int) -> int:
    """Bits per count field: enough codes for the integers 0..n_max."""
    return max(1, math.ceil(math.log2(n_max + 1)))


def decode_counts(bits: np.ndarray, n_samples: int, n_max: int) -> np.ndarray:
    """Decode an outer chromosome into per-sample counts (clamped to n_max)."""
    width = count_field_bits(n_max)
    weights = np.left_shift(np.int64(1), np.arange(width - 1, -1, -1, dtype=np.int64))
    values = bits.reshape(n_samples, width).astype(np.int64) @ weights
    return np.minimum(values, n_max)


def default_window_penalty(data: TimeSeries) -> float:
    """Per-window complexity penalty: 1e-3 of the mean absolute signal.

    Floored at 1e-3 so the empty profile stays strictly optimal on all-zero
    data.
    """
    base = float(np.abs(data.values).mean())
    return 1e-3 * base if base > 0.0 else 1e-3


def _derive_seed(base_seed: int, windows_key: tuple[tuple[int, int], ...]) -> int:
    flat = [base_seed]
    for ts, te in windows_key:
        flat.extend((ts, te))
    return int(np.random.SeedSequence(flat).generate_state(1, dtype=np.uint64)[0])


def make_profile_evaluator(
    data: TimeSeries,
    n_max: int,
    specs: ComponentSpecs,
    inner_config: ga.GAConfig,
    penalty: float,
    metric: str = "l1",
):
    """Outer-search fitness over count-profile chromosomes.

    Returns (evaluate, describe, inner_fit): `evaluate` scores a batch of
    outer chromosomes as inner best fitness plus penalty per window,
    `describe` yields the memoized inner components for the trace, and
    `inner_fit` exposes the memoized per-window-set fit for reuse.
    """
    n_samples = len(data)
    empty_fitness = fitness((), data, metric)
    memo: dict[tuple[tuple[int, int], ...], tuple[float, tuple[SinusoidalComponent, ...]]] = {}

    def inner_fit(windows_key):
        hit = memo.get(windows_key)
        if hit is not None:
            return hit
        if not windows_key:
            result = (empty_fitness, ())
        else:
            layout = fixed_window_layout(len(windows_key), specs.a, specs.f, specs.phi)
            cfg = replace(inner_config, seed=_derive_seed(inner_config.seed, windows_key))
            best, _ = ga.run(data, layout, cfg, windows=list(windows_key), metric=metric)
            components = decode_components(best.bits, layout, list(windows_key))
            result = (best.fitness, components)
        memo[windows_key] = result
        return result

    def windows_of(bits: np.ndarray) -> tuple[tuple[int, int], ...]:
        counts = decode_counts(bits, n_samples, n_max)
        return tuple(profile_to_windows(CountProfile(counts, n_max)))

    def evaluate(bits_matrix: np.ndarray) -> np.ndarray:
        out = np.empty(bits_matrix.shape[0])
        for i in range(bits_matrix.shape[0]):
            key = windows_of(bits_matrix[i])
            out[i] = inner_fit(key)[0] + penalty * len(key)
        return out

    def describe(bits: np.ndarray) -> tuple[SinusoidalComponent, ...]:
        return inner_fit(windows_of(bits))[1]

    return evaluate, describe, inner_fit


def decompose_adaptive(
    data: TimeSeries,
    n_max: int,
    specs: ComponentSpecs | None = None,
    inner_config: ga.GAConfig | None = None,
    outer_config: ga.GAConfig | None = None,
    penalty: float | None = None,
    metric: str = "l1",
) -> DecompositionResult:
    """Search the per-sample component count along with the parameters.

    The outer chromosome encodes one count field per sample; candidate
    profiles are expanded to windows by the layer rule and fitted by a
    reduced-budget inner search (windows held fixed, so inner chromosomes
    carry no window fields).  The reported profile counts the returned
    (contributing) components, so on all-zero data a well-fitted run comes
    back empty even if the count search kept some spare windows.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    if specs is None:
        specs = ComponentSpecs.from_series(data)
    if inner_config is None:
        inner_config = ga.GAConfig(
            population_size=40, max_generations=200, stall_generations=50
        )
    if outer_config is None:
        outer_config = ga.GAConfig(
            population_size=40, max_generations=150, stall_generations=60
        )
    if penalty is None:
        penalty = default_window_penalty(data)

    n_samples = len(data)
    evaluate, describe, inner_fit = make_profile_evaluator(
        data, n_max, specs, inner_config, penalty, metric
    )
    n_bits = n_samples * count_field_bits(n_max)
    best, trace = ga.evolve(n_bits, outer_config, evaluate, describe)

    counts = decode_counts(best.bits, n_samples, n_max)
    best_windows = profile_to_windows(CountProfile(counts, n_max))
    components = _canonical(inner_fit(tuple(best_windows))[1], data.dt)
    final = fitness(components, data, metric)
    profile = windows_to_profile([c.window for c in components], n_samples, n_max)
    return DecompositionResult(components, final, trace, profile)
