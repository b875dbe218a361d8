"""Windowed sinusoidal signal model.

A signal is modeled as a superposition of sinusoids, each contributing
only between its start and end sample (hard rectangular window):

    value(t) = sum_n  a_n * sin(2*pi*f_n * (t*dt) + phi_n)   for t in [t_start_n, t_end_n]

Everything here is a pure function over immutable values; these are the
reference implementations that the fast evaluation kernels are checked
against.  Sums are accumulated left to right in sample order so results
are reproducible to the last bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Grid:
    """Uniform sample grid: t0 + i*dt for i in range(n)."""

    t0: float
    dt: float
    n: int

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.n < 1:
            raise ValueError(f"grid needs at least one sample, got n={self.n}")


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled real-valued signal."""

    t0: float
    dt: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("values must be a non-empty 1-d sequence")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    @property
    def grid(self) -> Grid:
        return Grid(self.t0, self.dt, self.values.size)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.values.size) * self.dt


def normalize_phase(phi: float) -> float:
    """Map a phase angle into [0, 2*pi)."""
    return float(phi) % TWO_PI


@dataclass(frozen=True)
class SinusoidalComponent:
    """One windowed sinusoid.

    The phase is normalized into [0, 2*pi) on construction and is defined
    relative to t=0 of the sample grid (t0 is a display offset only).
    """

    a: float
    f: float
    phi: float
    t_start: int
    t_end: int

    def __post_init__(self):
        if self.a < 0:
            raise ValueError(f"amplitude must be non-negative, got {self.a}")
        if self.f < 0:
            raise ValueError(f"frequency must be non-negative, got {self.f}")
        if not (0 <= self.t_start <= self.t_end):
            raise ValueError(
                f"window must satisfy 0 <= t_start <= t_end, got [{self.t_start}, {self.t_end}]"
            )
        object.__setattr__(self, "phi", normalize_phase(self.phi))
        object.__setattr__(self, "t_start", int(self.t_start))
        object.__setattr__(self, "t_end", int(self.t_end))

    @property
    def window(self) -> tuple[int, int]:
        return (self.t_start, self.t_end)


@dataclass(frozen=True)
class InstantaneousProfile:
    """Per-sample (amplitude, angular frequency) pairs of active components."""

    pairs: tuple[tuple[tuple[float, float], ...], ...]

    def __len__(self) -> int:
        return len(self.pairs)

    def count_at(self, t: int) -> int:
        return len(self.pairs[t])


def component_value(c: SinusoidalComponent, t: int, dt: float) -> float:
    """Contribution of one component at sample index t (0 outside its window)."""
    if t < c.t_start or t > c.t_end:
        return 0.0
    return c.a * math.sin(TWO_PI * c.f * (t * dt) + c.phi)


def _check_windows(components, n: int):
    for i, c in enumerate(components):
        if c.t_end > n - 1:
            raise ValueError(
                f"component {i} window [{c.t_start}, {c.t_end}] exceeds grid of {n} samples"
            )


def synthesize(components, grid: Grid) -> TimeSeries:
    """Superpose windowed sinusoids onto a uniform grid.

    Linear in the component list: synthesizing A + B equals the pointwise
    sum of synthesizing A and B separately (up to float rounding when
    windows overlap).
    """
    _check_windows(components, grid.n)
    out = np.zeros(grid.n)
    dt = grid.dt
    for c in components:
        w = TWO_PI * c.f
        for t in range(c.t_start, c.t_end + 1):
            out[t] += c.a * math.sin(w * (t * dt) + c.phi)
    return TimeSeries(grid.t0, grid.dt, out)


def residual(components, data: TimeSeries) -> TimeSeries:
    """Model minus data, pointwise, on the data's grid."""
    model = synthesize(components, data.grid)
    return TimeSeries(data.t0, data.dt, model.values - data.values)


def fitness(components, data: TimeSeries, metric: str = "l1") -> float:
    """Mismatch score between the component model and the data.

    "l1" sums absolute residuals (the default; 0 means exact fit at every
    sample), "l2" sums squared residuals.  Accumulation is sequential in
    sample order.
    """
    diff = residual(components, data).values.tolist()
    total = 0.0
    if metric == "l1":
        for d in diff:
            total += abs(d)
    elif metric == "l2":
        for d in diff:
            total += d * d
    else:
        raise ValueError(f"unknown metric {metric!r}, expected 'l1' or 'l2'")
    return total


def instantaneous_profile(components, grid: Grid) -> InstantaneousProfile:
    """Per-sample view of the active components.

    At each sample index the profile lists one (amplitude, angular
    frequency) pair per component whose window contains the index, in
    component-list order.  Angular frequency is 2*pi*f.
    """
    _check_windows(components, grid.n)
    pairs = []
    for t in range(grid.n):
        at_t = tuple(
            (c.a, TWO_PI * c.f) for c in components if c.t_start <= t <= c.t_end
        )
        pairs.append(at_t)
    return InstantaneousProfile(tuple(pairs))
