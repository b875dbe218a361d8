"""Shared builders for small on-grid test problems."""

from __future__ import annotations

import numpy as np

from sinevolve.encoding import ParameterSpec, bit_count, decode_level
from sinevolve.signal_model import TWO_PI, Grid, SinusoidalComponent, synthesize


def tiny_specs() -> tuple[ParameterSpec, ParameterSpec, ParameterSpec]:
    """Coarse bounds: 2-bit amplitude, 3-bit frequency, 3-bit phase."""
    a = ParameterSpec("a", 0.0, 1.5, 0.5)
    f = ParameterSpec("f", 0.0, 0.5, 0.5 / 7)
    phi = ParameterSpec("phi", 0.0, TWO_PI * 7 / 8, TWO_PI / 8)
    return a, f, phi


def level(spec: ParameterSpec, v: int) -> float:
    """The exact decoded value of integer level v under spec's bit width."""
    return decode_level(v, spec, bit_count(spec))


def grid_component(a_spec, f_spec, phi_spec, la, lf, lphi, t_start, t_end):
    """A component whose a/f/phi sit exactly on the encoding grid."""
    return SinusoidalComponent(
        level(a_spec, la), level(f_spec, lf), level(phi_spec, lphi), t_start, t_end
    )


def on_grid_series(n: int, component: SinusoidalComponent, dt: float = 1.0):
    return synthesize([component], Grid(0.0, dt, n))


def enumerate_chromosomes(total_bits: int) -> np.ndarray:
    """Every bit pattern of the given width, MSB first, one per row."""
    if total_bits > 20:
        raise ValueError("enumeration capped at 20 bits")
    codes = np.arange(1 << total_bits, dtype=np.int64)
    shifts = np.arange(total_bits - 1, -1, -1, dtype=np.int64)
    return ((codes[:, None] >> shifts) & 1).astype(np.uint8)
