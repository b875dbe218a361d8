"""Population evaluation kernels.

The genetic search spends nearly all of its time decoding chromosomes and
scoring the decoded sinusoids against the data, so that path is fused into
a single kernel: bits -> parameters -> windowed synthesis -> residual sum.

Two interchangeable backends exist.  The compiled Cython core is selected
at import when the extension was built; otherwise a vectorized NumPy
fallback takes over.  Set SINEVOLVE_KERNEL=python (or =compiled) to force
one.  The compiled core mirrors the reference implementations in
signal_model/encoding operation for operation (same libm sin, same
sequential sums); the NumPy fallback agrees to ~1e-12 relative because it
uses NumPy's sin and pairwise summation.  Within one backend every result
is bit-reproducible.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from ..encoding import (
    FIELD_NAMES,
    FIELD_NAMES_FIXED_WINDOW,
    ChromosomeLayout,
)
from . import _pure

try:
    from . import _core

    HAVE_COMPILED = True
except ImportError:
    _core = None
    HAVE_COMPILED = False


def _select_backend() -> str:
    choice = os.environ.get("SINEVOLVE_KERNEL", "auto").lower()
    if choice not in ("auto", "compiled", "python"):
        raise ValueError(f"SINEVOLVE_KERNEL must be auto, compiled or python, got {choice!r}")
    if choice == "compiled" and not HAVE_COMPILED:
        raise ImportError("SINEVOLVE_KERNEL=compiled but the extension is not built")
    if choice == "auto":
        return "compiled" if HAVE_COMPILED else "python"
    return choice


ACTIVE_BACKEND = _select_backend()

_METRIC_CODES = {"l1": 0, "l2": 1}

_MAX_FIELD_BITS = 62


@dataclass(frozen=True)
class DecodePlan:
    """Flattened field tables driving the kernels, built from a layout."""

    offsets: np.ndarray
    widths: np.ndarray
    lbs: np.ndarray
    ubs: np.ndarray
    scales: np.ndarray
    vmaxs: np.ndarray
    fields_per_component: int
    n_components: int
    windows: np.ndarray
    n_samples: int
    total_bits: int


def make_plan(
    layout: ChromosomeLayout,
    n_samples: int,
    windows: list[tuple[int, int]] | None = None,
) -> DecodePlan:
    """Prepare kernel tables for evaluating chromosomes of `layout` on a grid.

    Layouts with window fields must keep them inside [0, n_samples - 1];
    layouts without them need one (t_start, t_end) pair per component.
    """
    expected = FIELD_NAMES if layout.has_window_fields else FIELD_NAMES_FIXED_WINDOW
    names = tuple(f.spec.name for f in layout.component_fields(0))
    if names != expected:
        raise ValueError(f"layout field group {names} does not match {expected}")

    if layout.has_window_fields:
        if windows is not None:
            raise ValueError("layout already encodes windows")
        win = np.zeros((layout.n_components, 2), dtype=np.int64)
        for fld in layout.fields:
            if fld.spec.name in ("t_start", "t_end"):
                if fld.spec.lb < 0 or fld.spec.ub > n_samples - 1:
                    raise ValueError(
                        f"{fld.spec.name} bounds [{fld.spec.lb}, {fld.spec.ub}] "
                        f"exceed the grid of {n_samples} samples"
                    )
    else:
        if windows is None or len(windows) != layout.n_components:
            raise ValueError(f"need {layout.n_components} windows for this layout")
        win = np.asarray(windows, dtype=np.int64).reshape(layout.n_components, 2)
        if win.size and (win.min() < 0 or win.max() > n_samples - 1):
            raise ValueError("window out of range")
        if (win[:, 0] > win[:, 1]).any():
            raise ValueError("window has t_start > t_end")

    n_fields = len(layout.fields)
    offsets = np.empty(n_fields, dtype=np.int64)
    widths = np.empty(n_fields, dtype=np.int64)
    lbs = np.empty(n_fields)
    ubs = np.empty(n_fields)
    scales = np.empty(n_fields)
    vmaxs = np.empty(n_fields, dtype=np.int64)
    for j, fld in enumerate(layout.fields):
        if fld.width > _MAX_FIELD_BITS:
            raise ValueError(f"{fld.spec.name}: {fld.width}-bit field exceeds kernel limit")
        offsets[j] = fld.offset
        widths[j] = fld.width
        lbs[j] = fld.spec.lb
        ubs[j] = fld.spec.ub
        vmaxs[j] = (1 << fld.width) - 1
        scales[j] = fld.spec.span / vmaxs[j]
    for arr in (offsets, widths, lbs, ubs, scales, vmaxs, win):
        arr.flags.writeable = False
    return DecodePlan(
        offsets=offsets,
        widths=widths,
        lbs=lbs,
        ubs=ubs,
        scales=scales,
        vmaxs=vmaxs,
        fields_per_component=layout.fields_per_component,
        n_components=layout.n_components,
        windows=win,
        n_samples=n_samples,
        total_bits=layout.total_bits,
    )


def evaluate_population(
    bits: np.ndarray,
    plan: DecodePlan,
    data: np.ndarray,
    dt: float,
    metric: str = "l1",
    backend: str | None = None,
) -> np.ndarray:
    """Fitness of every chromosome row against `data`.

    `bits` is a (population, total_bits) uint8 matrix of 0/1 values;
    returns a float64 vector of residual sums (absolute for "l1",
    squared for "l2").
    """
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    if bits.ndim != 2 or bits.shape[1] != plan.total_bits:
        raise ValueError(f"bits must be (P, {plan.total_bits}), got {bits.shape}")
    data = np.ascontiguousarray(data, dtype=np.float64)
    if data.shape != (plan.n_samples,):
        raise ValueError(f"data must have {plan.n_samples} samples, got {data.shape}")
    code = _METRIC_CODES.get(metric)
    if code is None:
        raise ValueError(f"unknown metric {metric!r}, expected 'l1' or 'l2'")
    which = backend or ACTIVE_BACKEND
    if which == "compiled":
        if not HAVE_COMPILED:
            raise ImportError("compiled kernel requested but the extension is not built")
        out = np.empty(bits.shape[0])
        _core.evaluate(
            bits,
            plan.offsets,
            plan.widths,
            plan.lbs,
            plan.ubs,
            plan.scales,
            plan.fields_per_component,
            plan.n_components,
            plan.windows,
            data,
            dt,
            code,
            out,
        )
        return out
    if which == "python":
        return _pure.evaluate(bits, plan, data, dt, code)
    raise ValueError(f"unknown backend {which!r}")
