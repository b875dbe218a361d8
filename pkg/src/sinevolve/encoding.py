"""Binary chromosome encoding of sinusoid parameter sets.

Each real parameter gets a fixed-width unsigned binary field (MSB first)
mapped affinely onto [lb, ub].  A chromosome concatenates one field group
per sinusoid component; the group order is fixed: amplitude, frequency,
phase, then (unless windows are supplied externally) start and end sample.

Chromosomes are numpy uint8 arrays of 0/1 values, treated as immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .signal_model import SinusoidalComponent, normalize_phase

FIELD_NAMES = ("a", "f", "phi", "t_start", "t_end")
FIELD_NAMES_FIXED_WINDOW = ("a", "f", "phi")


@dataclass(frozen=True)
class ParameterSpec:
    """Bounds and requested resolution of one encoded parameter.

    `step` is the requested resolution; the achievable grid spacing is
    (ub - lb) / (2**width - 1), which is never coarser than `step`, and
    the guaranteed decode accuracy is half that spacing.
    """

    name: str
    lb: float
    ub: float
    step: float

    def __post_init__(self):
        if not self.ub > self.lb:
            raise ValueError(f"{self.name}: upper bound {self.ub} must exceed lower bound {self.lb}")
        if not self.step > 0:
            raise ValueError(f"{self.name}: step must be positive, got {self.step}")
        if self.step > self.ub - self.lb:
            raise ValueError(
                f"{self.name}: step {self.step} exceeds the range {self.ub - self.lb}"
            )

    @property
    def span(self) -> float:
        return self.ub - self.lb


def bit_count(spec: ParameterSpec) -> int:
    """Field width in bits: the smallest b with (2**b - 1) * step >= ub - lb."""
    ratio = spec.span / spec.step
    b = max(1, math.ceil(math.log2(ratio + 1.0)))
    # log2 can land one off at representation boundaries; settle by direct test
    while ((1 << b) - 1) * spec.step < spec.span:
        b += 1
    while b > 1 and ((1 << (b - 1)) - 1) * spec.step >= spec.span:
        b -= 1
    return b


@dataclass(frozen=True)
class LayoutField:
    spec: ParameterSpec
    width: int
    offset: int


@dataclass(frozen=True)
class ChromosomeLayout:
    """Bit-field map: n_components repetitions of a fixed parameter group."""

    fields: tuple[LayoutField, ...]
    total_bits: int
    n_components: int
    fields_per_component: int

    @property
    def has_window_fields(self) -> bool:
        return self.fields_per_component == len(FIELD_NAMES)

    def component_fields(self, i: int) -> tuple[LayoutField, ...]:
        k = self.fields_per_component
        return self.fields[i * k : (i + 1) * k]


def build_layout(group: list[ParameterSpec] | tuple[ParameterSpec, ...], n_components: int) -> ChromosomeLayout:
    """Concatenate n_components repetitions of the field group, offsets in order."""
    if n_components < 1:
        raise ValueError(f"need at least one component, got {n_components}")
    if not group:
        raise ValueError("field group must not be empty")
    fields = []
    offset = 0
    for _ in range(n_components):
        for spec in group:
            width = bit_count(spec)
            fields.append(LayoutField(spec, width, offset))
            offset += width
    return ChromosomeLayout(tuple(fields), offset, n_components, len(group))


def sinusoid_layout(
    n_components: int,
    n_samples: int,
    a: ParameterSpec,
    f: ParameterSpec,
    phi: ParameterSpec,
    t_step: float = 1.0,
) -> ChromosomeLayout:
    """Standard layout: (a, f, phi, t_start, t_end) per component.

    Window fields cover [0, n_samples - 1]; a coarser t_step trades window
    resolution for chromosome length.
    """
    _check_sinusoid_specs(a, f)
    if n_samples < 2:
        raise ValueError("window fields need at least two samples")
    group = (
        _renamed(a, "a"),
        _renamed(f, "f"),
        _renamed(phi, "phi"),
        ParameterSpec("t_start", 0.0, float(n_samples - 1), t_step),
        ParameterSpec("t_end", 0.0, float(n_samples - 1), t_step),
    )
    return build_layout(group, n_components)


def fixed_window_layout(
    n_components: int,
    a: ParameterSpec,
    f: ParameterSpec,
    phi: ParameterSpec,
) -> ChromosomeLayout:
    """Layout without window fields, for use with externally supplied windows."""
    _check_sinusoid_specs(a, f)
    group = (_renamed(a, "a"), _renamed(f, "f"), _renamed(phi, "phi"))
    return build_layout(group, n_components)


def _renamed(spec: ParameterSpec, name: str) -> ParameterSpec:
    if spec.name == name:
        return spec
    return ParameterSpec(name, spec.lb, spec.ub, spec.step)


def _check_sinusoid_specs(a: ParameterSpec, f: ParameterSpec):
    if a.lb < 0:
        raise ValueError(f"amplitude lower bound must be >= 0, got {a.lb}")
    if f.lb < 0:
        raise ValueError(f"frequency lower bound must be >= 0, got {f.lb}")


def decode_field(bits: np.ndarray, spec: ParameterSpec) -> float:
    """Decode an MSB-first bit field to its real value.

    All-zeros decodes to lb and all-ones to ub exactly; interior codes map
    affinely with grid spacing (ub - lb) / (2**l - 1).
    """
    l = len(bits)
    expected = bit_count(spec)
    if l != expected:
        raise ValueError(f"{spec.name}: expected {expected} bits, got {l}")
    v = 0
    for b in bits:
        v = (v << 1) | int(b)
    return decode_level(v, spec, l)


def decode_level(v: int, spec: ParameterSpec, width: int) -> float:
    """Decode an unsigned level v in [0, 2**width - 1]."""
    vmax = (1 << width) - 1
    if v == 0:
        return spec.lb
    if v == vmax:
        return spec.ub
    scale = spec.span / vmax
    return spec.lb + scale * v


def encode_field(x: float, spec: ParameterSpec) -> np.ndarray:
    """Encode a real value to the nearest grid level, MSB first.

    Ties round half away from zero.
    """
    if not (spec.lb <= x <= spec.ub):
        raise ValueError(f"{spec.name}: value {x} outside [{spec.lb}, {spec.ub}]")
    width = bit_count(spec)
    vmax = (1 << width) - 1
    v = int(math.floor((x - spec.lb) * vmax / spec.span + 0.5))
    v = min(max(v, 0), vmax)
    bits = np.zeros(width, dtype=np.uint8)
    for k in range(width):
        bits[width - 1 - k] = (v >> k) & 1
    return bits


def round_to_sample(x: float) -> int:
    """Nearest sample index, ties toward +inf (matches the kernels)."""
    return int(math.floor(x + 0.5))


def decode_components(
    chromosome: np.ndarray,
    layout: ChromosomeLayout,
    windows: list[tuple[int, int]] | None = None,
) -> tuple[SinusoidalComponent, ...]:
    """Decode every field and assemble the component list.

    Window fields are rounded to the nearest sample index; an inverted
    window (t_start > t_end) is repaired by swapping so every chromosome
    stays feasible.  Layouts without window fields take `windows` instead,
    one (t_start, t_end) pair per component.
    """
    if len(chromosome) != layout.total_bits:
        raise ValueError(
            f"chromosome has {len(chromosome)} bits, layout expects {layout.total_bits}"
        )
    if layout.has_window_fields:
        if windows is not None:
            raise ValueError("layout already encodes windows")
    elif windows is None or len(windows) != layout.n_components:
        raise ValueError(f"need {layout.n_components} windows for this layout")

    components = []
    for i in range(layout.n_components):
        values = {}
        for fld in layout.component_fields(i):
            segment = chromosome[fld.offset : fld.offset + fld.width]
            values[fld.spec.name] = decode_field(segment, fld.spec)
        if layout.has_window_fields:
            ts = round_to_sample(values["t_start"])
            te = round_to_sample(values["t_end"])
            if ts > te:
                ts, te = te, ts
        else:
            ts, te = windows[i]
        components.append(
            SinusoidalComponent(
                a=values["a"],
                f=values["f"],
                phi=normalize_phase(values["phi"]),
                t_start=ts,
                t_end=te,
            )
        )
    return tuple(components)


def encode_components(components, layout: ChromosomeLayout) -> np.ndarray:
    """Inverse of decode_components, up to quantization."""
    if len(components) != layout.n_components:
        raise ValueError(f"expected {layout.n_components} components, got {len(components)}")
    bits = np.zeros(layout.total_bits, dtype=np.uint8)
    for i, c in enumerate(components):
        values = {"a": c.a, "f": c.f, "phi": c.phi, "t_start": float(c.t_start), "t_end": float(c.t_end)}
        for fld in layout.component_fields(i):
            segment = encode_field(values[fld.spec.name], fld.spec)
            bits[fld.offset : fld.offset + fld.width] = segment
    return bits
