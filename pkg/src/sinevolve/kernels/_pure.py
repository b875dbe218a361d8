"""NumPy fallback kernel, vectorized over the whole population.

Mirrors the compiled core's decode and synthesis arithmetic operation for
operation; only the final reduction (NumPy pairwise sum) and NumPy's sin
may differ from the C code by last-bit rounding.
"""

from __future__ import annotations

import numpy as np

TWO_PI = 2.0 * np.pi


def evaluate(bits, plan, data, dt, metric_code):
    n_pop = bits.shape[0]
    n = plan.n_samples
    if n_pop == 0:
        return np.empty(0)

    n_fields = plan.offsets.size
    params = np.empty((n_pop, n_fields))
    for j in range(n_fields):
        off = int(plan.offsets[j])
        width = int(plan.widths[j])
        weights = np.left_shift(np.int64(1), np.arange(width - 1, -1, -1, dtype=np.int64))
        v = bits[:, off : off + width].astype(np.int64) @ weights
        x = plan.lbs[j] + plan.scales[j] * v
        x = np.where(v == 0, plan.lbs[j], x)
        x = np.where(v == plan.vmaxs[j], plan.ubs[j], x)
        params[:, j] = x

    fpc = plan.fields_per_component
    tvals = np.arange(n) * dt
    idx = np.arange(n)
    model = np.zeros((n_pop, n))
    for c in range(plan.n_components):
        base = c * fpc
        a = params[:, base]
        f = params[:, base + 1]
        phi = np.mod(params[:, base + 2], TWO_PI)
        if fpc == 5:
            ts = np.floor(params[:, base + 3] + 0.5).astype(np.int64)
            te = np.floor(params[:, base + 4] + 0.5).astype(np.int64)
            ts = np.clip(ts, 0, n - 1)
            te = np.clip(te, 0, n - 1)
            ts, te = np.minimum(ts, te), np.maximum(ts, te)
        else:
            ts = np.full(n_pop, plan.windows[c, 0])
            te = np.full(n_pop, plan.windows[c, 1])
        active = (idx >= ts[:, None]) & (idx <= te[:, None])
        wave = a[:, None] * np.sin((TWO_PI * f)[:, None] * tvals[None, :] + phi[:, None])
        model += np.where(active, wave, 0.0)

    diff = model - data[None, :]
    if metric_code == 0:
        return np.abs(diff).sum(axis=1)
    return (diff * diff).sum(axis=1)
