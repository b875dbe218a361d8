# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled evaluation core: decode + windowed synthesis + residual sum.

Matches the reference implementations bit for bit: libm sin (the same
function math.sin wraps), sequential left-to-right accumulation, and the
exact decode arithmetic of encoding.decode_field.
"""

from libc.math cimport M_PI, fabs, floor, fmod, sin
from libc.stdlib cimport free, malloc
from libc.string cimport memset

cdef double TWO_PI = 2.0 * M_PI


def evaluate(const unsigned char[:, ::1] bits,
             const long long[::1] offsets,
             const long long[::1] widths,
             const double[::1] lbs,
             const double[::1] ubs,
             const double[::1] scales,
             int fields_per_component,
             int n_components,
             const long long[:, ::1] windows,
             const double[::1] data,
             double dt,
             int metric,
             double[::1] out):
    cdef Py_ssize_t n_pop = bits.shape[0]
    cdef Py_ssize_t n = data.shape[0]
    cdef Py_ssize_t p, t
    cdef int c, j, k, base
    cdef long long v, vmax, off, width
    cdef long long ts, te, swap
    cdef double x, a, f, phi, wang, total, d
    cdef double* model
    cdef double* params

    if n_pop == 0:
        return

    model = <double*> malloc(n * sizeof(double))
    params = <double*> malloc(fields_per_component * n_components * sizeof(double))
    if model == NULL or params == NULL:
        free(model)
        free(params)
        raise MemoryError()

    try:
        with nogil:
            for p in range(n_pop):
                for j in range(fields_per_component * n_components):
                    off = offsets[j]
                    width = widths[j]
                    v = 0
                    for k in range(width):
                        v = (v << 1) | bits[p, off + k]
                    vmax = (<long long>1 << width) - 1
                    if v == 0:
                        x = lbs[j]
                    elif v == vmax:
                        x = ubs[j]
                    else:
                        x = lbs[j] + scales[j] * v
                    params[j] = x

                memset(model, 0, n * sizeof(double))
                for c in range(n_components):
                    base = c * fields_per_component
                    a = params[base]
                    f = params[base + 1]
                    phi = fmod(params[base + 2], TWO_PI)
                    if phi < 0.0:
                        phi += TWO_PI
                    if fields_per_component == 5:
                        ts = <long long>floor(params[base + 3] + 0.5)
                        te = <long long>floor(params[base + 4] + 0.5)
                        if ts < 0: ts = 0
                        if ts > n - 1: ts = n - 1
                        if te < 0: te = 0
                        if te > n - 1: te = n - 1
                        if ts > te:
                            swap = ts
                            ts = te
                            te = swap
                    else:
                        ts = windows[c, 0]
                        te = windows[c, 1]
                    wang = TWO_PI * f
                    for t in range(ts, te + 1):
                        model[t] += a * sin(wang * (t * dt) + phi)

                total = 0.0
                if metric == 0:
                    for t in range(n):
                        total += fabs(model[t] - data[t])
                else:
                    for t in range(n):
                        d = model[t] - data[t]
                        total += d * d
                out[p] = total
    finally:
        free(model)
        free(params)
