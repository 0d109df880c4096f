"""Pure-Python kernels; the reference behaviour for the compiled ``_kernels``.

Points are packed as ``x = (Re zeta, Im zeta, v, log u)`` of length 2n.
"""
from __future__ import annotations

import math

import numpy as np

from .optimize import DescentResult, coordinate_descent


def _rows(m) -> list[list[complex]]:
    return [[complex(e) for e in row] for row in np.asarray(m)]


def _displacement_rows(rows: list[list[complex]], x) -> float:
    n = len(rows) - 1
    u = math.exp(x[2 * n - 1])
    v = x[2 * n - 2]
    zeta = [complex(x[k], x[n - 1 + k]) for k in range(n - 1)]
    nz2 = sum(c.real * c.real + c.imag * c.imag for c in zeta)
    z = [complex(0.5 * (-nz2 - u), 0.5 * v), *zeta, 1.0 + 0.0j]
    w = [sum(r[j] * z[j] for j in range(n + 1)) for r in rows]
    # <z, w> under J0: pairs first with last, middle with middle
    s = w[0].conjugate() * z[n] + w[n].conjugate() * z[0]
    qw = 2.0 * (w[0].conjugate() * w[n]).real
    for k in range(1, n):
        s += w[k].conjugate() * z[k]
        qw += w[k].real * w[k].real + w[k].imag * w[k].imag
    if not qw < 0.0 or not math.isfinite(qw):
        return math.inf
    ratio = (s.real * s.real + s.imag * s.imag) / (u * -qw)
    if not math.isfinite(ratio):
        return math.inf
    return 2.0 * math.acosh(max(ratio, 1.0))


def displacement(m, x) -> float:
    """Bergman displacement d(p, M p) at the packed Siegel point ``x``."""
    return _displacement_rows(_rows(m), x)


def descend(m, x0, h0: float = 1.0, xtol: float = 1e-6, ftol: float = 1e-12,
            max_sweeps: int = 200) -> DescentResult:
    rows = _rows(m)
    return coordinate_descent(lambda x: _displacement_rows(rows, x), x0, h0, xtol, ftol, max_sweeps)
