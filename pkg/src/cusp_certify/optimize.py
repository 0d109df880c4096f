"""Derivative-free minimization: golden-section line search, cyclic coordinate
descent with a pattern move, and a deterministic multi-start driver."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

H_MIN = 1e-3
H_MAX = 8.0


def golden_section(phi: Callable[[float], float], a: float, b: float, xtol: float = 1e-6,
                   max_iter: int = 200) -> tuple[float, float, int]:
    """Minimize a unimodal ``phi`` on ``[a, b]``; returns (argmin, min, evaluations)."""
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = phi(c), phi(d)
    evals = 2
    it = 0
    while b - a > xtol and it < max_iter:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = phi(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = phi(d)
        evals += 1
        it += 1
    if fc <= fd:
        return c, fc, evals
    return d, fd, evals


@dataclass(frozen=True)
class DescentResult:
    x: np.ndarray
    fun: float
    evals: int
    converged: bool


def coordinate_descent(f: Callable[[np.ndarray], float], x0: Sequence[float], h0: float = 1.0,
                       xtol: float = 1e-6, ftol: float = 1e-12, max_sweeps: int = 200) -> DescentResult:
    """Cyclic per-coordinate golden-section descent.

    Each sweep line-searches every coordinate inside an adaptive bracket, then
    tries one extrapolating line search along the sweep's net displacement.
    """
    x = np.array(x0, dtype=float)
    dim = x.size
    fx = f(x)
    evals = 1
    h = np.full(dim, float(h0))
    converged = False
    for _ in range(max_sweeps):
        x_start = x.copy()
        f_start = fx
        max_step = 0.0
        for i in range(dim):
            xi = x[i]

            def phi(s, i=i, xi=xi):
                x[i] = xi + s
                return f(x)

            s, fs, k = golden_section(phi, -h[i], h[i], xtol)
            evals += k
            if fs < fx:
                x[i] = xi + s
                fx = fs
                step = abs(s)
            else:
                x[i] = xi
                step = 0.0
            max_step = max(max_step, step)
            if step > 0.8 * h[i]:
                h[i] = min(H_MAX, 3.0 * h[i])
            else:
                h[i] = min(H_MAX, max(H_MIN, 3.0 * step))
        d = x - x_start
        if np.linalg.norm(d) > xtol:
            base = x.copy()

            def psi(s):
                return f(base + s * d)

            s, fs, k = golden_section(psi, 0.0, 4.0, xtol / max(1.0, float(np.linalg.norm(d))))
            evals += k
            if fs < fx:
                x = base + s * d
                fx = fs
        if f_start - fx <= ftol and max_step < 10.0 * xtol:
            converged = True
            break
    return DescentResult(x, float(fx), evals, converged)


@dataclass(frozen=True)
class MultiStartResult:
    x: np.ndarray
    fun: float
    evals: int
    converged: bool
    start_index: int


def multistart(descend: Callable[[np.ndarray], DescentResult], starts: np.ndarray,
               threads: int = 1) -> MultiStartResult:
    """Run ``descend`` from every start; deterministic min-reduction (ties go to the lowest index)."""
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(descend, list(starts)))
    else:
        results = [descend(s) for s in starts]
    best = min(range(len(results)), key=lambda k: (results[k].fun, k))
    r = results[best]
    return MultiStartResult(r.x, r.fun, sum(q.evals for q in results), r.converged, best)
