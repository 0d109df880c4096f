# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled displacement kernels; same contract as ``_kernels_py``."""
from libc.math cimport exp, acosh, fabs, sqrt, isfinite, INFINITY

import numpy as np

from .optimize import DescentResult

DEF MAXD = 16
DEF MAXX = 32

cdef double INV_PHI = (sqrt(5.0) - 1.0) / 2.0
cdef double H_MIN = 1e-3
cdef double H_MAX = 8.0


cdef double _disp(double* mre, double* mim, int n, double* x) noexcept nogil:
    cdef double zr[MAXD]
    cdef double zi[MAXD]
    cdef double wr[MAXD]
    cdef double wi[MAXD]
    cdef int d = n + 1
    cdef int i, j
    cdef double u = exp(x[2 * n - 1])
    cdef double v = x[2 * n - 2]
    cdef double nz2 = 0.0
    for i in range(n - 1):
        zr[i + 1] = x[i]
        zi[i + 1] = x[n - 1 + i]
        nz2 += x[i] * x[i] + x[n - 1 + i] * x[n - 1 + i]
    zr[0] = 0.5 * (-nz2 - u)
    zi[0] = 0.5 * v
    zr[n] = 1.0
    zi[n] = 0.0
    cdef double ar, ai
    for i in range(d):
        ar = 0.0
        ai = 0.0
        for j in range(d):
            ar = ar + (mre[i * d + j] * zr[j] - mim[i * d + j] * zi[j])
            ai = ai + (mre[i * d + j] * zi[j] + mim[i * d + j] * zr[j])
        wr[i] = ar
        wi[i] = ai
    # s = conj(w0) z_n + conj(w_n) z0 + sum conj(w_k) z_k
    cdef double sr = (wr[0] * zr[n] + wi[0] * zi[n]) + (wr[n] * zr[0] + wi[n] * zi[0])
    cdef double si = (wr[0] * zi[n] - wi[0] * zr[n]) + (wr[n] * zi[0] - wi[n] * zr[0])
    cdef double qw = 2.0 * (wr[0] * wr[n] + wi[0] * wi[n])
    for i in range(1, n):
        sr = sr + (wr[i] * zr[i] + wi[i] * zi[i])
        si = si + (wr[i] * zi[i] - wi[i] * zr[i])
        qw = qw + (wr[i] * wr[i] + wi[i] * wi[i])
    if not (qw < 0.0) or not isfinite(qw):
        return INFINITY
    cdef double ratio = (sr * sr + si * si) / (u * -qw)
    if not isfinite(ratio):
        return INFINITY
    if ratio < 1.0:
        ratio = 1.0
    return 2.0 * acosh(ratio)


cdef double _eval_shift(double* mre, double* mim, int n, double* x, double* base,
                        double* direction, double s, int dim) noexcept nogil:
    cdef int k
    for k in range(dim):
        x[k] = base[k] + s * direction[k]
    return _disp(mre, mim, n, x)


cdef double _golden(double* mre, double* mim, int n, double* work, double* base,
                    double* direction, int dim, double a, double b, double xtol,
                    double* fmin, long* evals) noexcept nogil:
    cdef double c = b - INV_PHI * (b - a)
    cdef double d = a + INV_PHI * (b - a)
    cdef double fc = _eval_shift(mre, mim, n, work, base, direction, c, dim)
    cdef double fd = _eval_shift(mre, mim, n, work, base, direction, d, dim)
    cdef int it = 0
    evals[0] += 2
    while b - a > xtol and it < 200:
        if fc <= fd:
            b = d
            d = c
            fd = fc
            c = b - INV_PHI * (b - a)
            fc = _eval_shift(mre, mim, n, work, base, direction, c, dim)
        else:
            a = c
            c = d
            fc = fd
            d = a + INV_PHI * (b - a)
            fd = _eval_shift(mre, mim, n, work, base, direction, d, dim)
        evals[0] += 1
        it += 1
    if fc <= fd:
        fmin[0] = fc
        return c
    fmin[0] = fd
    return d


cdef int _descend(double* mre, double* mim, int n, double* x, double h0, double xtol,
                  double ftol, int max_sweeps, double* fout, long* evals) noexcept nogil:
    cdef int dim = 2 * n
    cdef double h[MAXX]
    cdef double e[MAXX]
    cdef double start[MAXX]
    cdef double work[MAXX]
    cdef double dvec[MAXX]
    cdef int i, k, sweep
    cdef double fx, fs, s, step, max_step, f_start, dn
    for i in range(dim):
        h[i] = h0
        e[i] = 0.0
    fx = _disp(mre, mim, n, x)
    evals[0] += 1
    for sweep in range(max_sweeps):
        for i in range(dim):
            start[i] = x[i]
        f_start = fx
        max_step = 0.0
        for i in range(dim):
            e[i] = 1.0
            s = _golden(mre, mim, n, work, x, e, dim, -h[i], h[i], xtol, &fs, evals)
            e[i] = 0.0
            if fs < fx:
                x[i] = x[i] + s
                fx = fs
                step = fabs(s)
            else:
                step = 0.0
            if step > max_step:
                max_step = step
            if step > 0.8 * h[i]:
                h[i] = 3.0 * h[i]
                if h[i] > H_MAX:
                    h[i] = H_MAX
            else:
                h[i] = 3.0 * step
                if h[i] < H_MIN:
                    h[i] = H_MIN
                if h[i] > H_MAX:
                    h[i] = H_MAX
        dn = 0.0
        for k in range(dim):
            dvec[k] = x[k] - start[k]
            dn += dvec[k] * dvec[k]
        dn = sqrt(dn)
        if dn > xtol:
            s = _golden(mre, mim, n, work, x, dvec, dim, 0.0, 4.0,
                        xtol / (dn if dn > 1.0 else 1.0), &fs, evals)
            if fs < fx:
                for k in range(dim):
                    x[k] = x[k] + s * dvec[k]
                fx = fs
        if f_start - fx <= ftol and max_step < 10.0 * xtol:
            fout[0] = fx
            return 1
    fout[0] = fx
    return 0


def _split(m):
    a = np.ascontiguousarray(np.asarray(m, dtype=np.complex128))
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] > MAXD or a.shape[0] < 2:
        raise ValueError("matrix must be square with 2 <= dim <= 16")
    return np.ascontiguousarray(a.real), np.ascontiguousarray(a.imag), a.shape[0] - 1


def displacement(m, x):
    """Bergman displacement d(p, M p) at the packed Siegel point ``x``."""
    cdef double[:, ::1] mre
    cdef double[:, ::1] mim
    mre, mim, n = _split(m)
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    if xv.shape[0] != 2 * n:
        raise ValueError("point has wrong length")
    return _disp(&mre[0, 0], &mim[0, 0], n, &xv[0])


def descend(m, x0, double h0=1.0, double xtol=1e-6, double ftol=1e-12, int max_sweeps=200):
    cdef double[:, ::1] mre
    cdef double[:, ::1] mim
    mre, mim, n_ = _split(m)
    cdef int n = n_
    out = np.array(x0, dtype=np.float64, copy=True)
    cdef double[::1] xv = out
    if xv.shape[0] != 2 * n:
        raise ValueError("point has wrong length")
    cdef double f = 0.0
    cdef long evals = 0
    cdef int ok
    with nogil:
        ok = _descend(&mre[0, 0], &mim[0, 0], n, &xv[0], h0, xtol, ftol, max_sweeps, &f, &evals)
    return DescentResult(out, float(f), int(evals), bool(ok))
