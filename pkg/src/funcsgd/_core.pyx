# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: the batched SGD recursion and all-horizon step-size sums."""
import numpy as np

from libc.math cimport fabs, pow, sqrt, isfinite

NAME = "cython"


cdef inline double _dot(const double* a, const double* b, Py_ssize_t m) noexcept nogil:
    # Neumaier-compensated inner product
    cdef double s = 0.0, c = 0.0, p, t
    cdef Py_ssize_t i
    for i in range(m):
        p = a[i] * b[i]
        t = s + p
        if fabs(s) >= fabs(p):
            c += (s - t) + p
        else:
            c += (p - t) + s
        s = t
    return s + c


def sgd_block(double[:, ::1] coeffs, const double[:, :, ::1] x, const double[:, ::1] noise,
              const double[::1] beta, const double[::1] lam_k, const double[::1] etas):
    """Advance every row of ``coeffs`` through ``len(etas)`` updates in place.

    Row ``r`` sees covariates ``x[r, j]`` and response ``<x[r, j], beta> + noise[r, j]``.
    Returns ``None`` or ``(row, offset)`` of the first non-finite residual.
    """
    cdef Py_ssize_t R = coeffs.shape[0], m = coeffs.shape[1], B = etas.shape[0]
    cdef Py_ssize_t r, j, i
    cdef double y, res, g
    cdef Py_ssize_t bad_r = -1, bad_j = -1
    if x.shape[0] != R or x.shape[1] < B or x.shape[2] != m:
        raise ValueError("covariate block has the wrong shape")
    if noise.shape[0] != R or noise.shape[1] < B or beta.shape[0] != m or lam_k.shape[0] != m:
        raise ValueError("noise, slope or kernel eigenvalues have the wrong shape")
    with nogil:
        for r in range(R):
            for j in range(B):
                y = _dot(&x[r, j, 0], &beta[0], m) + noise[r, j]
                res = _dot(&x[r, j, 0], &coeffs[r, 0], m) - y
                if not isfinite(res):
                    bad_r = r
                    bad_j = j
                    break
                g = etas[j] * res
                for i in range(m):
                    coeffs[r, i] -= g * lam_k[i] * x[r, j, i]
            if bad_r >= 0:
                break
    if bad_r >= 0:
        return (bad_r, bad_j)
    return None


def weighted_sq_sums(const double[:, ::1] coeffs, const double[::1] beta, const double[::1] w):
    """Per-row ``sum_i w_i (coeffs_ri - beta_i)^2`` with compensated accumulation."""
    cdef Py_ssize_t R = coeffs.shape[0], m = coeffs.shape[1], r, i
    cdef double s, c, p, t, d
    out = np.empty(R)
    cdef double[::1] o = out
    with nogil:
        for r in range(R):
            s = 0.0
            c = 0.0
            for i in range(m):
                d = coeffs[r, i] - beta[i]
                p = w[i] * d * d
                t = s + p
                if fabs(s) >= fabs(p):
                    c += (s - t) + p
                else:
                    c += (p - t) + s
                s = t
            o[r] = s + c
    return out


cdef inline double _pow_nu(double d, double nu, int mode) noexcept nogil:
    if mode == 1:
        return d
    if mode == 2:
        return d * d
    if mode == 3:
        return sqrt(d)
    if mode == 4:
        return d * sqrt(d)
    return pow(d, nu)


def stepsize_sums(const double[::1] etas, double nu):
    """``S_t = sum_{k<=t} eta_k^2 / (1 + (eta_{k+1} + ... + eta_t)^nu)`` for every ``t``."""
    cdef Py_ssize_t n = etas.shape[0], t, k
    cdef double total, d, c, term, tt
    cdef int mode = 0
    if nu == 1.0:
        mode = 1
    elif nu == 2.0:
        mode = 2
    elif nu == 0.5:
        mode = 3
    elif nu == 1.5:
        mode = 4
    out = np.empty(n)
    cdef double[::1] o = out
    with nogil:
        for t in range(n):
            total = 0.0
            c = 0.0
            d = 0.0
            # walk backwards so the suffix sum is accumulated, not differenced
            k = t
            while k >= 0:
                term = etas[k] * etas[k] / (1.0 + _pow_nu(d, nu, mode))
                tt = total + term
                if fabs(total) >= fabs(term):
                    c += (total - tt) + term
                else:
                    c += (term - tt) + total
                total = tt
                d += etas[k]
                k -= 1
            o[t] = total + c
    return out
