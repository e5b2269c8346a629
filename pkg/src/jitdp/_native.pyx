# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; semantics mirror jitdp._kernels_py."""

import numpy as np

cimport numpy as cnp
from libc.math cimport log2

cnp.import_array()


def prefix_within_budget(double[::1] efforts, double budget, double slack):
    cdef double limit = budget + slack
    cdef double csum = 0.0
    cdef Py_ssize_t i, n = efforts.shape[0]
    cdef Py_ssize_t count = 0
    for i in range(n):
        csum += efforts[i]
        if csum <= limit:
            count = i + 1
        else:
            break
    return count


def lift_area(double[::1] efforts, double[::1] labels, double total_effort,
              double total_defects, double fraction):
    cdef double ce = 0.0, cd = 0.0
    cdef double x0 = 0.0, y0 = 0.0, x1, y1, xl, xr, w, dx, t, yr
    cdef double area = 0.0
    cdef Py_ssize_t i, n = efforts.shape[0]
    for i in range(n):
        ce += efforts[i]
        cd += labels[i]
        x1 = ce / total_effort
        y1 = cd / total_defects
        xl = x0 if x0 < fraction else fraction
        xr = x1 if x1 < fraction else fraction
        w = xr - xl
        dx = x1 - x0
        if dx > 0.0:
            t = (xr - x0) / dx
        else:
            t = 1.0
        yr = y0 + (y1 - y0) * t
        area += w * (y0 + yr) * 0.5
        x0 = x1
        y0 = y1
        if x0 >= fraction:
            # remaining segments lie right of the cutoff except for
            # zero-width vertical steps, which contribute nothing anyway
            break
    return area


cdef double GAIN_FLOOR = 1e-12


cdef inline double _h2(double p):
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -(p * log2(p) + (1.0 - p) * log2(1.0 - p))


def best_split(double[::1] values, double[::1] labels, long min_leaf):
    cdef Py_ssize_t n = values.shape[0]
    if n < 2 * min_leaf:
        return (-1.0, float("nan"))
    cdef double n1 = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        n1 += labels[i]
    cdef double h_total = _h2(n1 / n)
    cdef double c1 = 0.0
    cdef double best_ratio = -1.0, best_thr = 0.0
    cdef double fi, pi, gain, split_info, ratio
    cdef bint found = False
    for i in range(1, n):
        c1 += labels[i - 1]
        if i < min_leaf or n - i < min_leaf:
            continue
        if not values[i] > values[i - 1]:
            continue
        fi = <double> i
        pi = fi / n
        gain = h_total - pi * _h2(c1 / fi) - (1.0 - pi) * _h2((n1 - c1) / (n - fi))
        if gain <= GAIN_FLOOR:
            continue
        split_info = -(pi * log2(pi) + (1.0 - pi) * log2(1.0 - pi))
        ratio = gain / split_info
        if ratio > best_ratio:
            best_ratio = ratio
            best_thr = (values[i - 1] + values[i]) * 0.5
            found = True
    if not found:
        return (-1.0, float("nan"))
    return (best_ratio, best_thr)


def knn_label_means(double[:, ::1] train, double[::1] labels,
                    double[:, ::1] test, long k):
    cdef Py_ssize_t n = train.shape[0]
    cdef Py_ssize_t f = train.shape[1]
    cdef Py_ssize_t m = test.shape[0]
    cdef Py_ssize_t kk = k if k < n else n
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    dist_arr = np.empty(kk, dtype=np.float64)
    idx_arr = np.empty(kk, dtype=np.intp)
    cdef double[::1] kd = dist_arr
    cdef Py_ssize_t[::1] ki = idx_arr
    cdef Py_ssize_t i, j, c, filled, pos, q
    cdef double d, diff, acc
    for i in range(m):
        filled = 0
        for j in range(n):
            d = 0.0
            for c in range(f):
                diff = test[i, c] - train[j, c]
                d += diff * diff
            if filled < kk:
                pos = filled
                filled += 1
            elif d < kd[kk - 1]:
                pos = kk - 1
            else:
                continue
            # insertion keeping (distance, index) lexicographic order
            while pos > 0 and (kd[pos - 1] > d):
                kd[pos] = kd[pos - 1]
                ki[pos] = ki[pos - 1]
                pos -= 1
            kd[pos] = d
            ki[pos] = j
        acc = 0.0
        for q in range(kk):
            acc += labels[ki[q]]
        out[i] = acc / kk
    return out_arr
