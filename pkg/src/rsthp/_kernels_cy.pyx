# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the numerical hot loops (see _kernels_py for the
reference semantics)."""

from libc.math cimport floor, log2

import numpy as np


def asr_accumulate(double[:, ::1] a2, double[:, ::1] s2, double[::1] common_num,
                   double[::1] inv_l2, double sum_inv_l2, double[::1] delta_grid,
                   double etr, double sigma_n2, bint cthp):
    cdef Py_ssize_t n_err = a2.shape[0]
    cdef Py_ssize_t K = a2.shape[1]
    cdef Py_ssize_t n_grid = delta_grid.shape[0]
    rc_np = np.empty((n_grid, K))
    rp_np = np.empty(n_grid)
    cdef double[:, ::1] rc = rc_np
    cdef double[::1] rp = rp_np
    cdef Py_ssize_t g, j, k
    cdef double delta, pc2, eb, beta2, noise_c, noise_p, num_k, acc_c, acc_p, gamma

    for g in range(n_grid):
        delta = delta_grid[g]
        pc2 = delta * etr
        eb = etr - pc2
        beta2 = eb / sum_inv_l2 if cthp else eb / K
        noise_p = sigma_n2 * sum_inv_l2 / eb if cthp else K * sigma_n2 / eb
        rp[g] = 0.0
        for k in range(K):
            num_k = pc2 * common_num[k]
            acc_c = 0.0
            acc_p = 0.0
            for j in range(n_err):
                gamma = num_k / (beta2 * (a2[j, k] + s2[j, k]) + sigma_n2)
                acc_c += log2(1.0 + gamma)
                if cthp:
                    gamma = 1.0 / (s2[j, k] + noise_p)
                else:
                    gamma = 1.0 / (inv_l2[k] * (s2[j, k] + noise_p))
                acc_p += log2(1.0 + gamma)
            rc[g, k] = acc_c / n_err
            rp[g] += acc_p / n_err
    return rc_np, rp_np


def thp_encode_batch(double complex[:, ::1] s, double complex[:, ::1] b, double lam):
    cdef Py_ssize_t n = s.shape[0]
    cdef Py_ssize_t K = s.shape[1]
    v_np = np.empty((n, K), dtype=np.complex128)
    d_np = np.empty((n, K), dtype=np.complex128)
    cdef double complex[:, ::1] v = v_np
    cdef double complex[:, ::1] d = d_np
    cdef Py_ssize_t t, i, j
    cdef double complex acc

    for t in range(n):
        for i in range(K):
            acc = s[t, i]
            for j in range(i):
                acc = acc - b[i, j] * v[t, j]
            v[t, i] = acc - (floor(acc.real / lam + 0.5) + 1j * floor(acc.imag / lam + 0.5)) * lam
        for i in range(K):
            acc = 0.0
            for j in range(i + 1):
                acc = acc + b[i, j] * v[t, j]
            d[t, i] = acc - s[t, i]
    return v_np, d_np
