"""Pure NumPy implementations of the numerical hot loops.

These are the fallback backend behind rsthp.kernels; the compiled
extension in _kernels_cy.pyx implements the same two functions with
identical semantics.
"""

import numpy as np


def asr_accumulate(a2, s2, common_num, inv_l2, sum_inv_l2, delta_grid, etr, sigma_n2, cthp):
    """Average rates over error draws for every power-split grid point.

    a2[j, k]   desired-gain power |lhat_kk + c_kk|^2 (or |1 + c_kk|^2 for the
               centralized scheme) under error draw j
    s2[j, k]   residual interference power sum_{i != k} |c_ki|^2
    common_num[k]  |h_est_k^T v1|^2 for the unit-norm common direction
    inv_l2[k]  1 / lhat_kk^2, sum_inv_l2 its sum

    Returns (rc, rp): rc[g, k] is the common rate of stream k averaged over
    draws at grid point g, rp[g] the matching average private sum rate.
    """
    n_err, K = a2.shape
    n_grid = delta_grid.shape[0]
    rc = np.empty((n_grid, K))
    rp = np.empty(n_grid)
    for g, delta in enumerate(delta_grid):
        pc2 = delta * etr
        eb = etr - pc2
        beta2 = eb / sum_inv_l2 if cthp else eb / K
        gamma_c = (pc2 * common_num)[np.newaxis, :] / (beta2 * (a2 + s2) + sigma_n2)
        if cthp:
            gamma_p = 1.0 / (s2 + sigma_n2 * sum_inv_l2 / eb)
        else:
            gamma_p = 1.0 / (inv_l2[np.newaxis, :] * (s2 + K * sigma_n2 / eb))
        rc[g] = np.log2(1.0 + gamma_c).mean(axis=0)
        rp[g] = np.log2(1.0 + gamma_p).mean(axis=0).sum()
    return rc, rp


def _modulo(z, lam):
    shift = np.floor(z.real / lam + 0.5) + 1j * np.floor(z.imag / lam + 0.5)
    return z - shift * lam


def thp_encode_batch(s, b, lam):
    """Feedback-recursion encoding with modulo reduction, over a symbol batch.

    s is (n, K), b a unit-diagonal lower-triangular (K, K) feedback matrix.
    Returns (v, d) with v the encoded batch and d the lattice perturbation
    satisfying b @ v = s + d row-wise.
    """
    n, K = s.shape
    v = np.empty((n, K), dtype=np.complex128)
    for i in range(K):
        acc = s[:, i] - v[:, :i] @ b[i, :i]
        v[:, i] = _modulo(acc, lam)
    d = v @ b.T - s
    return v, d
