"""Dense complex-matrix kernels used by the precoder construction.

LQ factorization with a positive-real-diagonal convention, the dominant
right-singular direction by power iteration, and row permutations.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidPermutation, NoConvergence, RankDeficient

# Diagonal magnitude below which a triangular factor counts as rank
# deficient (degenerate channel draw).
RANK_TOL = 1e-12


@dataclass(frozen=True)
class LqFactors:
    """Factors A = L @ Q with L lower triangular and Q having orthonormal rows.

    The diagonal of L is real and strictly positive, which makes the
    factorization unique and branch comparisons deterministic.
    """

    L: np.ndarray  # (K, K) lower triangular, positive real diagonal
    Q: np.ndarray  # (K, Nt), Q @ Q^H = I


def lq_decompose(A: np.ndarray) -> LqFactors:
    """Thin LQ factorization of a K x Nt matrix with K <= Nt.

    Raises RankDeficient when a diagonal magnitude falls below RANK_TOL.
    """
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] > A.shape[1]:
        raise ValueError(f"need a K x Nt matrix with K <= Nt, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")

    # LQ of A is the conjugate transpose of the thin QR of A^H.
    q_h, r = np.linalg.qr(A.conj().T, mode="reduced")
    L = r.conj().T
    diag = np.diagonal(L).copy()
    mags = np.abs(diag)
    if np.any(mags < RANK_TOL):
        raise RankDeficient(f"diagonal magnitude below {RANK_TOL:g}: {mags.min():.3e}")

    # Rotate unit phases onto Q so the diagonal of L becomes real positive.
    phase = mags / diag
    L = L * phase[np.newaxis, :]
    Q = q_h.conj().T * np.conj(phase)[:, np.newaxis]
    return LqFactors(L=L, Q=Q)


def _fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate a vector so its first non-negligible entry is real positive."""
    nz = np.flatnonzero(np.abs(v) > 1e-12)
    if nz.size == 0:
        return v
    lead = v[nz[0]]
    return v * (np.abs(lead) / lead)


def dominant_right_singular_direction(
    A: np.ndarray, tol: float = 1e-12, max_iter: int = 10000
) -> np.ndarray:
    """Unit-norm direction v maximizing ||A v||, by power iteration on A^H A.

    The phase is fixed so the first nonzero entry of v is real positive.
    If the iterate change does not drop below ``tol`` within ``max_iter``
    iterations a NoConvergence warning is emitted and the best iterate is
    returned.
    """
    A = np.asarray(A, dtype=np.complex128)
    n_cols = A.shape[1]
    if not np.any(A):
        raise ValueError("matrix must be nonzero")

    v = np.full(n_cols, 1.0 / np.sqrt(n_cols), dtype=np.complex128)
    if np.linalg.norm(A @ v) < 1e-300:
        # All-ones start sits in the null space; fall back to basis vectors.
        for j in range(n_cols):
            if np.linalg.norm(A[:, j]) > 0:
                v = np.zeros(n_cols, dtype=np.complex128)
                v[j] = 1.0
                break
    v = _fix_phase(v / np.linalg.norm(v))

    for _ in range(max_iter):
        w = A.conj().T @ (A @ v)
        norm_w = np.linalg.norm(w)
        if norm_w == 0.0:
            # v fell into the null space exactly; restart off-axis.
            w = A.conj().T @ (A @ _fix_phase(v + 1.0 / n_cols))
            norm_w = np.linalg.norm(w)
        w = _fix_phase(w / norm_w)
        change = np.linalg.norm(w - v)
        v = w
        if change <= tol:
            return v

    warnings.warn(
        f"power iteration did not reach tol={tol:g} within {max_iter} iterations; "
        "returning the best iterate",
        NoConvergence,
        stacklevel=2,
    )
    return v


def permute_rows(A: np.ndarray, perm) -> np.ndarray:
    """Return the matrix whose row i is row perm[i] of A (0-based indices)."""
    A = np.asarray(A)
    perm = np.asarray(perm, dtype=np.intp)
    if perm.ndim != 1 or perm.shape[0] != A.shape[0] or (
        np.sort(perm) != np.arange(A.shape[0])
    ).any():
        raise InvalidPermutation(f"not a bijection on 0..{A.shape[0] - 1}: {perm}")
    return A[perm]
