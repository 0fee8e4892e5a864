"""Tomlinson-Harashima precoding: filter construction, modulo-reduced
successive encoding, and transmit-vector assembly.

Two deployments are supported. The centralized scheme (cthp) applies the
diagonal scaling at the transmitter; the decentralized scheme (dthp)
leaves it to the receivers. Feedback matrices are unit-diagonal lower
triangular so the encoding recursion is well posed.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import NoPrivatePower
from .matops import lq_decompose

SCHEMES = ("dthp", "cthp")

_QPSK_LAMBDA = 2.0 * np.sqrt(2.0)
_QAM16_LAMBDA = 8.0 / np.sqrt(10.0)


@dataclass(frozen=True)
class ModuloParams:
    """Modulo base per complex dimension; depends on the constellation."""

    lam: float

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("lam must be positive")

    @classmethod
    def qpsk(cls) -> "ModuloParams":
        return cls(lam=_QPSK_LAMBDA)

    @classmethod
    def qam16(cls) -> "ModuloParams":
        # Boundary of the unit-variance 16-QAM constellation.
        return cls(lam=_QAM16_LAMBDA)


@dataclass
class ThpFilterSet:
    """Filters for one precoding scheme built from a channel estimate.

    F        (Nt, K) feedforward matrix with orthonormal columns
    lhat     (K, K) lower-triangular factor of the estimate
    g        (K,) diagonal scaling gains, g_k = 1 / lhat_kk
    B        (K, K) unit-diagonal lower-triangular feedback matrix
    w_priv   (Nt, K) composite private columns: the end-to-end per-symbol
             precoding columns after feedback inversion
    beta     power scaling factor, filled in by compute_beta
    """

    scheme: str
    F: np.ndarray
    lhat: np.ndarray
    g: np.ndarray
    B: np.ndarray
    w_priv: np.ndarray
    beta: float | None = None

    @property
    def lhat_diag(self) -> np.ndarray:
        return np.diagonal(self.lhat).real


def build_thp_filters(H_est_permuted: np.ndarray, scheme: str) -> ThpFilterSet:
    """Construct the THP filter set from a (possibly permuted) estimate.

    The composite private columns satisfy H_est @ w_priv = diag(lhat)
    (dthp) or the identity (cthp), which is the zero residual-interference
    property under perfect CSIT.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    factors = lq_decompose(H_est_permuted)
    L, Q = factors.L, factors.Q
    K = L.shape[0]
    F = Q.conj().T
    lhat_diag = np.diagonal(L).real
    g = 1.0 / lhat_diag
    if scheme == "dthp":
        B = L * g[:, np.newaxis]
    else:
        B = L * g[np.newaxis, :]
    # Force the structural unit diagonal exactly.
    np.fill_diagonal(B, 1.0)

    L_inv = np.linalg.solve(L, np.eye(K, dtype=np.complex128))
    w_priv = F @ L_inv
    if scheme == "dthp":
        w_priv = w_priv * lhat_diag[np.newaxis, :]
    return ThpFilterSet(scheme=scheme, F=F, lhat=L, g=g, B=B, w_priv=w_priv)


def compute_beta(filters: ThpFilterSet, etr: float, pc_norm2: float) -> float:
    """Power scaling factor for the private precoder; stored on the filter set.

    Raises NoPrivatePower when the common stream uses the whole budget.
    """
    if pc_norm2 < 0:
        raise ValueError("pc_norm2 must be nonnegative")
    if etr <= pc_norm2:
        raise NoPrivatePower(f"etr={etr:g} <= pc_norm2={pc_norm2:g}")
    if filters.scheme == "dthp":
        beta = np.sqrt((etr - pc_norm2) / filters.g.shape[0])
    else:
        beta = np.sqrt((etr - pc_norm2) / np.sum(filters.g**2))
    filters.beta = float(beta)
    return filters.beta


def modulo_reduce(z, params: ModuloParams):
    """Element-wise modulo onto [-lam/2, lam/2) in each real dimension."""
    z = np.asarray(z, dtype=np.complex128)
    lam = params.lam
    shift = np.floor(z.real / lam + 0.5) + 1j * np.floor(z.imag / lam + 0.5)
    out = z - shift * lam
    return out if out.ndim else complex(out)


def thp_encode(s: np.ndarray, B: np.ndarray, params: ModuloParams):
    """Successive encoding v_i = M(s_i - sum_{j<i} b_ij v_j).

    Returns (v, d) where d is the lattice perturbation making
    v = B^-1 (s + d) hold.
    """
    s = np.asarray(s, dtype=np.complex128)
    v, d = kernels.thp_encode_batch(s[np.newaxis, :], B, params.lam)
    return v[0], d[0]


def build_transmit_vector(
    filters: ThpFilterSet, v: np.ndarray, s_c: complex, p_c: np.ndarray
) -> np.ndarray:
    """Transmit vector x = p_c s_c + beta * F v (dthp) or beta * F diag(g) v (cthp)."""
    if filters.beta is None:
        raise ValueError("filters.beta is unset; call compute_beta first")
    if filters.scheme == "dthp":
        priv = filters.F @ v
    else:
        priv = filters.F @ (filters.g * v)
    return p_c * s_c + filters.beta * priv
