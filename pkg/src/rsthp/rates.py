"""Rate-splitting layer: common precoder, closed-form SINRs, and
instantaneous/average rates.

The common stream rides on the dominant right-singular direction of the
channel estimate scaled to carry a fraction delta of the power budget;
the remaining (1 - delta) Etr is spread uniformly over the private THP
streams. SINRs follow the closed forms driven by the residual error
cross-gains h_err_k^T w_i.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .channel import draw_error
from .matops import dominant_right_singular_direction, permute_rows
from .thp import ThpFilterSet, build_thp_filters


@dataclass(frozen=True)
class RsPowerSplit:
    """Power split between the common stream and the private streams."""

    delta: float
    etr: float
    sigma_n2: float
    p_c: np.ndarray  # (Nt,), ||p_c||^2 = delta * etr

    @property
    def pc_norm2(self) -> float:
        return float(np.vdot(self.p_c, self.p_c).real)


@dataclass(frozen=True)
class SinrReport:
    """Per-user SINRs (linear scale) for the common and private streams."""

    gamma_c: np.ndarray
    gamma_p: np.ndarray


@dataclass(frozen=True)
class AsrReport:
    """Average rates conditioned on one channel estimate.

    rc_bar is per user; objective = min_k rc_bar[k] + rp_bar is the
    quantity the branch/power selection maximizes.
    """

    rc_bar: np.ndarray
    rp_bar: float
    objective: float
    n_err_samples: int


@dataclass(frozen=True)
class EsrResult:
    """Ergodic sum rate with its common/private decomposition.

    esr = common_part + private_part where common_part takes the minimum
    over users of the estimate-averaged common rates. stderr is the
    Monte Carlo standard error of the per-estimate objective.
    """

    esr: float
    common_part: float
    private_part: float
    stderr: float
    n_estimates: int


def common_precoder(
    H_est_permuted: np.ndarray, delta: float, etr: float, sigma_n2: float = 1.0
) -> RsPowerSplit:
    """Common precoder p_c = sqrt(delta * etr) * v1 along the dominant direction."""
    if not 0.0 <= delta < 1.0:
        raise ValueError("delta must lie in [0, 1)")
    Nt = H_est_permuted.shape[1]
    if delta == 0.0:
        p_c = np.zeros(Nt, dtype=np.complex128)
    else:
        v1 = dominant_right_singular_direction(H_est_permuted)
        p_c = np.sqrt(delta * etr) * v1
    return RsPowerSplit(delta=delta, etr=etr, sigma_n2=sigma_n2, p_c=p_c)


def _cross_terms(filters: ThpFilterSet, H_err_perm: np.ndarray):
    """Desired-gain and residual-interference powers per user.

    Returns (a2, s2): a2[k] = |diag_k + c_kk|^2 with diag_k = lhat_kk (dthp)
    or 1 (cthp); s2[k] = sum_{i != k} |c_ki|^2, where c = H_err_perm @ w_priv.
    """
    cross = H_err_perm @ filters.w_priv
    diag = np.diagonal(cross, axis1=-2, axis2=-1)
    total = np.abs(cross) ** 2
    s2 = total.sum(axis=-1) - np.abs(diag) ** 2
    base = filters.lhat_diag if filters.scheme == "dthp" else 1.0
    a2 = np.abs(base + diag) ** 2
    return a2, s2


def sinr_common(
    filters: ThpFilterSet,
    split: RsPowerSplit,
    H_est_perm: np.ndarray,
    H_err_perm: np.ndarray,
) -> np.ndarray:
    """Closed-form common-stream SINR per user for one error draw."""
    if filters.beta is None:
        raise ValueError("filters.beta is unset; call compute_beta first")
    a2, s2 = _cross_terms(filters, H_err_perm)
    num = np.abs(H_est_perm @ split.p_c) ** 2
    return num / (filters.beta**2 * (a2 + s2) + split.sigma_n2)


def sinr_private(
    filters: ThpFilterSet,
    split: RsPowerSplit,
    H_est_perm: np.ndarray,
    H_err_perm: np.ndarray,
) -> np.ndarray:
    """Closed-form private-stream SINR per user for one error draw.

    Uses the nominal desired power (the channel-estimate diagonal), so the
    value is an approximation of the exact signal-model SINR away from
    perfect CSIT; the two agree exactly when the error vanishes.
    """
    _, s2 = _cross_terms(filters, H_err_perm)
    K = s2.shape[0]
    eb = split.etr - split.pc_norm2
    if filters.scheme == "dthp":
        inv_l2 = 1.0 / filters.lhat_diag**2
        return 1.0 / (inv_l2 * (s2 + K * split.sigma_n2 / eb))
    sum_inv_l2 = float(np.sum(filters.g**2))
    return 1.0 / (s2 + split.sigma_n2 * sum_inv_l2 / eb)


def instantaneous_rates(report: SinrReport):
    """Gaussian-codebook rates log2(1 + gamma) for both stream kinds."""
    return np.log2(1.0 + report.gamma_c), np.log2(1.0 + report.gamma_p)


def asr_table(
    H_est: np.ndarray,
    branch,
    delta_grid,
    errors: np.ndarray,
    scheme: str,
    etr: float,
    sigma_n2: float,
    v1: np.ndarray | None = None,
):
    """Draw-averaged rates for one branch over a power-split grid.

    errors is a batch (n_err, K, Nt) of error matrices in the original
    user order; rows are permuted to the branch ordering internally.
    Returns (rc, rp) where rc[g, k] is indexed by the original user k.

    v1 may carry a precomputed dominant direction of the estimate; row
    permutations leave it unchanged, so one direction serves all branches.
    """
    delta_grid = np.asarray(delta_grid, dtype=np.float64)
    if delta_grid.size and (delta_grid.min() < 0 or delta_grid.max() >= 1):
        raise ValueError("delta grid values must lie in [0, 1)")
    perm = np.asarray(branch.perm, dtype=np.intp)
    Hp = permute_rows(H_est, perm)
    filters = build_thp_filters(Hp, scheme)

    if delta_grid.size and delta_grid.max() > 0:
        if v1 is None:
            v1 = dominant_right_singular_direction(H_est)
        common_num = np.abs(Hp @ v1) ** 2
    else:
        common_num = np.zeros(Hp.shape[0])

    errs_perm = errors[:, perm, :]
    a2, s2 = _cross_terms(filters, errs_perm)
    inv_l2 = 1.0 / filters.lhat_diag**2
    rc_perm, rp = kernels.asr_accumulate(
        a2,
        s2,
        common_num,
        inv_l2,
        float(inv_l2.sum()),
        delta_grid,
        etr,
        sigma_n2,
        scheme == "cthp",
    )
    # Map stream positions back to the physical users they carry.
    rc = np.empty_like(rc_perm)
    rc[:, perm] = rc_perm
    return rc, rp


def average_rates(
    H_est: np.ndarray,
    branch,
    delta: float,
    n_err: int,
    sigma_e2: float,
    scheme: str,
    rng: np.random.Generator,
    etr: float,
    sigma_n2: float,
) -> AsrReport:
    """Monte Carlo average of the closed-form rates over n_err error draws.

    Filters are built once from the permuted estimate and reused across
    draws; the error enters only through the residual cross-gains.
    """
    if n_err < 1:
        raise ValueError("n_err must be at least 1")
    K, Nt = H_est.shape
    errors = draw_error(K, Nt, sigma_e2, rng, n=n_err)
    rc, rp = asr_table(H_est, branch, [delta], errors, scheme, etr, sigma_n2)
    objective = float(rc[0].min() + rp[0])
    return AsrReport(rc_bar=rc[0], rp_bar=float(rp[0]), objective=objective, n_err_samples=n_err)


def optimize_delta(evaluator, grid):
    """Grid search for the power split maximizing an objective.

    Ties break toward the smaller delta.
    """
    grid = sorted(grid)
    if not grid:
        raise ValueError("delta grid must be non-empty")
    best_delta, best_obj = None, -np.inf
    for delta in grid:
        obj = evaluator(delta)
        if obj > best_obj:
            best_delta, best_obj = delta, obj
    return best_delta, best_obj
