"""First-principles validation of the closed-form SINRs.

Instead of the closed forms, the effective end-to-end gain of every
private symbol at every receiver is assembled directly from the signal
model (true channel times composite precoder, with the scheme's receiver
scaling). SINRs computed from those gains provide an independent check:
they agree with the closed forms exactly under perfect CSIT and quantify
the approximation gap otherwise.
"""

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .errors import IoFailure
from .rates import RsPowerSplit, SinrReport, common_precoder, sinr_common, sinr_private
from .thp import ThpFilterSet, build_thp_filters, compute_beta


@dataclass(frozen=True)
class EffectiveGains:
    """End-to-end gains at each receiver, after the scheme's receiver scaling.

    common_gain[k] is the scaled common-symbol coefficient at receiver k;
    private_gain_matrix[k, i] the scaled coefficient of private symbol i.
    Under perfect CSIT the private matrix is beta times the identity.
    """

    common_gain: np.ndarray
    private_gain_matrix: np.ndarray


def receiver_noise_scaling(filters: ThpFilterSet) -> np.ndarray:
    """Noise power multipliers after receiver scaling: g_k^2 (dthp) or ones (cthp)."""
    if filters.scheme == "dthp":
        return filters.g**2
    return np.ones_like(filters.g)


def effective_gain_matrix(
    realization: ChannelRealization,
    filters: ThpFilterSet,
    split: RsPowerSplit,
    branch,
) -> EffectiveGains:
    """Assemble the effective gains from the true channel and the filter set.

    The filters must have been built from the branch-permuted estimate.
    The encoded vector is treated as carrying the unit-variance effective
    symbols s + d, so the gain of symbol i at receiver k is the (k, i)
    entry of beta * scale * H_true_perm @ w_priv.
    """
    if filters.beta is None:
        raise ValueError("filters.beta is unset; call compute_beta first")
    perm = np.asarray(branch.perm, dtype=np.intp)
    H_true_perm = realization.H_true[perm]
    scale = filters.g if filters.scheme == "dthp" else np.ones_like(filters.g)
    private = filters.beta * (scale[:, np.newaxis] * (H_true_perm @ filters.w_priv))
    common = scale * (H_true_perm @ split.p_c)
    return EffectiveGains(common_gain=common, private_gain_matrix=private)


def model_sinr(
    gains: EffectiveGains, sigma_n2: float, scheme_scaling_noise: np.ndarray
) -> SinrReport:
    """SINRs straight from the gain matrix.

    The common stream sees every private symbol as interference; private
    decoding assumes the common symbol was removed by ideal SIC.
    """
    pg2 = np.abs(gains.private_gain_matrix) ** 2
    total = pg2.sum(axis=1)
    diag = np.diagonal(pg2)
    noise = np.asarray(scheme_scaling_noise) * sigma_n2
    gamma_c = np.abs(gains.common_gain) ** 2 / (total + noise)
    gamma_p = diag / (total - diag + noise)
    return SinrReport(gamma_c=gamma_c, gamma_p=gamma_p)


@dataclass(frozen=True)
class DeviationReport:
    """Element-wise relative differences between closed forms and the model.

    common_rel / private_rel compare against the model with the physical
    (true channel) common numerator. common_rel_est_num swaps in the
    estimated-channel numerator, isolating everything except that gap.
    """

    scheme: str
    sigma_e2: float
    common_rel: np.ndarray
    private_rel: np.ndarray
    common_rel_est_num: np.ndarray

    def max_rel(self) -> float:
        return float(
            max(self.common_rel.max(), self.private_rel.max(), self.common_rel_est_num.max())
        )


def _relative(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    scale = np.maximum(np.abs(b), 1e-300)
    return np.abs(a - b) / scale


def compare_closed_form(
    realization: ChannelRealization,
    scheme: str,
    delta: float,
    branch,
    etr: float,
    sigma_n2: float,
) -> DeviationReport:
    """Evaluate closed-form and model SINRs on one identical instance."""
    perm = np.asarray(branch.perm, dtype=np.intp)
    H_est_perm = realization.H_est[perm]
    H_err_perm = realization.H_err[perm]
    filters = build_thp_filters(H_est_perm, scheme)
    split = common_precoder(H_est_perm, delta, etr, sigma_n2)
    compute_beta(filters, etr, split.pc_norm2)

    closed_c = sinr_common(filters, split, H_est_perm, H_err_perm)
    closed_p = sinr_private(filters, split, H_est_perm, H_err_perm)

    gains = effective_gain_matrix(realization, filters, split, branch)
    scaling = receiver_noise_scaling(filters)
    model = model_sinr(gains, sigma_n2, scaling)

    scale = filters.g if scheme == "dthp" else np.ones_like(filters.g)
    est_num_gains = EffectiveGains(
        common_gain=scale * (H_est_perm @ split.p_c),
        private_gain_matrix=gains.private_gain_matrix,
    )
    model_est = model_sinr(est_num_gains, sigma_n2, scaling)

    if delta == 0.0:
        # Both common SINRs are identically zero; report no deviation.
        common_rel = np.zeros_like(closed_c)
        common_rel_est = np.zeros_like(closed_c)
    else:
        common_rel = _relative(closed_c, model.gamma_c)
        common_rel_est = _relative(closed_c, model_est.gamma_c)
    return DeviationReport(
        scheme=scheme,
        sigma_e2=realization.sigma_e2,
        common_rel=common_rel,
        private_rel=_relative(closed_p, model.gamma_p),
        common_rel_est_num=common_rel_est,
    )


def write_deviation_csv(reports, destination) -> None:
    """Write per-user deviations as CSV: one row per (report, user)."""
    lines = ["scheme,sigma_e2,instance,user,common_rel,private_rel,common_rel_est_num"]
    for idx, rep in enumerate(reports):
        for k in range(rep.common_rel.shape[0]):
            lines.append(
                f"{rep.scheme},{float(rep.sigma_e2)!r},{idx},{k},"
                f"{float(rep.common_rel[k])!r},{float(rep.private_rel[k])!r},"
                f"{float(rep.common_rel_est_num[k])!r}"
            )
    text = "\n".join(lines) + "\n"
    try:
        if hasattr(destination, "write"):
            destination.write(text)
        else:
            with open(destination, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
    except OSError as exc:
        raise IoFailure(f"cannot write deviation report: {exc}") from exc
