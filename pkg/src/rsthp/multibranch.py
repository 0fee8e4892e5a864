"""Symbol-ordering branches and the three selection criteria.

Branch l of K is a structured permutation: the identity for l = 1, and
for l >= 2 a pattern that fixes the first l - 2 users and reverses the
rest. A selection criterion picks the (branch, delta) pair maximizing
the per-estimate objective min_k rc_bar[k] + rp_bar, either exhaustively
(es), at a precalibrated power split (fpa), or once per scenario (fb).

All candidate evaluations for one estimate share the same error draws,
so the es >= fpa >= single-branch dominance chain holds exactly.
"""

from dataclasses import dataclass

import numpy as np

from .channel import draw_error
from .errors import IndexOutOfRange, NoPrivatePower
from .rates import asr_table


@dataclass(frozen=True)
class BranchPattern:
    """Ordering pattern: row i of the permuted matrix is row perm[i] (0-based)."""

    index: int
    perm: tuple


@dataclass(frozen=True)
class SelectionOutcome:
    """Chosen branch and power split with the objective they achieve."""

    branch: BranchPattern
    delta: float
    objective: float


@dataclass(frozen=True)
class CalibrationResult:
    """Scenario-level calibration: power split and, for fb, the frozen branch."""

    delta_f: float
    fixed_branch: int | None
    n_cal: int


def pattern(l: int, K: int) -> BranchPattern:
    """Branch pattern l of K: identity for l = 1, partial reversal otherwise.

    For l >= 2 the first l - 2 positions are fixed and the remaining block
    is reversed, so every pattern is its own inverse.
    """
    if not 1 <= l <= K:
        raise IndexOutOfRange(f"branch index {l} outside 1..{K}")
    if l == 1:
        perm = tuple(range(K))
    else:
        head = tuple(range(l - 2))
        tail = tuple(reversed(range(l - 2, K)))
        perm = head + tail
    return BranchPattern(index=l, perm=perm)


def objective_table(
    H_est: np.ndarray,
    branches,
    delta_grid,
    errors: np.ndarray,
    scheme: str,
    etr: float,
    sigma_n2: float,
    v1: np.ndarray | None = None,
):
    """Objectives and rate tables for every (branch, delta) candidate.

    Returns (objectives, rc_tables, rp_tables): objectives[b, g] for branch
    branches[b] at delta_grid[g]; rc_tables[b] is the (G, K) common-rate
    table in original user order, rp_tables[b] the (G,) private sums.
    Candidates that leave no private power are scored -inf.
    """
    delta_grid = np.asarray(sorted(delta_grid), dtype=np.float64)
    objectives = np.full((len(branches), delta_grid.size), -np.inf)
    rc_tables, rp_tables = [], []
    for b, branch in enumerate(branches):
        try:
            rc, rp = asr_table(H_est, branch, delta_grid, errors, scheme, etr, sigma_n2, v1=v1)
        except NoPrivatePower:
            rc_tables.append(None)
            rp_tables.append(None)
            continue
        rc_tables.append(rc)
        rp_tables.append(rp)
        objectives[b] = rc.min(axis=1) + rp
    return objectives, rc_tables, rp_tables


def _argmax_candidates(objectives: np.ndarray, branches, delta_grid):
    """First maximizer in (branch, delta) iteration order: smaller l, then smaller delta."""
    best = (-np.inf, None, None)
    for b, branch in enumerate(branches):
        for g, delta in enumerate(delta_grid):
            if objectives[b, g] > best[0]:
                best = (objectives[b, g], branch, float(delta))
    if best[1] is None:
        raise NoPrivatePower("every candidate pair left no private power")
    return best


def select_branch_es(
    H_est: np.ndarray,
    L_branches: int,
    delta_grid,
    n_err: int,
    scheme: str,
    sigma_e2: float,
    rng: np.random.Generator,
    etr: float,
    sigma_n2: float,
    errors: np.ndarray | None = None,
) -> SelectionOutcome:
    """Exhaustive search over branches and the power-split grid.

    All pairs are scored on the same error draws; pass a pre-drawn batch
    via ``errors`` to share randomness with an enclosing experiment.
    """
    K, Nt = H_est.shape
    if not 1 <= L_branches <= K:
        raise IndexOutOfRange(f"L_branches {L_branches} outside 1..{K}")
    if errors is None:
        errors = draw_error(K, Nt, sigma_e2, rng, n=n_err)
    branches = [pattern(l, K) for l in range(1, L_branches + 1)]
    grid = sorted(delta_grid)
    objectives, _, _ = objective_table(H_est, branches, grid, errors, scheme, etr, sigma_n2)
    obj, branch, delta = _argmax_candidates(objectives, branches, grid)
    return SelectionOutcome(branch=branch, delta=delta, objective=obj)


def select_branch_fpa(
    H_est: np.ndarray,
    delta_f: float,
    L_branches: int,
    n_err: int,
    scheme: str,
    sigma_e2: float,
    rng: np.random.Generator,
    etr: float,
    sigma_n2: float,
    errors: np.ndarray | None = None,
) -> SelectionOutcome:
    """Branch search at a fixed power split; equivalent to es on the grid {delta_f}."""
    return select_branch_es(
        H_est,
        L_branches,
        [delta_f],
        n_err,
        scheme,
        sigma_e2,
        rng,
        etr,
        sigma_n2,
        errors=errors,
    )


def ensemble_esr_table(
    pairs,
    branches,
    delta_grid,
    scheme: str,
    etr: float,
    sigma_n2: float,
):
    """Ensemble ergodic sum rate for every (branch, delta) candidate.

    pairs is a list of (H_est, errors) tuples. The ergodic value takes the
    minimum over users of the estimate-averaged common rates, then adds
    the estimate-averaged private sum rate.
    """
    delta_grid = np.asarray(sorted(delta_grid), dtype=np.float64)
    n_b, n_g = len(branches), delta_grid.size
    rc_sum = np.zeros((n_b, n_g, pairs[0][0].shape[0]))
    rp_sum = np.zeros((n_b, n_g))
    for H_est, errors in pairs:
        for b, branch in enumerate(branches):
            rc, rp = asr_table(H_est, branch, delta_grid, errors, scheme, etr, sigma_n2)
            rc_sum[b] += rc
            rp_sum[b] += rp
    n = len(pairs)
    return (rc_sum / n).min(axis=2) + rp_sum / n


def _ensemble_pairs(estimate_ensemble, errors_list, n_err, sigma_e2, rng):
    if errors_list is not None:
        return list(zip(estimate_ensemble, errors_list))
    pairs = []
    for H_est in estimate_ensemble:
        K, Nt = H_est.shape
        pairs.append((H_est, draw_error(K, Nt, sigma_e2, rng, n=n_err)))
    return pairs


def calibrate_delta_f(
    estimate_ensemble,
    delta_grid,
    n_err: int,
    scheme: str,
    rng: np.random.Generator | None = None,
    *,
    etr: float,
    sigma_n2: float,
    sigma_e2: float = 0.0,
    errors_list=None,
) -> CalibrationResult:
    """Power split maximizing the unordered (branch 1) ensemble ESR.

    Error batches are drawn from rng unless supplied via errors_list.
    """
    if not estimate_ensemble:
        raise ValueError("calibration ensemble must be non-empty")
    pairs = _ensemble_pairs(estimate_ensemble, errors_list, n_err, sigma_e2, rng)
    K = pairs[0][0].shape[0]
    grid = sorted(delta_grid)
    table = ensemble_esr_table(pairs, [pattern(1, K)], grid, scheme, etr, sigma_n2)
    g_best = int(np.flatnonzero(table[0] == table[0].max())[0])
    return CalibrationResult(delta_f=float(grid[g_best]), fixed_branch=None, n_cal=len(pairs))


def select_branch_fb(
    calibration_ensemble,
    L_branches: int,
    delta_grid,
    n_err: int,
    scheme: str,
    rng: np.random.Generator | None = None,
    *,
    etr: float,
    sigma_n2: float,
    sigma_e2: float = 0.0,
    errors_list=None,
) -> CalibrationResult:
    """Freeze one branch at initialization, then re-tune the power split.

    The branch maximizes the ensemble ESR at the unordered calibration
    delta_f; ties keep the smaller branch index. The power split is then
    re-optimized on the frozen branch over the full grid.
    """
    if not calibration_ensemble:
        raise ValueError("calibration ensemble must be non-empty")
    pairs = _ensemble_pairs(calibration_ensemble, errors_list, n_err, sigma_e2, rng)
    K = pairs[0][0].shape[0]
    if not 1 <= L_branches <= K:
        raise IndexOutOfRange(f"L_branches {L_branches} outside 1..{K}")
    grid = sorted(delta_grid)
    branches = [pattern(l, K) for l in range(1, L_branches + 1)]

    base = ensemble_esr_table(pairs, [branches[0]], grid, scheme, etr, sigma_n2)
    delta_f0 = grid[int(np.flatnonzero(base[0] == base[0].max())[0])]

    at_delta_f = ensemble_esr_table(pairs, branches, [delta_f0], scheme, etr, sigma_n2)
    fixed_b = int(np.flatnonzero(at_delta_f[:, 0] == at_delta_f[:, 0].max())[0])

    refined = ensemble_esr_table(pairs, [branches[fixed_b]], grid, scheme, etr, sigma_n2)
    delta_f = grid[int(np.flatnonzero(refined[0] == refined[0].max())[0])]
    return CalibrationResult(
        delta_f=float(delta_f), fixed_branch=branches[fixed_b].index, n_cal=len(pairs)
    )
