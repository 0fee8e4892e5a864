"""Ergodic sum rate over channel estimates under a selection criterion.

Every Monte Carlo trial owns random streams derived purely from
(master_seed, trial index, purpose), so a trial can be reproduced in
isolation, results do not depend on the worker count, and runs that
share a master seed are paired draw-for-draw across criteria.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import draw_error, draw_estimate
from .errors import RankDeficient
from .matops import dominant_right_singular_direction
from .multibranch import (
    CalibrationResult,
    calibrate_delta_f,
    objective_table,
    pattern,
    select_branch_fb,
)
from .rates import EsrResult

log = logging.getLogger(__name__)

CRITERIA = ("es", "fpa", "fb", "none")

# Stream purposes; calibration and evaluation ensembles never share draws.
PURPOSE_ESTIMATE = 0
PURPOSE_ERROR = 1
PURPOSE_CAL_ESTIMATE = 2
PURPOSE_CAL_ERROR = 3


def derive_rng(master_seed: int, trial: int, purpose: int) -> np.random.Generator:
    """Independent stream as a pure function of (master_seed, trial, purpose)."""
    return np.random.default_rng(np.random.SeedSequence((master_seed, trial, purpose)))


@dataclass(frozen=True)
class OperatingPoint:
    """One sweep point: dimensions, scheme, powers, and the search space."""

    K: int
    Nt: int
    scheme: str
    etr: float
    sigma_n2: float
    sigma_e2: float
    delta_grid: tuple
    L_branches: int
    rs_enabled: bool

    def search_grid(self) -> tuple:
        """Power-split candidates; collapses to {0} when splitting is disabled."""
        if not self.rs_enabled:
            return (0.0,)
        return tuple(sorted(self.delta_grid))


@dataclass(frozen=True)
class TrialOutcome:
    """Per-estimate record: the chosen candidate and the rates it achieved."""

    trial: int
    branch_index: int
    delta: float
    rc_bar: np.ndarray  # (K,), original user order
    rp_bar: float
    objective: float


@dataclass(frozen=True)
class EsrRun:
    """EsrResult plus the per-trial records needed for audits and pairing."""

    result: EsrResult
    outcomes: tuple
    skipped: int
    calibration: CalibrationResult | None

    @property
    def deltas(self) -> np.ndarray:
        return np.array([o.delta for o in self.outcomes])

    @property
    def branch_indices(self) -> np.ndarray:
        return np.array([o.branch_index for o in self.outcomes], dtype=int)

    @property
    def objectives(self) -> np.ndarray:
        return np.array([o.objective for o in self.outcomes])


def _candidates(point: OperatingPoint, criterion: str, calibration):
    grid = point.search_grid()
    if criterion == "es":
        branch_idx = range(1, point.L_branches + 1)
    elif criterion == "fpa":
        branch_idx = range(1, point.L_branches + 1)
        grid = (calibration.delta_f,)
    elif criterion == "fb":
        branch_idx = (calibration.fixed_branch,)
        grid = (calibration.delta_f,)
    elif criterion == "none":
        branch_idx = (1,)
    else:
        raise ValueError(f"criterion must be one of {CRITERIA}, got {criterion!r}")
    return [pattern(l, point.K) for l in branch_idx], grid


def evaluate_trial(
    point: OperatingPoint,
    criterion: str,
    calibration,
    master_seed: int,
    trial: int,
    n_err: int,
) -> TrialOutcome:
    """Run one estimate trial: draw, select the best candidate, record rates."""
    H_est = draw_estimate(point.K, point.Nt, derive_rng(master_seed, trial, PURPOSE_ESTIMATE))
    errors = draw_error(
        point.K,
        point.Nt,
        point.sigma_e2,
        derive_rng(master_seed, trial, PURPOSE_ERROR),
        n=n_err,
    )
    branches, grid = _candidates(point, criterion, calibration)
    grid = tuple(sorted(grid))
    v1 = dominant_right_singular_direction(H_est) if max(grid) > 0 else None
    objectives, rc_tables, rp_tables = objective_table(
        H_est, branches, grid, errors, point.scheme, point.etr, point.sigma_n2, v1=v1
    )
    best = (-np.inf, -1, -1)
    for b in range(len(branches)):
        for g in range(len(grid)):
            if objectives[b, g] > best[0]:
                best = (objectives[b, g], b, g)
    obj, b, g = best
    return TrialOutcome(
        trial=trial,
        branch_index=branches[b].index,
        delta=float(grid[g]),
        rc_bar=rc_tables[b][g],
        rp_bar=float(rp_tables[b][g]),
        objective=float(obj),
    )


def _calibrate(point: OperatingPoint, criterion: str, n_err: int, n_cal: int, master_seed: int):
    if criterion not in ("fpa", "fb"):
        return None
    estimates, errors_list = [], []
    for c in range(n_cal):
        estimates.append(
            draw_estimate(point.K, point.Nt, derive_rng(master_seed, c, PURPOSE_CAL_ESTIMATE))
        )
        errors_list.append(
            draw_error(
                point.K,
                point.Nt,
                point.sigma_e2,
                derive_rng(master_seed, c, PURPOSE_CAL_ERROR),
                n=n_err,
            )
        )
    grid = point.search_grid()
    if criterion == "fpa":
        return calibrate_delta_f(
            estimates,
            grid,
            n_err,
            point.scheme,
            etr=point.etr,
            sigma_n2=point.sigma_n2,
            errors_list=errors_list,
        )
    return select_branch_fb(
        estimates,
        point.L_branches,
        grid,
        n_err,
        point.scheme,
        etr=point.etr,
        sigma_n2=point.sigma_n2,
        errors_list=errors_list,
    )


def ergodic_sum_rate(
    point: OperatingPoint,
    criterion: str,
    n_estimates: int,
    n_err: int,
    master_seed: int,
    n_cal: int = 20,
    workers: int = 1,
) -> EsrRun:
    """Monte Carlo ergodic sum rate at one operating point.

    Trials fan out to a process pool when workers > 1 and are reduced in
    trial-index order, so the result is identical for any worker count.
    Rank-deficient draws are skipped and logged.
    """
    if n_estimates < 1:
        raise ValueError("n_estimates must be at least 1")
    calibration = _calibrate(point, criterion, n_err, n_cal, master_seed)

    args = [(point, criterion, calibration, master_seed, t, n_err) for t in range(n_estimates)]
    outcomes = []
    skipped = 0
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            raw = list(pool.map(_trial_worker_safe, args, chunksize=8))
    else:
        raw = [_trial_worker_safe(a) for a in args]
    for t, item in enumerate(raw):
        if item is None:
            skipped += 1
            log.warning("trial %d skipped: rank-deficient channel draw", t)
        else:
            outcomes.append(item)

    if not outcomes:
        raise RankDeficient("every trial drew a rank-deficient channel")
    rc_mat = np.stack([o.rc_bar for o in outcomes])
    rp_vec = np.array([o.rp_bar for o in outcomes])
    obj_vec = np.array([o.objective for o in outcomes])
    common_part = float(rc_mat.mean(axis=0).min())
    private_part = float(rp_vec.mean())
    n = len(outcomes)
    stderr = float(obj_vec.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    result = EsrResult(
        esr=common_part + private_part,
        common_part=common_part,
        private_part=private_part,
        stderr=stderr,
        n_estimates=n,
    )
    return EsrRun(result=result, outcomes=tuple(outcomes), skipped=skipped, calibration=calibration)


def _trial_worker_safe(args):
    try:
        return evaluate_trial(*args)
    except RankDeficient:
        return None
