"""Experiment sweeps over SNR and error variance, baselines, and CSV output.

Every row is produced by an ergodic-sum-rate run whose random streams
depend only on (master seed, trial, purpose), so rows computed for
different criteria or schemes under one seed are paired draw-for-draw.
"""

from dataclasses import dataclass, replace

from .channel import ErrorModel, error_variance
from .config import ScenarioConfig, validate_config
from .errors import ConfigInvalid, IoFailure
from .ergodic import EsrRun, OperatingPoint, ergodic_sum_rate

CSV_HEADER = (
    "scheme,criterion,snr_db,sigma_e2,esr,common_part,private_part,"
    "stderr,mean_delta,branch_histogram"
)


@dataclass(frozen=True)
class SweepRow:
    """One experiment data point and the selection statistics behind it."""

    scheme: str
    criterion: str
    snr_db: float
    sigma_e2: float
    esr: float
    common_part: float
    private_part: float
    stderr: float
    mean_delta: float
    branch_histogram: tuple  # ((branch index, count), ...) for 1..L


def snr_db_to_etr(snr_db: float, sigma_n2: float) -> float:
    """Transmit budget from SNR: Etr = sigma_n2 * 10**(snr_db / 10)."""
    return sigma_n2 * 10.0 ** (snr_db / 10.0)


def operating_point(cfg: ScenarioConfig, etr: float, sigma_e2: float) -> OperatingPoint:
    return OperatingPoint(
        K=cfg.K,
        Nt=cfg.Nt,
        scheme=cfg.scheme,
        etr=etr,
        sigma_n2=cfg.sigma_n2,
        sigma_e2=sigma_e2,
        delta_grid=tuple(cfg.delta_grid),
        L_branches=cfg.L_branches,
        rs_enabled=cfg.rs_enabled,
    )


def _histogram(run: EsrRun, L_branches: int) -> tuple:
    counts = {l: 0 for l in range(1, L_branches + 1)}
    for idx in run.branch_indices:
        counts[int(idx)] += 1
    return tuple(sorted(counts.items()))


def _row(cfg: ScenarioConfig, label: str, snr_db: float, sigma_e2: float, run: EsrRun) -> SweepRow:
    res = run.result
    return SweepRow(
        scheme=cfg.scheme,
        criterion=label,
        snr_db=float(snr_db),
        sigma_e2=float(sigma_e2),
        esr=res.esr,
        common_part=res.common_part,
        private_part=res.private_part,
        stderr=res.stderr,
        mean_delta=float(run.deltas.mean()),
        branch_histogram=_histogram(run, cfg.L_branches),
    )


def _run_point(cfg: ScenarioConfig, snr_db: float, sigma_e2: float, label: str, workers: int):
    etr = snr_db_to_etr(snr_db, cfg.sigma_n2)
    point = operating_point(cfg, etr, sigma_e2)
    run = ergodic_sum_rate(
        point,
        cfg.criterion,
        cfg.n_estimates,
        cfg.n_err,
        cfg.master_seed,
        n_cal=cfg.n_cal,
        workers=workers,
    )
    return _row(cfg, label, snr_db, sigma_e2, run)


def run_snr_sweep(cfg: ScenarioConfig, workers: int = 1) -> list:
    """One row per configured SNR under the configured criterion."""
    validate_config(cfg)
    rows = []
    for snr_db in cfg.snr_db_list:
        etr = snr_db_to_etr(snr_db, cfg.sigma_n2)
        sigma_e2 = error_variance(cfg.error_model, etr)
        rows.append(_run_point(cfg, snr_db, sigma_e2, cfg.criterion, workers))
    return rows


def run_error_sweep(
    cfg: ScenarioConfig, sigma_e2_list, snr_db_fixed: float, workers: int = 1
) -> list:
    """One row per error variance at a fixed SNR (fixed-mode error model)."""
    validate_config(cfg)
    if not sigma_e2_list:
        raise ConfigInvalid("sigma_e2", "list must be non-empty")
    for s in sigma_e2_list:
        if s < 0:
            raise ConfigInvalid("sigma_e2", f"must be nonnegative, got {s}")
    rows = []
    for sigma_e2 in sigma_e2_list:
        fixed_cfg = replace(
            cfg, error_model=ErrorModel(mode="fixed", sigma_e2_fixed=float(sigma_e2))
        )
        rows.append(_run_point(fixed_cfg, snr_db_fixed, float(sigma_e2), cfg.criterion, workers))
    return rows


def run_baselines(cfg: ScenarioConfig, workers: int = 1) -> list:
    """Reference rows sharing the configured seed.

    thp      plain precoding: no split, no ordering
    rs-thp   rate splitting with the per-estimate power split, no ordering
    mb-thp   ordering search without rate splitting
    """
    validate_config(cfg)
    variants = (
        ("thp", replace(cfg, rs_enabled=False, criterion="none")),
        ("rs-thp", replace(cfg, rs_enabled=True, criterion="none")),
        ("mb-thp", replace(cfg, rs_enabled=False, criterion="es")),
    )
    rows = []
    for label, variant in variants:
        for snr_db in cfg.snr_db_list:
            etr = snr_db_to_etr(snr_db, variant.sigma_n2)
            sigma_e2 = error_variance(variant.error_model, etr)
            rows.append(_run_point(variant, snr_db, sigma_e2, label, workers))
    return rows


def format_histogram(histogram) -> str:
    return "|".join(f"{l}:{count}" for l, count in histogram)


def write_csv(rows, destination) -> None:
    """Write rows as CSV with full double-precision decimals.

    destination may be a path or a file-like object; byte output is
    deterministic for identical rows.
    """
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(
            f"{r.scheme},{r.criterion},{r.snr_db!r},{r.sigma_e2!r},{r.esr!r},"
            f"{r.common_part!r},{r.private_part!r},{r.stderr!r},{r.mean_delta!r},"
            f"{format_histogram(r.branch_histogram)}"
        )
    text = "\n".join(lines) + "\n"
    try:
        if hasattr(destination, "write"):
            destination.write(text)
        else:
            with open(destination, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
    except OSError as exc:
        raise IoFailure(f"cannot write CSV: {exc}") from exc
