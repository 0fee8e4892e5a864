"""Scenario configuration: line-oriented key=value files with validation.

Omitted keys fall back to the default experiment setup (8 antennas and
8 users, unit noise variance, 4 branches, 100 estimates x 100 error
draws, error power scaling 0.95 * Etr**-0.6).
"""

from dataclasses import dataclass, replace

from .channel import ERROR_MODES, ErrorModel
from .errors import ConfigInvalid

SCHEMES = ("dthp", "cthp")
CRITERIA = ("es", "fpa", "fb", "none")

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}

DEFAULT_DELTA_GRID = tuple(round(0.05 * i, 2) for i in range(20))  # 0, 0.05, ..., 0.95
DEFAULT_SNR_DB = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)


@dataclass(frozen=True)
class ScenarioConfig:
    K: int = 8
    Nt: int = 8
    scheme: str = "dthp"
    criterion: str = "es"
    rs_enabled: bool = True
    L_branches: int = 4
    snr_db_list: tuple = DEFAULT_SNR_DB
    error_model: ErrorModel = ErrorModel(mode="scaling", a=0.95, alpha=0.6, sigma_e2_fixed=0.06)
    sigma_n2: float = 1.0
    delta_grid: tuple = DEFAULT_DELTA_GRID
    n_estimates: int = 100
    n_err: int = 100
    n_cal: int = 20
    master_seed: int = 1


def default_config() -> ScenarioConfig:
    return ScenarioConfig()


def _parse_bool(key, raw):
    low = raw.lower()
    if low in _TRUE:
        return True
    if low in _FALSE:
        return False
    raise ConfigInvalid(key, f"expected a boolean, got {raw!r}")


def _parse_int(key, raw):
    try:
        return int(raw)
    except ValueError:
        raise ConfigInvalid(key, f"expected an integer, got {raw!r}") from None


def _parse_float(key, raw):
    try:
        return float(raw)
    except ValueError:
        raise ConfigInvalid(key, f"expected a number, got {raw!r}") from None


def _parse_float_list(key, raw):
    items = [s.strip() for s in raw.split(",") if s.strip()]
    return tuple(_parse_float(key, s) for s in items)


def _parse_choice(key, raw, choices):
    low = raw.lower()
    if low not in choices:
        raise ConfigInvalid(key, f"expected one of {choices}, got {raw!r}")
    return low


def parse_config(text: str) -> ScenarioConfig:
    """Parse key=value lines ('#' starts a comment) into a validated config."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigInvalid(stripped, f"line {lineno} is not of the form key=value")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        values[key] = raw
    return config_from_values(values)


def config_from_values(values: dict) -> ScenarioConfig:
    """Build a config from raw string values, applying defaults and validation."""
    cfg = default_config()
    em = cfg.error_model
    em_fields = {"mode": em.mode, "a": em.a, "alpha": em.alpha, "sigma_e2_fixed": em.sigma_e2_fixed}
    updates = {}
    for key, raw in values.items():
        if key == "K":
            updates["K"] = _parse_int(key, raw)
        elif key == "Nt":
            updates["Nt"] = _parse_int(key, raw)
        elif key == "scheme":
            updates["scheme"] = _parse_choice(key, raw, SCHEMES)
        elif key == "criterion":
            updates["criterion"] = _parse_choice(key, raw, CRITERIA)
        elif key == "rs":
            updates["rs_enabled"] = _parse_bool(key, raw)
        elif key == "L":
            updates["L_branches"] = _parse_int(key, raw)
        elif key == "snr_db":
            updates["snr_db_list"] = _parse_float_list(key, raw)
        elif key == "sigma_n2":
            updates["sigma_n2"] = _parse_float(key, raw)
        elif key == "error_mode":
            em_fields["mode"] = _parse_choice(key, raw, ERROR_MODES)
        elif key == "error_a":
            em_fields["a"] = _parse_float(key, raw)
        elif key == "error_alpha":
            em_fields["alpha"] = _parse_float(key, raw)
        elif key == "sigma_e2":
            em_fields["sigma_e2_fixed"] = _parse_float(key, raw)
        elif key == "delta_grid":
            updates["delta_grid"] = _parse_float_list(key, raw)
        elif key == "n_estimates":
            updates["n_estimates"] = _parse_int(key, raw)
        elif key == "n_err":
            updates["n_err"] = _parse_int(key, raw)
        elif key == "n_cal":
            updates["n_cal"] = _parse_int(key, raw)
        elif key == "seed":
            updates["master_seed"] = _parse_int(key, raw)
        else:
            raise ConfigInvalid(key, "unknown key")
    try:
        updates["error_model"] = ErrorModel(**em_fields)
    except ValueError as exc:
        raise ConfigInvalid("error_mode/error_a/error_alpha/sigma_e2", str(exc)) from None
    cfg = replace(cfg, **updates)
    validate_config(cfg)
    return cfg


def validate_config(cfg: ScenarioConfig) -> None:
    """Raise ConfigInvalid naming the offending key and constraint."""
    if cfg.K < 2:
        raise ConfigInvalid("K", f"need at least 2 users, got {cfg.K}")
    if cfg.Nt < cfg.K:
        raise ConfigInvalid("Nt", f"need Nt >= K, got Nt={cfg.Nt} < K={cfg.K}")
    if cfg.scheme not in SCHEMES:
        raise ConfigInvalid("scheme", f"expected one of {SCHEMES}, got {cfg.scheme!r}")
    if cfg.criterion not in CRITERIA:
        raise ConfigInvalid("criterion", f"expected one of {CRITERIA}, got {cfg.criterion!r}")
    if not 1 <= cfg.L_branches <= cfg.K:
        raise ConfigInvalid("L", f"need 1 <= L <= K, got {cfg.L_branches}")
    if not cfg.snr_db_list:
        raise ConfigInvalid("snr_db", "list must be non-empty")
    if cfg.sigma_n2 <= 0:
        raise ConfigInvalid("sigma_n2", f"must be positive, got {cfg.sigma_n2}")
    if not cfg.delta_grid:
        raise ConfigInvalid("delta_grid", "list must be non-empty")
    for d in cfg.delta_grid:
        if not 0.0 <= d < 1.0:
            raise ConfigInvalid("delta_grid", f"values must lie in [0, 1), got {d}")
    if cfg.error_model.sigma_e2_fixed < 0:
        raise ConfigInvalid("sigma_e2", "must be nonnegative")
    for key, val in (
        ("n_estimates", cfg.n_estimates),
        ("n_err", cfg.n_err),
        ("n_cal", cfg.n_cal),
    ):
        if val < 1:
            raise ConfigInvalid(key, f"must be at least 1, got {val}")
    if cfg.master_seed < 0:
        raise ConfigInvalid("seed", f"must be nonnegative, got {cfg.master_seed}")


def serialize_config(cfg: ScenarioConfig) -> str:
    """Render a config as key=value text; parse_config round-trips it."""
    em = cfg.error_model
    lines = [
        f"K={cfg.K}",
        f"Nt={cfg.Nt}",
        f"scheme={cfg.scheme}",
        f"criterion={cfg.criterion}",
        f"rs={'true' if cfg.rs_enabled else 'false'}",
        f"L={cfg.L_branches}",
        "snr_db=" + ",".join(repr(x) for x in cfg.snr_db_list),
        f"sigma_n2={cfg.sigma_n2!r}",
        f"error_mode={em.mode}",
        f"error_a={em.a!r}",
        f"error_alpha={em.alpha!r}",
        f"sigma_e2={em.sigma_e2_fixed!r}",
        "delta_grid=" + ",".join(repr(x) for x in cfg.delta_grid),
        f"n_estimates={cfg.n_estimates}",
        f"n_err={cfg.n_err}",
        f"n_cal={cfg.n_cal}",
        f"seed={cfg.master_seed}",
    ]
    return "\n".join(lines) + "\n"


def apply_overrides(cfg: ScenarioConfig, overrides) -> ScenarioConfig:
    """Apply 'key=value' override strings on top of an existing config."""
    values = {}
    for item in overrides:
        if "=" not in item:
            raise ConfigInvalid(item, "override is not of the form key=value")
        key, raw = (part.strip() for part in item.split("=", 1))
        values[key] = raw
    base = {}
    for line in serialize_config(cfg).splitlines():
        key, raw = line.split("=", 1)
        base[key] = raw
    base.update(values)
    return config_from_values(base)
