"""Flat-fading channel draws and the transmitter-side error model.

The transmitter knows an estimate H_est; the true channel is
H_true = H_est + H_err with an isotropic complex Gaussian error whose
per-user row power is sigma_e2. The error power either is fixed or
scales as a * Etr**(-alpha) with the transmit budget.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatch

ERROR_MODES = ("scaling", "fixed")


@dataclass(frozen=True)
class ErrorModel:
    """CSIT error-power model: sigma_e2 = a * Etr**(-alpha) or a fixed value."""

    mode: str
    a: float = 0.95
    alpha: float = 0.6
    sigma_e2_fixed: float = 0.0

    def __post_init__(self):
        if self.mode not in ERROR_MODES:
            raise ValueError(f"mode must be one of {ERROR_MODES}, got {self.mode!r}")
        if self.a <= 0:
            raise ValueError("a must be positive")
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")
        if self.sigma_e2_fixed < 0:
            raise ValueError("sigma_e2_fixed must be nonnegative")


@dataclass(frozen=True)
class ChannelRealization:
    """One trial's channel triple: estimate, error, and true channel."""

    H_est: np.ndarray
    H_err: np.ndarray
    H_true: np.ndarray
    sigma_e2: float = 0.0


def error_variance(model: ErrorModel, etr: float) -> float:
    """Per-user error power at transmit budget etr."""
    if etr <= 0:
        raise ValueError("etr must be positive")
    if model.mode == "fixed":
        return model.sigma_e2_fixed
    return model.a * etr ** (-model.alpha)


def draw_estimate(K: int, Nt: int, rng: np.random.Generator, n: int | None = None) -> np.ndarray:
    """i.i.d. unit-variance circularly-symmetric complex Gaussian entries.

    Returns (K, Nt), or a batch (n, K, Nt) when n is given.
    """
    shape = (K, Nt) if n is None else (n, K, Nt)
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) / np.sqrt(2.0)


def draw_error(
    K: int, Nt: int, sigma_e2: float, rng: np.random.Generator, n: int | None = None
) -> np.ndarray:
    """CSIT error draw with per-entry variance sigma_e2 / Nt.

    Each row then has expected squared norm sigma_e2. The entries scale
    with sqrt(sigma_e2), so draws at different error powers taken from
    identically seeded streams are perfectly correlated (common random
    numbers across sweep points).
    """
    if sigma_e2 < 0:
        raise ValueError("sigma_e2 must be nonnegative")
    shape = (K, Nt) if n is None else (n, K, Nt)
    std = np.sqrt(sigma_e2 / (2.0 * Nt))
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) * std


def compose_true(
    H_est: np.ndarray, H_err: np.ndarray, sigma_e2: float = 0.0
) -> ChannelRealization:
    """Bundle estimate and error into a realization with H_true = H_est + H_err."""
    H_est = np.asarray(H_est, dtype=np.complex128)
    H_err = np.asarray(H_err, dtype=np.complex128)
    if H_est.shape != H_err.shape:
        raise ShapeMismatch(f"estimate {H_est.shape} vs error {H_err.shape}")
    H_true = H_est + H_err
    # Re-derive the stored error so H_true - H_est recovers it bitwise; the
    # rounded sum would otherwise miss the drawn error by an ulp.
    return ChannelRealization(
        H_est=H_est, H_err=H_true - H_est, H_true=H_true, sigma_e2=sigma_e2
    )
