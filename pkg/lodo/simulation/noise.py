"""
Measurement Noise
Zero-order-hold Gaussian noise and SNR scaling.

SNR = 10 log10((y - mu)^T (y - mu) / eta^T eta), mu the sample mean of y.
"""

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..exceptions import ConfigError, NumericalError

logger = logging.getLogger(__name__)

HOLD_TOL = 1e-9


@dataclass(frozen=True)
class NoiseSpec:
    """
    Output noise configuration.

    Attributes:
        snr_db: Target signal-to-noise ratio in decibels
        sample_period: Hold period of the noise samples (seconds)
        seed: PCG64 seed
    """
    snr_db: float
    sample_period: float
    seed: int = 0

    def __post_init__(self):
        if self.sample_period <= 0:
            raise ConfigError(f"noise sample period must be positive, got {self.sample_period}")
        if math.isnan(self.snr_db) or self.snr_db == -math.inf:
            raise ConfigError(f"target SNR must be a number above -inf dB, got {self.snr_db}")


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def hold_index(times, sample_period: float, t0: float = 0.0) -> np.ndarray:
    """Index of the noise sample active at each time."""
    times = np.asarray(times, dtype=float)
    return np.floor((times - t0) / sample_period + HOLD_TOL).astype(np.int64)


def zoh_noise(variance: float, sample_period: float, seed: int, times, t0: float = 0.0) -> np.ndarray:
    """
    Gaussian samples N(0, variance) drawn every ``sample_period`` from t0 and held.

    Returns:
        Array aligned with ``times``
    """
    if sample_period <= 0:
        raise ConfigError(f"sample period must be positive, got {sample_period}")
    index = hold_index(times, sample_period, t0)
    if index.size == 0:
        return np.zeros(0)
    if index.min() < 0:
        raise ValueError("zero-order-hold noise requested before its start time")
    held = math.sqrt(variance) * rng_for(seed).standard_normal(int(index.max()) + 1)
    return held[index]


def signal_energy(y) -> float:
    """(y - mu)^T (y - mu)."""
    y = np.asarray(y, dtype=float).ravel()
    centred = y - y.mean()
    return float(centred @ centred)


def snr_db(y, eta) -> float:
    """
    Realized SNR in decibels.

    +inf when eta is identically zero, -inf when y is constant and eta is not.
    """
    eta = np.asarray(eta, dtype=float).ravel()
    noise_energy = float(eta @ eta)
    if noise_energy == 0.0:
        return math.inf
    energy = signal_energy(y)
    if energy == 0.0:
        return -math.inf
    return 10.0 * math.log10(energy / noise_energy)


def noise_scale(y, eta, target_db: float) -> float:
    """
    Factor s such that snr_db(y, s * eta) equals ``target_db``.

    Raises:
        ConfigError: target is NaN or -inf
        NumericalError: y is constant or eta is identically zero
    """
    if math.isnan(target_db) or target_db == -math.inf:
        raise ConfigError(f"target SNR must be a number above -inf dB, got {target_db}")
    energy = signal_energy(y)
    if energy == 0.0:
        raise NumericalError("output is constant; a finite SNR target is undefined")
    eta = np.asarray(eta, dtype=float).ravel()
    noise_energy = float(eta @ eta)
    if noise_energy == 0.0:
        raise NumericalError("noise realization is identically zero")
    return math.sqrt(energy / (noise_energy * 10.0 ** (target_db / 10.0)))


def unit_noise(spec: NoiseSpec, times) -> np.ndarray:
    """Unit-variance held noise for ``spec`` on ``times``."""
    return zoh_noise(1.0, spec.sample_period, spec.seed, times)


def add_output_noise(y, noise: NoiseSpec, times=None) -> Tuple[np.ndarray, float]:
    """
    Add zero-mean Gaussian ZOH noise to clean output samples at the target SNR.

    Args:
        y: Clean output samples
        noise: Noise configuration
        times: Sample times; defaults to one noise sample per output sample

    Returns:
        (y_meas, realized SNR in dB)

    Raises:
        NumericalError: y is constant and the SNR target is finite
    """
    y = np.asarray(y, dtype=float).ravel()
    if times is None:
        times = np.arange(y.size) * noise.sample_period
    eta = unit_noise(noise, times)
    if math.isinf(noise.snr_db) and noise.snr_db > 0:
        return y.copy(), math.inf
    eta = noise_scale(y, eta, noise.snr_db) * eta
    realized = snr_db(y, eta)
    logger.debug("output noise: target %.3f dB, realized %.3f dB", noise.snr_db, realized)
    return y + eta, realized

