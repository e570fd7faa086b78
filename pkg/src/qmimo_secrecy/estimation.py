"""Uplink pilot training under pilot attack and LMMSE channel estimation."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import SystemConfig
from .ensembles import PilotMatrix, SeedSpec, complex_gaussian, substream
from .quantizer import BussgangFactors, one_bit_quantize, unquantized_factors, uplink_bussgang

__all__ = [
    "ChannelSet",
    "ChannelEstimate",
    "EveDecomposition",
    "draw_channels",
    "estimator_bussgang",
    "analytic_estimate",
    "perfect_csi_estimate",
    "simulate_training",
    "lmmse_estimate",
    "eve_decomposition",
    "channel_mutual_info",
]


@dataclass(frozen=True)
class ChannelSet:
    h_matrix: np.ndarray  # N x K
    g_vector: np.ndarray  # N
    uplink_noise: np.ndarray  # N x tau


@dataclass(frozen=True)
class ChannelEstimate:
    """Channel estimate plus the closed-form statistics the rate formulas use.

    ``h_hat`` is None when only the statistics are needed (analytic curves).
    """

    h_hat: Optional[np.ndarray]
    lambdas: np.ndarray
    sigma_hat_sq: np.ndarray
    kappa_r: float
    bussgang: BussgangFactors
    intercepted_user: int = 0

    def __post_init__(self):
        s = np.asarray(self.sigma_hat_sq, dtype=float)
        if np.any(s <= 0) or np.any(s > 1):
            raise ValueError("estimate variances must lie in (0, 1]")
        if self.kappa_r * s[self.intercepted_user] >= 1 and self.kappa_r > 0:
            raise ValueError("kappa_R * sigma_hat_k^2 must stay below one")

    @property
    def sigma_matrix(self) -> np.ndarray:
        return np.diag(self.sigma_hat_sq)

    @property
    def sigma_hat_sq_k(self) -> float:
        return float(self.sigma_hat_sq[self.intercepted_user])


@dataclass(frozen=True)
class EveDecomposition:
    kappa_r: float
    error_variance: float


def draw_channels(cfg: SystemConfig, seed: SeedSpec) -> ChannelSet:
    """Small-scale fading H, g and training noise Z for one coherence block."""
    N, K = cfg.n_antennas, cfg.num_users
    return ChannelSet(
        h_matrix=complex_gaussian(substream(seed.label("H")), (N, K)),
        g_vector=complex_gaussian(substream(seed.label("g")), N),
        uplink_noise=complex_gaussian(substream(seed.label("Z")), (N, cfg.tau)),
    )


def estimator_bussgang(cfg: SystemConfig) -> BussgangFactors:
    if cfg.quantized:
        return uplink_bussgang(cfg.p_primes, cfg.p_e_prime)
    return unquantized_factors(float(np.sum(cfg.p_primes)) + cfg.p_e_prime + 1.0)


def _estimator_stats(cfg: SystemConfig):
    bg = estimator_bussgang(cfg)
    g2, sq = bg.gamma**2, bg.sigma_q_sq
    tau = cfg.tau
    p = cfg.p_primes
    attacked = np.zeros(cfg.num_users)
    attacked[cfg.k] = cfg.p_e_prime
    denom = g2 * p * tau + g2 * attacked * tau + g2 + sq
    lambdas = bg.gamma * np.sqrt(p * tau) / denom
    sigma_hat_sq = g2 * p * tau / denom
    return bg, lambdas, sigma_hat_sq


def analytic_estimate(cfg: SystemConfig) -> ChannelEstimate:
    """Estimator statistics without a channel realization."""
    bg, lambdas, s = _estimator_stats(cfg)
    return ChannelEstimate(None, lambdas, s, cfg.kappa_r, bg, cfg.k)


def perfect_csi_estimate(cfg: SystemConfig) -> ChannelEstimate:
    """Statistics for a BS that knows H exactly and faces a passive eavesdropper."""
    bg = estimator_bussgang(cfg)
    K = cfg.num_users
    return ChannelEstimate(None, np.ones(K), np.ones(K), 0.0, bg, cfg.k)


def simulate_training(cfg: SystemConfig, channels: ChannelSet, pilots: PilotMatrix) -> np.ndarray:
    """Received training block, sign-quantized onto the unit-modulus QPSK alphabet
    when ``cfg.quantized`` (raw Y otherwise). The eavesdropper replays the
    intercepted user's pilot.
    """
    H, g, Z = channels.h_matrix, channels.g_vector, channels.uplink_noise
    N, K = cfg.n_antennas, cfg.num_users
    if H.shape != (N, K) or g.shape != (N,) or Z.shape != (N, cfg.tau):
        raise ValueError("channel dimensions do not match the configuration")
    if pilots.entries.shape != (K, cfg.tau):
        raise ValueError("pilot matrix does not match (K, tau)")
    psi = pilots.entries
    y = (H * np.sqrt(cfg.p_primes)) @ psi
    y = y + math.sqrt(cfg.p_e_prime) * np.outer(g, psi[cfg.k]) + Z
    if cfg.quantized:
        return one_bit_quantize(y, normalized=True)
    return y


def lmmse_estimate(cfg: SystemConfig, v: np.ndarray, pilots: PilotMatrix) -> ChannelEstimate:
    """Per-antenna LMMSE estimate: correlate with each pilot, then scale by lambda_l."""
    if v.shape != (cfg.n_antennas, cfg.tau):
        raise ValueError(f"expected training block of shape {(cfg.n_antennas, cfg.tau)}, got {v.shape}")
    if pilots.entries.shape != (cfg.num_users, cfg.tau):
        raise ValueError("pilot matrix does not match (K, tau)")
    bg, lambdas, s = _estimator_stats(cfg)
    h_hat = (v @ pilots.entries.conj().T) * (lambdas / math.sqrt(cfg.tau))
    return ChannelEstimate(h_hat, lambdas, s, cfg.kappa_r, bg, cfg.k)


def eve_decomposition(est: ChannelEstimate) -> EveDecomposition:
    """g = sqrt(kappa_R) * h_hat_k + eps with per-entry error variance 1 - kappa_R * sigma_hat_k^2."""
    return EveDecomposition(est.kappa_r, 1.0 - est.kappa_r * est.sigma_hat_sq_k)


def channel_mutual_info(est: ChannelEstimate, n_antennas: int) -> float:
    """Bits of information h_hat_k carries about the eavesdropper's channel."""
    return n_antennas * -math.log2(1.0 - est.kappa_r * est.sigma_hat_sq_k)
