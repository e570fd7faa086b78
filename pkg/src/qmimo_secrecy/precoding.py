"""Downlink beamforming, artificial-noise shaping and one-bit transmit synthesis."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .config import ANScheme, Beamformer, SystemConfig
from .estimation import ChannelEstimate
from .quantizer import downlink_bussgang, one_bit_quantize

__all__ = [
    "RankDeficientChannelError",
    "PrecoderSet",
    "normalization_constants",
    "build_precoder",
    "synthesize_transmit",
    "linearized_transmit_decomposition",
]

MAX_GRAM_CONDITION = 1e12


class RankDeficientChannelError(ValueError):
    """The estimated channel is too ill-conditioned for exact zero-forcing."""


@dataclass(frozen=True)
class PrecoderSet:
    w_matrix: np.ndarray  # N x K
    shaping: np.ndarray  # N x N
    eta: float
    zeta: float
    c1: float
    c2: float
    c3: float


def normalization_constants(cfg: SystemConfig, est: ChannelEstimate) -> tuple[float, float]:
    """Long-term (eta, zeta): expected beamformer energy and AN energy."""
    s = np.asarray(est.sigma_hat_sq, dtype=float)
    N, K = cfg.n_antennas, cfg.num_users
    if cfg.beamformer is Beamformer.MRT:
        eta = N * math.fsum(s)
    else:
        eta = math.fsum(1.0 / s) / (N - K)
    zeta = float(N) if cfg.an_scheme is ANScheme.R_AN else float(N - K)
    return eta, zeta


def _gram_solver(h_hat: np.ndarray):
    gram = h_hat.T @ h_hat.conj()
    if np.linalg.cond(gram) > MAX_GRAM_CONDITION:
        raise RankDeficientChannelError("Gram matrix of the channel estimate is numerically singular")
    return scipy.linalg.cho_factor(gram, lower=True)


def build_precoder(cfg: SystemConfig, est: ChannelEstimate) -> PrecoderSet:
    if est.h_hat is None:
        raise ValueError("build_precoder needs a channel estimate with h_hat")
    h_hat = est.h_hat
    N = cfg.n_antennas
    need_gram = cfg.beamformer is Beamformer.ZF or cfg.an_scheme is ANScheme.NS_AN
    zf = None
    if need_gram:
        # W_zf = H_hat^* (H_hat^T H_hat^*)^{-1}; the Gram matrix is Hermitian PD
        cho = _gram_solver(h_hat)
        zf = scipy.linalg.cho_solve(cho, h_hat.T).conj().T
    w = h_hat.conj() if cfg.beamformer is Beamformer.MRT else zf
    if cfg.an_scheme is ANScheme.R_AN:
        shaping = np.eye(N, dtype=complex)
    else:
        shaping = np.eye(N, dtype=complex) - zf @ h_hat.T
    eta, zeta = normalization_constants(cfg, est)
    p_d = cfg.p_down if cfg.quantized else cfg.p_down * math.pi / 2
    theta = cfg.theta
    return PrecoderSet(
        w_matrix=w,
        shaping=shaping,
        eta=eta,
        zeta=zeta,
        c1=math.sqrt(2 * theta * p_d / (math.pi * eta)),
        c2=math.sqrt(2 * (1 - theta) * p_d / (math.pi * zeta)),
        c3=math.sqrt(p_d / N),
    )


def synthesize_transmit(cfg: SystemConfig, pre: PrecoderSet, symbols: np.ndarray, an_draw: np.ndarray):
    """Precoded signal x_tilde and the transmitted vector x.

    Accepts a single slot (length-K / length-N) or several slots as columns.
    Quantized: x = sqrt(p_d/N) * Q(x_tilde) with Q onto the unit circle, so
    ||x||^2 = p_d exactly. Unquantized: x = sqrt(p_d) * x_tilde.
    """
    x_tilde = (
        math.sqrt(cfg.theta / pre.eta) * (pre.w_matrix @ symbols)
        + math.sqrt((1 - cfg.theta) / pre.zeta) * (pre.shaping @ an_draw)
    )
    if cfg.quantized:
        x = math.sqrt(cfg.p_down / cfg.n_antennas) * one_bit_quantize(x_tilde, normalized=True)
    else:
        x = math.sqrt(cfg.p_down) * x_tilde
    return x, x_tilde


def linearized_transmit_decomposition(
    cfg: SystemConfig,
    pre: PrecoderSet,
    x_tilde: np.ndarray,
    x: np.ndarray,
    symbols: np.ndarray,
    an_draw: np.ndarray,
):
    """Split x = c1*W*s + c2*S*n_tilde + c3*q_bar and return the three parts' ingredients.

    Returns ``(c1*W*s, c2*S*n_tilde, q_bar)``; q_bar is identically zero
    for unquantized transmission.
    """
    signal = pre.c1 * (pre.w_matrix @ symbols)
    an = pre.c2 * (pre.shaping @ an_draw)
    if not cfg.quantized:
        return signal, an, np.zeros_like(x)
    gbar = downlink_bussgang(cfg.n_antennas).gamma
    # equals x/c3 - (c1/c3) W s - (c2/c3) n, computed without the cancellation
    q_bar = x / pre.c3 - gbar * x_tilde
    return signal, an, q_bar
