"""Closed-form achievable-rate, leakage and secrecy-rate expressions.

The legitimate-user bound and the leakage bound are assembled from the
second-order moments of the effective channel (signal gain, estimation
error, inter-user interference, artificial-noise leakage, quantization
distortion). The secrecy rate itself is evaluated through the collapsed
single-log forms; the two routes must agree wherever the rate is positive.

Unquantized systems reuse every expression with ``p_d -> p_d*pi/2`` and
zero quantization distortion.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .config import ANScheme, Beamformer, SystemConfig
from .estimation import ChannelEstimate, analytic_estimate, perfect_csi_estimate

__all__ = [
    "Regime",
    "AsymptoteSpec",
    "RateBundle",
    "apply_regime",
    "rate_user_theorem1",
    "rate_eve_theorem2",
    "secrecy_rate",
    "secrecy_passive",
    "secrecy_unquantized",
    "asymptotic_secrecy",
    "positivity_threshold",
    "optimize_theta",
    "THETA_GRID",
]

THETA_GRID = np.linspace(1e-4, 1 - 1e-4, 2000)
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class Regime(str, Enum):
    NO_PS = "NO_PS"
    PS1 = "PS1"
    PS2 = "PS2"


@dataclass(frozen=True)
class AsymptoteSpec:
    regime: Regime
    rho: Optional[float] = None  # fixed BS power; defaults to cfg.p_down

    def __post_init__(self):
        object.__setattr__(self, "regime", Regime(self.regime))
        if self.rho is not None and not self.rho > 0:
            raise ValueError("rho must be positive")


@dataclass(frozen=True)
class RateBundle:
    r_k: float
    r_e: float
    r_s: float
    p_an_user: float
    p_an_eve: float
    theta_used: float


def apply_regime(cfg: SystemConfig, spec: AsymptoteSpec) -> SystemConfig:
    """Config with the BS power set by the power-scaling law at cfg.n_antennas."""
    rho = cfg.p_down if spec.rho is None else spec.rho
    n = cfg.n_antennas
    p_d = {Regime.NO_PS: rho, Regime.PS1: rho / math.sqrt(n), Regime.PS2: rho / n}[spec.regime]
    return cfg.with_(p_down=p_d)


@dataclass(frozen=True)
class _Params:
    n: float
    k_users: float
    beta_k: float
    beta_e: float
    p_d: float  # effective: already pi/2-scaled for unquantized systems
    sigma_q_sq: float
    s_k: float
    tr_sigma: float
    tr_sigma_inv: float
    kappa: float


def _params(cfg: SystemConfig, est: ChannelEstimate) -> _Params:
    s = np.asarray(est.sigma_hat_sq, dtype=float)
    return _Params(
        n=float(cfg.n_antennas),
        k_users=float(cfg.num_users),
        beta_k=cfg.beta_k,
        beta_e=cfg.beta_e,
        p_d=cfg.p_down if cfg.quantized else cfg.p_down * math.pi / 2,
        sigma_q_sq=est.bussgang.sigma_q_sq if cfg.quantized else 0.0,
        s_k=float(s[cfg.k]),
        tr_sigma=math.fsum(s),
        tr_sigma_inv=math.fsum(1.0 / s),
        kappa=est.kappa_r,
    )


def _power_coefficients(p: _Params, theta, bf: Beamformer, an: ANScheme):
    """c1^2, c2^2, c3^2 from the long-term normalizations eta and zeta."""
    eta = p.n * p.tr_sigma if bf is Beamformer.MRT else p.tr_sigma_inv / (p.n - p.k_users)
    zeta = p.n if an is ANScheme.R_AN else p.n - p.k_users
    c1_sq = 2 * theta * p.p_d / (math.pi * eta)
    c2_sq = 2 * (1 - theta) * p.p_d / (math.pi * zeta)
    return c1_sq, c2_sq, p.p_d / p.n


def _an_leakage(p: _Params, theta, an: ANScheme):
    """Artificial-noise power reaching the user and the eavesdropper."""
    _, c2_sq, _ = _power_coefficients(p, theta, Beamformer.MRT, an)
    if an is ANScheme.R_AN:
        user = eve = c2_sq * p.n
    else:
        user = c2_sq * (p.n - p.k_users) * (1 - p.s_k)
        eve = c2_sq * (p.n - p.k_users) * (1 - p.kappa * p.s_k)
    return user * p.beta_k, eve * p.beta_e


def _user_snr(p: _Params, theta, bf: Beamformer, an: ANScheme):
    c1_sq, _, c3_sq = _power_coefficients(p, theta, bf, an)
    nk = p.n - p.k_users
    if bf is Beamformer.MRT:
        mean_gain_sq = (p.n * p.s_k) ** 2
        gain_var = p.n * p.s_k
        interference = p.n * (p.tr_sigma - p.s_k)
    else:
        mean_gain_sq = 1.0
        gain_var = (1 - p.s_k) / (p.s_k * nk)
        interference = (1 - p.s_k) * (p.tr_sigma_inv - 1 / p.s_k) / nk
    an_user, _ = _an_leakage(p, theta, an)
    quant = c3_sq * p.n * p.sigma_q_sq * p.beta_k
    noise = c1_sq * p.beta_k * (gain_var + interference) + an_user + quant + 1.0
    return c1_sq * p.beta_k * mean_gain_sq / noise


def _eve_snr(p: _Params, theta, bf: Beamformer, an: ANScheme):
    c1_sq, _, c3_sq = _power_coefficients(p, theta, bf, an)
    if bf is Beamformer.MRT:
        beam_gain = p.s_k * (p.kappa * p.s_k * p.n + 1) * p.n
    else:
        beam_gain = p.kappa + (1 - p.kappa * p.s_k) / (p.s_k * (p.n - p.k_users))
    _, an_eve = _an_leakage(p, theta, an)
    noise = an_eve + c3_sq * p.n * p.sigma_q_sq * p.beta_e + 1.0
    return c1_sq * p.beta_e * beam_gain / noise


def _collapsed_secrecy(p: _Params, theta, bf: Beamformer, an: ANScheme):
    """Unclamped secrecy rate through the single-log (A/B/C) forms."""
    an_user, an_eve = _an_leakage(p, theta, an)
    q_k = p.beta_k * p.sigma_q_sq * p.p_d
    q_e = p.beta_e * p.sigma_q_sq * p.p_d
    two_tp = 2 * theta * p.p_d
    s2 = p.s_k
    if bf is Beamformer.ZF:
        a1 = math.pi * p.tr_sigma_inv * (an_user + two_tp * p.beta_k * (1 - s2) / math.pi + q_k + 1)
        a2 = math.pi * p.tr_sigma_inv * (an_eve + q_e + 1)
        c1 = a2 * (a1 - two_tp * p.k_users * p.beta_k) * s2
        c2 = a1 * (a2 * s2 - two_tp * p.beta_e * (p.kappa * (p.k_users + 1) * s2 - 1))
        num = 2 * a2 * theta * s2 * p.p_d * p.beta_k * p.n + c1
        den = 2 * a1 * theta * p.kappa * s2 * p.p_d * p.beta_e * p.n + c2
    else:
        s4 = s2 * s2
        b1 = math.pi * p.tr_sigma * (two_tp * p.beta_k / math.pi + an_user + q_k + 1)
        b2 = math.pi * p.tr_sigma * (an_eve + q_e + 1)
        c3 = b1 * b2
        c4 = b1 * b2 + 2 * b1 * theta * s2 * p.p_d * p.beta_e
        num = 2 * b2 * theta * s4 * p.p_d * p.beta_k * p.n + c3
        den = 2 * b1 * theta * p.kappa * s4 * p.p_d * p.beta_e * p.n + c4
    return np.log2(num / den)


def _resolve(cfg: SystemConfig, est: Optional[ChannelEstimate]) -> ChannelEstimate:
    return analytic_estimate(cfg) if est is None else est


def rate_user_theorem1(cfg: SystemConfig, est: Optional[ChannelEstimate] = None, theta=None):
    """Lower bound on the intercepted user's rate (bits/s/Hz)."""
    p = _params(cfg, _resolve(cfg, est))
    th = cfg.theta if theta is None else theta
    return cfg.rate_scale * np.log2(1 + _user_snr(p, th, cfg.beamformer, cfg.an_scheme))


def rate_eve_theorem2(cfg: SystemConfig, est: Optional[ChannelEstimate] = None, theta=None):
    """Large-N upper bound on the rate leaked to the eavesdropper (bits/s/Hz)."""
    p = _params(cfg, _resolve(cfg, est))
    th = cfg.theta if theta is None else theta
    return cfg.rate_scale * np.log2(1 + _eve_snr(p, th, cfg.beamformer, cfg.an_scheme))


def _secrecy_values(cfg: SystemConfig, est: ChannelEstimate, theta):
    p = _params(cfg, est)
    return cfg.rate_scale * np.maximum(_collapsed_secrecy(p, theta, cfg.beamformer, cfg.an_scheme), 0.0)


def secrecy_rate(cfg: SystemConfig, est: Optional[ChannelEstimate] = None, theta: Optional[float] = None) -> RateBundle:
    est = _resolve(cfg, est)
    th = cfg.theta if theta is None else float(theta)
    p = _params(cfg, est)
    an_user, an_eve = _an_leakage(p, th, cfg.an_scheme)
    return RateBundle(
        r_k=float(rate_user_theorem1(cfg, est, th)),
        r_e=float(rate_eve_theorem2(cfg, est, th)),
        r_s=float(_secrecy_values(cfg, est, th)),
        p_an_user=float(an_user),
        p_an_eve=float(an_eve),
        theta_used=th,
    )


def secrecy_passive(cfg: SystemConfig, perfect_csi: bool, theta: Optional[float] = None) -> RateBundle:
    """Secrecy rate against a silent eavesdropper (p_eve must be zero)."""
    if cfg.p_eve != 0:
        raise ValueError("passive eavesdropping requires p_eve == 0")
    est = perfect_csi_estimate(cfg) if perfect_csi else analytic_estimate(cfg)
    return secrecy_rate(cfg, est, theta)


def secrecy_unquantized(cfg: SystemConfig, theta: Optional[float] = None) -> RateBundle:
    """Secrecy rate of the same system with infinite-resolution ADCs and DACs."""
    uq = cfg.with_(quantized=False)
    return secrecy_rate(uq, analytic_estimate(uq), theta)


def _log2_plus(ratio: float) -> float:
    if ratio == math.inf:
        return math.inf
    return max(math.log2(ratio), 0.0)


def asymptotic_secrecy(cfg: SystemConfig, spec: AsymptoteSpec, est: Optional[ChannelEstimate] = None) -> float:
    """N -> infinity limit of the theta-maximized secrecy rate.

    Without power scaling the optimum pushes theta to 0 and only the
    artificial-noise scheme matters; with p_d ~ 1/sqrt(N) every scheme meets
    the same limit; with p_d ~ 1/N the optimum is theta -> 1 and only the
    beamformer matters. Returns ``inf`` for a passive eavesdropper under
    NO_PS and PS1.
    """
    est = _resolve(cfg, est)
    rho = cfg.p_down if spec.rho is None else spec.rho
    p = _params(cfg.with_(p_down=rho), est)
    kappa = p.kappa
    if spec.regime is Regime.PS1:
        return math.inf if kappa == 0 else _log2_plus(p.beta_k / (kappa * p.beta_e))
    if spec.regime is Regime.NO_PS:
        if kappa == 0:
            return math.inf
        # theta -> 0: only artificial noise, quantization distortion and AWGN remain
        an_user, an_eve = _an_leakage(p, 0.0, cfg.an_scheme)
        user_floor = an_user + p.beta_k * p.sigma_q_sq * p.p_d + 1
        eve_floor = an_eve + p.beta_e * p.sigma_q_sq * p.p_d + 1
        return _log2_plus(p.beta_k * eve_floor / (kappa * p.beta_e * user_floor))
    # PS2, theta -> 1: only the beamforming gain survives
    if cfg.beamformer is Beamformer.MRT:
        gain_user = p.s_k**2 / p.tr_sigma
        gain_eve = kappa * p.s_k**2 / p.tr_sigma
    else:
        gain_user = 1.0 / p.tr_sigma_inv
        gain_eve = kappa / p.tr_sigma_inv
    snr_user = 2 * p.p_d * p.beta_k * gain_user / math.pi
    snr_eve = 2 * p.p_d * p.beta_e * gain_eve / math.pi
    return _log2_plus((1 + snr_user) / (1 + snr_eve))


def positivity_threshold(cfg: SystemConfig, spec: AsymptoteSpec) -> float:
    """Largest transmit power ratio p_e/p_k that still allows positive asymptotic secrecy.

    NO_PS uses the closed form derived for equal fading; it is exact only for
    beta_k == beta_e; the scaling regimes use (beta_k/beta_e)^2.
    """
    bk, be = cfg.beta_k, cfg.beta_e
    if spec.regime is not Regime.NO_PS:
        return (bk / be) ** 2
    rho = cfg.p_down if spec.rho is None else spec.rho
    if cfg.quantized:
        p_d, sq = rho, 1.0 - 2.0 / math.pi
    else:
        p_d, sq = rho * math.pi / 2, 0.0
    return 1.0 + math.pi * bk * (bk - be) / ((p_d * bk * (math.pi * sq + 2) + math.pi) * be**2)


def optimize_theta(cfg: SystemConfig, est: Optional[ChannelEstimate] = None, grid: np.ndarray = THETA_GRID):
    """Maximize the secrecy rate over theta: dense grid, then golden-section polish.

    Returns ``(theta_star, r_s_max)``.
    """
    est = _resolve(cfg, est)
    values = _secrecy_values(cfg, est, grid)
    i = int(np.argmax(values))
    if values[i] <= 0:
        return float(grid[i]), 0.0
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    f = lambda t: float(_secrecy_values(cfg, est, t))
    a, b = lo + (1 - _GOLDEN) * (hi - lo), lo + _GOLDEN * (hi - lo)
    fa, fb = f(a), f(b)
    while hi - lo > 1e-6:
        if fa >= fb:
            hi, b, fb = b, a, fa
            a = lo + (1 - _GOLDEN) * (hi - lo)
            fa = f(a)
        else:
            lo, a, fa = a, b, fb
            b = lo + _GOLDEN * (hi - lo)
            fb = f(b)
    best_t, best_v = float(grid[i]), float(values[i])
    for t, v in ((a, fa), (b, fb)):
        if v > best_v:
            best_t, best_v = float(t), v
    return best_t, best_v
