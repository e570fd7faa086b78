"""Monte Carlo counterparts of the closed-form bounds.

Every trial runs the full chain: channel draw, one-bit training, LMMSE
estimate, precoder, and a few one-bit quantized transmit slots. The
legitimate user's bound is assembled from moments estimated across
trials; the leakage is the ergodic average of the per-realization
eavesdropper rate. Trial ``t`` always consumes the random substreams keyed
on ``t``, so results do not depend on the number of workers and sweeps
over theta or schemes use common random numbers.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy import stats

from .config import SystemConfig
from .ensembles import SeedSpec, complex_gaussian, gen_pilot_matrix, substream
from .estimation import (
    analytic_estimate,
    draw_channels,
    lmmse_estimate,
    perfect_csi_estimate,
    simulate_training,
)
from .precoding import (
    build_precoder,
    linearized_transmit_decomposition,
    normalization_constants,
    synthesize_transmit,
)
from .quantizer import SIGMA_Q_SQ

__all__ = [
    "TrialPlan",
    "EmpiricalRate",
    "SimulationResult",
    "trial_statistics",
    "simulate",
    "simulate_legit_rate",
    "simulate_eve_rate",
    "simulate_secrecy",
]

# columns of the per-trial statistics table
_RE, _IM, _ABS2, _INTERF, _AN, _QUANT, _EVE_EMP, _EVE_ABS = range(8)
_N_STATS = 8


@dataclass(frozen=True)
class TrialPlan:
    num_trials: int = 2000
    seed: SeedSpec = SeedSpec()
    confidence: float = 0.95
    symbol_slots: int = 16

    def __post_init__(self):
        if self.num_trials < 100:
            raise ValueError(f"need at least 100 trials for a reported estimate, got {self.num_trials}")
        if not 0 < self.confidence < 1:
            raise ValueError("confidence must lie in (0, 1)")
        if self.symbol_slots < 1:
            raise ValueError("symbol_slots must be positive")


@dataclass(frozen=True)
class EmpiricalRate:
    mean: float
    ci_halfwidth: float
    num_trials: int


@dataclass(frozen=True)
class SimulationResult:
    user: EmpiricalRate
    eve: EmpiricalRate
    eve_abstract: EmpiricalRate  # leakage with sigma_q^2*||g||^2 in place of the measured distortion
    secrecy: EmpiricalRate


def trial_statistics(cfg: SystemConfig, seed: SeedSpec, slots: int = 16, perfect_csi: bool = False) -> np.ndarray:
    """Per-realization quantities for one trial (one coherence block).

    With ``perfect_csi`` the precoder is built from the true channel and the
    training phase is skipped (only meaningful for a passive eavesdropper).
    """
    channels = draw_channels(cfg, seed)
    if perfect_csi:
        base = perfect_csi_estimate(cfg)
        est = replace(base, h_hat=channels.h_matrix)
    else:
        pilots = gen_pilot_matrix(cfg.tau, cfg.num_users)
        v = simulate_training(cfg, channels, pilots)
        est = lmmse_estimate(cfg, v, pilots)
    pre = build_precoder(cfg, est)
    k = cfg.k
    h_k = channels.h_matrix[:, k]
    g = channels.g_vector

    gains = h_k @ pre.w_matrix  # h_k^T w_j for every j
    u_k = gains[k]
    interference = float(np.sum(np.abs(gains) ** 2) - abs(u_k) ** 2)
    an_user = float(np.real(h_k @ pre.shaping @ h_k.conj()))

    symbols = complex_gaussian(substream(seed.label("s")), (cfg.num_users, slots))
    an_draw = complex_gaussian(substream(seed.label("an")), (cfg.n_antennas, slots))
    x, x_tilde = synthesize_transmit(cfg, pre, symbols, an_draw)
    _, _, q_bar = linearized_transmit_decomposition(cfg, pre, x_tilde, x, symbols, an_draw)
    quant_user = float(np.mean(np.abs(h_k @ q_bar) ** 2))
    quant_eve = float(np.mean(np.abs(g @ q_bar) ** 2))

    be = cfg.beta_e
    eve_signal = pre.c1**2 * be * abs(g @ pre.w_matrix[:, k]) ** 2
    eve_an = pre.c2**2 * be * float(np.real(g @ pre.shaping @ g.conj()))
    sq = SIGMA_Q_SQ if cfg.quantized else 0.0
    eve_noise_emp = eve_an + pre.c3**2 * be * quant_eve + 1.0
    eve_noise_abs = eve_an + pre.c3**2 * be * sq * float(np.real(g @ g.conj())) + 1.0

    out = np.empty(_N_STATS)
    out[_RE], out[_IM], out[_ABS2] = u_k.real, u_k.imag, abs(u_k) ** 2
    out[_INTERF], out[_AN], out[_QUANT] = interference, an_user, quant_user
    out[_EVE_EMP] = math.log2(1 + eve_signal / eve_noise_emp)
    out[_EVE_ABS] = math.log2(1 + eve_signal / eve_noise_abs)
    return out


def _chunk(args) -> np.ndarray:
    cfg, base, start, stop, slots, perfect = args
    return np.stack([trial_statistics(cfg, base.trial(t), slots, perfect) for t in range(start, stop)])


def _run_trials(cfg: SystemConfig, plan: TrialPlan, workers: int, perfect_csi: bool = False) -> np.ndarray:
    n = plan.num_trials
    if workers <= 1:
        return _chunk((cfg, plan.seed, 0, n, plan.symbol_slots, perfect_csi))
    bounds = np.linspace(0, n, 4 * workers + 1).astype(int)
    jobs = [
        (cfg, plan.seed, int(a), int(b), plan.symbol_slots, perfect_csi)
        for a, b in zip(bounds[:-1], bounds[1:])
        if b > a
    ]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return np.concatenate(list(pool.map(_chunk, jobs)))


def _user_rate_from_means(m: np.ndarray, cfg: SystemConfig, c1_sq: float, c2_sq: float, c3_sq: float) -> float:
    bk = cfg.beta_k
    mean_sq = m[_RE] ** 2 + m[_IM] ** 2
    signal = c1_sq * bk * mean_sq
    noise = (
        c1_sq * bk * (m[_ABS2] - mean_sq + m[_INTERF])
        + c2_sq * bk * m[_AN]
        + c3_sq * bk * m[_QUANT]
        + 1.0
    )
    return math.log2(1 + signal / noise)


def _delta_halfwidth(fn, samples: np.ndarray, z: float) -> float:
    """Delta-method CI half-width for fn(column means)."""
    n = samples.shape[0]
    m = samples.mean(axis=0)
    grad = np.zeros_like(m)
    for i in range(m.size):
        h = 1e-6 * max(abs(m[i]), 1e-3)
        up, dn = m.copy(), m.copy()
        up[i] += h
        dn[i] -= h
        grad[i] = (fn(up) - fn(dn)) / (2 * h)
    cov = np.cov(samples, rowvar=False)
    return float(z * math.sqrt(max(grad @ cov @ grad, 0.0) / n))


def _coefficients(cfg: SystemConfig, perfect_csi: bool = False):
    est = perfect_csi_estimate(cfg) if perfect_csi else analytic_estimate(cfg)
    eta, zeta = normalization_constants(cfg, est)
    p_d = cfg.p_down if cfg.quantized else cfg.p_down * math.pi / 2
    c1_sq = 2 * cfg.theta * p_d / (math.pi * eta)
    c2_sq = 2 * (1 - cfg.theta) * p_d / (math.pi * zeta)
    return c1_sq, c2_sq, p_d / cfg.n_antennas


def summarize(
    cfg: SystemConfig, samples: np.ndarray, confidence: float = 0.95, perfect_csi: bool = False
) -> SimulationResult:
    """Reduce a per-trial statistics table to rate estimates with delta-method CIs."""
    n = samples.shape[0]
    z = float(stats.norm.ppf(0.5 + confidence / 2))
    c1_sq, c2_sq, c3_sq = _coefficients(cfg, perfect_csi)
    scale = cfg.rate_scale

    def user_fn(m):
        return scale * _user_rate_from_means(m, cfg, c1_sq, c2_sq, c3_sq)

    def secrecy_fn(m):
        return user_fn(m) - scale * m[_EVE_EMP]

    m = samples.mean(axis=0)
    sd = samples.std(axis=0, ddof=1)
    user = EmpiricalRate(user_fn(m), _delta_halfwidth(user_fn, samples, z), n)
    eve = EmpiricalRate(float(scale * m[_EVE_EMP]), float(scale * z * sd[_EVE_EMP] / math.sqrt(n)), n)
    eve_abs = EmpiricalRate(float(scale * m[_EVE_ABS]), float(scale * z * sd[_EVE_ABS] / math.sqrt(n)), n)
    secrecy = EmpiricalRate(max(float(secrecy_fn(m)), 0.0), _delta_halfwidth(secrecy_fn, samples, z), n)
    return SimulationResult(user, eve, eve_abs, secrecy)


def simulate(cfg: SystemConfig, plan: TrialPlan, workers: int = 1, perfect_csi: bool = False) -> SimulationResult:
    """Run ``plan.num_trials`` trials and reduce them to rate estimates with CIs."""
    if perfect_csi and cfg.p_eve != 0:
        raise ValueError("perfect CSI is only defined against a passive eavesdropper")
    return summarize(cfg, _run_trials(cfg, plan, workers, perfect_csi), plan.confidence, perfect_csi)


def simulate_legit_rate(cfg: SystemConfig, plan: TrialPlan, workers: int = 1) -> EmpiricalRate:
    return simulate(cfg, plan, workers).user


def simulate_eve_rate(cfg: SystemConfig, plan: TrialPlan, workers: int = 1, distortion: str = "empirical") -> EmpiricalRate:
    """Ergodic leakage; ``distortion`` picks measured ("empirical") or modeled ("abstract") quantization noise."""
    res = simulate(cfg, plan, workers)
    if distortion == "empirical":
        return res.eve
    if distortion == "abstract":
        return res.eve_abstract
    raise ValueError(f"unknown distortion model {distortion!r}")


def simulate_secrecy(cfg: SystemConfig, plan: TrialPlan, workers: int = 1) -> EmpiricalRate:
    return simulate(cfg, plan, workers).secrecy
