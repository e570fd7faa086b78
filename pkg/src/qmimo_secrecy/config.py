"""System parameters shared by every stage of the simulator.

All powers and fading coefficients are linear scale here. Decibel
conversion happens only at the experiment/CLI boundary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Sequence

import numpy as np

__all__ = ["Beamformer", "ANScheme", "SystemConfig"]


class Beamformer(str, Enum):
    MRT = "MRT"
    ZF = "ZF"


class ANScheme(str, Enum):
    R_AN = "R_AN"
    NS_AN = "NS_AN"


def _as_tuple(values) -> tuple:
    return tuple(float(v) for v in values)


@dataclass(frozen=True)
class SystemConfig:
    """One snapshot of the single-cell downlink under pilot attack.

    ``intercepted_user`` is a zero-based column index into H.
    """

    n_antennas: int
    num_users: int
    tau: int
    p_users: tuple
    p_eve: float
    p_down: float
    betas: tuple
    beta_e: float = 1.0
    theta: float = 0.5
    intercepted_user: int = 0
    beamformer: Beamformer = Beamformer.ZF
    an_scheme: ANScheme = ANScheme.NS_AN
    quantized: bool = True
    coherence_tc: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "p_users", _as_tuple(self.p_users))
        object.__setattr__(self, "betas", _as_tuple(self.betas))
        object.__setattr__(self, "beamformer", Beamformer(self.beamformer))
        object.__setattr__(self, "an_scheme", ANScheme(self.an_scheme))
        K, N = self.num_users, self.n_antennas
        if K < 1 or N <= K:
            raise ValueError(f"need N > K >= 1, got N={N}, K={K}")
        if self.tau < K:
            raise ValueError(f"need tau >= K, got tau={self.tau}, K={K}")
        if len(self.p_users) != K or len(self.betas) != K:
            raise ValueError("p_users and betas must have one entry per user")
        if not 0.0 < self.theta < 1.0:
            raise ValueError(f"theta must lie in (0, 1), got {self.theta}")
        if not 0 <= self.intercepted_user < K:
            raise ValueError(f"intercepted_user must be in [0, {K}), got {self.intercepted_user}")
        scalars = (*self.p_users, *self.betas, self.p_eve, self.p_down, self.beta_e)
        if not all(math.isfinite(v) for v in scalars):
            raise ValueError("powers and fading coefficients must be finite")
        if min(self.p_users) <= 0 or min(self.betas) <= 0 or self.beta_e <= 0 or self.p_down <= 0:
            raise ValueError("user powers, p_down and fading coefficients must be positive")
        if self.p_eve < 0:
            raise ValueError("p_eve must be non-negative")
        if self.coherence_tc is not None and self.coherence_tc <= self.tau:
            raise ValueError("coherence_tc must exceed tau")

    @classmethod
    def symmetric(
        cls,
        n_antennas: int,
        num_users: int,
        p_u: float,
        p_e: float,
        p_d: float,
        *,
        tau: Optional[int] = None,
        beta: float = 1.0,
        beta_e: float = 1.0,
        **kwargs,
    ) -> "SystemConfig":
        """Equal user powers and equal large-scale fading (the usual test setup)."""
        return cls(
            n_antennas=n_antennas,
            num_users=num_users,
            tau=num_users if tau is None else tau,
            p_users=(p_u,) * num_users,
            p_eve=p_e,
            p_down=p_d,
            betas=(beta,) * num_users,
            beta_e=beta_e,
            **kwargs,
        )

    def with_(self, **changes) -> "SystemConfig":
        return replace(self, **changes)

    @property
    def k(self) -> int:
        return self.intercepted_user

    @property
    def p_primes(self) -> np.ndarray:
        return np.asarray(self.betas) * np.asarray(self.p_users)

    @property
    def p_e_prime(self) -> float:
        return self.beta_e * self.p_eve

    @property
    def beta_k(self) -> float:
        return self.betas[self.k]

    @property
    def kappa_r(self) -> float:
        """Received (training) power ratio, eavesdropper over intercepted user."""
        return self.p_e_prime / self.p_primes[self.k]

    @property
    def kappa_t(self) -> float:
        """Transmit power ratio, eavesdropper over intercepted user."""
        return self.p_eve / self.p_users[self.k]

    @property
    def rate_scale(self) -> float:
        # fraction of the coherence block spent on downlink data
        if self.coherence_tc is None:
            return 1.0
        return 1.0 - self.tau / self.coherence_tc
