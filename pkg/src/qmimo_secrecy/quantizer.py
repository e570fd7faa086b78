"""One-bit sign quantization and its Bussgang linearization.

Two output conventions exist. The raw sign map returns ``+-1 +-1j``. The
QPSK alphabet used by the transceiver is the unit-modulus version
``(+-1 +-1j)/sqrt(2)``; the Bussgang gain ``sqrt(2/(pi*var))`` and the
distortion variance ``1 - 2/pi`` hold for that normalized output only, so
everything downstream of this module quantizes with ``normalized=True``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "SIGMA_Q_SQ",
    "BussgangFactors",
    "one_bit_quantize",
    "uplink_bussgang",
    "downlink_bussgang",
    "unquantized_factors",
    "extract_quantization_noise",
]

SIGMA_Q_SQ = 1.0 - 2.0 / math.pi


@dataclass(frozen=True)
class BussgangFactors:
    gamma: float
    sigma_q_sq: float
    input_variance: float


def one_bit_quantize(x, normalized: bool = False) -> np.ndarray:
    """Sign of real and imaginary parts, independently.

    Zero maps to +1 on either axis. With ``normalized=True`` the output
    lies on the unit circle.
    """
    x = np.asarray(x)
    out = np.where(x.real >= 0, 1.0, -1.0) + 1j * np.where(x.imag >= 0, 1.0, -1.0)
    if normalized:
        out = out / math.sqrt(2.0)
    return out


def _factors(input_variance: float) -> BussgangFactors:
    return BussgangFactors(
        gamma=math.sqrt(2.0 / (math.pi * input_variance)),
        sigma_q_sq=SIGMA_Q_SQ,
        input_variance=input_variance,
    )


def uplink_bussgang(p_primes: Sequence[float], p_e_prime: float) -> BussgangFactors:
    """Gain for the BS receive quantizer; input variance is sum(p') + p_e' + 1."""
    if any(p < 0 for p in p_primes) or p_e_prime < 0:
        raise ValueError("received powers must be non-negative")
    return _factors(math.fsum(p_primes) + p_e_prime + 1.0)


def downlink_bussgang(n_antennas: int) -> BussgangFactors:
    """Gain for the per-antenna DAC; each precoded entry has variance 1/N."""
    if n_antennas < 1:
        raise ValueError(f"n_antennas must be >= 1, got {n_antennas}")
    return _factors(1.0 / n_antennas)


def unquantized_factors(input_variance: float = 1.0) -> BussgangFactors:
    # infinite-resolution converters: unit gain, no distortion
    return BussgangFactors(gamma=1.0, sigma_q_sq=0.0, input_variance=input_variance)


def extract_quantization_noise(y, gamma: float) -> np.ndarray:
    """Distortion ``q = Q(y) - gamma * y`` with Q the unit-modulus sign map."""
    y = np.asarray(y)
    return one_bit_quantize(y, normalized=True) - gamma * y
