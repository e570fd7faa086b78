"""Reproducible random ensembles: complex Gaussian draws and orthogonal pilots.

Every random draw is keyed on ``(master_seed, trial_index, stream_label)``.
The key feeds a counter-based Philox generator, so a trial's draws do not
depend on which worker runs it or in what order trials are scheduled.
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "SeedSpec",
    "PilotMatrix",
    "substream",
    "complex_gaussian",
    "gen_complex_gaussian",
    "gen_pilot_matrix",
]

_U64 = 2**64


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int = 0
    trial_index: int = 0
    stream_label: str = ""

    def __post_init__(self):
        if not 0 <= self.master_seed < _U64:
            raise ValueError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")
        if self.trial_index < 0:
            raise ValueError(f"trial_index must be non-negative, got {self.trial_index}")

    def trial(self, index: int) -> "SeedSpec":
        return replace(self, trial_index=index)

    def label(self, stream_label: str) -> "SeedSpec":
        return replace(self, stream_label=stream_label)


def substream(seed: SeedSpec) -> np.random.Generator:
    """Independent Philox generator for one (seed, trial, label) key."""
    label_key = zlib.crc32(seed.stream_label.encode("utf-8"))
    ss = np.random.SeedSequence(entropy=seed.master_seed, spawn_key=(seed.trial_index, label_key))
    return np.random.Generator(np.random.Philox(ss))


def complex_gaussian(rng: np.random.Generator, shape, variance: float = 1.0) -> np.ndarray:
    """i.i.d. CN(0, variance) entries drawn from an existing generator."""
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def gen_complex_gaussian(rows: int, cols: int, variance: float, seed: SeedSpec) -> np.ndarray:
    """rows x cols matrix of circularly-symmetric CN(0, variance) entries.

    The same ``seed`` always returns a bit-identical matrix.
    """
    if rows <= 0 or cols <= 0:
        raise ValueError(f"dimensions must be positive, got {rows}x{cols}")
    if not variance > 0:
        raise ValueError(f"variance must be positive, got {variance}")
    return complex_gaussian(substream(seed), (rows, cols), variance)


@dataclass(frozen=True)
class PilotMatrix:
    # K x tau; row j is the pilot sequence of user j
    entries: np.ndarray
    tau: int
    num_users: int

    def sequence(self, user: int) -> np.ndarray:
        return self.entries[user]


def gen_pilot_matrix(tau: int, num_users: int) -> PilotMatrix:
    """Unit-modulus orthogonal pilots built from the first ``num_users`` DFT rows."""
    if tau <= 0 or num_users <= 0:
        raise ValueError("tau and num_users must be positive")
    if tau < num_users:
        raise ValueError(f"need tau >= num_users for orthogonal pilots, got tau={tau}, K={num_users}")
    j = np.arange(num_users)[:, None]
    t = np.arange(tau)[None, :]
    # reduce the exponent mod tau before scaling so large tau keeps full precision
    entries = np.exp(2j * np.pi * ((j * t) % tau) / tau)
    return PilotMatrix(entries=entries, tau=tau, num_users=num_users)
