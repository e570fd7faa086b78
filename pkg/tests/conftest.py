import math
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from qmimo_secrecy import SystemConfig  # noqa: E402

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def db(x):
    return 10 ** (x / 10)


def random_configs(count=100, seed=7):
    """Valid configurations spanning heterogeneous powers and fading."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        K = int(rng.integers(1, 21))
        N = int(rng.integers(K + 2, 1025))
        tau = K + int(rng.integers(0, 6))
        out.append(
            SystemConfig(
                n_antennas=N,
                num_users=K,
                tau=tau,
                p_users=tuple(db(rng.uniform(-5, 20)) for _ in range(K)),
                p_eve=db(rng.uniform(-10, 12)),
                p_down=db(rng.uniform(-5, 20)),
                betas=tuple(rng.uniform(0.05, 1.0) for _ in range(K)),
                beta_e=float(rng.uniform(0.05, 1.0)),
                theta=float(rng.uniform(0.01, 0.99)),
                intercepted_user=int(rng.integers(0, K)),
                beamformer=("MRT", "ZF")[int(rng.integers(0, 2))],
                an_scheme=("R_AN", "NS_AN")[int(rng.integers(0, 2))],
            )
        )
    return out


def fig3_config(n=128, **kw):
    kw.setdefault("theta", 0.5)
    p_e = kw.pop("p_eve", db(5))
    return SystemConfig.symmetric(n, 10, db(10), p_e, db(10), **kw)


@pytest.fixture
def fig3():
    return fig3_config


def close(a, b, rel=1e-9, abs_=1e-12):
    return math.isclose(a, b, rel_tol=rel, abs_tol=abs_)
