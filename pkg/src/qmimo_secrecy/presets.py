"""Ready-made experiment sets, one per reproduced result (fig3 ... fig10)."""
from __future__ import annotations

from dataclasses import replace
from typing import Callable, Optional

from .config import ANScheme, Beamformer
from .ensembles import SeedSpec
from .experiments import (
    ALL_SCHEMES,
    DEFAULT_SEED,
    BaseScenario,
    ExperimentConfig,
    GeometryModel,
    Scenario,
    Sweep,
    Variant,
)
from .montecarlo import TrialPlan
from .rates import Regime

__all__ = ["PRESETS", "GeometryPreset", "build_preset"]

NS_ONLY = ((Beamformer.MRT, ANScheme.NS_AN), (Beamformer.ZF, ANScheme.NS_AN))
ZF_NS = ((Beamformer.ZF, ANScheme.NS_AN),)
THETA_VALUES = tuple(round(0.05 * i, 2) for i in range(1, 20))


def _plan(trials: int, seed: int) -> Optional[TrialPlan]:
    return TrialPlan(trials, SeedSpec(seed)) if trials else None


def fig3(trials: int = 2000, seed: int = DEFAULT_SEED) -> list:
    base = BaseScenario(p_e_db=5.0, theta=0.5)
    return [
        ExperimentConfig(
            Scenario.RATE_VS_N, base, Sweep("N", (16, 32, 64, 128, 256)), NS_ONLY, trials=_plan(trials, seed), seed=seed
        )
    ]


def fig4(trials: int = 300, seed: int = DEFAULT_SEED) -> list:
    return [
        ExperimentConfig(
            Scenario.SECRECY_VS_THETA,
            BaseScenario(n_antennas=n, p_e_db=7.0, theta=None),
            Sweep("theta", THETA_VALUES),
            ALL_SCHEMES,
            trials=_plan(trials, seed),
            series=f"N={n}",
            seed=seed,
        )
        for n in (32, 64, 128, 256)
    ]


def fig5(trials: int = 500, seed: int = DEFAULT_SEED) -> list:
    base = BaseScenario(n_antennas=128, p_e_db=5.0, theta=None)
    return [
        ExperimentConfig(
            Scenario.USERS_SWEEP, base, Sweep("K", tuple(range(2, 31, 2))), ALL_SCHEMES, trials=_plan(trials, seed), seed=seed
        )
    ]


def fig6(trials: int = 500, seed: int = DEFAULT_SEED) -> list:
    base = BaseScenario(n_antennas=64, theta=None)
    values = tuple(float(v) for v in range(-10, 1))
    return [
        ExperimentConfig(
            Scenario.KAPPA_SWEEP, base, Sweep("kappa_T_dB", values), ALL_SCHEMES, trials=_plan(trials, seed), seed=seed
        )
    ]


def fig8(trials: int = 500, seed: int = DEFAULT_SEED) -> list:
    sweep = Sweep("N", (16, 32, 64, 128, 256, 512))
    plan = _plan(trials, seed)
    exps = [
        ExperimentConfig(
            Scenario.PASSIVE_VS_ACTIVE,
            BaseScenario(p_e_db=p_e, theta=None),
            sweep,
            ZF_NS,
            trials=plan,
            series=f"active p_e={p_e:g}dB",
            seed=seed,
        )
        for p_e in (0.0, 5.0)
    ]
    exps.append(
        ExperimentConfig(
            Scenario.PASSIVE_VS_ACTIVE,
            BaseScenario(theta=None),
            sweep,
            ZF_NS,
            variants=(Variant.P_ICSI, Variant.P_PCSI),
            trials=plan,
            series="passive",
            seed=seed,
        )
    )
    return exps


def fig9(trials: int = 300, seed: int = DEFAULT_SEED) -> list:
    return [
        ExperimentConfig(
            Scenario.UQ_COMPARE,
            BaseScenario(p_e_db=7.0, theta=None),
            Sweep("N", (16, 32, 64, 128, 256, 512, 1024)),
            ALL_SCHEMES,
            variants=(Variant.QUANTIZED, Variant.UNQUANTIZED),
            trials=_plan(trials, seed),
            simulate_values=(16, 32, 64, 128, 256),
            seed=seed,
        )
    ]


def fig10(trials: int = 300, seed: int = DEFAULT_SEED) -> list:
    n_values = tuple(2**e for e in range(5, 31))
    return [
        ExperimentConfig(
            Scenario.ASYMPTOTE,
            BaseScenario(p_u_db=10.0, p_e_db=8.0, p_d_db=10.0, theta=None),
            Sweep("N", n_values),
            ALL_SCHEMES,
            variants=(Variant.QUANTIZED, Variant.UNQUANTIZED),
            trials=_plan(trials, seed),
            regimes=(Regime.NO_PS, Regime.PS1, Regime.PS2),
            rho_db=10.0,
            simulate_values=(32, 64, 128, 512),
            seed=seed,
        )
    ]


class GeometryPreset:
    """Random-drop CDF experiments: one series per eavesdropper power."""

    def __init__(self, num_drops: int = 10_000, seed: int = DEFAULT_SEED, p_e_values=(0.0, 5.0, 10.0)):
        self.num_drops = num_drops
        self.geometry = GeometryModel()
        self.experiments = [
            ExperimentConfig(
                Scenario.GEOMETRY_CDF,
                BaseScenario(n_antennas=128, p_e_db=p_e, theta=None),
                series=f"p_e={p_e:g}dB",
                seed=seed,
            )
            for p_e in p_e_values
        ]


def fig7(num_drops: int = 10_000, seed: int = DEFAULT_SEED) -> GeometryPreset:
    return GeometryPreset(num_drops, seed)


PRESETS: dict[str, Callable] = {
    "fig3": fig3,
    "fig4": fig4,
    "fig5": fig5,
    "fig6": fig6,
    "fig7": fig7,
    "fig8": fig8,
    "fig9": fig9,
    "fig10": fig10,
}


def build_preset(name: str, trials: Optional[int] = None, seed: int = DEFAULT_SEED, num_drops: Optional[int] = None):
    """Experiments for a named preset; ``trials=0`` disables simulation."""
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    if name == "fig7":
        return fig7(num_drops if num_drops is not None else 10_000, seed)
    kwargs = {"seed": seed}
    if trials is not None:
        kwargs["trials"] = trials
    return PRESETS[name](**kwargs)


def with_output(exps: list, path: str) -> list:
    return [replace(e, output_path=path) for e in exps]
