"""Batch experiments: scenario configs, sweeps, named presets and CSV output.

Powers are given in dB at this layer and converted to linear scale when a
:class:`SystemConfig` is built. Analytic columns depend only on the system
configuration; simulated columns depend on the :class:`TrialPlan` as well.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from enum import Enum
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .config import ANScheme, Beamformer, SystemConfig
from .ensembles import SeedSpec, substream
from .estimation import analytic_estimate, perfect_csi_estimate
from .montecarlo import TrialPlan, simulate
from .rates import AsymptoteSpec, Regime, apply_regime, asymptotic_secrecy, optimize_theta, secrecy_rate

__all__ = [
    "Scenario",
    "Variant",
    "Sweep",
    "BaseScenario",
    "ExperimentConfig",
    "GeometryModel",
    "CSV_COLUMNS",
    "CDF_COLUMNS",
    "SWEEP_VARIABLES",
    "ALL_SCHEMES",
    "db_to_linear",
    "linear_to_db",
    "run_experiment",
    "run_geometry_cdf",
    "write_rows",
    "write_meta",
    "write_gnuplot",
    "rows_to_csv",
    "geometry_secrecy_rates",
    "experiment_from_dict",
]

DEFAULT_SEED = 20240917

SWEEP_VARIABLES = ("N", "K", "theta", "p_e_dB", "kappa_T_dB", "regime")

# The first ten columns are the stable schema; the trailing ones add context.
CSV_COLUMNS = (
    "sweep_value",
    "beamformer",
    "an_scheme",
    "theta",
    "r_k_analytic",
    "r_e_analytic",
    "r_s_analytic",
    "r_s_simulated",
    "ci_halfwidth",
    "seed",
    "series",
    "variant",
    "regime",
    "r_k_simulated",
    "r_e_simulated",
)
CDF_COLUMNS = ("r_s", "cdf", "series", "seed")

ALL_SCHEMES = (
    (Beamformer.MRT, ANScheme.R_AN),
    (Beamformer.MRT, ANScheme.NS_AN),
    (Beamformer.ZF, ANScheme.R_AN),
    (Beamformer.ZF, ANScheme.NS_AN),
)


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    if not x > 0:
        raise ValueError(f"linear_to_db needs a positive value, got {x}")
    return 10.0 * math.log10(x)


class Scenario(str, Enum):
    RATE_VS_N = "RATE_VS_N"
    SECRECY_VS_THETA = "SECRECY_VS_THETA"
    USERS_SWEEP = "USERS_SWEEP"
    KAPPA_SWEEP = "KAPPA_SWEEP"
    GEOMETRY_CDF = "GEOMETRY_CDF"
    PASSIVE_VS_ACTIVE = "PASSIVE_VS_ACTIVE"
    UQ_COMPARE = "UQ_COMPARE"
    ASYMPTOTE = "ASYMPTOTE"


class Variant(str, Enum):
    QUANTIZED = "quantized"
    UNQUANTIZED = "unquantized"
    P_ICSI = "p_icsi"  # passive eavesdropper, estimated CSI
    P_PCSI = "p_pcsi"  # passive eavesdropper, perfect CSI


@dataclass(frozen=True)
class Sweep:
    variable: str
    values: tuple

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ValueError(f"sweep variable must be one of {SWEEP_VARIABLES}, got {self.variable!r}")
        object.__setattr__(self, "values", tuple(self.values))
        if not self.values:
            raise ValueError("sweep needs at least one value")


@dataclass(frozen=True)
class BaseScenario:
    """System parameters with powers in dB. ``theta=None`` means per-point theta*."""

    n_antennas: int = 64
    num_users: int = 10
    tau: Optional[int] = None  # None: tau = num_users
    p_u_db: float = 10.0
    p_e_db: float = 5.0
    p_d_db: float = 10.0
    beta: float = 1.0
    beta_e: float = 1.0
    theta: Optional[float] = 0.5
    intercepted_user: int = 0
    coherence_tc: Optional[int] = None

    def system(self, beamformer: Beamformer, an_scheme: ANScheme, **overrides) -> SystemConfig:
        k = overrides.pop("num_users", self.num_users)
        tau = overrides.pop("tau", self.tau if self.tau is not None else k)
        p_e_db = overrides.pop("p_e_db", self.p_e_db)
        return SystemConfig.symmetric(
            overrides.pop("n_antennas", self.n_antennas),
            k,
            db_to_linear(self.p_u_db),
            db_to_linear(p_e_db),
            db_to_linear(self.p_d_db),
            tau=tau,
            beta=self.beta,
            beta_e=self.beta_e,
            theta=overrides.pop("theta", self.theta if self.theta is not None else 0.5),
            intercepted_user=self.intercepted_user,
            beamformer=beamformer,
            an_scheme=an_scheme,
            coherence_tc=self.coherence_tc,
            **overrides,
        )


@dataclass(frozen=True)
class GeometryModel:
    cell_radius_m: float = 1000.0
    eve_radius_m: float = 100.0
    pathloss_exponent: float = 3.8
    reference_distance_m: float = 100.0

    def __post_init__(self):
        for name in ("cell_radius_m", "eve_radius_m", "pathloss_exponent", "reference_distance_m"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    def beta(self, distance_m):
        d = np.maximum(np.asarray(distance_m, dtype=float), self.reference_distance_m)
        return (d / self.reference_distance_m) ** (-self.pathloss_exponent)


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: Scenario
    base: BaseScenario = BaseScenario()
    sweep: Optional[Sweep] = None
    schemes: tuple = ALL_SCHEMES
    variants: tuple = (Variant.QUANTIZED,)
    trials: Optional[TrialPlan] = None  # None: analytic columns only
    output_path: Optional[str] = None
    series: str = ""
    regimes: tuple = (Regime.NO_PS,)
    rho_db: Optional[float] = None  # BS power budget under power scaling; defaults to p_d
    simulate_values: Optional[tuple] = None  # restrict simulation to these sweep values
    include_limits: bool = True  # ASYMPTOTE: append the N -> infinity rows
    seed: Optional[int] = None  # defaults to the trial plan's master seed

    def __post_init__(self):
        if self.seed is None:
            seed = self.trials.seed.master_seed if self.trials is not None else DEFAULT_SEED
            object.__setattr__(self, "seed", seed)
        elif self.trials is not None and self.trials.seed.master_seed != self.seed:
            raise ValueError("seed disagrees with the trial plan's master seed")
        object.__setattr__(self, "scenario", Scenario(self.scenario))
        object.__setattr__(self, "variants", tuple(Variant(v) for v in self.variants))
        object.__setattr__(self, "regimes", tuple(Regime(r) for r in self.regimes))
        object.__setattr__(
            self, "schemes", tuple((Beamformer(b), ANScheme(a)) for b, a in self.schemes)
        )
        if self.scenario is Scenario.GEOMETRY_CDF:
            return
        if self.sweep is None:
            raise ValueError(f"scenario {self.scenario.value} needs a sweep")
        if self.scenario is Scenario.ASYMPTOTE and self.sweep.variable != "N":
            raise ValueError("ASYMPTOTE sweeps over N")


# ---------------------------------------------------------------- sweep points


def _format(value) -> str:
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if value is None:
        return ""
    v = float(value)
    if math.isinf(v):
        return "inf"
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return format(v, ".10g")


def _point_system(exp: ExperimentConfig, value, bf, an, variant: Variant, regime: Regime) -> SystemConfig:
    base = exp.base
    over: dict = {}
    var = exp.sweep.variable
    if var == "N":
        over["n_antennas"] = int(value)
    elif var == "K":
        over["num_users"] = int(value)
        over["tau"] = base.tau if base.tau is not None and base.tau >= int(value) else int(value)
    elif var == "theta":
        over["theta"] = float(value)
    elif var == "p_e_dB":
        over["p_e_db"] = float(value)
    elif var == "kappa_T_dB":
        over["p_e_db"] = base.p_u_db + float(value)
    elif var == "regime":
        regime = Regime(value)
    cfg = base.system(bf, an, **over)
    if variant in (Variant.P_ICSI, Variant.P_PCSI):
        cfg = cfg.with_(p_eve=0.0)
    elif variant is Variant.UNQUANTIZED:
        cfg = cfg.with_(quantized=False)
    rho = db_to_linear(exp.rho_db) if exp.rho_db is not None else cfg.p_down
    return apply_regime(cfg, AsymptoteSpec(regime, rho))


def _estimate(cfg: SystemConfig, variant: Variant):
    return perfect_csi_estimate(cfg) if variant is Variant.P_PCSI else analytic_estimate(cfg)


def _theta_fixed(exp: ExperimentConfig) -> bool:
    return exp.sweep.variable == "theta" or exp.base.theta is not None


def _evaluate_point(args) -> dict:
    exp, value, bf, an, variant, regime, workers = args
    cfg = _point_system(exp, value, bf, an, variant, regime)
    est = _estimate(cfg, variant)
    if not _theta_fixed(exp):
        theta, _ = optimize_theta(cfg, est)
        cfg = cfg.with_(theta=min(max(theta, 1e-6), 1 - 1e-6))
    bundle = secrecy_rate(cfg, est)
    row = {
        "sweep_value": _format(value),
        "beamformer": bf.value,
        "an_scheme": an.value,
        "theta": _format(cfg.theta),
        "r_k_analytic": _format(bundle.r_k),
        "r_e_analytic": _format(bundle.r_e),
        "r_s_analytic": _format(bundle.r_s),
        "r_s_simulated": "",
        "ci_halfwidth": "",
        "seed": str(exp.seed),
        "series": exp.series,
        "variant": variant.value,
        "regime": regime.value,
        "r_k_simulated": "",
        "r_e_simulated": "",
    }
    wanted = exp.simulate_values is None or value in exp.simulate_values
    if exp.trials is not None and wanted:
        sim = simulate(cfg, exp.trials, workers, perfect_csi=variant is Variant.P_PCSI)
        row.update(
            r_s_simulated=_format(sim.secrecy.mean),
            ci_halfwidth=_format(sim.secrecy.ci_halfwidth),
            r_k_simulated=_format(sim.user.mean),
            r_e_simulated=_format(sim.eve.mean),
        )
    return row


def _limit_row(exp: ExperimentConfig, bf, an, variant: Variant, regime: Regime) -> dict:
    # N only enters the limit through sigma_hat^2 and kappa_R, which do not depend on it
    cfg = _point_system(exp, exp.sweep.values[0], bf, an, variant, Regime.NO_PS)
    rho = db_to_linear(exp.rho_db) if exp.rho_db is not None else db_to_linear(exp.base.p_d_db)
    limit = asymptotic_secrecy(cfg, AsymptoteSpec(regime, rho), _estimate(cfg, variant))
    return {
        "sweep_value": "inf",
        "beamformer": bf.value,
        "an_scheme": an.value,
        "theta": {Regime.NO_PS: "0", Regime.PS1: "", Regime.PS2: "1"}[regime],
        "r_k_analytic": "",
        "r_e_analytic": "",
        "r_s_analytic": _format(limit),
        "r_s_simulated": "",
        "ci_halfwidth": "",
        "seed": str(exp.seed),
        "series": exp.series,
        "variant": variant.value,
        "regime": regime.value,
        "r_k_simulated": "",
        "r_e_simulated": "",
    }


def run_experiment(exp: ExperimentConfig, workers: int = 1, write: bool = True) -> list[dict]:
    """Evaluate every (regime, variant, scheme, sweep value) point in a fixed order.

    Monte Carlo trials are spread over ``workers`` processes; the rows (and
    hence the CSV bytes) do not depend on the worker count.
    """
    if exp.scenario is Scenario.GEOMETRY_CDF:
        raise ValueError("use run_geometry_cdf for the GEOMETRY_CDF scenario")
    rows = []
    for regime in exp.regimes:
        for variant in exp.variants:
            for bf, an in exp.schemes:
                for value in exp.sweep.values:
                    rows.append(_evaluate_point((exp, value, bf, an, variant, regime, workers)))
                if exp.scenario is Scenario.ASYMPTOTE and exp.include_limits:
                    rows.append(_limit_row(exp, bf, an, variant, regime))
    if write and exp.output_path:
        write_rows(rows, exp.output_path, CSV_COLUMNS)
        write_meta(exp.output_path, [exp])
    return rows


# ------------------------------------------------------------------ geometry


def _drop_rates(args) -> list[float]:
    exp, geom, start, stop = args
    base = exp.base
    K = base.num_users
    out = []
    for d in range(start, stop):
        rng = substream(SeedSpec(exp.seed, d, "geometry"))
        radius = geom.cell_radius_m * np.sqrt(rng.random(K))
        angle = 2 * np.pi * rng.random(K)
        users = radius * np.exp(1j * angle)
        eve = users[base.intercepted_user] + geom.eve_radius_m * math.sqrt(rng.random()) * np.exp(
            2j * np.pi * rng.random()
        )
        cfg = SystemConfig(
            n_antennas=base.n_antennas,
            num_users=K,
            tau=base.tau if base.tau is not None else K,
            p_users=(db_to_linear(base.p_u_db),) * K,
            p_eve=db_to_linear(base.p_e_db),
            p_down=db_to_linear(base.p_d_db),
            betas=tuple(float(b) for b in geom.beta(np.abs(users))),
            beta_e=float(geom.beta(abs(eve))),
            intercepted_user=base.intercepted_user,
            beamformer=Beamformer.ZF,
            an_scheme=ANScheme.NS_AN,
        )
        try:
            est = analytic_estimate(cfg)
        except ValueError:
            # the eavesdropper overwhelms the estimate: no secrecy is possible
            out.append(0.0)
            continue
        out.append(optimize_theta(cfg, est)[1])
    return out


def geometry_secrecy_rates(exp: ExperimentConfig, geom: GeometryModel, num_drops: int, workers: int = 1) -> np.ndarray:
    """Analytic (ZF, NS-AN) secrecy rate at theta* for each random drop, in drop order."""
    if num_drops < 1:
        raise ValueError("num_drops must be positive")
    if workers <= 1:
        return np.asarray(_drop_rates((exp, geom, 0, num_drops)))
    bounds = np.linspace(0, num_drops, 4 * workers + 1).astype(int)
    jobs = [(exp, geom, int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return np.asarray([r for chunk in pool.map(_drop_rates, jobs) for r in chunk])


def run_geometry_cdf(
    exp: ExperimentConfig, geom: GeometryModel, num_drops: int, workers: int = 1, write: bool = True
) -> list[dict]:
    """Empirical CDF of the per-drop secrecy rate under random user/eavesdropper placement."""
    if exp.scenario is not Scenario.GEOMETRY_CDF:
        raise ValueError("run_geometry_cdf needs the GEOMETRY_CDF scenario")
    rates = np.sort(geometry_secrecy_rates(exp, geom, num_drops, workers))
    n = rates.size
    rows = [
        {"r_s": _format(r), "cdf": _format((i + 1) / n), "series": exp.series, "seed": str(exp.seed)}
        for i, r in enumerate(rates)
    ]
    if write and exp.output_path:
        write_rows(rows, exp.output_path, CDF_COLUMNS)
        write_meta(exp.output_path, [exp], geom)
    return rows


# ------------------------------------------------------------------- output


def rows_to_csv(rows: Sequence[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def write_rows(rows: Sequence[dict], path, columns: Sequence[str]) -> None:
    path = Path(path)
    if path.parent and not path.parent.exists():
        raise OSError(f"output directory {path.parent} does not exist")
    path.write_text(rows_to_csv(rows, columns), encoding="utf-8")


def _jsonable(obj):
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def write_meta(path, exps: Sequence[ExperimentConfig], geom: Optional[GeometryModel] = None) -> None:
    meta = {
        "columns": list(CDF_COLUMNS if geom is not None else CSV_COLUMNS),
        "experiments": [_jsonable(asdict(e)) for e in exps],
        "seed": exps[0].seed,
    }
    if geom is not None:
        meta["geometry"] = asdict(geom)
        meta["pathloss_model"] = "artifact-defined: log-distance, beta = (max(d, d0)/d0)^-exponent"
    Path(str(path) + ".meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True), encoding="utf-8")


def write_gnuplot(csv_path, rows: Sequence[dict], x_label: str = "sweep value") -> Path:
    """Emit a gnuplot script drawing one analytic curve per (series, variant, scheme)."""
    keys = []
    for r in rows:
        key = (r.get("series", ""), r.get("variant", ""), r.get("regime", ""), r["beamformer"], r["an_scheme"])
        if key not in keys:
            keys.append(key)
    name = Path(csv_path).name
    lines = [
        "set datafile separator ','",
        f"set xlabel '{x_label}'",
        "set ylabel 'secrecy rate [bits/s/Hz]'",
        "set key outside",
    ]
    plots = []
    for series, variant, regime, bf, an in keys:
        cond = (
            f'(strcol(11) eq "{series}" && strcol(12) eq "{variant}" && strcol(13) eq "{regime}"'
            f' && strcol(2) eq "{bf}" && strcol(3) eq "{an}" && strcol(1) ne "inf") ? $7 : 1/0'
        )
        title = " ".join(t for t in (series, variant, bf, an) if t)
        plots.append(f"'{name}' every ::1 using 1:({cond}) with lines title '{title}'")
    lines.append("plot " + ", \\\n     ".join(plots))
    gp = Path(str(csv_path) + ".gp")
    gp.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return gp


# -------------------------------------------------------------- config files


def experiment_from_dict(d: dict, seed: Optional[int] = None, trials: Optional[int] = None) -> ExperimentConfig:
    """Build an experiment from a JSON-style mapping (powers in dB)."""
    d = dict(d)
    base = BaseScenario(**d.pop("base", {}))
    sweep = d.pop("sweep", None)
    if sweep is not None:
        sweep = Sweep(sweep["variable"], tuple(sweep["values"]))
    n_trials = d.pop("trials", None)
    if trials is not None:
        n_trials = trials
    seed = d.pop("seed", DEFAULT_SEED) if seed is None else seed
    plan = TrialPlan(int(n_trials), SeedSpec(int(seed))) if n_trials else None
    if "schemes" in d:
        d["schemes"] = tuple(tuple(s) for s in d["schemes"])
    for key in ("variants", "regimes", "simulate_values"):
        if key in d and d[key] is not None:
            d[key] = tuple(d[key])
    return ExperimentConfig(
        scenario=Scenario(d.pop("scenario")), base=base, sweep=sweep, trials=plan, seed=int(seed), **d
    )
