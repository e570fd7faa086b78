"""Secrecy analysis of one-bit quantized massive MIMO downlinks under pilot attack.

The package covers the full link: random channel ensembles and pilots, the
one-bit quantizer and its Bussgang linearization, LMMSE estimation under a
pilot-replay attack, MRT/ZF precoding with random or nullspace artificial
noise, closed-form rate bounds with their large-N limits, a Monte Carlo
simulator, and an experiment runner that writes CSV tables.
"""
from .config import ANScheme, Beamformer, SystemConfig
from .ensembles import PilotMatrix, SeedSpec, gen_complex_gaussian, gen_pilot_matrix
from .estimation import (
    ChannelEstimate,
    ChannelSet,
    EveDecomposition,
    analytic_estimate,
    channel_mutual_info,
    draw_channels,
    eve_decomposition,
    lmmse_estimate,
    perfect_csi_estimate,
    simulate_training,
)
from .experiments import (
    BaseScenario,
    ExperimentConfig,
    GeometryModel,
    Scenario,
    Sweep,
    Variant,
    db_to_linear,
    linear_to_db,
    run_experiment,
    run_geometry_cdf,
)
from .montecarlo import (
    EmpiricalRate,
    TrialPlan,
    simulate,
    simulate_eve_rate,
    simulate_legit_rate,
    simulate_secrecy,
)
from .precoding import (
    PrecoderSet,
    RankDeficientChannelError,
    build_precoder,
    linearized_transmit_decomposition,
    synthesize_transmit,
)
from .quantizer import (
    SIGMA_Q_SQ,
    BussgangFactors,
    downlink_bussgang,
    extract_quantization_noise,
    one_bit_quantize,
    uplink_bussgang,
)
from .rates import (
    AsymptoteSpec,
    RateBundle,
    Regime,
    asymptotic_secrecy,
    optimize_theta,
    positivity_threshold,
    rate_eve_theorem2,
    rate_user_theorem1,
    secrecy_passive,
    secrecy_rate,
    secrecy_unquantized,
)

__version__ = "0.1.0"
