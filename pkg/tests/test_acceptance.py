"""Acceptance gate. Each test prints one PASS/FAIL line for its criterion.

Run ``pytest tests/test_acceptance.py -v -s`` (or ``python3 tests/test_acceptance.py``)
to see the report.
"""
import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import oracles as O  # noqa: E402
from conftest import db, fig3_config, random_configs  # noqa: E402
from qmimo_secrecy import SystemConfig  # noqa: E402
from qmimo_secrecy.cli import main as cli_main  # noqa: E402
from qmimo_secrecy.experiments import DEFAULT_SEED  # noqa: E402
from qmimo_secrecy.ensembles import SeedSpec, complex_gaussian, gen_pilot_matrix, substream  # noqa: E402
from qmimo_secrecy.estimation import (  # noqa: E402
    ChannelEstimate,
    analytic_estimate,
    draw_channels,
    lmmse_estimate,
    simulate_training,
)
from qmimo_secrecy.montecarlo import TrialPlan, simulate  # noqa: E402
from qmimo_secrecy.precoding import (  # noqa: E402
    build_precoder,
    linearized_transmit_decomposition,
    synthesize_transmit,
)
from qmimo_secrecy.quantizer import SIGMA_Q_SQ, extract_quantization_noise, uplink_bussgang  # noqa: E402
from qmimo_secrecy.rates import (  # noqa: E402
    AsymptoteSpec,
    Regime,
    apply_regime,
    asymptotic_secrecy,
    optimize_theta,
    positivity_threshold,
    secrecy_passive,
    secrecy_rate,
    secrecy_unquantized,
)

SCHEMES = [(b, a) for b in ("MRT", "ZF") for a in ("R_AN", "NS_AN")]


def report(number, title, ok, detail):
    line = f"criterion {number:>2} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    print(line)
    return ok


# ---- 1 ------------------------------------------------------------------------------------


def criterion_1():
    cfg = fig3_config(128)
    pilots = gen_pilot_matrix(cfg.tau, cfg.num_users)
    up, down = [], []
    for t in range(60):
        seed = SeedSpec(101).trial(t)
        ch = draw_channels(cfg, seed)
        y = simulate_training(cfg.with_(quantized=False), ch, pilots)
        v = simulate_training(cfg, ch, pilots)
        gamma = uplink_bussgang(cfg.p_primes, cfg.p_e_prime).gamma
        up.append(extract_quantization_noise(y, gamma).ravel())
        assert np.allclose(extract_quantization_noise(y, gamma), v - gamma * y)
        est = lmmse_estimate(cfg, v, pilots)
        pre = build_precoder(cfg, est)
        s = complex_gaussian(substream(seed.label("s")), (cfg.num_users, 16))
        n = complex_gaussian(substream(seed.label("an")), (cfg.n_antennas, 16))
        x, xt = synthesize_transmit(cfg, pre, s, n)
        down.append(linearized_transmit_decomposition(cfg, pre, xt, x, s, n)[2].ravel())
    vu = float(np.mean(np.abs(np.concatenate(up)) ** 2))
    vd = float(np.mean(np.abs(np.concatenate(down)) ** 2))
    ok = abs(vu / SIGMA_Q_SQ - 1) < 0.01 and abs(vd / SIGMA_Q_SQ - 1) < 0.01
    return ok, f"uplink {vu:.4f}, downlink {vd:.4f}, target {SIGMA_Q_SQ:.4f} +/- 1%"


# ---- 2 ------------------------------------------------------------------------------------


def criterion_2():
    failed = []
    parts = []
    for n in (64, 128):
        for bf in ("MRT", "ZF"):
            cfg = fig3_config(n, beamformer=bf, an_scheme="NS_AN")
            res = simulate(cfg, TrialPlan(2000, SeedSpec(DEFAULT_SEED)))
            b = secrecy_rate(cfg)
            tag = f"N={n} {bf}"
            if res.user.mean < b.r_k - res.user.ci_halfwidth:
                failed.append(f"{tag} user below bound by {b.r_k - res.user.mean:.4f} > CI {res.user.ci_halfwidth:.4f}")
            if res.eve.mean > b.r_e + res.eve.ci_halfwidth + 0.05:
                failed.append(f"{tag} leakage above bound")
            for name, sim, th in (("R_k", res.user.mean, b.r_k), ("R_e", res.eve.mean, b.r_e)):
                if abs(sim - th) >= 0.15:
                    failed.append(f"{tag} {name} off by {abs(sim - th):.3f}")
            parts.append(f"{tag}: R_k {res.user.mean:.3f}/{b.r_k:.3f}, R_e {res.eve.mean:.3f}/{b.r_e:.3f}")
    detail = "sim/analytic " + "; ".join(parts)
    if failed:
        detail += " | failing: " + "; ".join(failed)
    return not failed, detail


# ---- 3 ------------------------------------------------------------------------------------


def criterion_3():
    rs = {s: optimize_theta(fig3_config(256, beamformer=s[0], an_scheme=s[1], p_eve=db(7)))[1] for s in SCHEMES}
    gap = rs[("ZF", "NS_AN")] - rs[("MRT", "R_AN")]
    ok = (
        rs[("ZF", "NS_AN")] > rs[("ZF", "R_AN")] > 0
        and rs[("MRT", "NS_AN")] > rs[("MRT", "R_AN")]
        and abs(gap - 0.3) <= 0.1
    )
    vals = ", ".join(f"{b}/{a} {v:.3f}" for (b, a), v in rs.items())
    return ok, f"{vals}; gap {gap:.3f}"


# ---- 4 ------------------------------------------------------------------------------------


def criterion_4():
    ok = True
    ends = []
    for bf, an in SCHEMES:
        curve = [
            optimize_theta(
                SystemConfig.symmetric(64, 10, db(10), db(10 + k), db(10), beamformer=bf, an_scheme=an)
            )[1]
            for k in (-10, -6, -3, -1, 0)
        ]
        ok &= all(a > b for a, b in zip(curve, curve[1:])) and curve[-1] < 0.05
        ends.append(f"{bf}/{an} {curve[0]:.3f}->{curve[-1]:.4f}")
    return ok, "; ".join(ends)


# ---- 5 ------------------------------------------------------------------------------------


def criterion_5():
    worst = 0.0
    for quantized in (True, False):
        for regime in Regime:
            for bf, an in SCHEMES:
                cfg = SystemConfig.symmetric(
                    10**9, 10, db(10), db(8), db(10), beamformer=bf, an_scheme=an, quantized=quantized
                )
                spec = AsymptoteSpec(regime, db(10))
                _, r_s = optimize_theta(apply_regime(cfg, spec))
                worst = max(worst, abs(r_s - asymptotic_secrecy(cfg, spec)))
    return worst < 1e-3, f"max |r_s(N=1e9) - limit| = {worst:.2e} over 3 regimes x 4 schemes x (Q, UQ)"


# ---- 6 ------------------------------------------------------------------------------------


def criterion_6():
    spec = AsymptoteSpec(Regime.PS1, db(10))
    target = math.log2(1 / (db(8) / db(10)))
    worst = 0.0
    exact = True
    for bf, an in SCHEMES:
        cfg = SystemConfig.symmetric(10**9, 10, db(10), db(8), db(10), beamformer=bf, an_scheme=an)
        _, r_s = optimize_theta(apply_regime(cfg, spec))
        worst = max(worst, abs(r_s - target))
        exact &= asymptotic_secrecy(cfg, spec) == asymptotic_secrecy(cfg.with_(quantized=False), spec)
    return worst < 1e-3 and exact, f"target {target:.4f}, max deviation {worst:.2e}, Q==UQ limit: {exact}"


# ---- 7 ------------------------------------------------------------------------------------


def criterion_7():
    ok = True
    parts = []
    for pcsi in (False, True):
        for bf, an in SCHEMES:
            curve = []
            for n in (32, 64, 128, 256, 512):
                cfg = fig3_config(n, beamformer=bf, an_scheme=an, p_eve=0.0)
                curve.append(secrecy_passive(cfg, pcsi).r_s)
            ok &= all(a < b for a, b in zip(curve, curve[1:]))
        cfg = lambda n: fig3_config(n, beamformer="ZF", an_scheme="NS_AN", p_eve=0.0)
        star = [optimize_theta(cfg(n), _passive_estimate(cfg(n), pcsi))[1] for n in (32, 64, 128, 256, 512)]
        ok &= all(a < b for a, b in zip(star, star[1:]))
        parts.append(f"{'P-PCSI' if pcsi else 'P-ICSI'} ZF/NS at theta*: " + " < ".join(f"{v:.2f}" for v in star))
    return ok, "; ".join(parts) + " (all schemes also checked at theta=0.5)"


def _passive_estimate(cfg, pcsi):
    from qmimo_secrecy.estimation import perfect_csi_estimate

    return perfect_csi_estimate(cfg) if pcsi else analytic_estimate(cfg)


# ---- 8 ------------------------------------------------------------------------------------


def criterion_8():
    worst = 0.0
    checks = 0

    def cmp(a, b):
        nonlocal worst, checks
        checks += 1
        if a == b:
            return
        worst = max(worst, abs(a - b) / max(abs(b), 1e-12) if abs(b) > 1e-10 else abs(a - b))

    for cfg in random_configs(100):
        bf, an, th, n, K, k = cfg.beamformer.value, cfg.an_scheme.value, cfg.theta, cfg.n_antennas, cfg.num_users, cfg.k
        P, B = list(cfg.p_users), list(cfg.betas)
        s = O.sigma_hat_sq(P, B, cfg.p_eve, cfg.beta_e, cfg.tau, k)
        kap = O.kappa_r(P, B, cfg.p_eve, cfg.beta_e, k)
        est = analytic_estimate(cfg)
        for a, b in zip(est.sigma_hat_sq, s):
            cmp(float(a), b)
        cmp(est.kappa_r, kap)
        bundle = secrecy_rate(cfg)
        ru = O.rate_user(bf, an, th, n, K, cfg.beta_k, cfg.p_down, s, k)
        re = O.rate_eve(bf, an, th, n, K, cfg.beta_e, cfg.p_down, s, k, kap)
        cmp(bundle.r_k, ru)
        cmp(bundle.r_e, re)
        cmp(bundle.r_s, O.plus(ru - re))
        passive = cfg.with_(p_eve=0.0)
        xis = O.sigma_hat_sq(P, B, 0.0, cfg.beta_e, cfg.tau, k)
        cmp(secrecy_passive(passive, False).r_s, O.secrecy_p_icsi(bf, an, th, n, K, cfg.beta_k, cfg.beta_e, cfg.p_down, xis, k))
        sym = passive.with_(betas=(cfg.beta_k,) * K, p_users=(P[k],) * K)
        cmp(secrecy_passive(sym, True).r_s, O.secrecy_p_pcsi(bf, an, th, n, K, cfg.beta_k, cfg.beta_e, cfg.p_down))
        v = O.sigma_hat_sq(P, B, cfg.p_eve, cfg.beta_e, cfg.tau, k, quantized=False)
        cmp(secrecy_unquantized(cfg).r_s, O.secrecy_uq(bf, an, th, n, K, cfg.beta_k, cfg.beta_e, cfg.p_down, v, k, kap))
        bk, be = cfg.beta_k, cfg.beta_e
        cmp(asymptotic_secrecy(cfg, AsymptoteSpec(Regime.NO_PS)), O.limit_no_ps(an, bk, be, cfg.p_down, s[k], kap))
        cmp(asymptotic_secrecy(cfg, AsymptoteSpec(Regime.PS1)), O.limit_ps1(bk, be, kap))
        cmp(asymptotic_secrecy(cfg, AsymptoteSpec(Regime.PS2, 10.0)), O.limit_ps2(bf, bk, be, 10.0, s, k, kap))
        cmp(positivity_threshold(cfg, AsymptoteSpec(Regime.NO_PS)), O.threshold_no_ps(bk, be, cfg.p_down))
        cmp(positivity_threshold(cfg, AsymptoteSpec(Regime.PS2)), O.threshold_ps(bk, be))
    return worst < 1e-9, f"{checks} comparisons on 100 random configs, max relative error {worst:.1e}"


# ---- 9 ------------------------------------------------------------------------------------


def criterion_9():
    N, K, draws = 64, 10, 10_000
    cfg = SystemConfig.symmetric(N, K, db(10), db(5), db(10), beamformer="ZF", an_scheme="NS_AN")
    base = analytic_estimate(cfg)
    s = base.sigma_hat_sq
    rng = substream(SeedSpec(909, 0, "identities"))
    inv = np.zeros((K, K), dtype=complex)
    energy = np.zeros(K)
    leak = 0.0
    for _ in range(draws):
        h_tilde = complex_gaussian(rng, (N, K))
        inv += np.linalg.inv(h_tilde.T @ h_tilde.conj())
        est = ChannelEstimate(h_tilde * np.sqrt(s), base.lambdas, s, base.kappa_r, base.bussgang)
        pre = build_precoder(cfg, est)
        energy += np.sum(np.abs(pre.w_matrix) ** 2, axis=0)
        h_k = est.h_hat[:, 0] + complex_gaussian(rng, N, 1 - s[0])
        leak += float(np.real(h_k @ pre.shaping @ h_k.conj()))
    e1 = float(np.max(np.abs(inv / draws * (N - K) - np.eye(K))))
    e2 = float(np.max(np.abs(energy / draws * s * (N - K) - 1)))
    e3 = abs(leak / draws / ((N - K) * (1 - s[0])) - 1)
    ok = e1 < 0.03 and e2 < 0.02 and e3 < 0.02
    return ok, f"inverse Wishart {e1:.4f} (<0.03), ZF column energy {e2:.4f} (<0.02), nullspace leakage {e3:.4f} (<0.02)"


# ---- 10 -----------------------------------------------------------------------------------


def criterion_10(tmp_dir: Path):
    outs = []
    for workers in (1, 2):
        out = tmp_dir / f"fig3_w{workers}.csv"
        code = cli_main(["preset", "fig3", "--trials", "100", "--workers", str(workers), "--out", str(out)])
        outs.append((code, out.read_bytes() if out.exists() else b""))
    ok = outs[0][0] == outs[1][0] == 0 and outs[0][1] == outs[1][1] and len(outs[0][1]) > 0
    rows = outs[0][1].count(b"\n") - 1
    return ok, f"preset fig3, 100 trials, workers 1 vs 2: {rows} rows, identical bytes: {outs[0][1] == outs[1][1]}"


CRITERIA = [
    (1, "quantization-noise variance", criterion_1),
    (2, "analytic vs simulated agreement", criterion_2),
    (3, "scheme ordering and gap", criterion_3),
    (4, "transmit power ratio threshold", criterion_4),
    (5, "asymptotic convergence", criterion_5),
    (6, "PS1 universality", criterion_6),
    (7, "passive-eavesdropping growth", criterion_7),
    (8, "oracle equivalence", criterion_8),
    (9, "second-order identities", criterion_9),
    (10, "determinism across worker counts", criterion_10),
]


@pytest.mark.parametrize("number,title,fn", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, title, fn, tmp_path, capsys):
    ok, detail = fn(tmp_path) if number == 10 else fn()
    with capsys.disabled():
        print()
        report(number, title, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    import tempfile

    failures = 0
    with tempfile.TemporaryDirectory() as d:
        for number, title, fn in CRITERIA:
            ok, detail = fn(Path(d)) if number == 10 else fn()
            failures += not report(number, title, ok, detail)
    raise SystemExit(1 if failures else 0)
