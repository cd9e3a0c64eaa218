"""Acceptance gate: one test per exit criterion, printed pass/fail.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
report lines.
"""

import math

import numpy as np
from scipy.special import gamma

from d2d_discovery import analytic
from d2d_discovery.analytic import AnalyticParams
from d2d_discovery.cli import main
from d2d_discovery.montecarlo import (ExperimentConfig, estimate_p_success,
                                      estimate_sir_ccdf, geometric_gof_pvalue,
                                      run_trial, sample_fixed_pair_sir)
from d2d_discovery.protocol import simulate_contention_slots


def report(name: str, ok: bool, detail: str = ""):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f"  ({detail})" if detail else ""))
    assert ok, f"{name}: {detail}"


def test_laplace_factor_internal_consistency():
    # the sine and Gamma forms of the interference exponent factor agree
    worst = 0.0
    for alpha in (2.1, 2.5, 3.0, 3.5, 4.0, 6.0, 8.0):
        d = 2.0 / alpha
        sine_form = math.pi ** 2 * d / math.sin(math.pi * d)
        gamma_form = math.pi * gamma(1 + d) * gamma(1 - d)
        worst = max(worst, abs(sine_form - gamma_form))
    report("interference-exponent identity (sine vs Gamma forms)",
           worst < 1e-10, f"max abs gap {worst:.2e}")


def test_sir_coverage_oracle_equivalence():
    # fixed-distance pair, whole-plane interferers, shadowing off:
    # empirical CCDF from 1e5 field draws within 0.01 of the closed form
    taus = [-10.0, -5.0, 0.0, 5.0, 10.0]
    worst = 0.0
    for i, lam in enumerate((0.01, 0.05, 0.1)):
        params = AnalyticParams(user_density=lam, pair_distance=1.0,
                                path_loss_exponent=4.0)
        rng = np.random.default_rng([2025, i])
        emp = estimate_sir_ccdf(sample_fixed_pair_sir(params, 100_000, rng),
                                taus)
        ana = np.array([analytic.sir_coverage_probability(params, t)
                        for t in taus])
        worst = max(worst, float(np.max(np.abs(emp - ana))))
    report("SIR coverage: simulation vs closed form (+-0.01)",
           worst <= 0.01, f"max abs gap {worst:.4f}")


def test_collision_model_frequencies():
    n_slots = 1_000_000
    ok = True
    details = []
    for n in (2, 4, 6, 8):
        rng = np.random.default_rng([7, n])
        tx = simulate_contention_slots(n, n_slots, rng)
        tx_freq = tx[:, 0].mean()
        se_tx = math.sqrt((1 / n) * (1 - 1 / n) / n_slots)
        solo = tx[:, 0] & (tx.sum(axis=1) == 1)
        p_star = analytic.peak_no_collision_prob(n)
        se_solo = math.sqrt(p_star * (1 - p_star) / n_slots)
        if abs(tx_freq - 1 / n) >= 3 * se_tx:
            ok = False
            details.append(f"N={n} transmit freq {tx_freq:.5f}")
        if abs(solo.mean() - p_star) >= 3 * se_solo:
            ok = False
            details.append(f"N={n} solo freq {solo.mean():.5f}")
    assert analytic.peak_no_collision_prob(2) == 0.25
    report("collision model: transmit and solo frequencies at 3 sigma",
           ok, "; ".join(details) or "all within 3 SE")


def test_joint_success_oracle_equivalence():
    cfg = ExperimentConfig(
        analytic=AnalyticParams(user_density=0.05, n_pairs=4,
                                sir_threshold_db=0.0, pair_distance=1.0,
                                path_loss_exponent=4.0),
        trials=1, slots_cap=60, seed=31)
    records = []
    i = 0
    while sum(r.opportunities for r in records) < 100_000:
        records.append(run_trial(cfg, i))
        i += 1
    emp = estimate_p_success(records)
    ana = analytic.discovery_success_prob(cfg.analytic)
    report("joint success probability vs closed form (+-0.015)",
           abs(emp - ana) <= 0.015,
           f"empirical {emp:.4f} analytic {ana:.4f}")


def test_slot_count_consistency():
    params = AnalyticParams(user_density=0.05, n_pairs=4,
                            sir_threshold_db=0.0, target_success_prob=0.9)
    p = analytic.discovery_success_prob(params)
    required = analytic.required_slot_count(params)

    not_rejected = 0
    pooled = []
    for seed in range(10):
        cfg = ExperimentConfig(analytic=params, trials=1, slots_cap=600,
                               seed=400 + seed)
        slots = [n for i in range(1100)
                 for n in run_trial(cfg, i).slots_to_success]
        pooled.extend(slots)
        if geometric_gof_pvalue(slots, p) >= 0.01:
            not_rejected += 1

    pooled = np.array(pooled)
    grid = np.arange(1, pooled.max() + 1)
    cdf = np.array([np.mean(pooled <= n) for n in grid])
    empirical_n = int(grid[np.argmax(cdf >= 0.9)])

    fuzz_ok = True
    rng = np.random.default_rng(9)
    for _ in range(200):
        eta = float(rng.uniform(0.05, 0.995))
        q = float(rng.uniform(0.002, 0.998))
        n_star = analytic.min_slots_for_target(q, eta)
        if analytic.prob_success_within(q, n_star) < eta:
            fuzz_ok = False
        if n_star > 1 and analytic.prob_success_within(q, n_star - 1) >= eta:
            fuzz_ok = False

    ok = not_rejected >= 9 and abs(empirical_n - required) <= 1 and fuzz_ok
    report("slot budget: geometric GOF, empirical quantile, bracketing", ok,
           f"GOF accepted {not_rejected}/10, empirical n {empirical_n} vs "
           f"required {required}, bracketing {'ok' if fuzz_ok else 'violated'}")


def test_trend_reproduction():
    problems = []

    # coverage non-increasing in density and threshold, both routes
    lam_grid = (0.01, 0.05, 0.1, 0.3)
    tau_grid = (-10.0, -5.0, 0.0, 5.0, 10.0)
    emp_cov, ana_cov = [], []
    for i, lam in enumerate(lam_grid):
        params = AnalyticParams(user_density=lam)
        rng = np.random.default_rng([77, i])
        samples = sample_fixed_pair_sir(params, 40_000, rng)
        emp_cov.append(estimate_sir_ccdf(samples, tau_grid))
        ana_cov.append(np.array([analytic.sir_coverage_probability(params, t)
                                 for t in tau_grid]))
    for row_e, row_a in zip(emp_cov, ana_cov):
        if np.any(np.diff(row_e) > 0) or np.any(np.diff(row_a) > 1e-15):
            problems.append("coverage not non-increasing in threshold")
    for j in range(len(tau_grid)):
        col_e = [row[j] for row in emp_cov]
        col_a = [row[j] for row in ana_cov]
        if np.any(np.diff(col_e) > 0) or np.any(np.diff(col_a) > 1e-15):
            problems.append("coverage not non-increasing in density")

    # joint success decreasing in density and in the pair count
    for n in (2, 4, 6, 8):
        vals = [analytic.discovery_success_prob(
            AnalyticParams(user_density=lam, n_pairs=n)) for lam in lam_grid]
        if np.any(np.diff(vals) >= 0):
            problems.append("success prob not decreasing in density")
    for lam in lam_grid:
        vals = [analytic.discovery_success_prob(
            AnalyticParams(user_density=lam, n_pairs=n)) for n in (2, 4, 6, 8)]
        if np.any(np.diff(vals) >= 0):
            problems.append("success prob not decreasing in pair count")

    def emp_p_success(n_pairs, lam, seed):
        cfg = ExperimentConfig(
            analytic=AnalyticParams(user_density=lam, n_pairs=n_pairs,
                                    sir_threshold_db=0.0),
            trials=1, slots_cap=200, seed=seed)
        recs = [run_trial(cfg, i) for i in range(400)]
        return estimate_p_success(recs)

    emp_by_n = [emp_p_success(n, 0.05, 50 + n) for n in (2, 4, 6, 8)]
    if np.any(np.diff(emp_by_n) >= 0):
        problems.append("empirical success prob not decreasing in pair count")
    emp_by_lam = [emp_p_success(4, lam, 60 + i)
                  for i, lam in enumerate((0.01, 0.1, 0.4))]
    if np.any(np.diff(emp_by_lam) >= 0):
        problems.append("empirical success prob not decreasing in density")

    # slot statistics shift right with more pairs and higher density
    def mean_slots(n_pairs, lam, seed):
        cfg = ExperimentConfig(
            analytic=AnalyticParams(user_density=lam, n_pairs=n_pairs,
                                    sir_threshold_db=0.0),
            trials=1, slots_cap=800, seed=seed)
        slots = [s for i in range(400)
                 for s in run_trial(cfg, i).slots_to_success]
        return float(np.mean(slots))

    by_n = [mean_slots(n, 0.05, 70 + n) for n in (2, 4, 6, 8)]
    if np.any(np.diff(by_n) <= 0):
        problems.append("mean slots not increasing in pair count")
    by_lam = [mean_slots(4, lam, 80 + i)
              for i, lam in enumerate((0.01, 0.1, 0.4))]
    if np.any(np.diff(by_lam) <= 0):
        problems.append("mean slots not increasing in density")
    for lam in (0.01, 0.1, 0.4):
        req = [analytic.required_slot_count(
            AnalyticParams(user_density=lam, n_pairs=n,
                           sir_threshold_db=0.0)) for n in (2, 4, 6, 8)]
        if np.any(np.diff(req) <= 0):
            problems.append("required slots not increasing in pair count")
    for n in (2, 4, 6, 8):
        req = [analytic.required_slot_count(
            AnalyticParams(user_density=lam, n_pairs=n,
                           sir_threshold_db=0.0))
               for lam in (0.01, 0.1, 0.4)]
        if np.any(np.diff(req) <= 0):
            problems.append("required slots not increasing in density")

    report("trend reproduction across density, threshold, and pair count",
           not problems, "; ".join(sorted(set(problems))) or "all trends hold")


def test_cli_determinism(tmp_path):
    outputs = []
    for name in ("run1", "run2"):
        out = tmp_path / name
        code = main(["compare", "--preset", "fig2", "--seed", "42",
                     "--out", str(out), "--jobs", "2"])
        assert code == 0
        outputs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    ok = outputs[0] == outputs[1] and len(outputs[0]) == 4
    report("byte-identical CSVs for repeated seeded compare runs", ok)
