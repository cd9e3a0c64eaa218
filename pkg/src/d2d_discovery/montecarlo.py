"""Trial orchestration, empirical statistics, and analytic cross-checks.

Each trial owns a random stream derived purely from (seed, trial_index),
so trials are reproducible and order-independent; sweeps aggregate trials
into MetricRecords carrying both the empirical estimates and their
closed-form counterparts.
"""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import stats

from . import analytic
from .analytic import AnalyticParams, db_to_linear
from .channel import ChannelParams, PowerConfig
from .geometry import (NetworkRealization, PairingShortfallError, Window,
                       default_window_radius, pair_users, place_fixed_pair,
                       sample_ppp)
from .protocol import DiscoverySession, run_slot, trace_lines

SWEEPABLE = ("lambda_u", "N", "tau_db", "R", "alpha", "eta")


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one experiment, including the sweep axis."""

    analytic: AnalyticParams = field(default_factory=AnalyticParams)
    channel: ChannelParams = field(default_factory=ChannelParams)
    power: PowerConfig = field(default_factory=PowerConfig)
    trials: int = 1000
    slots_cap: int = 0            # 0 -> 10x analytic required slots
    message_mode: str = "single_message"      # or "full_signaling"
    interferer_mode: str = "saturated"        # or "contention_only"
    placement: str = "fixed_pair"             # or "paired_ues"
    persistent_contention: bool = True
    pairing_threshold: float = 0.0            # 0 -> 2x pair_distance
    bs_density: float = 0.2
    sweep_param: str = "lambda_u"
    sweep_values: tuple = (0.05,)
    tau_grid_db: tuple = tuple(range(-20, 21, 5))
    seed: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.sweep_param not in SWEEPABLE:
            raise ValueError(f"unknown sweep parameter {self.sweep_param!r}")
        object.__setattr__(self, "sweep_values", tuple(self.sweep_values))
        object.__setattr__(self, "tau_grid_db", tuple(self.tau_grid_db))

    def with_sweep_value(self, value) -> "ExperimentConfig":
        """Config for one sweep point, with the swept parameter applied."""
        p = self.analytic
        if self.sweep_param == "lambda_u":
            p = replace(p, user_density=float(value))
        elif self.sweep_param == "N":
            p = replace(p, n_pairs=int(value))
        elif self.sweep_param == "tau_db":
            p = replace(p, sir_threshold_db=float(value))
        elif self.sweep_param == "R":
            p = replace(p, pair_distance=float(value))
        elif self.sweep_param == "alpha":
            p = replace(p, path_loss_exponent=float(value))
        elif self.sweep_param == "eta":
            p = replace(p, target_success_prob=float(value))
        return replace(self, analytic=p, sweep_values=(value,))


@dataclass
class TrialRecord:
    """Raw per-trial observations."""

    trial_index: int
    sir_samples: list[float] = field(default_factory=list)
    opportunities: int = 0
    successes: int = 0
    slots_to_success: list[int] = field(default_factory=list)
    censored: int = 0
    skipped: bool = False
    trace: list[str] = field(default_factory=list)


@dataclass
class EmpiricalCdf:
    """Cumulative fractions over a sorted value grid."""

    values: np.ndarray
    cum_fraction: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.cum_fraction = np.asarray(self.cum_fraction, dtype=float)
        if np.any(np.diff(self.cum_fraction) < -1e-12):
            raise ValueError("cumulative fractions must be non-decreasing")
        if self.cum_fraction.size and self.cum_fraction[-1] > 1 + 1e-12:
            raise ValueError("cumulative fractions must not exceed 1")

    def value_at(self, x: float) -> float:
        idx = np.searchsorted(self.values, x, side="right") - 1
        return float(self.cum_fraction[idx]) if idx >= 0 else 0.0


@dataclass
class MetricRecord:
    """Aggregated statistics for one sweep value, empirical and analytic."""

    sweep_value: float
    tau_grid_db: tuple
    sir_ccdf_emp: np.ndarray | None
    sir_ccdf_analytic: np.ndarray | None
    p_success_emp: float | None
    p_success_analytic: float | None
    n_opportunities: int
    slots_cdf: EmpiricalCdf | None
    slots_cdf_analytic: np.ndarray | None
    required_slots_analytic: int | None
    mean_slots: float | None
    trial_count: int
    censored_count: int


def trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    """Independent per-trial stream, a pure function of (seed, trial_index)."""
    return np.random.default_rng(np.random.SeedSequence([seed, trial_index]))


def resolve_slots_cap(config: ExperimentConfig) -> int:
    """Explicit cap, or 10x the analytic slot requirement (floor 50)."""
    if config.slots_cap > 0:
        return config.slots_cap
    try:
        return max(50, 10 * analytic.required_slot_count(config.analytic))
    except (ValueError, OverflowError):
        return 1000  # success probability ~0; censoring will be reported


def _build_realization(config: ExperimentConfig,
                       rng: np.random.Generator) -> NetworkRealization:
    p = config.analytic
    radius = default_window_radius(p.pair_distance, p.user_density)
    window = Window(radius=radius)
    if config.placement == "fixed_pair":
        return place_fixed_pair(p.pair_distance, p.user_density, window, rng,
                                config.channel.interferer_mode,
                                n_pairs=p.n_pairs)
    if config.placement != "paired_ues":
        raise ValueError(f"unknown placement {config.placement!r}")
    threshold = config.pairing_threshold or 2.0 * p.pair_distance
    last_error = None
    for _ in range(5):  # bounded resampling on pairing shortfall
        ues = sample_ppp(p.user_density, window, rng)
        bss = sample_ppp(config.bs_density, window, rng)
        try:
            pairs = pair_users(ues, threshold, p.n_pairs)
        except PairingShortfallError as err:
            last_error = err
            continue
        return NetworkRealization(bs_points=bss, ue_points=ues, pairs=pairs,
                                  window=window)
    raise last_error


def run_trial(config: ExperimentConfig, trial_index: int,
              collect_trace: bool = False) -> TrialRecord:
    """One full discovery run: sample a realization, contend until done.

    Deterministic given (config.seed, trial_index). A paired_ues placement
    that repeatedly fails to yield enough pairs marks the trial skipped.
    """
    rng = trial_rng(config.seed, trial_index)
    record = TrialRecord(trial_index=trial_index)
    try:
        realization = _build_realization(config, rng)
    except PairingShortfallError:
        record.skipped = True
        return record

    sessions = [DiscoverySession(pair=p) for p in realization.pairs]
    cap = resolve_slots_cap(config)
    control_model = (config.message_mode == "full_signaling"
                     and len(realization.bs_points) > 0)
    for slot_index in range(1, cap + 1):
        active_before = [s for s in sessions if not s.established]
        if not active_before:
            break
        outcome = run_slot(
            realization, sessions, config.channel,
            config.analytic.sir_threshold_db, rng, slot_index=slot_index,
            interferer_mode=config.interferer_mode,
            message_mode=config.message_mode,
            interferer_density=config.analytic.user_density,
            persistent_contention=config.persistent_contention,
            control_model=control_model)
        record.opportunities += len(active_before)
        record.successes += sum(outcome.success.values())
        for pid, sir in outcome.sir.items():
            record.sir_samples.append(sir)
        if collect_trace:
            record.trace.extend(trace_lines(outcome, sessions))

    for s in sessions:
        if s.slots_to_success is not None:
            record.slots_to_success.append(s.slots_to_success)
        else:
            record.censored += 1
    return record


def estimate_sir_ccdf(samples, tau_grid_db) -> np.ndarray:
    """Fraction of SIR samples at or above each dB threshold.

    Infinite-SIR sentinels count as above every threshold.
    """
    samples = np.asarray(list(samples), dtype=float)
    if samples.size == 0:
        raise ValueError("no SIR samples to estimate from")
    taus = db_to_linear(np.asarray(tau_grid_db, dtype=float))
    return np.array([np.mean(samples >= t) for t in np.atleast_1d(taus)])


def estimate_p_success(records) -> float:
    """Fraction of contention opportunities ending in joint success."""
    opportunities = sum(r.opportunities for r in records)
    if opportunities == 0:
        raise ValueError("no contention opportunities observed")
    return sum(r.successes for r in records) / opportunities


def estimate_slots_cdf(slots_to_success, censored: int = 0
                       ) -> tuple[EmpiricalCdf, float]:
    """Empirical CDF and mean of slots-to-success over uncensored sessions."""
    values = np.asarray(list(slots_to_success), dtype=float)
    if values.size == 0:
        raise ValueError(
            f"all {censored} sessions censored; raise the slot cap or check "
            "that the per-slot success probability is nonzero")
    total = values.size + censored
    grid = np.arange(1, int(values.max()) + 1)
    cum = np.array([np.sum(values <= n) for n in grid], dtype=float) / total
    return EmpiricalCdf(values=grid, cum_fraction=cum), float(values.mean())


def sample_fixed_pair_sir(params: AnalyticParams, n_samples: int,
                          rng: np.random.Generator,
                          shadowing_sigma_db: float = 0.0,
                          interferer_mode: str = "whole_plane",
                          window_radius: float | None = None) -> np.ndarray:
    """Vectorized SIR draws for the fixed-distance pair scene.

    Each sample is an independent interferer field (Poisson count, uniform
    placement on the truncation disc, or the annulus outside the pair
    distance in guard_zone mode) with i.i.d. Rayleigh fading per link.
    Used for high-volume validation of the coverage formula; the slot
    engine exercises the same scene through the scalar channel path.
    """
    alpha = params.path_loss_exponent
    radius = window_radius or default_window_radius(params.pair_distance,
                                                    params.user_density)
    inner = params.pair_distance if interferer_mode == "guard_zone" else 0.0
    area = math.pi * (radius ** 2 - inner ** 2)
    counts = rng.poisson(params.user_density * area, size=n_samples)
    total = int(counts.sum())

    r = np.sqrt(rng.uniform(inner ** 2, radius ** 2, size=total))
    h_int = rng.exponential(1.0, size=total)
    contrib = h_int * r ** (-alpha)
    if shadowing_sigma_db > 0:
        contrib *= 10.0 ** (rng.normal(0.0, shadowing_sigma_db, total) / 10.0)
    owner = np.repeat(np.arange(n_samples), counts)
    interference = np.bincount(owner, weights=contrib, minlength=n_samples)

    signal = rng.exponential(1.0, size=n_samples) * params.pair_distance ** (-alpha)
    if shadowing_sigma_db > 0:
        signal *= 10.0 ** (rng.normal(0.0, shadowing_sigma_db, n_samples) / 10.0)
    with np.errstate(divide="ignore"):
        return np.where(interference > 0, signal / interference, np.inf)


def geometric_gof_pvalue(slots_to_success, p: float,
                         min_expected: float = 5.0) -> float:
    """Chi-square goodness-of-fit p-value against Geometric(p).

    Slot counts are binned from 1 upward with an aggregated tail; adjacent
    bins are merged until each expected count reaches min_expected.
    """
    values = np.asarray(list(slots_to_success), dtype=int)
    n = values.size
    if n == 0:
        raise ValueError("no samples")
    kmax = int(values.max())
    observed = np.bincount(values, minlength=kmax + 2)[1:kmax + 1].astype(float)
    pmf = p * (1 - p) ** (np.arange(1, kmax + 1) - 1)
    expected = n * pmf
    # open tail bin beyond kmax
    observed = np.append(observed, 0.0)
    expected = np.append(expected, n * (1 - p) ** kmax)

    merged_obs, merged_exp = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= min_expected:
            merged_obs.append(acc_o)
            merged_exp.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0 and merged_exp:
        merged_obs[-1] += acc_o
        merged_exp[-1] += acc_e
    if len(merged_exp) < 2:
        return 1.0
    merged_obs = np.asarray(merged_obs)
    merged_exp = np.asarray(merged_exp) * merged_obs.sum() / np.sum(merged_exp)
    return float(stats.chisquare(merged_obs, merged_exp).pvalue)


def _run_trials(config: ExperimentConfig, jobs: int = 1) -> list[TrialRecord]:
    indices = range(config.trials)
    if jobs <= 1:
        return [run_trial(config, i) for i in indices]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        records = list(pool.map(run_trial, [config] * config.trials, indices,
                                chunksize=max(1, config.trials // (4 * jobs))))
    return sorted(records, key=lambda r: r.trial_index)


def aggregate(config: ExperimentConfig, sweep_value,
              records: list[TrialRecord]) -> MetricRecord:
    """Reduce trial records into one MetricRecord with analytic columns."""
    p = config.analytic
    usable = [r for r in records if not r.skipped]
    sir_samples = [s for r in usable for s in r.sir_samples]
    slots = [n for r in usable for n in r.slots_to_success]
    censored = sum(r.censored for r in usable)

    sir_emp = (estimate_sir_ccdf(sir_samples, config.tau_grid_db)
               if sir_samples else None)
    sir_ana = np.array([analytic.sir_coverage_probability(p, t)
                        for t in config.tau_grid_db])
    p_ana = analytic.discovery_success_prob(p)
    p_emp = estimate_p_success(usable) if usable else None
    try:
        required = analytic.required_slot_count(p)
    except ValueError:
        required = None

    slots_cdf = mean_slots = slots_ana = None
    if slots:
        slots_cdf, mean_slots = estimate_slots_cdf(slots, censored)
        slots_ana = np.array([analytic.prob_success_within(p_ana, int(n))
                              for n in slots_cdf.values])
    return MetricRecord(
        sweep_value=sweep_value, tau_grid_db=config.tau_grid_db,
        sir_ccdf_emp=sir_emp, sir_ccdf_analytic=sir_ana,
        p_success_emp=p_emp, p_success_analytic=p_ana,
        n_opportunities=sum(r.opportunities for r in usable),
        slots_cdf=slots_cdf, slots_cdf_analytic=slots_ana,
        required_slots_analytic=required, mean_slots=mean_slots,
        trial_count=len(usable), censored_count=censored)


def analytic_record(config: ExperimentConfig, sweep_value) -> MetricRecord:
    """MetricRecord carrying closed-form values only (no simulation)."""
    point = config.with_sweep_value(sweep_value)
    p = point.analytic
    sir_ana = np.array([analytic.sir_coverage_probability(p, t)
                        for t in point.tau_grid_db])
    p_ana = analytic.discovery_success_prob(p)
    try:
        required = analytic.required_slot_count(p)
        # keep the tabulated CDF grid bounded for near-zero success rates
        grid = np.arange(1, min(required, 500) + 1)
        slots_ana = np.array([analytic.prob_success_within(p_ana, int(n))
                              for n in grid])
        slots_cdf = EmpiricalCdf(values=grid,
                                 cum_fraction=np.zeros_like(grid, dtype=float))
    except ValueError:
        required, slots_ana, slots_cdf = None, None, None
    return MetricRecord(
        sweep_value=sweep_value, tau_grid_db=point.tau_grid_db,
        sir_ccdf_emp=None, sir_ccdf_analytic=sir_ana, p_success_emp=None,
        p_success_analytic=p_ana, n_opportunities=0, slots_cdf=slots_cdf,
        slots_cdf_analytic=slots_ana, required_slots_analytic=required,
        mean_slots=None, trial_count=0, censored_count=0)


def sweep(config: ExperimentConfig, jobs: int = 1,
          simulate: bool = True) -> list[MetricRecord]:
    """One MetricRecord per sweep value; deterministic given the seed."""
    records = []
    for value in config.sweep_values:
        if not simulate:
            records.append(analytic_record(config, value))
            continue
        point = config.with_sweep_value(value)
        records.append(aggregate(point, value, _run_trials(point, jobs)))
    return records


# ---------------------------------------------------------------------------
# CSV output (fixed schemas)

def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isinf(x):
        return "inf"
    return format(x, ".10g")


def write_sir_ccdf_csv(records: list[MetricRecord], path) -> None:
    lines = ["sweep_value,tau_db,empirical,analytic"]
    for r in records:
        for i, tau in enumerate(r.tau_grid_db):
            emp = r.sir_ccdf_emp[i] if r.sir_ccdf_emp is not None else None
            ana = r.sir_ccdf_analytic[i] if r.sir_ccdf_analytic is not None else None
            lines.append(",".join([_fmt(r.sweep_value), _fmt(tau),
                                   _fmt(emp), _fmt(ana)]))
    _write_lines(path, lines)


def write_success_csv(records: list[MetricRecord], path) -> None:
    lines = ["sweep_value,p_success_emp,p_success_analytic,n_opportunities"]
    for r in records:
        lines.append(",".join([_fmt(r.sweep_value), _fmt(r.p_success_emp),
                               _fmt(r.p_success_analytic),
                               _fmt(r.n_opportunities)]))
    _write_lines(path, lines)


def write_slots_csv(records: list[MetricRecord], path) -> None:
    lines = ["sweep_value,n,cdf_emp,cdf_analytic,required_slots_analytic"]
    for r in records:
        if r.slots_cdf is None:
            continue
        for i, n in enumerate(r.slots_cdf.values):
            emp = r.slots_cdf.cum_fraction[i] if r.trial_count else None
            ana = (r.slots_cdf_analytic[i]
                   if r.slots_cdf_analytic is not None else None)
            lines.append(",".join([_fmt(r.sweep_value), _fmt(int(n)),
                                   _fmt(emp), _fmt(ana),
                                   _fmt(r.required_slots_analytic)]))
    _write_lines(path, lines)


def write_meta_csv(config: ExperimentConfig, path, version: str,
                   extra: dict | None = None) -> None:
    lines = ["key,value"]
    flat = {
        "version": version,
        "seed": config.seed,
        "trials": config.trials,
        "slots_cap": config.slots_cap,
        "message_mode": config.message_mode,
        "interferer_mode": config.interferer_mode,
        "placement": config.placement,
        "persistent_contention": config.persistent_contention,
        "pairing_threshold": config.pairing_threshold,
        "bs_density": config.bs_density,
        "sweep_param": config.sweep_param,
        "sweep_values": " ".join(_fmt(v) for v in config.sweep_values),
        "tau_grid_db": " ".join(_fmt(v) for v in config.tau_grid_db),
    }
    for name, obj in (("analytic", config.analytic),
                      ("channel", config.channel), ("power", config.power)):
        for f in dataclasses.fields(obj):
            flat[f"{name}.{f.name}"] = getattr(obj, f.name)
    if extra:
        flat.update(extra)
    for k in flat:
        v = flat[k]
        if isinstance(v, float):
            v = _fmt(v)
        lines.append(f"{k},{v}")
    _write_lines(path, lines)


def _write_lines(path, lines) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
