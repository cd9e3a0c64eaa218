"""Closed-form performance expressions for the discovery scheme.

Everything here is exact arithmetic on the model parameters: slotted-access
collision probabilities, the interference Laplace transform for a power-law
path loss field of Rayleigh-faded transmitters, the resulting SIR coverage
probability, and the slot budget needed to hit a target discovery
probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


def db_to_linear(value_db: float) -> float:
    """Convert a dB power ratio to linear scale."""
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    """Convert a linear power ratio to dB."""
    if value <= 0:
        raise ValueError("dB conversion needs a positive ratio, got %r" % value)
    return 10.0 * math.log10(value)


@dataclass(frozen=True)
class AnalyticParams:
    """Parameter bundle for the closed-form expressions.

    user_density        density of concurrent uplink transmitters (per unit area)
    n_pairs             number of potential D2D pairs contending per slot
    sir_threshold_db    SIR acceptance threshold, in dB
    pair_distance       transmitter-receiver separation of the pair under study
    path_loss_exponent  power-law path loss exponent, must exceed 2
    target_success_prob minimum probability of at least one successful
                        discovery within the slot budget
    tx_probability      per-slot transmission probability; None selects the
                        collision-optimal value 1/n_pairs
    """

    user_density: float = 0.05
    n_pairs: int = 4
    sir_threshold_db: float = 0.0
    pair_distance: float = 1.0
    path_loss_exponent: float = 4.0
    target_success_prob: float = 0.9
    tx_probability: float | None = None

    def __post_init__(self):
        if self.user_density < 0:
            raise ValueError("user_density must be >= 0")
        if self.n_pairs < 1:
            raise ValueError("n_pairs must be >= 1")
        if self.path_loss_exponent <= 2:
            raise ValueError("path_loss_exponent must be > 2 "
                             "(interference diverges otherwise)")
        if self.pair_distance <= 0:
            raise ValueError("pair_distance must be > 0")
        if not 0 < self.target_success_prob < 1:
            raise ValueError("target_success_prob must lie in (0, 1)")
        if self.tx_probability is not None and not 0 <= self.tx_probability <= 1:
            raise ValueError("tx_probability must lie in [0, 1]")

    @property
    def effective_tx_probability(self) -> float:
        if self.tx_probability is None:
            return 1.0 / self.n_pairs
        return self.tx_probability


def no_collision_prob(tx_probability: float, n_pairs: int) -> float:
    """Probability that a given pair transmits alone in a slot.

    The pair must transmit (probability tx_probability) while the other
    n_pairs - 1 pairs all stay idle.
    """
    if not 0 <= tx_probability <= 1:
        raise ValueError("tx_probability must lie in [0, 1]")
    if n_pairs < 1:
        raise ValueError("n_pairs must be >= 1")
    return tx_probability * (1.0 - tx_probability) ** (n_pairs - 1)


def optimal_tx_probability(n_pairs: int) -> float:
    """Transmission probability maximizing no_collision_prob: 1/n_pairs."""
    if n_pairs < 1:
        raise ValueError("n_pairs must be >= 1")
    return 1.0 / n_pairs


def peak_no_collision_prob(n_pairs: int) -> float:
    """no_collision_prob evaluated at the optimal transmission probability."""
    return no_collision_prob(optimal_tx_probability(n_pairs), n_pairs)


def laplace_exponent_factor(s: float, path_loss_exponent: float) -> float:
    """Density-normalized exponent of the interference Laplace transform.

    For a plane of unit-density Rayleigh-faded interferers with power-law
    path loss, the Laplace transform of the aggregate interference is
    exp(-density * factor). With d = 2/path_loss_exponent the factor is
    pi^2 * d * s^d / sin(pi * d), equivalently
    pi * Gamma(1 + d) * Gamma(1 - d) * s^d by the Gamma reflection formula.
    """
    if s < 0:
        raise ValueError("s must be >= 0")
    if path_loss_exponent <= 2:
        raise ValueError("path_loss_exponent must be > 2")
    d = 2.0 / path_loss_exponent
    return math.pi ** 2 * d * s ** d / math.sin(math.pi * d)


def interference_laplace_transform(s: float, user_density: float,
                                   path_loss_exponent: float) -> float:
    """Laplace transform of the aggregate interference at argument s."""
    if user_density < 0:
        raise ValueError("user_density must be >= 0")
    return math.exp(-user_density * laplace_exponent_factor(s, path_loss_exponent))


def sir_coverage_probability(params: AnalyticParams,
                             sir_threshold_db: float | None = None) -> float:
    """P(SIR >= threshold) for the fixed-distance pair in the interferer field.

    Thresholds are accepted in dB and converted to linear exactly here.
    """
    tau_db = params.sir_threshold_db if sir_threshold_db is None else sir_threshold_db
    tau = db_to_linear(tau_db)
    s = tau * params.pair_distance ** params.path_loss_exponent
    return interference_laplace_transform(s, params.user_density,
                                          params.path_loss_exponent)


def discovery_success_prob(params: AnalyticParams,
                           sir_threshold_db: float | None = None) -> float:
    """Joint per-slot success probability: solo transmission and SIR pass.

    Collision and SIR satisfaction are independent, so the probability
    factorizes into the peak no-collision term times SIR coverage.
    """
    return (peak_no_collision_prob(params.n_pairs)
            * sir_coverage_probability(params, sir_threshold_db))


def prob_success_within(per_slot_success: float, n_slots: int) -> float:
    """Probability of at least one success in n_slots independent slots."""
    if not 0 <= per_slot_success <= 1:
        raise ValueError("per_slot_success must lie in [0, 1]")
    if n_slots < 0:
        raise ValueError("n_slots must be >= 0")
    if per_slot_success == 1.0:
        return 1.0 if n_slots > 0 else 0.0
    # log1p/expm1 keep precision when the per-slot probability is tiny
    return -math.expm1(n_slots * math.log1p(-per_slot_success))


def min_slots_for_target(per_slot_success: float, target: float) -> int:
    """Smallest n with 1 - (1 - p)^n >= target, p the per-slot success."""
    if not 0 < target < 1:
        raise ValueError("target must lie in (0, 1)")
    if per_slot_success <= 0:
        raise ValueError("per-slot success probability is 0; "
                         "the target success probability is unreachable")
    if per_slot_success >= 1:
        return 1
    n = max(1, math.ceil(math.log1p(-target)
                         / math.log1p(-per_slot_success) - 1e-12))
    if n < 2 ** 53:
        # fix up floating point on the ceiling boundary; pointless (and
        # unterminated) once n and n-1 are indistinguishable as floats
        while prob_success_within(per_slot_success, n) < target:
            n += 1
        while n > 1 and prob_success_within(per_slot_success, n - 1) >= target:
            n -= 1
    return n


def required_slot_count(params: AnalyticParams) -> int:
    """Slot budget meeting the target discovery probability.

    Solves 1 - (1 - p)^n >= target for the minimal integer n, where p is
    the per-slot discovery success probability at the optimal transmission
    probability.
    """
    return min_slots_for_target(discovery_success_prob(params),
                                params.target_success_prob)
