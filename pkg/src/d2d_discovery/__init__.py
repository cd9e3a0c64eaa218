"""Simulator and closed-form evaluator for centralized D2D peer discovery
underlaying cellular uplink spectrum."""

__version__ = "0.1.0"

from .analytic import (AnalyticParams, db_to_linear, discovery_success_prob,
                       interference_laplace_transform, laplace_exponent_factor,
                       linear_to_db, min_slots_for_target, no_collision_prob,
                       optimal_tx_probability,
                       peak_no_collision_prob, prob_success_within,
                       required_slot_count, sir_coverage_probability)
from .channel import (ChannelParams, PowerConfig, compute_sir, path_loss,
                      sample_fading, sample_shadowing)
from .geometry import (D2DPair, NetworkRealization, PairingShortfallError,
                       Window, default_window_radius, pair_users,
                       place_fixed_pair, representative_cell, sample_ppp)
from .montecarlo import (EmpiricalCdf, ExperimentConfig, MetricRecord,
                         TrialRecord, estimate_p_success, estimate_sir_ccdf,
                         estimate_slots_cdf, geometric_gof_pvalue, run_trial,
                         sample_fixed_pair_sir, sweep)
from .protocol import (DiscoverySession, SessionState, SlotOutcome,
                       advance_session, control_link_ok, detect_collision,
                       run_slot, simulate_contention_slots, transmit_decision)
