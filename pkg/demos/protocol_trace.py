"""Walk one discovery trial through the full signaling handshake.

Uses the five-step message exchange (request, scheduling, discovery
message, SIR report, confirmation) instead of the condensed single-message
model, and prints the per-slot trace of the first trial.
"""

from d2d_discovery import AnalyticParams, ExperimentConfig, run_trial

cfg = ExperimentConfig(
    analytic=AnalyticParams(user_density=0.02, n_pairs=2,
                            sir_threshold_db=0.0),
    message_mode="full_signaling", trials=1, slots_cap=200, seed=5)

rec = run_trial(cfg, 0, collect_trace=True)
print("slot | pair | action | collision | sir_db | state_after")
for line in rec.trace[:40]:
    print(line.replace("|", " | "))
print(f"...\nslots to establishment per pair: {rec.slots_to_success}")
