"""Slotted contention and the five-step centralized discovery state machine.

Channel access is slotted: at each slot start every contending pair rolls a
uniform integer in [1, n] and transmits iff it matches its own id, which
realizes the collision-optimal transmission probability 1/n. Two or more
simultaneous transmissions collide and nobody progresses.

Two message granularities are supported:

* single_message - the whole discovery attempt rides one collision-free
  slot: solo transmission plus an SIR pass establishes the link. This is
  the granularity of the closed-form analysis and the validation default.
* full_signaling - uplink steps (request, discovery message, SIR report)
  each consume a contention slot; the base station's downlink responses
  (scheduling ack, final decision) are error-free and instantaneous.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .analytic import db_to_linear, linear_to_db
from .channel import ChannelParams, compute_sir
from .geometry import (D2DPair, NetworkRealization, Window,
                       representative_cell, sample_interferer_field)


class SessionState(enum.Enum):
    IDLE = "idle"
    REQUEST_SENT = "request_sent"
    SCHEDULED = "scheduled"
    DISCOVERY_SENT = "discovery_sent"
    SIR_REPORTED = "sir_reported"
    ESTABLISHED = "established"
    FAILED_RETRY = "failed_retry"


# states in which a pair contends for the channel
_CONTENDING = {SessionState.IDLE, SessionState.SCHEDULED,
               SessionState.DISCOVERY_SENT, SessionState.FAILED_RETRY}


@dataclass
class DiscoverySession:
    """Per-pair protocol instance with slot history."""

    pair: D2DPair
    state: SessionState = SessionState.IDLE
    slots_elapsed: int = 0
    slots_to_success: int | None = None
    last_sir: float | None = None
    state_history: list[SessionState] = field(default_factory=list)

    @property
    def established(self) -> bool:
        return self.state is SessionState.ESTABLISHED

    def _enter(self, state: SessionState) -> None:
        self.state = state
        self.state_history.append(state)


@dataclass
class SlotOutcome:
    """Record of one contention slot."""

    slot_index: int
    transmitting_pair_ids: list[int]
    collision: bool
    sir: dict[int, float] = field(default_factory=dict)       # linear, by pair id
    success: dict[int, bool] = field(default_factory=dict)    # by pair id


def transmit_decision(pair_id: int, n_pairs: int,
                      rng: np.random.Generator) -> bool:
    """Dice roll for one pair: transmit iff a uniform draw in [1, n] hits its id."""
    if not 1 <= pair_id <= n_pairs:
        raise ValueError("pair_id must lie in [1, n_pairs]")
    return int(rng.integers(1, n_pairs + 1)) == pair_id


def detect_collision(transmitting_pair_ids) -> bool:
    """Collision iff two or more pairs transmitted in the slot."""
    return len(transmitting_pair_ids) >= 2


def control_link_ok(ue: np.ndarray, serving_bs: np.ndarray,
                    interferer_txs: np.ndarray, sir_threshold_db: float,
                    params: ChannelParams, rng: np.random.Generator,
                    **sir_kwargs) -> bool:
    """Whether an uplink control message reaches the BS above the SIR threshold."""
    sir = compute_sir(ue, serving_bs, interferer_txs, params, rng, **sir_kwargs)
    return sir >= db_to_linear(sir_threshold_db)


def advance_session(session: DiscoverySession, slot: SlotOutcome,
                    sir_threshold_db: float, control_ok: bool = True,
                    message_mode: str = "single_message") -> DiscoverySession:
    """Advance one session by one slot given the slot's outcome.

    Established sessions are left untouched. A collision, a lost dice roll,
    or a failed control link leaves the discovery stage where it was; the
    pair retries in later slots.
    """
    if session.established:
        return session
    session.slots_elapsed += 1
    pid = session.pair.pair_id
    solo = pid in slot.transmitting_pair_ids and not slot.collision
    sir = slot.sir.get(pid)
    tau = db_to_linear(sir_threshold_db)

    if message_mode == "single_message":
        if solo:
            session.last_sir = sir
            if control_ok and sir is not None and sir >= tau:
                session._enter(SessionState.ESTABLISHED)
                session.slots_to_success = session.slots_elapsed
                slot.success[pid] = True
            else:
                session._enter(SessionState.FAILED_RETRY)
        return session

    if message_mode != "full_signaling":
        raise ValueError(f"unknown message_mode {message_mode!r}")

    if not solo:
        return session
    if session.state in (SessionState.IDLE, SessionState.FAILED_RETRY):
        # step 1 uplink request; step 2 downlink scheduling is instantaneous
        if control_ok:
            session._enter(SessionState.REQUEST_SENT)
            session._enter(SessionState.SCHEDULED)
    elif session.state is SessionState.SCHEDULED:
        # step 3: discovery message over the air, SIR measured at the receiver
        session._enter(SessionState.DISCOVERY_SENT)
        session.last_sir = sir
    elif session.state is SessionState.DISCOVERY_SENT:
        # step 4 uplink SIR report; step 5 downlink verdict is instantaneous
        if control_ok:
            session._enter(SessionState.SIR_REPORTED)
            if session.last_sir is not None and session.last_sir >= tau:
                session._enter(SessionState.ESTABLISHED)
                session.slots_to_success = session.slots_elapsed
                slot.success[pid] = True
            else:
                session._enter(SessionState.FAILED_RETRY)
    return session


def run_slot(realization: NetworkRealization, sessions: list[DiscoverySession],
             params: ChannelParams, sir_threshold_db: float,
             rng: np.random.Generator, *, slot_index: int,
             interferer_mode: str = "saturated",
             message_mode: str = "single_message",
             interferer_density: float = 0.0,
             persistent_contention: bool = True,
             control_model: bool = False) -> SlotOutcome:
    """Run one contention slot, advancing every non-established session.

    interferer_mode selects what a solo transmitter's receiver hears:
    `saturated` draws a fresh always-on uplink interferer field of the
    given density around the receiver each slot; `contention_only` leaves
    a solo transmitter interference-free (only colliding D2D transmitters
    would interfere, and a collision already voids the slot).

    With persistent_contention, established pairs keep rolling the dice
    (their ongoing traffic still occupies the channel), so the contention
    environment of the remaining pairs is stationary and every pair's
    slots-to-success is geometric. Without it, only active sessions roll,
    over a dice range equal to the active count.
    """
    if interferer_mode not in ("saturated", "contention_only"):
        raise ValueError(f"unknown interferer_mode {interferer_mode!r}")

    active = [s for s in sessions if not s.established]
    if persistent_contention:
        n_dice = len(sessions)
        transmitters = [s for s in sessions
                        if transmit_decision(s.pair.pair_id, n_dice, rng)]
    else:
        n_dice = max(len(active), 1)
        transmitters = [s for rank, s in enumerate(active, start=1)
                        if transmit_decision(rank, n_dice, rng)]

    ids = [s.pair.pair_id for s in transmitters]
    collision = detect_collision(ids)
    outcome = SlotOutcome(slot_index=slot_index, transmitting_pair_ids=ids,
                          collision=collision)

    solo = transmitters[0] if len(transmitters) == 1 else None
    control_ok = True
    if solo is not None and not solo.established:
        pair = solo.pair
        if interferer_mode == "saturated":
            field_pts = sample_interferer_field(
                interferer_density,
                Window(center=pair.rx, radius=realization.window.radius),
                rng, params.interferer_mode, pair.separation)
            sir = compute_sir(pair.tx, pair.rx, field_pts, params, rng)
        else:
            sir = math.inf
        outcome.sir[pair.pair_id] = sir
        if control_model and len(realization.bs_points) > 0:
            bs = representative_cell(realization.bs_points, pair.tx)
            field_pts = sample_interferer_field(
                interferer_density,
                Window(center=bs, radius=realization.window.radius),
                rng, params.interferer_mode, pair.separation)
            control_ok = control_link_ok(pair.tx, bs, field_pts,
                                         sir_threshold_db, params, rng)

    for session in active:
        outcome.success.setdefault(session.pair.pair_id, False)
        advance_session(session, outcome, sir_threshold_db,
                        control_ok=control_ok, message_mode=message_mode)
    return outcome


def simulate_contention_slots(n_pairs: int, n_slots: int,
                              rng: np.random.Generator) -> np.ndarray:
    """Vectorized dice rolls: (n_slots, n_pairs) boolean transmit matrix.

    Same law as per-pair transmit_decision: each pair independently matches
    a uniform draw in [1, n_pairs] against its id.
    """
    draws = rng.integers(1, n_pairs + 1, size=(n_slots, n_pairs))
    return draws == np.arange(1, n_pairs + 1)


def trace_lines(outcome: SlotOutcome,
                sessions: list[DiscoverySession]) -> list[str]:
    """Delimited trace, one line per pair per slot.

    Schema: slot_index|pair_id|action|collision|sir_db|state_after
    """
    lines = []
    for s in sessions:
        pid = s.pair.pair_id
        action = "transmit" if pid in outcome.transmitting_pair_ids else "idle"
        sir = outcome.sir.get(pid)
        if sir is None:
            sir_db = ""
        elif math.isinf(sir):
            sir_db = "inf"
        else:
            sir_db = format(linear_to_db(sir), ".6g") if sir > 0 else "-inf"
        lines.append("|".join([str(outcome.slot_index), str(pid), action,
                               str(int(outcome.collision)), sir_db,
                               s.state.value]))
    return lines
