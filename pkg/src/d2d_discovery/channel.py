"""Link-level model: power-law path loss, Rayleigh fading, log-normal shadowing.

SIR is a pure power ratio here. All transmitters use the same power, so the
transmit power cancels between numerator and denominator and never enters
the computation; it is carried in PowerConfig for configuration fidelity
only. An empty interferer set yields the +inf SIR sentinel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ChannelParams:
    """Propagation configuration.

    min_distance guards the path loss singularity: links shorter than this
    are rejected rather than clamped, so tail statistics stay unbiased.
    """

    path_loss_exponent: float = 4.0
    shadowing_sigma_db: float = 4.0
    shadowing_enabled: bool = False
    interferer_mode: str = "whole_plane"  # or "guard_zone"
    min_distance: float = 1e-6

    def __post_init__(self):
        if self.path_loss_exponent <= 2:
            raise ValueError("path_loss_exponent must be > 2")
        if self.shadowing_sigma_db < 0:
            raise ValueError("shadowing_sigma_db must be >= 0")
        if self.interferer_mode not in ("whole_plane", "guard_zone"):
            raise ValueError(f"unknown interferer_mode {self.interferer_mode!r}")


@dataclass(frozen=True)
class PowerConfig:
    """Transmit powers, dBm. Unused by SIR (equal powers cancel)."""

    ue_tx_power_dbm: float = 23.0
    bs_tx_power_dbm: float = 40.0

    def __post_init__(self):
        if not (math.isfinite(self.ue_tx_power_dbm)
                and math.isfinite(self.bs_tx_power_dbm)):
            raise ValueError("transmit powers must be finite")


def path_loss(distance, path_loss_exponent: float, min_distance: float = 1e-6):
    """Power-law gain distance**(-exponent). Accepts scalars or arrays."""
    d = np.asarray(distance, dtype=float)
    if np.any(d < min_distance):
        raise ValueError("link distance below %g; singular path loss"
                         % min_distance)
    out = d ** (-path_loss_exponent)
    return float(out) if np.isscalar(distance) else out


def sample_fading(rng: np.random.Generator, size=None):
    """Rayleigh fading power coefficient(s): Exponential with mean one."""
    return rng.exponential(1.0, size=size)


def sample_shadowing(sigma_db: float, rng: np.random.Generator, size=None):
    """Log-normal shadowing multiplier(s): 10**(g/10), g ~ Normal(0, sigma_db^2).

    Exactly 1 when sigma_db is 0.
    """
    if sigma_db < 0:
        raise ValueError("sigma_db must be >= 0")
    if sigma_db == 0:
        return 1.0 if size is None else np.ones(size)
    g = rng.normal(0.0, sigma_db, size=size)
    return 10.0 ** (g / 10.0)


def compute_sir(tx: np.ndarray, rx: np.ndarray, interferer_txs: np.ndarray,
                params: ChannelParams, rng: np.random.Generator,
                direct_fading: float | None = None,
                interferer_fading: np.ndarray | None = None) -> float:
    """SIR at rx for a transmission from tx against a set of interferers.

    Fresh independent fading (and shadowing, if enabled) is drawn per link
    unless explicit fading values are supplied, which the scale/monotonicity
    property tests rely on. Returns math.inf when there is no interference.
    """
    tx = np.asarray(tx, dtype=float)
    rx = np.asarray(rx, dtype=float)
    d_sig = float(np.linalg.norm(tx - rx))
    if d_sig < params.min_distance:
        raise ValueError("transmitter and receiver coincide")

    h_sig = sample_fading(rng) if direct_fading is None else direct_fading
    signal = h_sig * path_loss(d_sig, params.path_loss_exponent,
                               params.min_distance)
    if params.shadowing_enabled and params.shadowing_sigma_db > 0:
        signal *= sample_shadowing(params.shadowing_sigma_db, rng)

    interferer_txs = np.asarray(interferer_txs, dtype=float).reshape(-1, 2)
    if len(interferer_txs) == 0:
        return math.inf

    d_int = np.linalg.norm(interferer_txs - rx, axis=1)
    if np.any(d_int < params.min_distance):
        raise ValueError("interferer coincides with the receiver")
    if interferer_fading is None:
        h_int = sample_fading(rng, size=len(d_int))
    else:
        h_int = np.asarray(interferer_fading, dtype=float)
    gains = h_int * path_loss(d_int, params.path_loss_exponent,
                              params.min_distance)
    if params.shadowing_enabled and params.shadowing_sigma_db > 0:
        gains = gains * sample_shadowing(params.shadowing_sigma_db, rng,
                                         size=len(d_int))
    interference = float(np.sum(gains))
    if interference == 0.0:
        return math.inf
    return float(signal / interference)
