"""Spatial sampling: Poisson point processes, cell association, pair placement.

Points are numpy arrays: a single point has shape (2,), a point set has
shape (n, 2). All processes are sampled on a finite disc window; the
window radius is chosen large enough that the truncated far-field
interference is negligible for path loss exponents above 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class PairingShortfallError(RuntimeError):
    """Raised when fewer qualifying D2D pairs exist than requested."""


@dataclass(frozen=True)
class Window:
    """Disc observation window."""

    center: np.ndarray = field(default_factory=lambda: np.zeros(2))
    radius: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if not np.all(np.isfinite(self.center)):
            raise ValueError("window center must be finite")
        if self.radius <= 0:
            raise ValueError("window radius must be > 0")

    @property
    def area(self) -> float:
        return math.pi * self.radius ** 2


@dataclass(frozen=True)
class D2DPair:
    """One candidate device pair, ids assigned 1..n in formation order."""

    pair_id: int
    tx: np.ndarray
    rx: np.ndarray
    separation: float

    def __post_init__(self):
        object.__setattr__(self, "tx", np.asarray(self.tx, dtype=float))
        object.__setattr__(self, "rx", np.asarray(self.rx, dtype=float))
        if self.separation <= 0:
            raise ValueError("pair separation must be > 0")


@dataclass
class NetworkRealization:
    """One sampled spatial snapshot: BS points, UE points, D2D pairs."""

    bs_points: np.ndarray
    ue_points: np.ndarray
    pairs: list[D2DPair]
    window: Window
    seed: int | None = None


def default_window_radius(pair_distance: float, user_density: float) -> float:
    """Truncation radius for the notionally infinite interferer field.

    At least 10 pair distances and 5 mean nearest-neighbour scales, so the
    out-of-window interference tail is negligible for exponents > 2.
    """
    radius = 10.0 * pair_distance
    if user_density > 0:
        radius = max(radius, 5.0 / math.sqrt(user_density))
    return radius


def sample_ppp(density: float, window: Window,
               rng: np.random.Generator) -> np.ndarray:
    """Sample a homogeneous Poisson point process on a disc window.

    Poisson count with mean density * area, then i.i.d. uniform placement.
    Returns an (n, 2) array.
    """
    if density < 0:
        raise ValueError("density must be >= 0")
    n = rng.poisson(density * window.area)
    return _uniform_in_disc(n, window, rng)


def _uniform_in_disc(n: int, window: Window, rng: np.random.Generator,
                     inner_radius: float = 0.0) -> np.ndarray:
    """Uniform points on a disc, or on an annulus if inner_radius > 0."""
    r = np.sqrt(rng.uniform(inner_radius ** 2, window.radius ** 2, size=n))
    theta = rng.uniform(0.0, 2.0 * math.pi, size=n)
    pts = np.column_stack((r * np.cos(theta), r * np.sin(theta)))
    return pts + window.center


def representative_cell(bs_points: np.ndarray, origin: np.ndarray) -> np.ndarray:
    """Serving base station for a device at `origin`: the nearest BS.

    Ties break toward the lowest index. Nearest-point association is the
    operational form of membership in a Voronoi cell; no polygon is built.
    """
    bs_points = np.asarray(bs_points, dtype=float)
    if bs_points.size == 0:
        raise ValueError("no base stations to associate with")
    d2 = np.sum((bs_points - np.asarray(origin, dtype=float)) ** 2, axis=1)
    return bs_points[int(np.argmin(d2))]


def pair_users(ue_points: np.ndarray, distance_threshold: float,
               count: int) -> list[D2DPair]:
    """Greedily pair each user with its nearest unmatched neighbour.

    Users are visited in index order; a user is paired with its nearest
    still-unmatched neighbour provided the separation is within the
    threshold. The first `count` pairs are returned with ids 1..count in
    formation order. No user appears in more than one pair.
    """
    if distance_threshold <= 0:
        raise ValueError("distance_threshold must be > 0")
    ue_points = np.asarray(ue_points, dtype=float)
    n = len(ue_points)
    matched = np.zeros(n, dtype=bool)
    pairs: list[D2DPair] = []
    for i in range(n):
        if len(pairs) == count:
            break
        if matched[i]:
            continue
        free = ~matched
        free[i] = False
        if not free.any():
            break
        d = np.linalg.norm(ue_points[free] - ue_points[i], axis=1)
        j = np.flatnonzero(free)[int(np.argmin(d))]
        sep = float(np.linalg.norm(ue_points[j] - ue_points[i]))
        if sep > distance_threshold or sep == 0.0:
            continue
        matched[i] = matched[j] = True
        pairs.append(D2DPair(pair_id=len(pairs) + 1, tx=ue_points[i],
                             rx=ue_points[j], separation=sep))
    if len(pairs) < count:
        raise PairingShortfallError(
            f"only {len(pairs)} of {count} requested pairs satisfy the "
            f"distance threshold {distance_threshold}")
    return pairs


def place_fixed_pair(pair_distance: float, interferer_density: float,
                     window: Window, rng: np.random.Generator,
                     interferer_mode: str = "whole_plane",
                     n_pairs: int = 1) -> NetworkRealization:
    """Fixed-separation pair(s) at the origin plus a PPP interferer field.

    The receiver sits at the window center, the transmitter at exactly
    `pair_distance` away at a uniform random angle. In guard_zone mode the
    interferer field is restricted to the annulus outside `pair_distance`;
    whole_plane places it over the full window.
    """
    if pair_distance <= 0:
        raise ValueError("pair_distance must be > 0")
    if pair_distance >= window.radius:
        raise ValueError("pair_distance must be smaller than the window radius")
    if interferer_mode not in ("whole_plane", "guard_zone"):
        raise ValueError(f"unknown interferer_mode {interferer_mode!r}")

    pairs = []
    for pid in range(1, n_pairs + 1):
        angle = rng.uniform(0.0, 2.0 * math.pi)
        tx = window.center + pair_distance * np.array([math.cos(angle),
                                                       math.sin(angle)])
        pairs.append(D2DPair(pair_id=pid, tx=tx, rx=window.center.copy(),
                             separation=pair_distance))

    interferers = sample_interferer_field(interferer_density, window, rng,
                                          interferer_mode, pair_distance)
    return NetworkRealization(bs_points=np.empty((0, 2)), ue_points=interferers,
                              pairs=pairs, window=window)


def sample_interferer_field(density: float, window: Window,
                            rng: np.random.Generator,
                            interferer_mode: str = "whole_plane",
                            guard_radius: float = 0.0) -> np.ndarray:
    """One draw of the concurrent-transmitter field around the window center."""
    if density < 0:
        raise ValueError("density must be >= 0")
    if interferer_mode == "guard_zone" and guard_radius > 0:
        area = math.pi * (window.radius ** 2 - guard_radius ** 2)
        n = rng.poisson(density * area)
        return _uniform_in_disc(n, window, rng, inner_radius=guard_radius)
    return sample_ppp(density, window, rng)
