"""Point process sampling and pair construction."""

import math

import numpy as np
import pytest

from d2d_discovery.geometry import (PairingShortfallError, Window,
                                    default_window_radius, pair_users,
                                    place_fixed_pair, representative_cell,
                                    sample_ppp)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


class TestSamplePpp:
    def test_zero_density_empty(self, rng):
        pts = sample_ppp(0.0, Window(radius=10.0), rng)
        assert pts.shape == (0, 2)

    def test_negative_density_rejected(self, rng):
        with pytest.raises(ValueError):
            sample_ppp(-0.1, Window(radius=1.0), rng)

    def test_count_mean(self, rng):
        # density 0.2 on a disc of radius 10: mean count 0.2*pi*100
        window = Window(radius=10.0)
        counts = [len(sample_ppp(0.2, window, rng)) for _ in range(10_000)]
        mean = 0.2 * math.pi * 100
        se = math.sqrt(mean / 10_000)
        assert abs(np.mean(counts) - mean) < 3 * se

    def test_count_variance_poisson(self, rng):
        # unit-area window: variance of the count equals the mean (=1)
        window = Window(radius=1.0 / math.sqrt(math.pi))
        counts = np.array([len(sample_ppp(1.0, window, rng))
                           for _ in range(10_000)])
        assert abs(counts.mean() - 1.0) < 0.04
        # var of Poisson variance estimator: ~ (mu + 2 mu^2)/n
        assert abs(counts.var() - 1.0) < 3 * math.sqrt(3.0 / 10_000)

    def test_points_inside_window(self, rng):
        window = Window(center=(3.0, -2.0), radius=5.0)
        pts = sample_ppp(2.0, window, rng)
        d = np.linalg.norm(pts - window.center, axis=1)
        assert np.all(d <= window.radius + 1e-12)

    def test_homogeneity_halves(self, rng):
        # counts in the two half-discs are statistically indistinguishable
        window = Window(radius=5.0)
        left, right = [], []
        for _ in range(10_000):
            pts = sample_ppp(0.5, window, rng)
            left.append(int(np.sum(pts[:, 0] < 0)))
            right.append(int(np.sum(pts[:, 0] >= 0)))
        left, right = np.array(left), np.array(right)
        diff = left.mean() - right.mean()
        se = math.sqrt((left.var() + right.var()) / 10_000)
        assert abs(diff) < 3 * se


class TestRepresentativeCell:
    def test_single_candidate(self):
        bs = np.array([[5.0, 0.0]])
        assert np.allclose(representative_cell(bs, np.zeros(2)), [5.0, 0.0])

    def test_two_candidates(self):
        bs = np.array([[3.0, 0.0], [0.0, 4.0]])
        assert np.allclose(representative_cell(bs, np.zeros(2)), [3.0, 0.0])

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            representative_cell(np.empty((0, 2)), np.zeros(2))

    def test_brute_force_oracle(self, rng):
        bs = rng.uniform(-10, 10, size=(50, 2))
        origin = rng.uniform(-10, 10, size=2)
        expected = min(range(50),
                       key=lambda i: np.linalg.norm(bs[i] - origin))
        assert np.allclose(representative_cell(bs, origin), bs[expected])


class TestPairUsers:
    def test_simple_pair(self):
        ues = np.array([[0.0, 0.0], [5.0, 0.0]])
        pairs = pair_users(ues, distance_threshold=10.0, count=1)
        assert len(pairs) == 1
        assert pairs[0].separation == pytest.approx(5.0)
        assert pairs[0].pair_id == 1

    def test_threshold_violation(self):
        ues = np.array([[0.0, 0.0], [15.0, 0.0]])
        with pytest.raises(PairingShortfallError):
            pair_users(ues, distance_threshold=10.0, count=1)

    def test_no_reuse_and_threshold(self, rng):
        ues = rng.uniform(-20, 20, size=(200, 2))
        pairs = pair_users(ues, distance_threshold=3.0, count=20)
        used = []
        for p in pairs:
            assert p.separation <= 3.0
            assert p.separation == pytest.approx(
                float(np.linalg.norm(p.tx - p.rx)))
            used.append(tuple(p.tx))
            used.append(tuple(p.rx))
        assert len(used) == len(set(used))
        assert [p.pair_id for p in pairs] == list(range(1, 21))


class TestPlaceFixedPair:
    def test_exact_separation(self, rng):
        real = place_fixed_pair(1.0, 0.1, Window(radius=10.0), rng)
        pair = real.pairs[0]
        assert float(np.linalg.norm(pair.tx - pair.rx)) == pytest.approx(
            1.0, abs=1e-15)
        assert np.allclose(pair.rx, 0.0)

    def test_no_interferers_at_zero_density(self, rng):
        real = place_fixed_pair(1.0, 0.0, Window(radius=10.0), rng)
        assert len(real.ue_points) == 0

    def test_guard_zone_excludes_disc(self, rng):
        window = Window(radius=10.0)
        for _ in range(1000):
            real = place_fixed_pair(2.0, 0.05, window, rng,
                                    interferer_mode="guard_zone")
            if len(real.ue_points):
                d = np.linalg.norm(real.ue_points, axis=1)
                assert np.all(d > 2.0 - 1e-12)

    def test_radius_domain(self, rng):
        with pytest.raises(ValueError):
            place_fixed_pair(10.0, 0.1, Window(radius=10.0), rng)


def test_default_window_radius():
    assert default_window_radius(1.0, 0.0) == 10.0
    assert default_window_radius(1.0, 0.01) == pytest.approx(50.0)
    assert default_window_radius(3.0, 1.0) == 30.0


def test_window_validation():
    with pytest.raises(ValueError):
        Window(radius=0.0)
