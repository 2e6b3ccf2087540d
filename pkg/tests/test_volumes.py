# SPDX-License-Identifier: BUSL-1.1
"""Tests for simplex sections and microcanonical volumes."""

import math
import sys
import unittest
from pathlib import Path

import numpy as np
from scipy.integrate import quad

# Ensure the geoqt package is importable
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from geoqt.errors import DegeneracyError, DomainError
from geoqt.sampling import SamplerConfig, mc_shell_volume, sample_uniform
from geoqt.statespace import HamiltonianSystem
from geoqt.volumes import (
    EnergyShell,
    MeasureConvention,
    SimplexSection,
    cumulative_volume,
    density_of_states,
    energy_grid,
    manifold_volume,
    microcanonical_gibbs_ensemble,
    microcanonical_weight,
    simplex_section_area,
    simplex_section_volume,
    statistical_entropy,
    volume_table,
)

RAW = MeasureConvention.RAW
NORM = MeasureConvention.NORMALIZED


def _random_spectrum(rng, dimension, min_gap=0.05):
    while True:
        e = np.sort(rng.uniform(-2.0, 3.0, dimension))
        if np.diff(e).min() > min_gap:
            return e


class TestManifoldVolume(unittest.TestCase):
    def test_raw_values(self):
        self.assertAlmostEqual(manifold_volume(2), math.pi, places=14)
        self.assertAlmostEqual(manifold_volume(3), math.pi ** 2 / 2, places=13)
        self.assertAlmostEqual(manifold_volume(5, "raw"), math.pi ** 4 / 24, places=12)

    def test_normalized_is_one(self):
        for d in range(1, 8):
            self.assertEqual(manifold_volume(d, NORM), 1.0)

    def test_invalid_dimension(self):
        with self.assertRaises(DomainError):
            manifold_volume(0)

    def test_unknown_convention(self):
        with self.assertRaises(DomainError):
            MeasureConvention.parse("fubini")


class TestSimplexSection(unittest.TestCase):
    def test_interval(self):
        s = SimplexSection((1.0,), 0.3)
        self.assertAlmostEqual(simplex_section_volume(s), 0.3, places=15)
        self.assertAlmostEqual(simplex_section_area(s), 1.0, places=15)

    def test_triangle(self):
        # 0.5 x1 + x2 <= 0.25 cuts the triangle (0,0), (0.5,0), (0,0.25)
        s = SimplexSection((0.5, 1.0), 0.25)
        self.assertAlmostEqual(simplex_section_volume(s), 0.0625, places=15)

    def test_outside_threshold(self):
        a = (0.2, 0.7, 1.0)
        self.assertEqual(simplex_section_volume(SimplexSection(a, -0.1)), 0.0)
        self.assertAlmostEqual(simplex_section_volume(SimplexSection(a, 1.5)), 1.0 / 6.0, places=15)
        self.assertEqual(simplex_section_area(SimplexSection(a, -0.1)), 0.0)
        self.assertEqual(simplex_section_area(SimplexSection(a, 1.5)), 0.0)

    def test_rejects_bad_normal(self):
        with self.assertRaises(DomainError):
            SimplexSection((1.5,), 0.3)
        with self.assertRaises(DomainError):
            SimplexSection((), 0.3)

    def test_coincident_nodes(self):
        with self.assertRaises(DegeneracyError):
            simplex_section_volume(SimplexSection((0.5, 0.5), 0.3))

    def test_matches_dirichlet_hit_fraction(self):
        rng = np.random.default_rng(20240501)
        n_points = 20_000
        for n in (2, 3, 4):
            for _ in range(20):
                a = np.sort(rng.uniform(0.05, 1.0, n))
                if np.diff(np.concatenate([[0.0], a])).min() < 1e-3:
                    continue
                t = rng.uniform(0.0, a.max())
                x = rng.dirichlet(np.ones(n + 1), n_points)[:, 1:]
                p = float(np.mean(x @ a <= t))
                err = math.sqrt(max(p * (1 - p), 1.0 / n_points) / n_points)
                exact = math.factorial(n) * simplex_section_volume(SimplexSection(tuple(a), t))
                self.assertLess(abs(p - exact), 4 * err, msg=f"n={n} a={a} t={t}")

    def test_area_is_volume_derivative(self):
        rng = np.random.default_rng(11)
        h = 1e-6
        for _ in range(10):
            while True:
                a = np.sort(rng.uniform(0.0, 1.0, 3))
                if np.diff(np.concatenate([[0.0], a])).min() > 0.1:
                    break
            for t in np.linspace(0.05, a.max() - 0.05, 7):
                fd = (simplex_section_volume(SimplexSection(tuple(a), t + h))
                      - simplex_section_volume(SimplexSection(tuple(a), t - h))) / (2 * h)
                area = simplex_section_area(SimplexSection(tuple(a), t))
                self.assertLess(abs(fd - area), 1e-6)


class TestCumulativeVolume(unittest.TestCase):
    def test_qubit_is_linear(self):
        sys_ = HamiltonianSystem.from_energies([0.3, 1.7])
        for e in np.linspace(0.3, 1.7, 9):
            expected = (e - 0.3) / 1.4
            self.assertAlmostEqual(cumulative_volume(sys_, e, NORM), expected, places=13)
            self.assertAlmostEqual(cumulative_volume(sys_, e, RAW), math.pi * expected, places=12)

    def test_qutrit_worked_example(self):
        sys_ = HamiltonianSystem.from_energies([0.0, 0.5, 1.0])
        self.assertAlmostEqual(cumulative_volume(sys_, 0.25, NORM), 0.125, places=14)
        self.assertAlmostEqual(cumulative_volume(sys_, 0.25, RAW), 0.125 * math.pi ** 2 / 2, places=13)

    def test_endpoints(self):
        rng = np.random.default_rng(3)
        for d in (2, 3, 4, 6):
            sys_ = HamiltonianSystem.from_energies(_random_spectrum(rng, d))
            self.assertEqual(cumulative_volume(sys_, sys_.ground_energy), 0.0)
            self.assertAlmostEqual(cumulative_volume(sys_, sys_.max_energy), manifold_volume(d), places=12)
            self.assertEqual(cumulative_volume(sys_, sys_.ground_energy - 1.0, NORM), 0.0)
            self.assertEqual(cumulative_volume(sys_, sys_.max_energy + 1.0, NORM), 1.0)

    def test_monotone_on_fine_grid(self):
        rng = np.random.default_rng(4)
        for d in (3, 4, 5):
            sys_ = HamiltonianSystem.from_energies(_random_spectrum(rng, d))
            values = [cumulative_volume(sys_, e, NORM) for e in np.linspace(sys_.ground_energy, sys_.max_energy, 1000)]
            self.assertTrue(np.all(np.diff(values) >= -1e-12))

    def test_conventions_differ_by_total_volume(self):
        rng = np.random.default_rng(5)
        for d in (2, 3, 5):
            sys_ = HamiltonianSystem.from_energies(_random_spectrum(rng, d))
            for e in np.linspace(sys_.ground_energy, sys_.max_energy, 7):
                raw = cumulative_volume(sys_, e, RAW)
                norm = cumulative_volume(sys_, e, NORM)
                self.assertAlmostEqual(raw, manifold_volume(d) * norm, delta=1e-12 * manifold_volume(d))

    def test_agrees_with_rescaled_section(self):
        sys_ = HamiltonianSystem.from_energies([-1.0, 0.2, 0.9, 2.0])
        a = tuple((sys_.energies[1:] - sys_.ground_energy) / sys_.spread)
        for e in (-0.5, 0.4, 1.3):
            t = (e - sys_.ground_energy) / sys_.spread
            section = simplex_section_volume(SimplexSection(a, t))
            self.assertAlmostEqual(cumulative_volume(sys_, e, NORM), math.factorial(3) * section, places=12)

    def test_matches_uniform_sampler(self):
        sys_ = HamiltonianSystem.from_energies([-0.7, 0.1, 0.6, 1.9])
        batch = sample_uniform(4, SamplerConfig(seed=99, n_samples=200_000))
        h = batch.energies(sys_)
        for e in np.linspace(-0.4, 1.6, 5):
            p = float(np.mean(h <= e))
            err = math.sqrt(p * (1 - p) / h.size)
            self.assertLess(abs(p - cumulative_volume(sys_, e, NORM)), 4 * err)

    def test_degenerate_raises(self):
        sys_ = HamiltonianSystem.from_energies([0.0, 0.0, 1.0])
        with self.assertRaises(DegeneracyError):
            cumulative_volume(sys_, 0.5)

    def test_degenerate_fallback(self):
        # h = p_2, whose marginal is Beta(1, 2): P(p_2 <= E) = 1 - (1 - E)^2
        sys_ = HamiltonianSystem.from_energies([0.0, 0.0, 1.0])
        with self.assertLogs("geoqt.volumes", level="WARNING"):
            value = cumulative_volume(sys_, 0.3, NORM, fallback=SamplerConfig(seed=1, n_samples=100_000))
        expected = 1.0 - 0.7 ** 2
        err = math.sqrt(expected * (1 - expected) / 100_000)
        self.assertLess(abs(value - expected), 4 * err)


class TestDensityOfStates(unittest.TestCase):
    def test_qubit_constant(self):
        sys_ = HamiltonianSystem.from_energies([0.0, 1.0])
        for e in (0.0, 0.2, 0.5, 0.99):
            self.assertAlmostEqual(density_of_states(sys_, e, RAW), math.pi, places=13)
        sys_ = HamiltonianSystem.from_energies([1.0, 3.0])
        self.assertAlmostEqual(density_of_states(sys_, 2.0, NORM), 0.5, places=14)

    def test_qutrit_piecewise_linear(self):
        e0, e1, e2 = 0.0, 0.4, 1.0
        sys_ = HamiltonianSystem.from_energies([e0, e1, e2])
        for e in (0.1, 0.2, 0.35):
            expected = 2 * (e - e0) / ((e2 - e0) * (e1 - e0))
            self.assertAlmostEqual(density_of_states(sys_, e, NORM), expected, places=12)
        for e in (0.5, 0.8, 0.95):
            expected = 2 * (e2 - e) / ((e2 - e0) * (e2 - e1))
            self.assertAlmostEqual(density_of_states(sys_, e, NORM), expected, places=12)
        below = density_of_states(sys_, e1 - 1e-9, NORM)
        above = density_of_states(sys_, e1 + 1e-9, NORM)
        self.assertAlmostEqual(below, above, places=6)

    def test_outside_range_is_zero(self):
        sys_ = HamiltonianSystem.from_energies([0.0, 1.0, 2.5])
        self.assertEqual(density_of_states(sys_, -0.1), 0.0)
        self.assertEqual(density_of_states(sys_, 2.6), 0.0)

    def test_integrates_to_total_volume(self):
        rng = np.random.default_rng(8)
        for d in (2, 3, 4, 5):
            sys_ = HamiltonianSystem.from_energies(_random_spectrum(rng, d))
            total, _ = quad(
                lambda e: density_of_states(sys_, e, RAW),
                sys_.ground_energy,
                sys_.max_energy,
                points=list(sys_.energies[1:-1]),
                epsabs=1e-13,
                epsrel=1e-12,
                limit=200,
            )
            self.assertAlmostEqual(total / manifold_volume(d), 1.0, delta=1e-8)

    def test_is_derivative_of_volume(self):
        rng = np.random.default_rng(9)
        sys_ = HamiltonianSystem.from_energies(_random_spectrum(rng, 5, min_gap=0.5))
        h = 1e-5
        for e in np.linspace(sys_.ground_energy, sys_.max_energy, 23)[1:-1]:
            if np.min(np.abs(sys_.energies - e)) < 1e-3:
                continue
            fd = (cumulative_volume(sys_, e + h) - cumulative_volume(sys_, e - h)) / (2 * h)
            dos = density_of_states(sys_, e)
            self.assertLess(abs(fd - dos), 1e-6 * max(1.0, abs(dos)))


class TestShells(unittest.TestCase):
    def test_qubit_weight(self):
        sys_ = HamiltonianSystem.from_energies([0.0, 2.0])
        w = microcanonical_weight(sys_, EnergyShell(0.5, 0.1), NORM)
        self.assertAlmostEqual(w, 0.05, places=14)

    def test_full_range_shell(self):
        sys_ = HamiltonianSystem.from_energies([0.0, 0.5, 2.0])
        with self.assertLogs("geoqt.volumes", level="WARNING"):
            w = microcanonical_weight(sys_, EnergyShell(0.0, 2.0), RAW)
        self.assertAlmostEqual(w, manifold_volume(3), places=12)

    def test_clamping_warns(self):
        sys_ = HamiltonianSystem.from_energies([0.0, 1.0])
        with self.assertLogs("geoqt.volumes", level="WARNING") as cm:
            w = microcanonical_weight(sys_, EnergyShell(0.95, 0.1), NORM)
        self.assertTrue(any("clamped" in line for line in cm.output))
        self.assertAlmostEqual(w, 0.05, places=12)

    def test_invalid_shell(self):
        with self.assertRaises(DomainError):
            EnergyShell(0.0, 0.0)
        with self.assertRaises(DomainError):
            EnergyShell(float("nan"), 0.1)

    def test_entropy_values(self):
        sys_ = HamiltonianSystem.from_energies([0.0, 1.0])
        with self.assertLogs("geoqt.volumes", level="WARNING"):
            full = statistical_entropy(sys_, EnergyShell(0.0, 1.0), NORM)
            third = statistical_entropy(sys_, EnergyShell(0.0, 1.0 / math.e), NORM)
        self.assertAlmostEqual(full.value, 0.0, places=14)
        self.assertFalse(full.empty)
        self.assertAlmostEqual(third.value, -1.0, places=13)

    def test_empty_shell_sentinel(self):
        sys_ = HamiltonianSystem.from_energies([0.0, 1.0])
        with self.assertLogs("geoqt.volumes", level="WARNING"):
            s = statistical_entropy(sys_, EnergyShell(1.0, 0.05), NORM)
        self.assertTrue(s.empty)
        self.assertEqual(s.value, float("-inf"))
        self.assertEqual(s.weight, 0.0)

    def test_shell_matches_hit_count(self):
        sys_ = HamiltonianSystem.from_energies([0.0, 0.3, 1.0])
        shell = EnergyShell(0.4, 0.05)
        w = microcanonical_weight(sys_, shell, NORM)
        h = sample_uniform(3, SamplerConfig(seed=12, n_samples=200_000)).energies(sys_)
        p = float(np.mean((h >= 0.4) & (h <= 0.45)))
        self.assertLess(abs(p - w), 4 * math.sqrt(p * (1 - p) / h.size))

    def test_shell_volumes_match_monte_carlo(self):
        rng = np.random.default_rng(21)
        for d in (3, 4, 5):
            for trial in range(10):
                sys_ = HamiltonianSystem.from_energies(_random_spectrum(rng, d))
                width = 0.02 * sys_.spread
                cfg = SamplerConfig(seed=1000 * d + trial, n_samples=1_000_000, n_streams=4)
                for fraction in (0.1, 0.3, 0.5, 0.7, 0.9):
                    shell = EnergyShell(sys_.ground_energy + fraction * (sys_.spread - width), width)
                    exact = microcanonical_weight(sys_, shell, RAW)
                    est = mc_shell_volume(sys_, shell, cfg, RAW)
                    self.assertLess(abs(est.value - exact), 4 * est.std_error, msg=f"D={d} trial={trial} E={shell.center}")
                    # the shell weight is omega over the shell to first order in its width
                    mid = density_of_states(sys_, shell.center + 0.5 * width, RAW) * width
                    self.assertLess(abs(exact - mid), 0.1 * exact + 1e-12)

    def test_gibbs_microcanonical_ensemble(self):
        sys_ = HamiltonianSystem.from_energies([0.0, 0.4, 0.5, 2.0])
        ens = microcanonical_gibbs_ensemble(sys_, EnergyShell(0.35, 0.2))
        self.assertEqual(len(ens), 2)
        np.testing.assert_allclose(ens.weights, [0.5, 0.5])
        with self.assertRaises(DomainError):
            microcanonical_gibbs_ensemble(sys_, EnergyShell(0.6, 0.1))


class TestVolumeTable(unittest.TestCase):
    def test_rows(self):
        sys_ = HamiltonianSystem.from_energies([0.0, 0.5, 1.0])
        energies = energy_grid(sys_, 11)
        with self.assertLogs("geoqt.volumes", level="WARNING") as cm:
            rows = volume_table(sys_, energies, 0.05, NORM)
        # only the top shell runs past E_{D-1}
        self.assertEqual(len(cm.output), 1)
        self.assertIn("1 energy shell(s) clamped", cm.output[0])
        self.assertEqual(len(rows), 11)
        self.assertEqual(rows[0].volume, 0.0)
        self.assertAlmostEqual(rows[-1].volume, 1.0, places=12)
        self.assertEqual(rows[-1].weight, 0.0)
        self.assertEqual(rows[-1].entropy, float("-inf"))
        for row in rows[:-1]:
            self.assertAlmostEqual(row.entropy, math.log(row.weight), places=12)

    def test_clamped_rows_match_clamped_shells(self):
        sys_ = HamiltonianSystem.from_energies([0.0, 0.3, 1.0])
        with self.assertLogs("geoqt.volumes", level="WARNING"):
            rows = volume_table(sys_, [0.9, 0.98], 0.05, NORM)
            expected = [microcanonical_weight(sys_, EnergyShell(e, 0.05), NORM) for e in (0.9, 0.98)]
        self.assertAlmostEqual(rows[0].weight, expected[0], places=14)
        self.assertAlmostEqual(rows[1].weight, expected[1], places=14)
        self.assertAlmostEqual(rows[1].weight, 1.0 - cumulative_volume(sys_, 0.98, NORM), places=12)

    def test_wide_shell_warns_once(self):
        sys_ = HamiltonianSystem.from_energies([0.0, 1.0])
        with self.assertLogs("geoqt.volumes", level="WARNING") as cm:
            volume_table(sys_, energy_grid(sys_, 5), 0.5)
        self.assertEqual(sum("exceeds" in line for line in cm.output), 1)
        self.assertEqual(sum("2 energy shell(s) clamped" in line for line in cm.output), 1)
        self.assertEqual(len(cm.output), 2)

    def test_grid_needs_two_points(self):
        with self.assertRaises(DomainError):
            energy_grid(HamiltonianSystem.from_energies([0.0, 1.0]), 1)


if __name__ == "__main__":
    unittest.main()
