# SPDX-License-Identifier: BUSL-1.1
"""Tests for trajectories, driven protocols, work and the fluctuation checks."""

import math
import sys
import unittest
from pathlib import Path

import numpy as np
from scipy.integrate import dblquad

# Ensure the geoqt package is importable
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from geoqt.dynamics import (
    HamiltonianFamily,
    Protocol,
    Schedule,
    ScheduleSegment,
    evolve,
    evolve_driven,
    evolve_driven_batch,
    first_law_check,
    jarzynski_experiment,
    trajectory_work,
)
from geoqt.errors import DomainError
from geoqt.sampling import SamplerConfig, sample_uniform
from geoqt.statespace import HamiltonianSystem, HermitianObservable, ProjectiveState, expectation

SX = HermitianObservable.pauli_sum(x=1.0)
SZ = HermitianObservable.pauli_sum(z=1.0)


def _generic_state():
    return ProjectiveState(np.array([1.0, 0.5 + 0.3j]) / math.sqrt(1.34))


def _ramp(n_steps=100, duration=1.0, lambda_i=0.0, lambda_f=1.0):
    return Protocol.single(SZ, SX, "linear", lambda_i, lambda_f, duration, n_steps)


class TestSchedules(unittest.TestCase):
    def test_parse(self):
        self.assertIs(Schedule.parse("Linear"), Schedule.LINEAR)
        self.assertIs(Schedule.parse(Schedule.SUDDEN), Schedule.SUDDEN)
        with self.assertRaises(DomainError):
            Schedule.parse("cubic")

    def test_constant_needs_equal_endpoints(self):
        with self.assertRaises(DomainError):
            ScheduleSegment(Schedule.CONSTANT, 0.0, 1.0, 1.0, 10)

    def test_rejects_bad_segments(self):
        with self.assertRaises(DomainError):
            ScheduleSegment(Schedule.LINEAR, 0.0, 1.0, -1.0, 10)
        with self.assertRaises(DomainError):
            ScheduleSegment(Schedule.LINEAR, 0.0, 1.0, 1.0, 0)

    def test_family_dimension_mismatch(self):
        with self.assertRaises(DomainError):
            HamiltonianFamily(SZ, HermitianObservable(np.eye(3)))

    def test_linear_grid(self):
        p = _ramp(n_steps=4, duration=2.0)
        np.testing.assert_allclose(p.times, [0.0, 0.5, 1.0, 1.5, 2.0])
        np.testing.assert_allclose(p.lambdas, [0.0, 0.25, 0.5, 0.75, 1.0])
        np.testing.assert_allclose(p.mid_lambdas, [0.125, 0.375, 0.625, 0.875])
        self.assertEqual(p.n_steps, 4)

    def test_sudden_quench_is_zero_length_step(self):
        p = Protocol.single(SZ, SX, "sudden", 0.0, 1.0, 0.0, 1)
        np.testing.assert_array_equal(p.times, [0.0, 0.0])
        np.testing.assert_array_equal(p.lambdas, [0.0, 1.0])
        q = Protocol.single(SZ, SX, "sudden", 0.0, 1.0, 1.0, 5)
        self.assertEqual(q.times.size, 7)
        self.assertEqual(q.times[1], 0.0)
        self.assertEqual(q.lambdas[1], 1.0)

    def test_with_step_rounds_up(self):
        p = _ramp(n_steps=1, duration=1.0).with_step(0.3)
        self.assertEqual(p.n_steps, 4)
        with self.assertRaises(DomainError):
            _ramp().with_step(0.0)

    def test_segments_must_join(self):
        family = HamiltonianFamily(SZ, SX)
        a = ScheduleSegment(Schedule.LINEAR, 0.0, 0.5, 1.0, 10)
        b = ScheduleSegment(Schedule.LINEAR, 0.6, 1.0, 1.0, 10)
        with self.assertRaises(DomainError):
            Protocol(family, (a, b))

    def test_concatenate_needs_same_family(self):
        other = Protocol.single(SX, SZ, "linear", 1.0, 2.0, 1.0, 10)
        with self.assertRaises(DomainError):
            _ramp().concatenate(other)


class TestEvolve(unittest.TestCase):
    def test_rabi_oscillation(self):
        record = evolve(SX, ProjectiveState(np.array([1.0, 0.0])), 3.0, 0.01)
        p0 = np.abs(record.states[:, 0]) ** 2
        np.testing.assert_allclose(p0, np.cos(record.times) ** 2, atol=1e-10)

    def test_eigenstate_is_stationary(self):
        h = HermitianObservable.pauli_sum(x=0.3, y=-0.7, z=0.5)
        ground = HamiltonianSystem.from_observable(h).eigenvectors[0]
        record = evolve(h, ground, 5.0, 0.05)
        for k in (10, 50, len(record.times) - 1):
            self.assertTrue(record.state(k).same_ray(ground, 1e-10))

    def test_unitarity_and_energy_conservation(self):
        rng = np.random.default_rng(40)
        a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        h = HermitianObservable(0.5 * (a + a.conj().T))
        z0 = sample_uniform(4, SamplerConfig(seed=41, n_samples=1))[0]
        record = evolve(h, z0, 100.0, 0.01)
        self.assertEqual(record.states.shape[0], 10_001)
        np.testing.assert_allclose(np.linalg.norm(record.states, axis=1), 1.0, atol=1e-10)
        energies = record.expectations(h)
        self.assertLess(np.abs(energies - energies[0]).max(), 1e-10)
        self.assertEqual(record.work, 0.0)

    def test_step_count_rounds_up(self):
        record = evolve(SZ, _generic_state(), 1.0, 0.3)
        self.assertEqual(record.times.size, 5)
        self.assertAlmostEqual(record.times[-1], 1.0, places=14)

    def test_rejects_bad_steps(self):
        with self.assertRaises(DomainError):
            evolve(SZ, _generic_state(), 1.0, 0.0)
        with self.assertRaises(DomainError):
            evolve(SZ, _generic_state(), 1.0, 2.0)

    def test_dimension_mismatch(self):
        with self.assertRaises(DomainError):
            evolve(SZ, ProjectiveState(np.array([1.0, 0.0, 0.0])), 1.0, 0.1)


class TestDrivenWork(unittest.TestCase):
    def test_constant_protocol_does_no_work(self):
        p = Protocol.single(SZ, SX, "constant", 0.5, 0.5, 2.0, 50)
        self.assertEqual(evolve_driven(p, _generic_state()).work, 0.0)

    def test_sudden_work_is_instantaneous_jump(self):
        z0 = _generic_state()
        expected = 1.5 * expectation(SX, z0)
        for duration in (0.0, 2.0):
            p = Protocol.single(SZ, SX, "sudden", 0.0, 1.5, duration, 20)
            self.assertAlmostEqual(evolve_driven(p, z0).work, expected, places=13)

    def test_work_is_energy_change(self):
        p = _ramp(n_steps=2000, duration=2.0)
        z0 = _generic_state()
        record = evolve_driven(p, z0)
        h_i = expectation(p.hamiltonian(0.0), z0)
        h_f = expectation(p.hamiltonian(1.0), record.final_state)
        self.assertAlmostEqual(record.work, h_f - h_i, delta=1e-5)
        self.assertAlmostEqual(trajectory_work(record, p), record.work, places=13)

    def test_trajectory_work_checks_grid(self):
        record = evolve_driven(_ramp(n_steps=10), _generic_state())
        with self.assertRaises(DomainError):
            trajectory_work(record, _ramp(n_steps=20))

    def test_second_order_convergence(self):
        z0 = _generic_state()
        reference = evolve_driven(_ramp(n_steps=6400, duration=2.0), z0).work
        errors = [abs(evolve_driven(_ramp(n_steps=n, duration=2.0), z0).work - reference) for n in (25, 50, 100)]
        for coarse, fine in zip(errors, errors[1:]):
            self.assertGreater(coarse / fine, 3.0)
            self.assertLess(coarse / fine, 5.2)

    def test_concatenation_adds_work(self):
        z0 = _generic_state()
        first = _ramp(n_steps=100, duration=1.0, lambda_i=0.0, lambda_f=0.5)
        second = _ramp(n_steps=100, duration=1.0, lambda_i=0.5, lambda_f=1.0)
        whole = evolve_driven(first.concatenate(second), z0)
        a = evolve_driven(first, z0)
        b = evolve_driven(second, a.final_state)
        self.assertAlmostEqual(whole.work, a.work + b.work, places=12)
        self.assertTrue(whole.final_state.same_ray(b.final_state, 1e-10))

    def test_batch_matches_single(self):
        p = _ramp(n_steps=80, duration=1.5)
        batch = sample_uniform(2, SamplerConfig(seed=42, n_samples=5))
        result = evolve_driven_batch(p, batch)
        for k, z0 in enumerate(batch):
            record = evolve_driven(p, z0)
            self.assertAlmostEqual(result.work[k], record.work, places=12)
            np.testing.assert_allclose(result.final_states[k], record.states[-1], atol=1e-12)

    def test_batch_rejects_wrong_shape(self):
        with self.assertRaises(DomainError):
            evolve_driven_batch(_ramp(), np.ones((3, 3)))

    def test_slow_ramp_is_adiabatic(self):
        p = _ramp(n_steps=4000, duration=200.0)
        ground_i = HamiltonianSystem.from_observable(p.hamiltonian(0.0)).eigenvectors[0]
        ground_f = HamiltonianSystem.from_observable(p.hamiltonian(1.0))
        record = evolve_driven(p, ground_i)
        self.assertGreater(record.final_state.fidelity(ground_f.eigenvectors[0]), 0.999)
        self.assertAlmostEqual(record.work, -math.sqrt(2.0) + 1.0, delta=1e-3)


class TestJarzynski(unittest.TestCase):
    def test_constant_protocol_is_exact(self):
        p = Protocol.single(SZ, SX, "constant", 0.3, 0.3, 1.0, 20)
        report = jarzynski_experiment(p, 1.0, SamplerConfig(seed=43, n_samples=500))
        self.assertEqual(report.mean_exp_neg_beta_W, 1.0)
        self.assertEqual(report.std_error, 0.0)
        self.assertAlmostEqual(report.delta_F_closed_form, 0.0, places=14)
        self.assertAlmostEqual(report.discrepancy_sigma, 0.0, places=10)
        self.assertTrue(report.second_law_ok)

    def test_linear_ramp(self):
        report = jarzynski_experiment(_ramp(n_steps=100, duration=1.0), 1.0, SamplerConfig(seed=44, n_samples=20_000))
        self.assertLess(report.discrepancy_sigma, 3.0)
        self.assertTrue(report.second_law_ok)
        self.assertEqual(report.n, 20_000)
        self.assertEqual(report.works.size, 20_000)
        self.assertNotIn("works", report.as_dict())

    def test_sudden_quench(self):
        p = Protocol.single(SZ, SX, "sudden", 0.0, 1.0, 0.0, 1)
        report = jarzynski_experiment(p, 2.0, SamplerConfig(seed=45, n_samples=20_000))
        self.assertLess(report.discrepancy_sigma, 3.0)
        self.assertGreaterEqual(report.mean_W, report.delta_F_closed_form - 3 * report.mean_W_std_error)

    def test_linear_ramp_at_two_temperatures(self):
        for beta, seed in ((0.5, 47), (2.0, 48)):
            report = jarzynski_experiment(_ramp(n_steps=100, duration=1.0), beta, SamplerConfig(seed=seed, n_samples=10_000))
            self.assertEqual(report.n, 10_000)
            self.assertLess(report.discrepancy_sigma, 3.0, msg=f"beta={beta}")
            self.assertGreaterEqual(report.mean_W, report.delta_F_closed_form - 3 * report.mean_W_std_error,
                                    msg=f"beta={beta}")

    def test_sudden_quench_matches_quadrature(self):
        beta, lambda_i, lambda_f = 2.0, 0.5, 1.5
        p = Protocol.single(SZ, SX, "sudden", lambda_i, lambda_f, 0.0, 1)
        report = jarzynski_experiment(p, beta, SamplerConfig(seed=49, n_samples=20_000))
        h_i = p.hamiltonian(lambda_i).matrix
        v = SX.matrix

        def point(chi, q):
            return np.array([math.sqrt(1.0 - q), math.sqrt(q) * np.exp(1j * chi)])

        def energy(z, m):
            return float(np.real(np.vdot(z, m @ z)))

        def integral(f):
            # dV_FS = dq dchi / 2 in any orthonormal chart
            value, _ = dblquad(lambda chi, q: 0.5 * math.exp(-beta * energy(point(chi, q), h_i)) * f(point(chi, q)),
                               0.0, 1.0, -math.pi, math.pi, epsabs=0.0, epsrel=1e-9)
            return value

        q_i = integral(lambda z: 1.0)
        mean_w = integral(lambda z: (lambda_f - lambda_i) * energy(z, v)) / q_i
        mean_x = integral(lambda z: math.exp(-beta * (lambda_f - lambda_i) * energy(z, v))) / q_i
        self.assertAlmostEqual(mean_x, report.exp_neg_beta_delta_F, delta=1e-6)
        self.assertLess(abs(report.mean_W - mean_w), 3 * report.mean_W_std_error)
        self.assertLess(abs(report.mean_exp_neg_beta_W - mean_x), 3 * report.std_error)

    def test_rejects_nonpositive_beta(self):
        with self.assertRaises(DomainError):
            jarzynski_experiment(_ramp(), 0.0, SamplerConfig(n_samples=10))


class TestFirstLaw(unittest.TestCase):
    def setUp(self):
        self.family = HamiltonianFamily(SZ, HermitianObservable.pauli_sum(x=1.0, z=0.3))

    def test_residuals_shrink_cubically(self):
        coarse = first_law_check(self.family, 0.7, 0.4, 1e-2)
        fine = first_law_check(self.family, 0.7, 0.4, 5e-3)
        self.assertAlmostEqual(coarse.dlambda, 2e-2, places=15)
        self.assertLess(coarse.residual_first_law, 1e-12)
        self.assertGreater(coarse.residual_free_energy / fine.residual_free_energy, 3.5)
        self.assertGreater(coarse.residual_entropy / fine.residual_entropy, 3.5)
        self.assertLess(fine.residual_free_energy, 1e-5)

    def test_transverse_field_family(self):
        family = HamiltonianFamily(SZ, SX)
        for beta in (1.0, 5.0):
            coarse = first_law_check(family, beta, 0.5, 1e-2)
            fine = first_law_check(family, beta, 0.5, 5e-3)
            self.assertLess(coarse.residual_first_law, 1e-12)
            self.assertGreater(coarse.residual_free_energy / fine.residual_free_energy, 3.5, msg=f"beta={beta}")
            self.assertGreater(coarse.residual_entropy / fine.residual_entropy, 3.5, msg=f"beta={beta}")
            self.assertAlmostEqual(fine.residual_entropy, beta * fine.residual_free_energy, delta=1e-10)

    def test_identity_drive_is_pure_work(self):
        family = HamiltonianFamily(SZ, HermitianObservable(np.eye(2)))
        report = first_law_check(family, 1.3, 0.2, 1e-2)
        self.assertAlmostEqual(report.dW, 2e-2, places=14)
        self.assertAlmostEqual(report.dU, report.dW, places=12)
        self.assertAlmostEqual(report.dQ, 0.0, places=12)
        self.assertAlmostEqual(report.dF, report.dW, places=12)
        self.assertAlmostEqual(report.dHq, 0.0, places=11)

    def test_default_step(self):
        report = first_law_check(self.family, 1.0, 0.0)
        self.assertAlmostEqual(report.dlambda, 2e-4, places=15)

    def test_monte_carlo_work_term(self):
        report = first_law_check(self.family, 1.0, 0.4, 1e-2, cfg=SamplerConfig(seed=46, n_samples=100_000))
        self.assertIsNotNone(report.dW_mc)
        self.assertLess(abs(report.dW_mc.value - report.dW), 4 * report.dW_mc.std_error)

    def test_rejects_bad_inputs(self):
        with self.assertRaises(DomainError):
            first_law_check(self.family, 0.0, 0.4)
        with self.assertRaises(DomainError):
            first_law_check(self.family, 1.0, 0.4, -1e-3)


if __name__ == "__main__":
    unittest.main()
