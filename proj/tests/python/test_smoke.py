"""Smoke tests for the spintomo python module."""

import math
import sys
import unittest

import numpy as np

import spintomo as st


def random_density(two_j, rng, rank=3):
    dim = two_j + 1
    rho = np.zeros((dim, dim), dtype=complex)
    for _ in range(rank):
        psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        psi /= np.linalg.norm(psi)
        rho += rng.uniform(0.2, 1.0) * np.outer(psi, psi.conj())
    return rho / np.trace(rho).real


class SmokeTest(unittest.TestCase):
    def test_clebsch_gordan_values(self):
        self.assertAlmostEqual(
            st.clebsch_gordan(1, 1, 1, -1, 0, 0), 1.0 / math.sqrt(2.0), places=13)
        self.assertAlmostEqual(
            st.clebsch_gordan(2, 2, 2, -2, 0, 0), 1.0 / math.sqrt(3.0), places=13)
        self.assertEqual(st.clebsch_gordan(2, 2, 2, 2, 2, 2), 0.0)
        with self.assertRaises(ValueError):
            st.clebsch_gordan(1, 0, 0, 0, 1, 0)  # parity mismatch

    def test_wigner_d_spin_half(self):
        beta = 0.731
        d = st.wigner_d(1, beta)
        expected = np.array([[math.cos(beta / 2), -math.sin(beta / 2)],
                             [math.sin(beta / 2), math.cos(beta / 2)]])
        self.assertLess(np.abs(d - expected).max(), 1e-14)

    def test_coherent_state_is_rotated_top_dicke(self):
        g = st.rotation_operator(5, 1.1, 2.2)
        coherent = st.make_coherent(5, 1.1, 2.2)
        self.assertLess(np.abs(g[:, 0] - coherent).max(), 1e-12)
        self.assertLess(np.abs(g.conj().T @ g - np.eye(6)).max(), 1e-13)

    def test_exact_reconstruction_round_trip(self):
        rng = np.random.default_rng(1)
        for two_j in (2, 3, 4):
            rho = random_density(two_j, rng)
            grid = st.build_grid(two_j)
            values = st.exact_probabilities(rho, grid, two_j)
            back = st.reconstruct_density(two_j, grid, values, two_j)
            self.assertLess(np.abs(back - rho).max(), 1e-10)
            self.assertGreater(st.fidelity(rho, back), 1.0 - 1e-9)

    def test_sampling_is_reproducible(self):
        rho = st.pure_density(st.make_coherent(2, 0.9, 0.3))
        grid = st.build_grid(2)
        a = st.sample_counts(rho, grid, 1000, 99)
        b = st.sample_counts(rho, grid, 1000, 99)
        self.assertTrue((a == b).all())
        self.assertEqual(a.sum(), 1000 * len(grid))
        c = st.sample_counts(rho, grid, 1000, 100)
        self.assertFalse((a == c).all())

    def test_husimi_of_top_dicke(self):
        two_j = 4
        rho = st.pure_density(st.make_dicke(two_j, two_j))
        grid = st.build_grid(two_j)
        q = st.qpd_from_density(rho, -1, grid)
        for point, value in zip(grid.points, q):
            self.assertAlmostEqual(value, math.cos(point.theta / 2) ** (2 * two_j), places=10)
            self.assertAlmostEqual(
                value, st.q_function(rho, point.theta, point.phi), places=10)

    def test_wigner_normalization(self):
        rng = np.random.default_rng(2)
        two_j = 3
        rho = random_density(two_j, rng)
        grid = st.build_grid(two_j)
        w = st.qpd_from_density(rho, 0, grid)
        total = (two_j + 1) / (4 * math.pi) * sum(
            wt * val for wt, val in zip(grid.weights, w))
        self.assertAlmostEqual(total, 1.0, places=10)

    def test_frontends_realize_displacements(self):
        ion = st.IonParams(kappa=1.0, eta1=0.25, eta2=0.25, Omega1=3.0, Omega2=4.0,
                           t_theta=4.0, T_free=1.3)
        n = st.ion_displacement(ion)
        v = st.ion_unitary(4, ion)
        g_dag = st.rotation_operator(4, n.theta, n.phi).conj().T
        overlap = np.trace(g_dag.conj().T @ v)
        phase = overlap / abs(overlap)
        self.assertLess(np.abs(v - phase * g_dag).max(), 1e-12)

        with self.assertRaises(st.ProtocolError):
            st.ramsey_displacement(st.RamseyParams(
                omega0=1.0, omega=2.0, omega2=-1.0, first_pulse_on=True))

        base = st.RamseyParams(omega0=1.0, omega=2.0, omega2=-1.0)
        knobs = st.ramsey_knobs_for(st.SpherePoint(1.2, 0.7), base)
        realized = st.ramsey_displacement(knobs)
        self.assertAlmostEqual(realized.theta, 1.2, places=12)
        self.assertAlmostEqual(realized.phi, 0.7, places=12)

    def test_two_mode_blocks(self):
        amps = [(2, 0, 0.5 + 0j), (1, 1, 0.5j), (0, 0, math.sqrt(0.5) + 0j)]
        blocks = st.decompose_two_mode(amps)
        self.assertEqual(set(blocks), {0, 2})
        self.assertAlmostEqual(blocks[2][1], 0.5, places=12)

        grid = st.build_grid(2)
        result = st.blockwise_reconstruct(amps, grid, 0, 0)
        for two_j in (0, 2):
            self.assertTrue(result[two_j]["reconstructed"])
            self.assertLess(result[two_j]["max_abs_diff"], 1e-9)

    def test_jc_roundtrip(self):
        times = [18.0 * (i + 1) / 300 for i in range(300)]
        params = st.JCReadoutParams(omega0=1.0, times=times, n_max=5, gamma0=0.02)
        populations = [0.3, 0.25, 0.2, 0.15, 0.07, 0.03]
        signal = st.jc_signal(populations, params)
        recovered = st.jc_invert(signal, params)["populations"]
        self.assertLess(max(abs(a - b) for a, b in zip(recovered, populations)), 1e-6)

    def test_phase_uncertainty_projection_noise(self):
        for two_j in (2, 6, 12):
            rho = st.pure_density(st.make_dicke(two_j, two_j))
            got = st.phase_uncertainty(rho, math.pi / 2, -math.pi / 2, math.pi / 2)
            self.assertAlmostEqual(got, 1.0 / math.sqrt(two_j), places=11)


if __name__ == "__main__":
    sys.exit(unittest.main(verbosity=2))
