import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from scattering.bogoliubov_core import (
    CondensateScale,
    DosForm,
    KernelForm,
    PrefactorConstants,
    bose_einstein,
    chi_weight,
    coherence_factors,
    dispersion,
    dos_shape,
    inverse_dispersion,
    kernel_S,
    kernel_T,
    momentum_window,
    particle_weight,
    zeta,
)

energies = st.floats(min_value=1e-8, max_value=1e3)
densities = st.floats(min_value=0.0, max_value=1.0)
positive_densities = st.floats(min_value=1e-6, max_value=0.1)


class DispersionTests(SimpleTestCase):

    def test_examples(self):
        self.assertEqual(dispersion(0.0, 0.04), 0.0)
        self.assertEqual(dispersion(1.0, 0.0), 1.0)
        self.assertAlmostEqual(dispersion(1.0, 1.0), np.sqrt(3.0), places=12)

    def test_inverse_examples(self):
        self.assertEqual(inverse_dispersion(0.0, 0.3), 0.0)
        self.assertAlmostEqual(inverse_dispersion(np.sqrt(3.0), 1.0), 1.0, places=12)
        self.assertAlmostEqual(inverse_dispersion(4.0, 0.0), 2.0, places=12)

    def test_accepts_condensate_scale(self):
        self.assertAlmostEqual(dispersion(1.0, CondensateScale(1.0)), np.sqrt(3.0), places=12)

    def test_vectorized(self):
        p = np.array([0.0, 0.5, 1.0])
        assert_allclose(dispersion(p, 0.0), p**2)

    @settings(max_examples=200, deadline=None)
    @given(energies, densities)
    def test_round_trip(self, e, nbar):
        self.assertLessEqual(abs(dispersion(inverse_dispersion(e, nbar), nbar) - e), 1e-12 * e)

    @given(st.floats(min_value=0.0, max_value=10.0), st.floats(min_value=1e-6, max_value=5.0), densities)
    def test_strictly_increasing(self, p, dp, nbar):
        self.assertGreater(dispersion(p + dp, nbar), dispersion(p, nbar))

    def test_phonon_slope(self):
        nbar = 0.04
        p = 1e-6 * np.sqrt(nbar)
        self.assertAlmostEqual(dispersion(p, nbar) / p / np.sqrt(2.0 * nbar), 1.0, delta=1e-6)


class CoherenceFactorTests(SimpleTestCase):

    def test_free_particle_limit(self):
        u, v = coherence_factors(1e6 * 0.04, 0.04)
        self.assertAlmostEqual(u, 1.0, delta=1e-6)
        self.assertAlmostEqual(v, 0.0, delta=1e-6)

    def test_zero_energy(self):
        u, v = coherence_factors(0.0, 0.04)
        self.assertAlmostEqual(u**2, 0.5, places=15)
        self.assertAlmostEqual(v**2, 0.5, places=15)

    def test_at_nbar(self):
        u, _ = coherence_factors(0.04, 0.04)
        self.assertAlmostEqual(u**2, 0.5 + 1.0 / (2.0 * np.sqrt(2.0)), places=12)

    @given(energies, densities)
    def test_normalization(self, e, nbar):
        u, v = coherence_factors(e, nbar)
        self.assertAlmostEqual(u**2 + v**2, 1.0, delta=1e-12)
        self.assertAlmostEqual(u**2 - v**2, e / np.sqrt(e**2 + nbar**2), delta=1e-12)
        self.assertTrue(1.0 / np.sqrt(2.0) - 1e-15 <= u <= 1.0)
        self.assertTrue(0.0 <= v <= 1.0 / np.sqrt(2.0) + 1e-15)


class ParticleWeightTests(SimpleTestCase):

    def test_no_condensate(self):
        self.assertEqual(particle_weight(0.3, 0.0), 1.0)

    def test_phonon_limit(self):
        self.assertAlmostEqual(particle_weight(1e-8, 1.0), 0.5, delta=1e-6)
        self.assertEqual(particle_weight(0.0, 1.0), 0.5)

    def test_at_e0(self):
        self.assertAlmostEqual(particle_weight(2.0, 2.0), 0.5 + 1.0 / (2.0 * np.sqrt(2.0)), places=12)

    def test_increasing(self):
        mu = particle_weight(np.geomspace(1e-3, 1e3, 50), 1.0)
        self.assertTrue(np.all(np.diff(mu) > 0))


class KernelTests(SimpleTestCase):

    def test_t_free_limit(self):
        self.assertEqual(kernel_T(0.3, 1.0, 0.7, 0.6, 0.0), 1.0)
        self.assertAlmostEqual(kernel_T(0.3, 1.0, 0.7, 0.6, 1e-8), 1.0, delta=1e-6)

    def test_t_phonon_partner_limit(self):
        nbar = 0.04
        self.assertAlmostEqual(kernel_T(1e-6 * nbar, 1e6 * nbar, 1e6 * nbar, 1e6 * nbar, nbar), 2.0, delta=1e-3)

    def test_t_all_phonons(self):
        e = 1e-6 * 0.04
        self.assertAlmostEqual(kernel_T(e, e, e, e, 0.04), 25.0 / 16.0, delta=1e-3)

    def test_t_supremum(self):
        nbar = 0.04
        self.assertAlmostEqual(kernel_T(1e-6 * nbar, 1e6 * nbar, 1e6 * nbar, 1e-6 * nbar, nbar), 2.25, delta=1e-3)

    @given(energies, energies, energies, energies, positive_densities)
    def test_t_bounded_by_supremum(self, e1, e2, e3, e4, nbar):
        for form in (KernelForm.AS_PRINTED, KernelForm.SYMMETRIZED):
            self.assertLessEqual(kernel_T(e1, e2, e3, e4, nbar, form), 2.25 + 1e-12)

    def test_s_free_limit(self):
        self.assertEqual(kernel_S(0.5, 0.2, 0.7, 0.0), 1.0)
        self.assertAlmostEqual(kernel_S(0.5, 0.2, 0.7, 1e-8), 1.0, delta=1e-6)

    def test_s_all_phonons(self):
        e = 1e-6 * 0.04
        self.assertAlmostEqual(kernel_S(e, e, e, 0.04), 0.5, delta=1e-3)

    def test_s_phonon_with_free_partners(self):
        nbar = 0.04
        self.assertAlmostEqual(kernel_S(1e-6 * nbar, 1e6 * nbar, 1e6 * nbar, nbar), 0.0, delta=1e-3)

    def test_symmetrized_free_limit(self):
        self.assertAlmostEqual(kernel_T(0.3, 1.0, 0.7, 0.6, 0.0, KernelForm.SYMMETRIZED), 1.0, places=12)
        self.assertAlmostEqual(kernel_S(0.5, 0.2, 0.7, 0.0, KernelForm.SYMMETRIZED), 1.0, places=12)

    def test_symmetrized_exchange_symmetry(self):
        nbar = 0.04
        t = kernel_T(0.01, 0.2, 0.05, 0.16, nbar, KernelForm.SYMMETRIZED)
        self.assertAlmostEqual(kernel_T(0.2, 0.01, 0.05, 0.16, nbar, KernelForm.SYMMETRIZED), t, places=12)
        self.assertAlmostEqual(kernel_T(0.01, 0.2, 0.16, 0.05, nbar, KernelForm.SYMMETRIZED), t, places=12)
        s = kernel_S(0.05, 0.01, 0.06, nbar, KernelForm.SYMMETRIZED)
        self.assertAlmostEqual(kernel_S(0.05, 0.06, 0.01, nbar, KernelForm.SYMMETRIZED), s, places=12)

    def test_unknown_form(self):
        with self.assertRaises(ValueError):
            kernel_T(1.0, 1.0, 1.0, 1.0, 0.04, 'typo')

    @given(energies, energies, energies, energies, positive_densities)
    def test_non_negative(self, e1, e2, e3, e4, nbar):
        self.assertGreaterEqual(kernel_T(e1, e2, e3, e4, nbar), 0.0)
        self.assertGreaterEqual(kernel_S(e1, e2, e3, nbar), 0.0)
        self.assertGreaterEqual(zeta(e1, e2, e3, e4, nbar), 0.0)
        self.assertGreaterEqual(dos_shape(e1, nbar), 0.0)
        self.assertGreaterEqual(dos_shape(e1, nbar, DosForm.AS_PRINTED), 0.0)


class ZetaTests(SimpleTestCase):

    def test_equal_energies(self):
        self.assertAlmostEqual(zeta(2.0, 2.0, 2.0, 2.0, 0.0), 2.0 * np.sqrt(2.0), places=12)

    def test_printed_arithmetic(self):
        self.assertAlmostEqual(zeta(100.0, 1.0, 1.0, 100.0, 0.0), 2.0, places=12)

    def test_clamped(self):
        self.assertEqual(zeta(0.01, 0.01, 400.0, 0.01, 0.0), 0.0)
        self.assertLess(momentum_window(0.1, 0.1, 20.0, 0.1), 0.0)

    def test_continuous_across_clamp(self):
        # p = (1, 1, 1, p4): the window 3 - p4 closes at p4 = 3
        below = zeta(1.0, 1.0, 1.0, (3.0 - 1e-9) ** 2, 0.0)
        above = zeta(1.0, 1.0, 1.0, (3.0 + 1e-9) ** 2, 0.0)
        self.assertLess(below, 1e-8)
        self.assertEqual(above, 0.0)


class ChiWeightTests(SimpleTestCase):

    def test_examples(self):
        self.assertEqual(chi_weight(0.3, 0.0), 1.0)
        self.assertAlmostEqual(chi_weight(0.04, 0.04), 1.0 / np.sqrt(2.0), places=12)
        self.assertAlmostEqual(chi_weight(1e-3 * 0.04, 0.04), 1e-3, delta=1e-9)
        self.assertEqual(chi_weight(0.0, 0.04), 0.0)


class DensityOfStatesTests(SimpleTestCase):

    def test_derived_free_limit(self):
        self.assertAlmostEqual(dos_shape(2.0, 1e-12), np.sqrt(2.0), delta=1e-6)

    def test_derived_at_nbar(self):
        expected = 0.04 * np.sqrt(0.04 * (np.sqrt(2.0) - 1.0)) / (0.04 * np.sqrt(2.0))
        self.assertAlmostEqual(dos_shape(0.04, 0.04), expected, places=12)
        self.assertAlmostEqual(dos_shape(0.04, 0.04), 0.09101, delta=1e-5)

    def test_printed_phonon_product(self):
        nbar = 0.04
        e = 1e-8 * nbar
        product = dos_shape(e, nbar, DosForm.AS_PRINTED) * bose_einstein(e)
        self.assertAlmostEqual(product * np.sqrt(nbar), 1.0, delta=1e-6)

    def test_printed_needs_condensate(self):
        with self.assertRaises(ValueError):
            dos_shape(1.0, 0.0, DosForm.AS_PRINTED)


class BoseEinsteinTests(SimpleTestCase):

    def test_examples(self):
        self.assertAlmostEqual(bose_einstein(np.log(2.0)), 1.0, places=12)
        self.assertAlmostEqual(bose_einstein(1.0), 1.0 / (np.e - 1.0), places=12)
        self.assertLess(bose_einstein(700.0), 1e-300)


class CondensateScaleTests(SimpleTestCase):

    def test_negative_rejected(self):
        with self.assertRaises(ValueError):
            CondensateScale(-1e-3)

    def test_outside_dilute_regime_warns(self):
        with self.assertLogs('scattering.bogoliubov_core', 'WARNING'):
            scale = CondensateScale(0.2)
        self.assertTrue(scale.outside_dilute_regime)
        self.assertEqual(float(scale), 0.2)


class PrefactorTests(SimpleTestCase):

    def test_scaled_xi(self):
        constants = PrefactorConstants.scaled(a0=2.0, mass=3.0, nbar=0.5, hbar=1.0)
        self.assertAlmostEqual(constants.xi, 8.0 * 2.0 * 0.5 / (3.0 * 4.0 * np.pi), places=14)
        self.assertAlmostEqual(constants.gamma, 8.0 * 4.0 / ((2.0 * np.pi) ** 3 * 9.0), places=14)

    def test_physical(self):
        constants = PrefactorConstants.from_physical(a0=1.0, mass=1.0, n_c=2.0, hbar=1.0)
        self.assertEqual(constants.xi, 16.0)
