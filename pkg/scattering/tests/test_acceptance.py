"""
End-to-end population and oracle checks at coarse tolerance. These tabulate
full alpha curves and run for minutes even on the worker pool:
``manage.py test --exclude-tag slow`` skips them.
"""
import numpy as np
from django.test import SimpleTestCase, tag

from scattering.bogoliubov_core import DosForm
from scattering.collision_integrals import QuadratureSpec
from scattering.effective_scattering import ALPHA_T_CEILING, AlphaCurve, population_grid, population_report
from scattering.mc_oracle import McSpec, run_verification_suite
from scattering.sweep_service import pool_map, tabulate_curve

COARSE = QuadratureSpec(rel_tol=1e-4, abs_tol=1e-10)
THRESHOLD = 1.05


def curves(nbar, points, mapper):
    energies = population_grid(nbar, COARSE, points=points)
    t_curve = tabulate_curve(AlphaCurve.T, nbar, energies, COARSE, 'as-printed', mapper=mapper)
    s_curve = tabulate_curve(AlphaCurve.S, nbar, energies, COARSE, 'as-printed', 'consistent', mapper=mapper)
    return t_curve, s_curve


@tag('slow')
class PopulationAcceptanceTests(SimpleTestCase):

    def test_report_bounds_at_high_density(self):
        with pool_map(0) as mapper:
            t_curve, s_curve = curves(0.04, 24, mapper)
        self.assertEqual(len(t_curve.out_of_bounds()), 0)
        self.assertEqual(len(s_curve.out_of_bounds()), 0)
        for dos in (DosForm.DERIVED, DosForm.AS_PRINTED):
            with self.subTest(dos=dos):
                report = population_report(0.04, t_curve, s_curve, THRESHOLD, dos, COARSE)
                self.assertTrue(0.0 < report.n_l < 1.0)
                self.assertGreaterEqual(report.a_eff_l_over_a0, THRESHOLD - 1e-6)
                self.assertLessEqual(report.a_eff_l_over_a0, ALPHA_T_CEILING + 1e-3)
                self.assertTrue(1.0 - 1e-3 <= report.mean_alpha_T <= ALPHA_T_CEILING + 1e-3)
                self.assertTrue(0.0 < report.mean_alpha_S <= 1.0 + 1e-3)
        derived = population_report(0.04, t_curve, s_curve, THRESHOLD, DosForm.DERIVED, COARSE)
        # only a few percent above a0 once the whole gas is averaged
        self.assertLessEqual(derived.mean_alpha_T, 1.12)
        self.assertTrue(0.1 < derived.n_l < 0.6, derived.n_l)

    def test_low_energy_fraction_grows_as_sqrt_nbar(self):
        nbars = np.geomspace(1e-4, 1e-2, 10)
        fractions = []
        with pool_map(0) as mapper:
            for nbar in nbars:
                t_curve, s_curve = curves(nbar, 24, mapper)
                report = population_report(nbar, t_curve, s_curve, THRESHOLD, DosForm.DERIVED, COARSE)
                fractions.append(report.n_l)
        slope, _ = np.polyfit(np.log(nbars), np.log(fractions), 1)
        self.assertAlmostEqual(slope, 0.5, delta=0.1)
        self.assertTrue(np.all(np.diff(fractions) > 0))


@tag('slow')
class OracleAcceptanceTests(SimpleTestCase):

    def test_verification_suite_passes(self):
        with pool_map(0) as mapper:
            report = run_verification_suite(McSpec(), COARSE, mapper=mapper)
        self.assertTrue(report.passed, '\n'.join(report.lines()))
