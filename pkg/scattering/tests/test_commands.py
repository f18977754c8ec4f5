import csv
import tempfile
from io import StringIO
from pathlib import Path
from unittest import mock

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from scattering.effective_scattering import GrowthRate
from scattering.exceptions import NonConvergence
from scattering.mc_oracle import OracleCheck, VerificationReport


def data_rows(text):
    """Header and rows of a CSV written by a command, metadata skipped."""
    lines = [line for line in text.splitlines() if not line.startswith('#')]
    rows = list(csv.reader(lines))
    return rows[0], rows[1:]


def stub_alpha_t(e1, n, spec=None, form=None):
    return 1.0 + 0.4 / (1.0 + (e1 / n) ** 2)


def stub_alpha_s(e1, n, mode=None, spec=None, form=None):
    return 1.0 - 0.5 / (1.0 + (e1 / n) ** 2)


class CommandTestCase(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        settings_override = override_settings(BOGOSCATTER_CACHE_DIR=str(Path(self.tmp.name) / 'cache'))
        settings_override.enable()
        self.addCleanup(settings_override.disable)

    def call(self, *args):
        stdout, stderr = StringIO(), StringIO()
        call_command(*args, stdout=stdout, stderr=stderr)
        return stdout.getvalue()

    def returncode_of(self, *args):
        with self.assertRaises(CommandError) as cm:
            self.call(*args)
        return cm.exception.returncode

    def write(self, name, content):
        path = Path(self.tmp.name) / name
        path.write_text(content)
        return str(path)


class Table1CommandTests(CommandTestCase):

    def test_rows(self):
        output = self.call('table1')
        header, rows = data_rows(output)
        self.assertEqual(header[0], 'species')
        self.assertEqual([row[0] for row in rows],
                         ['o-Ps (low density)', 'o-Ps (high density)', '87Rb', '23Na'])
        nbar = {row[0]: float(row[header.index('nbar')]) for row in rows}
        self.assertAlmostEqual(nbar['87Rb'], 0.01656, delta=2e-4)
        self.assertAlmostEqual(nbar['o-Ps (high density)'], 0.0482, delta=5e-4)
        self.assertTrue(output.startswith('# bogoscatter '))


class ParamsCommandTests(CommandTestCase):

    def values(self, *args):
        _, rows = data_rows(self.call('params', *args))
        return {row[0]: row[1] for row in rows}

    def test_positronium(self):
        values = self.values('--species', 'o-Ps')
        self.assertAlmostEqual(float(values['nbar']), 0.0482, delta=5e-4)
        self.assertAlmostEqual(float(values['condensate_fraction']), 0.5, places=9)
        self.assertEqual(values['above_critical'], 'false')

    def test_rubidium(self):
        values = self.values('--species', '87Rb')
        self.assertAlmostEqual(float(values['nbar']), 0.01656, delta=2e-4)

    def test_density_units(self):
        nm3 = self.values('--species', 'o-Ps', '--density', '1e-4nm-3')
        m3 = self.values('--species', 'o-Ps', '--density', '1e23m-3')
        self.assertAlmostEqual(float(nm3['nbar']) / float(m3['nbar']), 1.0, places=9)
        self.assertAlmostEqual(float(nm3['t_c']), 3.15, delta=0.02)

    def test_above_critical_is_not_an_error(self):
        values = self.values('--species', '87Rb', '--temperature-ratio', '1.0')
        self.assertEqual(values['above_critical'], 'true')
        self.assertEqual(float(values['nbar']), 0.0)

    def test_effective_length(self):
        values = self.values('--species', '87Rb', '--alpha', '1.2')
        self.assertAlmostEqual(float(values['a_eff']), 6.6, places=9)

    def test_unknown_species_needs_parameters(self):
        self.assertEqual(self.returncode_of('params', '--species', '133Cs'), 2)
        self.assertEqual(self.returncode_of('params', '--species', 'o-Ps', '--density', 'lots'), 2)


class ConfigPrecedenceTests(CommandTestCase):

    def test_file_overrides_defaults(self):
        path = self.write('run.env', '# coarse run\nrel_tol = 1e-5\nkernel-form = symmetrized\n')
        output = self.call('table1', '--config', path)
        self.assertIn('# rel_tol = %.17g' % 1e-5, output)
        self.assertIn('# kernel_form = symmetrized', output)

    def test_flag_overrides_file(self):
        path = self.write('run.env', 'rel_tol = 1e-5\n')
        output = self.call('table1', '--config', path, '--rel-tol', '1e-4')
        self.assertIn('# rel_tol = %.17g' % 1e-4, output)

    def test_defaults(self):
        self.assertIn('# rel_tol = %.17g' % 1e-6, self.call('table1'))

    def test_unknown_key(self):
        path = self.write('run.env', 'relative_tolerance = 1e-5\n')
        self.assertEqual(self.returncode_of('table1', '--config', path), 2)

    def test_invalid_values(self):
        for content in ('rel_tol = -1\n', 'kernel_form = other\n', 'threshold = 1.0\n', 'e_max = 5\n'):
            with self.subTest(content=content):
                path = self.write('run.env', content)
                self.assertEqual(self.returncode_of('table1', '--config', path), 2)

    def test_missing_file(self):
        self.assertEqual(self.returncode_of('table1', '--config', '/nonexistent/run.env'), 2)


@mock.patch('scattering.effective_scattering.alpha_S', stub_alpha_s)
@mock.patch('scattering.effective_scattering.alpha_T', stub_alpha_t)
class CurveCommandTests(CommandTestCase):

    def test_alpha_t(self):
        output = self.call('alpha_t', '--nbar', '1e-8,0.04', '--points', '5', '--emin-frac', '1e4',
                           '--threads', '1')
        header, rows = data_rows(output)
        self.assertEqual(header, ['nbar', 'E', 'alpha_T'])
        self.assertEqual(len(rows), 10)
        first = rows[0]
        self.assertEqual(float(first[0]), 1e-8)
        self.assertAlmostEqual(float(first[1]), 1e-4, places=15)
        self.assertAlmostEqual(float(first[2]), stub_alpha_t(1e-4, 1e-8), places=15)

    def test_alpha_s_mode_column(self):
        output = self.call('alpha_s', '--nbar', '0.04', '--points', '4', '--mode', 'as-printed',
                           '--threads', '1')
        header, rows = data_rows(output)
        self.assertEqual(header, ['nbar', 'E', 'alpha_S', 'mode'])
        self.assertEqual({row[3] for row in rows}, {'as-printed'})

    def test_invalid_mode(self):
        self.assertEqual(self.returncode_of('alpha_s', '--nbar', '0.04', '--mode', 'eq16'), 2)

    def test_cached_rerun_is_identical(self):
        output = str(Path(self.tmp.name) / 'alpha_t.csv')
        args = ('alpha_t', '--nbar', '0.04', '--points', '6', '--threads', '1', '--output', output)
        self.call(*args)
        first = Path(output).read_bytes()

        def must_not_run(*args, **kwargs):
            raise AssertionError('cached curve was recomputed')

        with mock.patch('scattering.effective_scattering.alpha_T', must_not_run):
            self.call(*args)
        self.assertEqual(Path(output).read_bytes(), first)

    def test_no_cache(self):
        self.call('alpha_t', '--nbar', '0.04', '--points', '3', '--threads', '1', '--no-cache')
        self.assertFalse((Path(self.tmp.name) / 'cache').exists())

    def test_populations(self):
        output = self.call('populations', '--nbar', '0.01,0.04', '--population-points', '12',
                           '--dos-form', 'both', '--threads', '1', '--rel-tol', '1e-5')
        header, rows = data_rows(output)
        self.assertEqual(header[:3], ['nbar', 'n_l', 'a_eff_l_over_a0'])
        self.assertEqual([row[-1] for row in rows], ['derived', 'as-printed'] * 2)
        for row in rows:
            self.assertTrue(0.0 < float(row[1]) < 1.0)
            self.assertGreaterEqual(float(row[2]), 1.05 - 1e-6)

    def test_populations_log_range(self):
        output = self.call('populations', '--nbar-log', '1e-3:1e-2:3', '--population-points', '8',
                           '--threads', '1', '--rel-tol', '1e-5')
        _, rows = data_rows(output)
        self.assertEqual(len(rows), 3)

    def test_non_convergence_exit_code(self):
        def fails(*args, **kwargs):
            raise NonConvergence(1.0, 0.1)

        output = str(Path(self.tmp.name) / 'out.csv')
        with mock.patch('scattering.effective_scattering.alpha_T', fails):
            code = self.returncode_of('alpha_t', '--nbar', '0.04', '--points', '3', '--threads', '1',
                                      '--output', output)
        self.assertEqual(code, 3)
        self.assertFalse(Path(output).exists())


class Sigma0CommandTests(CommandTestCase):

    @mock.patch('scattering.effective_scattering.loss_rates', lambda e, n, spec, form: (1.5 * e, e))
    def test_constant_ratio(self):
        for extra in ((), ('--unit-weight',)):
            with self.subTest(extra=extra):
                output = self.call('sigma0', '--nbar', '0.04', '--points', '6', '--threads', '1', *extra)
                _, rows = data_rows(output)
                self.assertAlmostEqual(float(rows[0][1]), 1.5, places=12)
                self.assertEqual(rows[0][4], 'unit' if extra else 'derived')


class GrowthRateCommandTests(CommandTestCase):

    def test_table_input(self):
        table = self.write('f.csv', 'E,f\n0.1,2.0\n1.0,0.5\n10.0,1e-4\n')
        seen = []

        def fake_rate(f, n, spec, form):
            seen.append(f)
            return GrowthRate(0.25, None)

        with mock.patch('scattering.management.commands.growth_rate.condensate_growth_rate', fake_rate):
            output = self.call('growth_rate', '--nbar', '0.04', '--table', table)
        _, rows = data_rows(output)
        self.assertEqual(float(rows[0][2]), 0.25)
        self.assertTrue(rows[0][1].startswith('table:'))
        self.assertEqual(seen[0].kind, 'tabulated')
        self.assertEqual(list(seen[0].grid), [0.1, 1.0, 10.0])

    def test_bad_table(self):
        table = self.write('f.csv', 'E,f\n0.1,high\n')
        self.assertEqual(self.returncode_of('growth_rate', '--nbar', '0.04', '--table', table), 2)


def report(passed):
    check = OracleCheck('three_momentum', (1.0, 1.0, 1.0), 6.2, 0.01, 6.283, passed)
    return VerificationReport([check])


class VerifyCommandTests(CommandTestCase):

    def test_passing_suite(self):
        with mock.patch('scattering.management.commands.verify.run_verification_suite',
                        return_value=report(True)) as suite:
            output = self.call('verify', '--only', 'three-momentum', '--threads', '1')
        self.assertIn('# result: passed', output)
        kwargs = suite.call_args.kwargs
        self.assertEqual(kwargs['window_points'], ())
        self.assertEqual(kwargs['q_points'], ())
        self.assertTrue(kwargs['three_points'])

    def test_failure_exit_code(self):
        with mock.patch('scattering.management.commands.verify.run_verification_suite',
                        return_value=report(False)):
            self.assertEqual(self.returncode_of('verify', '--threads', '1'), 4)

    def test_seed_and_samples_flags(self):
        with mock.patch('scattering.management.commands.verify.run_verification_suite',
                        return_value=report(True)) as suite:
            self.call('verify', '--seed', '5', '--samples', '20000', '--threads', '1')
        spec = suite.call_args.args[0]
        self.assertEqual((spec.seed, spec.samples), (5, 20000))
