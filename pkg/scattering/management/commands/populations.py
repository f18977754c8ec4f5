from scattering.bogoliubov_core import DosForm
from scattering.effective_scattering import AlphaCurve, population_grid, population_report
from scattering.sweep_service import pool_map, tabulate_curve

from ._base import ScatteringCommand, float_list, log_range

BOTH_FORMS = 'both'


class Command(ScatteringCommand):
    help = (
        'Low-energy fraction n_l, a_eff,l / a0 and the mean alpha_T, alpha_S '
        'of the non-condensed population for a range of nbar.'
    )

    config_flags = ('threshold', 'population_points', 'alpha_s_mode')

    def add_command_arguments(self, parser):
        nbar = parser.add_mutually_exclusive_group(required=True)
        nbar.add_argument('--nbar', type=float_list, help='Comma-separated nbar values.')
        nbar.add_argument('--nbar-log', type=log_range, dest='nbar_log', help='start:stop:count, log-spaced.')
        parser.add_argument('--threshold', type=float)
        parser.add_argument('--dos-form', dest='dos_choice', default=None,
                            help='derived, as-printed or both (default: the configured dos_form).')
        parser.add_argument('--population-points', type=int, dest='population_points')
        parser.add_argument('--mode', dest='alpha_s_mode')

    def dos_forms(self, config, options):
        choice = options['dos_choice'] or config['dos_form']
        if choice == BOTH_FORMS:
            return [DosForm.DERIVED, DosForm.AS_PRINTED]
        if choice not in DosForm.values:
            raise ValueError(f"Unknown density-of-states form {choice!r}")
        return [choice]

    def run(self, config, options):
        spec = self.config.quadrature_spec()
        nbars = options['nbar'] or options['nbar_log']
        forms = self.dos_forms(config, options)
        rows = []
        with pool_map(config['threads']) as mapper:
            for nbar in nbars:
                energies = population_grid(nbar, spec, config['emin_frac'], config['population_points'])
                t_curve = tabulate_curve(
                    AlphaCurve.T, nbar, energies, spec, config['kernel_form'],
                    cache=self.cache, mapper=mapper,
                )
                s_curve = tabulate_curve(
                    AlphaCurve.S, nbar, energies, spec, config['kernel_form'], config['alpha_s_mode'],
                    cache=self.cache, mapper=mapper,
                )
                for dos in forms:
                    report = population_report(nbar, t_curve, s_curve, config['threshold'], dos, spec)
                    rows.append(report.as_row())
                self.stderr.write(f"nbar={nbar:g} done")
        header = ['nbar', 'n_l', 'a_eff_l_over_a0', 'mean_alpha_T', 'mean_alpha_S', 'dos_form']
        self.emit_csv(header, rows, config, options['output'], nbar=nbars)
