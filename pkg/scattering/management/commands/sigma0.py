from scattering.effective_scattering import loss_table, population_grid
from scattering.sweep_service import pool_map

from ._base import ScatteringCommand, float_list


class Command(ScatteringCommand):
    help = 'Global constant sigma0 replacing the NN kernel over all energies.'

    config_flags = ('population_points',)

    def add_command_arguments(self, parser):
        parser.add_argument('--nbar', type=float_list, required=True, help='Comma-separated nbar values.')
        parser.add_argument('--unit-weight', action='store_true',
                            help='Weight the fit with 1 instead of the density of states.')
        parser.add_argument('--points', type=int, dest='population_points')

    def run(self, config, options):
        spec = self.config.quadrature_spec()
        dos = None if options['unit_weight'] else config['dos_form']
        rows = []
        with pool_map(config['threads']) as mapper:
            for nbar in options['nbar']:
                energies = population_grid(nbar, spec, config['emin_frac'], config['population_points'])
                table = loss_table(nbar, spec, dos, energies, config['kernel_form'], mapper)
                rows.append([
                    nbar, table.sigma0, float(table.alpha_sq.min()), float(table.alpha_sq.max()),
                    dos or 'unit',
                ])
        header = ['nbar', 'sigma0', 'min_alpha_T_sq', 'max_alpha_T_sq', 'weight']
        self.emit_csv(header, rows, config, options['output'], nbar=options['nbar'])
