from scattering.effective_scattering import AlphaCurve, energy_grid
from scattering.sweep_service import pool_map, tabulate_curve

from ._base import ScatteringCommand, float_list


class Command(ScatteringCommand):
    help = 'Tabulate the effective NC scattering length alpha_S(E) for a list of nbar.'

    config_flags = ('points', 'emin_frac', 'emax', 'alpha_s_mode')

    def add_command_arguments(self, parser):
        parser.add_argument('--nbar', type=float_list, required=True, help='Comma-separated nbar values.')
        parser.add_argument('--points', type=int)
        parser.add_argument('--emin-frac', type=float, dest='emin_frac', help='Lowest energy as a fraction of nbar.')
        parser.add_argument('--emax', type=float)
        parser.add_argument('--mode', dest='alpha_s_mode', help='consistent or as-printed.')

    def run(self, config, options):
        spec = self.config.quadrature_spec()
        mode = config['alpha_s_mode']
        rows = []
        with pool_map(config['threads']) as mapper:
            for nbar in options['nbar']:
                energies = energy_grid(nbar, config['emin_frac'], config['emax'], config['points'])
                curve = tabulate_curve(
                    AlphaCurve.S, nbar, energies, spec, config['kernel_form'], mode,
                    cache=self.cache, mapper=mapper,
                )
                rows.extend(row + (mode,) for row in curve.rows())
        self.emit_csv(['nbar', 'E', 'alpha_S', 'mode'], rows, config, options['output'], nbar=options['nbar'])
