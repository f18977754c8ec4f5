import numpy as np

from scattering.collision_integrals import IsotropicDistribution
from scattering.effective_scattering import condensate_growth_rate
from scattering.output_service import read_rows

from ._base import ScatteringCommand, float_list

RATE_UNITS = 'dn_c/dt in units of xi / hbar, xi = 8 a0 nbar / (m 4 pi hbar^2)'


def read_distribution(path):
    """Two-column CSV (E, f) with a header line into a tabulated distribution."""
    rows = read_rows(path)
    try:
        grid = np.array([float(row[0]) for row in rows])
        values = np.array([float(row[1]) for row in rows])
    except (ValueError, IndexError):
        raise ValueError(f"{path} is not a two-column E,f table")
    return IsotropicDistribution.tabulated(grid, values)


class Command(ScatteringCommand):
    help = 'Condensate growth rate for an over- or under-occupied gas.'

    def add_command_arguments(self, parser):
        parser.add_argument('--nbar', type=float_list, required=True, help='Comma-separated nbar values.')
        source = parser.add_mutually_exclusive_group()
        source.add_argument('--scale', type=float, default=None,
                            help='Use f = scale * f_BE (default 1.1).')
        source.add_argument('--table', help='Two-column CSV E,f with a header line.')

    def run(self, config, options):
        spec = self.config.quadrature_spec()
        if options['table']:
            distribution = read_distribution(options['table'])
            label = f"table:{options['table']}"
        else:
            scale = 1.1 if options['scale'] is None else options['scale']
            distribution = IsotropicDistribution.bose_einstein(scale)
            label = f"scaled-bose-einstein:{scale!r}"
        rows = []
        for nbar in options['nbar']:
            result = condensate_growth_rate(distribution, nbar, spec, config['kernel_form'])
            rows.append([nbar, label, result.rate])
        self.emit_csv(
            ['nbar', 'distribution', 'rate'], rows, config, options['output'],
            nbar=options['nbar'], rate_units=RATE_UNITS,
        )
