from scattering.condensate_params import TABLE1_PRINTED, NM, derived_scales, species_presets, to_per_nm3

from ._base import ScatteringCommand


class Command(ScatteringCommand):
    help = 'Scaled condensate densities of the tabulated species at a 50/50 mixture.'

    def add_command_arguments(self, parser):
        parser.add_argument('--fraction', type=float, default=0.5, help='Condensate fraction n_c/n.')

    def run(self, config, options):
        rows = []
        for species in species_presets(options['fraction']):
            scales = derived_scales(species)
            rows.append([
                species.name,
                species.a0 / NM,
                to_per_nm3(species.density_n),
                scales.t_c,
                species.temperature,
                scales.nbar.nbar,
                scales.nbar_rounded.nbar,
                TABLE1_PRINTED.get(species.name),
                species.diluteness,
            ])
        header = [
            'species', 'a0_nm', 'density_nm3', 't_c_K', 'temperature_K',
            'nbar', 'nbar_closed_form', 'printed_nbar', 'diluteness',
        ]
        self.emit_csv(header, rows, config, options['output'], fraction=options['fraction'])
