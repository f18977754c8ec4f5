import re

from django.core.management.base import CommandError

from scattering.condensate_params import (
    NM,
    SPECIES_A0,
    SPECIES_MASSES,
    custom_species,
    derived_scales,
    preset,
    to_per_nm3,
)

from ._base import CONFIG_ERROR, ScatteringCommand

DENSITY_PATTERN = re.compile(r'^\s*([0-9.eE+-]+)\s*(nm-3|m-3)?\s*$')


def parse_density(text):
    """'1e-3nm-3', '1e24m-3' or a bare number (nm^-3) -> density in nm^-3."""
    match = DENSITY_PATTERN.match(text)
    if not match:
        raise CommandError(f"Cannot read density {text!r}", returncode=CONFIG_ERROR)
    value = float(match.group(1))
    return to_per_nm3(value) if match.group(2) == 'm-3' else value


class Command(ScatteringCommand):
    help = 'Critical temperature, condensate fraction and nbar for laboratory parameters.'

    def add_command_arguments(self, parser):
        parser.add_argument('--species', default='o-Ps',
                            help='o-Ps, 87Rb, 23Na or a preset label; any name with --mass.')
        parser.add_argument('--density', help="Total density, e.g. '1e-3nm-3' or '1e24m-3'.")
        parser.add_argument('--a0', type=float, help='Bare scattering length in nm.')
        parser.add_argument('--mass', type=float, help='Mass in kg.')
        temperature = parser.add_mutually_exclusive_group()
        temperature.add_argument('--fraction', type=float, help='Condensate fraction n_c/n (default 0.5).')
        temperature.add_argument('--temperature', type=float, help='Temperature in K.')
        temperature.add_argument('--temperature-ratio', type=float, dest='temperature_ratio', help='T / T_c.')
        parser.add_argument('--alpha', type=float, help='Report the effective scattering length a0 * alpha.')

    def species(self, options):
        name = options['species']
        try:
            base = preset(name)
            a0_nm, density_nm3, mass = base.a0 / NM, to_per_nm3(base.density_n), base.mass
        except KeyError:
            a0_nm = SPECIES_A0[name] / NM if name in SPECIES_A0 else None
            density_nm3, mass = None, SPECIES_MASSES.get(name)
        if options['a0'] is not None:
            a0_nm = options['a0']
        if options['density'] is not None:
            density_nm3 = parse_density(options['density'])
        if options['mass'] is not None:
            mass = options['mass']
        if a0_nm is None or density_nm3 is None:
            raise CommandError(f"Species {name!r} needs --a0 and --density", returncode=CONFIG_ERROR)
        fraction = options['fraction']
        if fraction is None and options['temperature'] is None and options['temperature_ratio'] is None:
            fraction = 0.5
        return custom_species(
            name, a0_nm, density_nm3, mass=mass, fraction=fraction,
            temperature=options['temperature'], temperature_ratio=options['temperature_ratio'],
        )

    def run(self, config, options):
        species = self.species(options)
        scales = derived_scales(species)
        rows = [
            ['species', species.name, ''],
            ['mass', species.mass, 'kg'],
            ['a0', species.a0 / NM, 'nm'],
            ['density', to_per_nm3(species.density_n), 'nm^-3'],
            ['temperature', species.temperature, 'K'],
            ['t_c', scales.t_c, 'K'],
            ['temperature_ratio', species.temperature_ratio, ''],
            ['condensate_fraction', scales.condensate_fraction, ''],
            ['g', scales.g, 'J m^3'],
            ['e0', scales.e0, 'J'],
            ['e0_over_k', scales.e0_kelvin, 'K'],
            ['nbar', scales.nbar.nbar, ''],
            ['nbar_closed_form', scales.nbar_rounded.nbar, ''],
            ['diluteness', species.diluteness, 'n a0^3'],
            ['quasi_particle_weight', scales.quasi_particle_weight(species.temperature), 'at E = k_B T'],
            ['above_critical', scales.above_critical, ''],
        ]
        if options['alpha'] is not None:
            rows.append(['a_eff', options['alpha'] * species.a0 / NM, 'nm'])
        if scales.above_critical:
            self.stderr.write(self.style.WARNING(
                f"{species.name}: T = {species.temperature:.4g} K is not below T_c = {scales.t_c:.4g} K; nbar = 0"
            ))
        self.emit_csv(['quantity', 'value', 'unit'], rows, config, options['output'])
