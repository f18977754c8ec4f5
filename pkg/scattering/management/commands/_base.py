"""Shared plumbing of the scattering management commands."""
import argparse
import logging
from pathlib import Path

from django.conf import settings
from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError
from dotenv import dotenv_values

from scattering.exceptions import AboveCritical, EmptyRegion, NonConvergence, VerificationFailed
from scattering.forms import RunConfigForm
from scattering.output_service import ResultCache, metadata_lines, remove_partial, render_csv, write_atomic
from scattering.sweep_service import parse_float_list, parse_log_range

logger = logging.getLogger(__name__)

CONFIG_ERROR = 2
NON_CONVERGENCE = 3
VERIFICATION_FAILED = 4

# config keys every command accepts as flags
COMMON_FLAGS = ('rel_tol', 'abs_tol', 'e_max', 'max_subdivisions', 'kernel_form', 'threads')


def read_config_file(path):
    """Flat ``key = value`` file with ``#`` comments; hyphens in keys become underscores."""
    if not Path(path).is_file():
        raise CommandError(f"Config file not found: {path}", returncode=CONFIG_ERROR)
    values = dotenv_values(path)
    return {key.strip().replace('-', '_'): value for key, value in values.items()}


def merged_config(options, command_keys=()):
    """
    defaults < config file < command-line flags, validated by RunConfigForm.
    """
    data = dict(settings.BOGOSCATTER_DEFAULTS)
    if options.get('config'):
        from_file = read_config_file(options['config'])
        unknown = sorted(set(from_file) - set(data))
        if unknown:
            raise CommandError(
                f"Unknown config keys: {', '.join(unknown)}", returncode=CONFIG_ERROR
            )
        data.update(from_file)
    for key in list(COMMON_FLAGS) + list(command_keys):
        if options.get(key) is not None:
            data[key] = options[key]
    form = RunConfigForm(data)
    if not form.is_valid():
        raise CommandError(f"Invalid config: {form.error_text()}", returncode=CONFIG_ERROR)
    return form


class ScatteringCommand(BaseCommand):
    """
    Base for the CSV-producing commands: shared options, config merging,
    error-to-exit-code mapping and output writing.
    """

    requires_system_checks = []
    # config keys this command also accepts as flags
    config_flags = ()

    def add_arguments(self, parser):
        parser.add_argument('--config', help='Run config file (flat key = value).')
        parser.add_argument('--output', '-o', help='Output path; standard output when omitted.')
        parser.add_argument('--threads', type=int, help='Worker processes; 0 = available parallelism.')
        parser.add_argument('--no-cache', action='store_true', help='Neither read nor write the result cache.')
        parser.add_argument('--rel-tol', type=float, dest='rel_tol')
        parser.add_argument('--abs-tol', type=float, dest='abs_tol')
        parser.add_argument('--e-max', type=float, dest='e_max')
        parser.add_argument('--max-subdivisions', type=int, dest='max_subdivisions')
        parser.add_argument('--kernel-form', dest='kernel_form', help='as-printed or symmetrized.')
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def handle(self, *args, **options):
        self.config = merged_config(options, self.config_flags)
        self.cache = None if options['no_cache'] else ResultCache()
        output = options.get('output')
        try:
            self.run(self.config.cleaned_data, options)
        except NonConvergence as exc:
            remove_partial(output)
            raise CommandError(f"Quadrature did not converge: {exc}", returncode=NON_CONVERGENCE)
        except VerificationFailed as exc:
            raise CommandError(str(exc), returncode=VERIFICATION_FAILED)
        except (ValidationError, ValueError, EmptyRegion, AboveCritical) as exc:
            remove_partial(output)
            raise CommandError(str(exc), returncode=CONFIG_ERROR)

    def run(self, config, options):
        raise NotImplementedError('subclasses of ScatteringCommand must provide a run() method')

    def metadata(self, config, **extra):
        merged = dict(config)
        merged.update(extra)
        return metadata_lines(self.command_name, merged)

    @property
    def command_name(self):
        return self.__module__.rsplit('.', 1)[-1]

    def emit(self, content, output):
        if output:
            write_atomic(output, content)
            self.stderr.write(self.style.SUCCESS(f"Wrote {output}"))
        else:
            self.stdout.write(content, ending='')

    def emit_csv(self, header, rows, config, output, **extra):
        self.emit(render_csv(header, rows, self.metadata(config, **extra)), output)


def float_list(text):
    """argparse type for comma-separated floats."""
    try:
        return parse_float_list(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def log_range(text):
    """argparse type for 'start:stop:count' log-spaced values."""
    try:
        return parse_log_range(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))
