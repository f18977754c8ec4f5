from scattering.exceptions import VerificationFailed
from scattering.mc_oracle import (
    Q_LOSS_POINTS,
    THREE_MOMENTUM_POINTS,
    WINDOW_POINTS,
    run_verification_suite,
)
from scattering.sweep_service import pool_map

from ._base import ScatteringCommand

SUITES = ('window', 'three-momentum', 'q-loss')


class Command(ScatteringCommand):
    help = 'Check the analytic delta-function reductions against the Monte Carlo oracle.'

    config_flags = ('samples', 'seed')

    def add_command_arguments(self, parser):
        parser.add_argument('--seed', type=int)
        parser.add_argument('--samples', type=int)
        parser.add_argument('--only', choices=SUITES, help='Run a single comparison suite.')

    def run(self, config, options):
        only = options['only']
        selected = {
            'window_points': WINDOW_POINTS if only in (None, 'window') else (),
            'three_points': THREE_MOMENTUM_POINTS if only in (None, 'three-momentum') else (),
            'q_points': Q_LOSS_POINTS if only in (None, 'q-loss') else (),
        }
        with pool_map(config['threads']) as mapper:
            report = run_verification_suite(
                self.config.mc_spec(), self.config.quadrature_spec(), mapper=mapper, **selected
            )
        lines = self.metadata(config, only=only) + report.lines()
        lines.append(f"# result: {'passed' if report.passed else 'FAILED'}")
        self.emit('\n'.join(lines) + '\n', options['output'])
        if not report.passed:
            names = ', '.join(f"{c.name}{c.point}" for c in report.failures)
            raise VerificationFailed(f"Oracle disagreement: {names}")
