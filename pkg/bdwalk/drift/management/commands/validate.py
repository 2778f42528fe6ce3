from bdwalk.core.exceptions import ConfigError
from bdwalk.core.management.basecmd import BdwalkCommand
from bdwalk.drift.functions import from_dict, validate


class Command(BdwalkCommand):
    """ Samples the assumptions on a drift function """

    help = "Reports (n, t) points at which φ leaves [0, 1/2) or grows in t"

    def add_command_arguments(self, parser):
        self.add_drift_arguments(parser)
        self.add_option(parser, '--n-max', dest='n_max', type=int, default=100)
        self.add_option(parser, '--t-max', dest='t_max', type=float, default=10000.0)
        self.add_option(
            parser,
            '--full-quadrant',
            dest='full_quadrant',
            action='store_true',
            default=False,
            help="Also sample times t < n outside the region the walk visits",
        )

    def compute(self, options):
        n_max, t_max = options['n_max'], options['t_max']
        errors = []
        if not n_max >= 1:
            errors.append(('n_max', 'must be >= 1, got {!r}'.format(n_max)))
        if not t_max >= 1:
            errors.append(('t_max', 'must be >= 1, got {!r}'.format(t_max)))
        if errors:
            raise ConfigError(errors)

        drift = from_dict(self.drift_dict(options))
        violations = validate(drift, n_max, t_max, wedge=not options['full_quadrant'])

        return {
            'drift': drift.to_dict(),
            'n_max': n_max,
            't_max': t_max,
            'valid': not violations,
            'violations': violations,
        }

    def csv_rows(self, result):
        fieldnames = ['n', 't', 'value', 'invariant']
        return fieldnames, (v.to_dict() for v in result['violations'])
