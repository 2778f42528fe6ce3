from django.conf import settings

from bdwalk.core.exceptions import ConfigError
from bdwalk.core.management.basecmd import BdwalkCommand
from bdwalk.drift.functions import from_dict
from bdwalk.simulator.config import Mode, RateConvention, WalkConfig
from bdwalk.simulator.stats import ROW_FIELDS
from bdwalk.simulator.walks import (
    drift_vanishing_check,
    embedding_check,
    growth_exponent,
    run_ensemble,
)


REPORTS = ('ensemble', 'vanishing', 'embedding')


class Command(BdwalkCommand):
    """ Simulates a walk or an ensemble of walks """

    help = "Monte Carlo simulation of the walk with a given drift"

    uses_seed = True

    def add_command_arguments(self, parser):
        self.add_drift_arguments(parser)

        self.add_option(
            parser,
            '--mode',
            choices=[m.value for m in Mode],
            default=Mode.DISCRETE.value,
        )
        self.add_option(
            parser,
            '--rate-convention',
            dest='rate_convention',
            choices=[c.value for c in RateConvention],
            default=RateConvention.FROZEN.value,
            help="Time at which φ is evaluated for a continuous-time jump",
        )
        self.add_option(
            parser, '--start-state', dest='start_state', type=int, default=0
        )
        self.add_option(
            parser, '--start-time', dest='start_time', type=int, default=1
        )
        self.add_option(parser, '--horizon', type=int, default=10000)
        self.add_option(parser, '--replicas', type=int, default=1)
        self.add_option(parser, '--escape-level', dest='escape_level', type=int)
        self.add_option(
            parser,
            '--stop-at-escape',
            dest='stop_at_escape',
            action='store_true',
            default=False,
        )
        self.add_option(
            parser,
            '--stop-at-return',
            dest='stop_at_return',
            action='store_true',
            default=False,
        )
        self.add_option(
            parser,
            '--capture-path',
            dest='capture_path',
            action='store_true',
            default=False,
            help="Keep every state instead of the states at t0 + 2^k",
        )
        self.add_option(
            parser,
            '--max-rows',
            dest='max_rows',
            type=int,
            default=settings.MAX_REPLICA_ROWS,
            help="Maximum number of per-replica rows in the result",
        )
        self.add_option(
            parser,
            '--report',
            choices=REPORTS,
            default='ensemble',
            help="ensemble statistics, drift vanishing or continuous embedding check",
        )
        self.add_option(
            parser, '--t-grid', dest='t_grid', help="Comma-separated times (vanishing)"
        )
        self.add_option(parser, '--t-lo', dest='t_lo', type=float)
        self.add_option(parser, '--t-hi', dest='t_hi', type=float)
        self.add_option(parser, '--state-max', dest='state_max', type=int, default=10)
        self.add_option(
            parser,
            '--bucket-edges',
            dest='bucket_edges',
            help="Comma-separated time bucket edges (embedding)",
        )

    def walk_config(self, options):
        return WalkConfig(
            drift=from_dict(self.drift_dict(options)),
            start_state=options['start_state'],
            start_time=options['start_time'],
            horizon=options['horizon'],
            seed=options['seed'],
            mode=options['mode'],
            escape_level=options['escape_level'],
            stop_at_escape=bool(options['stop_at_escape']),
            stop_at_return=bool(options['stop_at_return']),
            rate_convention=options['rate_convention'],
            capture_path=bool(options['capture_path']),
        )

    def compute(self, options):
        cfg = self.walk_config(options)
        replicas = options['replicas']
        report = options['report']
        if report not in REPORTS:
            raise ConfigError([('report', 'must be one of {}'.format(REPORTS))])

        result = {'config': cfg.to_dict(), 'replicas': replicas, 'report': report}

        if report == 'vanishing':
            grid = _float_list(options['t_grid'], 't_grid')
            result['vanishing'] = drift_vanishing_check(cfg, replicas, grid)
            return result

        if report == 'embedding':
            edges = _float_list(options['bucket_edges'], 'bucket_edges')
            result['embedding'] = embedding_check(
                cfg, replicas, options['state_max'], edges
            )
            return result

        ensemble = run_ensemble(cfg, replicas)
        if replicas == 1:
            result['trajectory'] = ensemble.batch.trajectory(0, with_path=True)
        else:
            ensemble.max_rows = options['max_rows']
            result['ensemble'] = ensemble

        if options['t_lo'] is not None and options['t_hi'] is not None:
            result['growth'] = growth_exponent(
                ensemble, options['t_lo'], options['t_hi']
            )

        return result

    def csv_rows(self, result):
        if 'trajectory' in result:
            path = result['trajectory'].path_sample
            return ['t', 'state'], ({'t': t, 'state': s} for t, s in path)

        if 'vanishing' in result:
            rows = result['vanishing'].to_dict()['grid']
            return ['t', 'mean_phi', 'se', 'mean_state_ratio'], rows

        if 'embedding' in result:
            rows = result['embedding'].rows()
            fieldnames = [
                'state',
                't_lo',
                't_hi',
                'jumps',
                'up_frequency',
                'expected_frequency',
                'z',
            ]
            return fieldnames, rows

        return list(ROW_FIELDS), result['ensemble'].rows()


def _float_list(value, name):
    if value is None:
        raise ConfigError([(name, 'is required by this report')])
    if isinstance(value, str):
        try:
            return [float(v) for v in value.split(',') if v.strip()]
        except ValueError:
            raise ConfigError([(name, 'expected comma-separated numbers')])
    return [float(v) for v in value]
