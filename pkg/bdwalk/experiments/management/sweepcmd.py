from numpy.random import SeedSequence

from bdwalk.core.exceptions import ConfigError
from bdwalk.core.management.basecmd import BdwalkCommand
from bdwalk.core.output import default_path, open_output
from bdwalk.experiments.report import evidence_report
from bdwalk.experiments.spec import OVERRIDES, apply_overrides, parse_spec
from bdwalk.experiments.sweep import CSV_FIELDS, phase_sweep
from bdwalk.simulator.config import Mode, RateConvention

import logging

logger = logging.getLogger(__name__)


class SweepCommand(BdwalkCommand):
    """ command that sweeps an experiment config over its grid

    Flags override single settings of the config. The fully resolved config
    is recorded in the manifest as ``spec``, so a replay runs exactly the
    same grid with the same seed. Subclasses implement ``base_config``. """

    def add_command_arguments(self, parser):
        self.add_option(parser, '--name')
        self.add_option(parser, '--seed', type=int, help="Seed of the sweep")
        self.add_option(parser, '--rho', type=float, nargs='+', help="ρ grid")
        self.add_option(parser, '--alpha', type=float, nargs='+', help="α grid")
        self.add_option(parser, '--beta', type=float, nargs='+', help="β grid")
        self.add_option(parser, '--cap', type=float, help="Upper bound on φ")
        self.add_option(parser, '--method', choices=('diagonal', 'diagonal-ratio'))
        self.add_option(parser, '--n-lo', dest='n_lo', type=int)
        self.add_option(parser, '--n-hi', dest='n_hi', type=int)
        self.add_option(parser, '--margin', type=float)
        self.add_option(
            parser,
            '--band',
            type=float,
            help="Distance from a boundary within which Inconclusive is expected",
        )
        self.add_option(
            parser, '--horizon-states', dest='horizon_states', type=int
        )
        self.add_option(
            parser,
            '--replicas',
            type=int,
            help="Simulated walks per grid point; 0 skips the simulation",
        )
        self.add_option(parser, '--horizon', type=int)
        self.add_option(parser, '--escape-level', dest='escape_level', type=int)
        self.add_option(parser, '--start-time', dest='start_time', type=int)
        self.add_option(parser, '--mode', choices=[m.value for m in Mode])
        self.add_option(
            parser,
            '--rate-convention',
            dest='rate_convention',
            choices=[c.value for c in RateConvention],
        )
        self.add_option(
            parser,
            '--evidence',
            action='store_true',
            default=False,
            help="Add the Monte Carlo evidence report",
        )
        self.add_option(
            parser, '--gnuplot', help="Also write the phase dataset to this file"
        )
        self.option_defaults['spec'] = None

    def base_config(self, options):
        """ The config dict the overrides apply to """
        raise NotImplementedError

    def build_spec(self, options):
        data = options.get('spec') or self.base_config(options)
        overrides = {
            name: options[name]
            for name in OVERRIDES
            if options.get(name) is not None
        }
        spec = parse_spec(apply_overrides(data, overrides))

        if spec.seed is None:
            spec.seed = int(SeedSequence().entropy % 2 ** 63)
            logger.info('No seed given, using %d', spec.seed)

        return spec

    def gnuplot_path(self, spec, options):
        """ Where the phase dataset goes, None if it is not asked for """
        path = options.get('gnuplot')
        if path or 'gnuplot' not in spec.outputs:
            return path

        path = default_path(self.command_name, 'dat')
        if not path:
            raise ConfigError(
                [('outputs', 'gnuplot needs --gnuplot or the OUTPUT_DIR setting')]
            )
        return path

    def compute(self, options):
        spec = self.build_spec(options)
        options['spec'] = spec.to_dict()
        options['seed'] = spec.seed
        path = self.gnuplot_path(spec, options)

        sweep = phase_sweep(spec, show_progress=not self.silent)
        result = {'sweep': sweep}

        if options.get('evidence'):
            result['evidence'] = evidence_report(sweep)

        if path:
            with open_output(path, self.stdout) as fp:
                sweep.write_gnuplot(fp)
            result['gnuplot'] = path

        return result

    def csv_rows(self, result):
        return list(CSV_FIELDS), result['sweep'].rows()
