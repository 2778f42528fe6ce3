import logging

from numpy.random import SeedSequence

from django.core.management.base import BaseCommand, CommandError

from bdwalk.core.config import check_keys, read_json_config
from bdwalk.core.exceptions import ConfigError, DomainError, InvalidChain, describe
from bdwalk.core.output import (
    FORMATS,
    build_manifest,
    default_path,
    open_output,
    read_manifest,
    write_csv,
    write_json,
)
from bdwalk.utils import to_jsonable

logger = logging.getLogger(__name__)


# exit status for invalid input; runtime failures exit with 1
INVALID_INPUT = 2
RUNTIME_FAILURE = 1

VERBOSITY_LEVELS = {0: logging.WARNING, 2: logging.INFO, 3: logging.DEBUG}

DRIFT_OPTIONS = (
    'family',
    'rho',
    'alpha',
    'beta',
    'scale',
    'cap',
    'value',
    'path',
    'tail',
)

CHAIN_OPTIONS = ('c', 'shift', 'birth', 'death')


class BdwalkCommand(BaseCommand):
    """ command that computes a result and writes it with a run manifest

    Options come from three layers: the command's defaults, a ``--config``
    file (or the manifest of ``--replay``) and the flags given on the command
    line; flags win. Subclasses add their options with ``add_option`` and
    implement ``compute(options)``. """

    uses_seed = False

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.option_defaults = {}

    @property
    def command_name(self):
        return self.__module__.rsplit('.', 1)[-1]

    def add_option(self, parser, *flags, default=None, **kwargs):
        action = parser.add_argument(*flags, default=None, **kwargs)
        self.option_defaults[action.dest] = default
        return action

    def add_arguments(self, parser):
        parser.add_argument(
            '--config',
            action='store',
            dest='config',
            help="JSON file with options; flags given on the command line win",
        )

        parser.add_argument(
            '--replay',
            action='store',
            dest='replay',
            help="Re-run from the manifest embedded in an earlier result file",
        )

        parser.add_argument(
            '--output',
            '-o',
            action='store',
            dest='output',
            help="Result file; defaults to OUTPUT_DIR or stdout",
        )

        parser.add_argument(
            '--format',
            action='store',
            dest='format',
            choices=FORMATS,
            default='json',
            help="Format of the result",
        )

        parser.add_argument(
            '--silent',
            action='store_true',
            dest='silent',
            default=False,
            help="Don't show progress",
        )

        if self.uses_seed:
            self.add_option(
                parser, '--seed', type=int, help="Master seed of all random streams"
            )

        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def add_drift_arguments(self, parser):
        self.add_option(
            parser,
            '--family',
            help="Drift family: power_law, linear, boundary, exponential, "
            "constant or tabulated",
        )
        self.add_option(parser, '--rho', type=float)
        self.add_option(parser, '--alpha', type=float)
        self.add_option(parser, '--beta', type=float)
        self.add_option(parser, '--scale', type=float)
        self.add_option(parser, '--cap', type=float, help="Upper bound on φ")
        self.add_option(parser, '--value', type=float, help="φ of the constant family")
        self.add_option(parser, '--path', help="CSV file n,t,phi of a tabulated drift")
        self.add_option(parser, '--tail', help="Tail rule of a tabulated drift")
        self.option_defaults['drift'] = None

    def add_chain_arguments(self, parser):
        self.add_option(
            parser,
            '--chain',
            help="Homogeneous chain: constant, symmetric, ratio or tabulated",
        )
        self.add_option(
            parser,
            '--symmetric',
            action='store_true',
            help="Shortcut for the chain with λ_n = μ_n = 1/2",
        )
        self.add_option(parser, '--c', type=float, help="c of the ratio chain")
        self.add_option(parser, '--shift', type=float, help="shift of the ratio chain")
        self.add_option(parser, '--birth', type=float)
        self.add_option(parser, '--death', type=float)

    def resolve_options(self, options):
        """ Merges defaults, config file or manifest, and flags """
        resolved = dict(self.option_defaults)

        if options.get('replay'):
            manifest = read_manifest(options['replay'])
            if manifest.get('command') != self.command_name:
                raise ConfigError(
                    [
                        (
                            'replay',
                            'manifest belongs to command {!r}'.format(
                                manifest.get('command')
                            ),
                        )
                    ]
                )
            resolved.update(manifest.get('options', {}))

        if options.get('config'):
            data = read_json_config(options['config'])
            check_keys(data, self.option_defaults)
            resolved.update(data)

        for name in self.option_defaults:
            if options.get(name) is not None:
                resolved[name] = options[name]

        if self.uses_seed and resolved.get('seed') is None:
            resolved['seed'] = int(SeedSequence().entropy % 2 ** 63)
            logger.info('No seed given, using %d', resolved['seed'])

        return resolved

    def drift_dict(self, options):
        """ Config representation of the drift named by the options """
        data = dict(options.get('drift') or {})
        for name in DRIFT_OPTIONS:
            if options.get(name) is not None:
                data[name] = options[name]

        if not data.get('family'):
            raise ConfigError([('family', 'a drift family is required')])

        return data

    def chain_dict(self, options):
        """ Config representation of the chain named by the options """
        chain = options.get('chain')
        data = dict(chain) if isinstance(chain, dict) else {}
        if isinstance(chain, str):
            data['kind'] = chain

        if options.get('symmetric'):
            data['kind'] = 'symmetric'

        for name in CHAIN_OPTIONS:
            if options.get(name) is not None:
                data[name] = options[name]

        if not data.get('kind'):
            if 'c' in data:
                data['kind'] = 'ratio'
            elif 'birth' in data and 'death' in data:
                data['kind'] = 'constant'
            else:
                raise ConfigError([('chain', 'a chain kind is required')])

        return data

    def compute(self, options):
        """ Returns the result for the resolved options """
        raise NotImplementedError

    def csv_rows(self, result):
        """ Returns (fieldnames, rows) of the CSV representation """
        row = {
            k: v
            for k, v in to_jsonable(result).items()
            if not isinstance(v, (dict, list))
        }
        return list(row), [row]

    def handle(self, *args, **options):
        self.configure_logging(options.get('verbosity', 1))
        self.silent = options.get('silent')

        try:
            resolved = self.resolve_options(options)
            result = self.compute(resolved)
            self.write_result(result, resolved, options)

        except (ConfigError, DomainError, InvalidChain) as ex:
            raise CommandError(describe(ex), returncode=INVALID_INPUT)

        except CommandError:
            raise

        except Exception as ex:
            logger.exception('%s failed', self.command_name)
            raise CommandError(describe(ex), returncode=RUNTIME_FAILURE)

    def write_result(self, result, resolved, options):
        fmt = options.get('format') or 'json'
        path = options.get('output') or default_path(self.command_name, fmt)
        manifest = build_manifest(self.command_name, resolved, resolved.get('seed'))

        with open_output(path, self.stdout) as fp:
            if fmt == 'csv':
                fieldnames, rows = self.csv_rows(result)
                write_csv(fp, manifest, fieldnames, rows)
            else:
                write_json(fp, manifest, result)

    def configure_logging(self, verbosity):
        level = VERBOSITY_LEVELS.get(verbosity)
        if level is not None:
            logging.getLogger('bdwalk').setLevel(level)
