""" The ``bdwalk`` command line

``python -m bdwalk <subcommand>`` runs the management command of the same
name, so it is equivalent to ``./manage.py <subcommand>``. Only the
subcommands of the apps are exposed here.
"""

import os
import sys

import logging

logger = logging.getLogger(__name__)


SUBCOMMANDS = ('classify', 'simulate', 'oracle', 'sweep', 'example', 'validate')

USAGE = """usage: bdwalk <subcommand> [options]

subcommands:
  classify    classify a drift or chain as recurrent or transient
  simulate    simulate an ensemble of walks
  oracle      exact queries: hit, stationary, returns, sums
  sweep       classify every point of an experiment config
  example     run one of the worked examples 1 to 4
  validate    check that a drift is a valid model

Run "bdwalk <subcommand> --help" for the options of a subcommand.
"""

# exit status for invalid input, as used by the commands
INVALID_INPUT = 2


def main(argv=None):
    """ Runs a subcommand and returns its exit status

    0 on success, 2 for invalid input and 1 for runtime failures. """
    argv = sys.argv[1:] if argv is None else list(argv)

    if not argv or argv[0] in ('-h', '--help', 'help'):
        sys.stdout.write(USAGE)
        return 0 if argv else INVALID_INPUT

    if argv[0] not in SUBCOMMANDS:
        sys.stderr.write(
            'bdwalk: unknown subcommand {!r}\n\n{}'.format(argv[0], USAGE)
        )
        return INVALID_INPUT

    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'bdwalk.settings')
    from django.core.management import execute_from_command_line

    try:
        execute_from_command_line(['bdwalk'] + argv)

    except SystemExit as ex:
        # argparse and CommandError exit with their own status
        if ex.code is None:
            return 0
        if isinstance(ex.code, int):
            return ex.code
        sys.stderr.write('{}\n'.format(ex.code))
        return 1

    except Exception:
        logger.exception('bdwalk %s failed', argv[0])
        return 1

    return 0
