from bdwalk.classifier.chains import chain_from_dict
from bdwalk.classifier.criteria import METHODS, classify
from bdwalk.core.management.basecmd import BdwalkCommand
from bdwalk.drift.functions import from_dict

import logging

logger = logging.getLogger(__name__)


class Command(BdwalkCommand):
    """ Classifies a drift function or a homogeneous chain """

    help = "Classifies a walk as recurrent or transient"

    def add_command_arguments(self, parser):
        self.add_drift_arguments(parser)
        self.add_chain_arguments(parser)

        self.add_option(
            parser,
            '--method',
            choices=METHODS,
            help="Criterion; diagonal for drifts and ratio for chains by default",
        )
        self.add_option(parser, '--n-lo', dest='n_lo', type=int)
        self.add_option(
            parser,
            '--n-hi',
            dest='n_hi',
            type=int,
            help="End of the scanned range; number of series terms for series",
        )
        self.add_option(parser, '--margin', type=float)

    def compute(self, options):
        if is_chain(options):
            target = chain_from_dict(self.chain_dict(options))
            method = options.get('method') or 'ratio'
        else:
            target = from_dict(self.drift_dict(options))
            method = options.get('method') or 'diagonal'

        verdict = classify(
            target,
            method,
            n_lo=options.get('n_lo'),
            n_hi=options.get('n_hi'),
            margin=options.get('margin'),
        )
        logger.info('%s: %s', target, verdict)

        return {'target': target.to_dict(), 'method': method, 'verdict': verdict}

    def csv_rows(self, result):
        verdict = result['verdict']
        row = {
            'method': result['method'],
            'label': verdict.label.value,
            'c': verdict.witness_c,
            'n0': verdict.witness_n0,
        }
        return list(row), [row]


def is_chain(options):
    return bool(
        options.get('chain')
        or options.get('symmetric')
        or options.get('c') is not None
        or (options.get('birth') is not None and options.get('death') is not None)
    )
