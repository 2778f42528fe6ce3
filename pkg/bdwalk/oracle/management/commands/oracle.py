from bdwalk.classifier.chains import chain_from_dict
from bdwalk.classifier.criteria import karlin_mcgregor_partial_sums
from bdwalk.core.exceptions import ConfigError
from bdwalk.core.management.basecmd import BdwalkCommand
from bdwalk.oracle.ladder import HittingProblem, expected_returns, hit_probability
from bdwalk.oracle.stationary import balance_residual, stationary


QUERIES = ('hit', 'stationary', 'returns', 'sums')


class Command(BdwalkCommand):
    """ Exact computations for homogeneous birth-and-death chains """

    help = "Hitting probabilities, stationary distributions and partial sums"

    def add_command_arguments(self, parser):
        parser.add_argument('query', choices=QUERIES)
        self.add_chain_arguments(parser)

        self.add_option(parser, '--a', type=int, default=0, help="Lower level")
        self.add_option(parser, '--b', type=int, help="Upper level")
        self.add_option(parser, '--k', type=int, help="Start level")
        self.add_option(parser, '--n-trunc', dest='n_trunc', type=int, default=1000)
        self.add_option(
            parser,
            '--horizon-states',
            dest='horizon_states',
            type=int,
            default=1000,
        )
        self.add_option(parser, '--N', dest='N', type=int, default=1000)

    def resolve_options(self, options):
        resolved = super().resolve_options(options)
        resolved['query'] = options['query']
        return resolved

    def compute(self, options):
        chain = chain_from_dict(self.chain_dict(options))
        query = options['query']
        result = {'query': query, 'chain': chain.to_dict()}

        if query == 'hit':
            missing = [
                (name, 'required by hit')
                for name in ('b', 'k')
                if options.get(name) is None
            ]
            if missing:
                raise ConfigError(missing)

            problem = HittingProblem(chain, options['k'], options['a'], options['b'])
            result.update(problem.to_dict())
            result['probability'] = hit_probability(problem)

        elif query == 'stationary':
            P = stationary(chain, options['n_trunc'])
            result['distribution'] = P
            result['residual'] = balance_residual(P, chain)

        elif query == 'returns':
            result['returns'] = expected_returns(chain, options['horizon_states'])

        else:
            N = options['N']
            result['N'] = N
            result['partial_sums'] = karlin_mcgregor_partial_sums(chain, N)

        return result

    def csv_rows(self, result):
        query = result['query']

        if query == 'stationary':
            P = result['distribution']
            rows = ({'n': n, 'p': p} for n, p in enumerate(P.probabilities))
            return ['n', 'p'], rows

        if query == 'sums':
            sums = result['partial_sums']
            return ['m', 's'], ({'m': m, 's': s} for m, s in enumerate(sums, 1))

        if query == 'returns':
            row = result['returns'].to_dict()
            return list(row), [row]

        row = {k: result[k] for k in ('a', 'b', 'k', 'probability')}
        return list(row), [row]
