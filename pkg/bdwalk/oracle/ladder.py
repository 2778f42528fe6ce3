""" Gambler's-ruin probabilities from the ladder products π_n = Π μ_j/λ_j """

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from bdwalk.classifier.chains import ChainSpec
from bdwalk.classifier.criteria import karlin_mcgregor_partial_sums
from bdwalk.core.exceptions import ConfigError

import logging

logger = logging.getLogger(__name__)


# escape probabilities below this count as "no escape" at the horizon
ESCAPE_TOLERANCE = 1e-6

# escape(2b) / escape(b) must fall below this for the infinite-returns label
GEOMETRIC_DECAY = 0.9


@dataclass(frozen=True)
class HittingProblem:
    """ Start at k, absorb at the lower level a and the upper level b """

    chain: ChainSpec
    start: int
    lower: int
    upper: int

    def __post_init__(self):
        errors = []
        if not 0 <= self.lower:
            errors.append(('a', 'must be >= 0, got {!r}'.format(self.lower)))
        if not self.lower < self.upper:
            errors.append(('b', 'must be larger than a ({!r})'.format(self.lower)))
        if not self.lower <= self.start <= self.upper:
            errors.append(('k', 'must lie in [a, b], got {!r}'.format(self.start)))
        if errors:
            raise ConfigError(errors)

    def to_dict(self):
        return {
            'chain': self.chain.to_dict(),
            'k': self.start,
            'a': self.lower,
            'b': self.upper,
        }


def log_ladder(chain, lower, upper):
    """ log π_n for n = lower..upper−1, with π_lower = 1 """
    js = np.arange(lower + 1, upper, dtype=np.int64)
    if not len(js):
        return np.zeros(1)

    chain.checked_rates(js)
    return np.concatenate([[0.0], np.cumsum(chain.log_ratio(js))])


def hit_probability(problem):
    """ P(hit b before a | start k) = Σ_{n=a}^{k−1} π_n / Σ_{n=a}^{b−1} π_n

    The absorbing levels give exactly 0 and 1. """
    k, a, b = problem.start, problem.lower, problem.upper
    if k == a:
        return 0.0
    if k == b:
        return 1.0

    log_pi = log_ladder(problem.chain, a, b)
    numerator = logsumexp(log_pi[: k - a])
    denominator = logsumexp(log_pi)
    return float(np.exp(numerator - denominator))


def escape_probability(chain, b):
    """ P(hit b before 0 | start 1) """
    return hit_probability(HittingProblem(chain, 1, 0, b))


def partial_sum_escape(chain, b):
    """ 1 / (1 + S_{b−1}) from the Karlin–McGregor partial sums """
    if b < 2:
        raise ConfigError([('b', 'must be >= 2, got {!r}'.format(b))])
    sums = karlin_mcgregor_partial_sums(chain, b - 1)
    return float(1 / (1 + sums[-1]))


@dataclass(frozen=True)
class ReturnEstimate:
    """ Escape and return probabilities of one excursion from 0 """

    b: int
    escape: float
    escape_2b: float
    return_probability: float
    infinite_returns: bool
    decreasing: bool

    def to_dict(self):
        return {
            'b': self.b,
            'escape': self.escape,
            'escape_2b': self.escape_2b,
            'return_probability': self.return_probability,
            'infinite_returns': self.infinite_returns,
            'decreasing': self.decreasing,
        }


def expected_returns(chain, horizon_states):
    """ Probability of returning to 0 after one excursion, seen at level b

    ``infinite_returns`` is a diagnostic: the escape probability at b is
    below ESCAPE_TOLERANCE and still decays geometrically up to 2b. """
    b = int(horizon_states)
    if b < 2:
        raise ConfigError(
            [('horizon_states', 'must be >= 2, got {!r}'.format(horizon_states))]
        )

    escape = escape_probability(chain, b)
    escape_2b = escape_probability(chain, 2 * b)

    infinite = bool(
        escape < ESCAPE_TOLERANCE and escape_2b < GEOMETRIC_DECAY * escape
    )
    estimate = ReturnEstimate(
        b=b,
        escape=escape,
        escape_2b=escape_2b,
        return_probability=1 - escape,
        infinite_returns=infinite,
        decreasing=escape_2b <= escape,
    )
    logger.debug('expected_returns %s: %s', chain, estimate)
    return estimate
