""" Stationary distributions of positive recurrent chains """

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from bdwalk.core.exceptions import ConfigError, NotNormalizable

import logging

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class StationaryDistribution:
    """ P_0..P_N of a chain truncated at N

    The masses are normalised including the estimated tail beyond N, so
    that Σ P_n lies in [1 − tail_bound, 1]. """

    probabilities: np.ndarray
    n_trunc: int
    tail_bound: float

    @property
    def total(self):
        return float(self.probabilities.sum())

    def __len__(self):
        return len(self.probabilities)

    def __getitem__(self, n):
        return self.probabilities[n]

    def to_dict(self):
        return {
            'n_trunc': self.n_trunc,
            'tail_bound': self.tail_bound,
            'total': self.total,
            'probabilities': self.probabilities,
        }


def log_masses(chain, n_trunc):
    """ log of the unnormalised masses Π_{k=1}^{n} λ_{k−1}/μ_k, n = 0..N """
    ns = np.arange(0, n_trunc + 2, dtype=np.int64)
    birth, death = chain.checked_rates(ns)
    terms = np.log(birth[:-2]) - np.log(death[1:-1])
    return np.concatenate([[0.0], np.cumsum(terms)]), birth, death


def stationary(chain, n_trunc):
    """ P_n ∝ Π_{k=1}^{n} λ_{k−1}/μ_k on 0..n_trunc

    Raises NotNormalizable when the mass of the last octave of the
    truncation range is not smaller than the mass of the octave before. """
    n_trunc = int(n_trunc)
    if n_trunc < 8:
        raise ConfigError([('n_trunc', 'must be >= 8, got {!r}'.format(n_trunc))])

    log_p, birth, death = log_masses(chain, n_trunc)

    previous = logsumexp(log_p[n_trunc // 4 + 1 : n_trunc // 2 + 1])
    last = logsumexp(log_p[n_trunc // 2 + 1 :])
    if last >= previous:
        growth = float(np.exp(min(last - previous, 700.0)))
        raise NotNormalizable(
            'stationary masses do not decay over the last octave up to {}'.format(
                n_trunc
            ),
            diagnostics={
                'n_trunc': n_trunc,
                'log_mass_previous_octave': float(previous),
                'log_mass_last_octave': float(last),
                'growth': growth,
            },
        )

    # geometric continuation of the masses beyond the truncation level
    q = birth[n_trunc] / death[n_trunc + 1]
    if q < 1:
        log_tail = log_p[-1] + np.log(q) - np.log1p(-q)
    else:
        log_tail = last

    log_total = np.logaddexp(logsumexp(log_p), log_tail)
    probabilities = np.exp(log_p - log_total)
    tail_bound = float(np.exp(log_tail - log_total))

    logger.debug('stationary %s: tail bound %g', chain, tail_bound)
    return StationaryDistribution(probabilities, n_trunc, tail_bound)


def balance_residual(P, chain):
    """ Largest residual of the balance equations

    Interior equations 0 = P_{n+1}μ_{n+1} + P_{n−1}λ_{n−1} − P_n(λ_n + μ_n)
    for n = 1..N−1 and the boundary equation 0 = P_1μ_1 − P_0λ_0. """
    P = np.asarray(getattr(P, 'probabilities', P), dtype=float)
    if len(P) < 2:
        raise ConfigError([('P', 'needs at least two states')])

    ns = np.arange(len(P), dtype=np.int64)
    birth, death = chain.rates(ns)

    boundary = abs(P[1] * death[1] - P[0] * birth[0])
    if len(P) == 2:
        return float(boundary)

    interior = (
        P[2:] * death[2:]
        + P[:-2] * birth[:-2]
        - P[1:-1] * (birth[1:-1] + death[1:-1])
    )
    return float(max(boundary, np.abs(interior).max()))
