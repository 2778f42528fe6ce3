""" Recurrence / transience criteria

The diagonal test compares s(n) = 4n·φ(n, n²) with 1; the ratio test and Raabe's
test compare n·(λ_n/μ_n − 1) with 1. "There exist c and n₀" is operationalised
as a tail scan: for every candidate n₀ on a geometric grid the sup and inf of
the statistic over [n₀, n_hi] are taken, and the smallest n₀ whose bound
clears 1 gives the verdict.
"""

import numpy as np
from scipy.special import logsumexp

from django.conf import settings

from bdwalk.classifier.chains import ChainSpec, DiagonalChain
from bdwalk.classifier.verdicts import Label, Verdict
from bdwalk.core.exceptions import ConfigError
from bdwalk.drift.functions import DriftFunction, diagonal_statistic
from bdwalk.utils import geometric_grid, log_spaced_integers

import logging

logger = logging.getLogger(__name__)


# absolute tolerance when comparing a statistic against exactly 1
TOLERANCE = 1e-9

# smallest growth of the partial sums over the last octave that still counts
# as divergent
DIVERGENT_GROWTH = 0.9


def _check_range(n_lo, n_hi, margin):
    errors = []
    if not 1 <= n_lo:
        errors.append(('n_lo', 'must be >= 1, got {!r}'.format(n_lo)))
    if not n_lo < n_hi:
        errors.append(('n_hi', 'must be larger than n_lo ({!r})'.format(n_lo)))
    if margin is not None and not margin > 0:
        errors.append(('margin', 'must be positive, got {!r}'.format(margin)))
    if errors:
        raise ConfigError(errors)


def _defaults(n_lo, n_hi, margin):
    n_lo = settings.DEFAULT_N_LO if n_lo is None else int(n_lo)
    n_hi = settings.DEFAULT_N_HI if n_hi is None else int(n_hi)
    margin = settings.DEFAULT_MARGIN if margin is None else float(margin)
    _check_range(n_lo, n_hi, margin)
    return n_lo, n_hi, margin


def scan_points(n_lo, n_hi):
    """ Log-spaced points over [n_lo, n_hi], dense in the last two octaves

    >>> scan_points(4, 16).tolist()
    [4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16]
    """
    sparse = log_spaced_integers(n_lo, n_hi)
    dense = np.arange(max(n_lo, n_hi // 4), n_hi + 1, dtype=np.int64)
    return np.union1d(np.asarray(sparse, dtype=np.int64), dense)


def candidate_starts(n_lo, n_hi):
    """ Candidate n₀ values, doubling from n_lo up to n_hi / 4

    >>> candidate_starts(16, 1024)
    [16, 32, 64, 128, 256]

    >>> candidate_starts(10, 20)
    [10]
    """
    return geometric_grid(n_lo, max(n_lo, n_hi // 4))


def tail_bounds(ns, values, starts):
    """ sup and inf of ``values`` over every tail [n₀, max(ns)] """
    suffix_max = np.maximum.accumulate(values[::-1])[::-1]
    suffix_min = np.minimum.accumulate(values[::-1])[::-1]

    stats = []
    for n0 in starts:
        idx = int(np.searchsorted(ns, n0))
        stats.append(
            {
                'n0': int(n0),
                'sup': float(suffix_max[idx]),
                'inf': float(suffix_min[idx]),
            }
        )
    return stats


def _tail_verdict(stats, recurrent_bound, transient_bound, method, **extra):
    """ First tail whose sup or inf clears the bounds decides the label """
    for row in stats:
        if row['sup'] <= recurrent_bound:
            return Verdict(
                Label.RECURRENT,
                witness_c=row['sup'],
                witness_n0=row['n0'],
                diagnostics=dict(method=method, stats=stats, **extra),
            )

        if row['inf'] >= transient_bound:
            return Verdict(
                Label.TRANSIENT,
                witness_c=row['inf'],
                witness_n0=row['n0'],
                diagnostics=dict(method=method, stats=stats, **extra),
            )

    return Verdict.inconclusive(method=method, stats=stats, **extra)


def classify_diagonal(f, n_lo=None, n_hi=None, margin=None):
    """ Diagonal test of a time-inhomogeneous walk

    Recurrent if s(n) = 4n·φ(n, n²) ≤ c ≤ 1 − margin on a tail, Transient if
    s(n) ≥ c ≥ 1 + margin on a tail, Inconclusive otherwise. """
    n_lo, n_hi, margin = _defaults(n_lo, n_hi, margin)

    ns = scan_points(n_lo, n_hi)
    s = np.asarray(diagonal_statistic(f, ns))
    stats = tail_bounds(ns, s, candidate_starts(n_lo, n_hi))

    verdict = _tail_verdict(
        stats,
        1 - margin,
        1 + margin,
        'diagonal',
        margin=margin,
        n_lo=n_lo,
        n_hi=n_hi,
    )
    logger.debug('classify_diagonal %s: %s', f, verdict)
    return verdict


def ratio_statistic(chain, n):
    """ r(n) = n·(λ_n/μ_n − 1) """
    n = np.asarray(n, dtype=float)
    return n * chain.excess(n)


def classify_ratio(chain, n_lo=None, n_hi=None, margin=None):
    """ Ratio test for homogeneous chains

    Recurrent if r(n) ≤ 1 on a tail, the recurrence branch with c = 1 and no
    margin; Transient if r(n) ≥ c ≥ 1 + margin on a tail. """
    n_lo, n_hi, margin = _defaults(n_lo, n_hi, margin)

    ns = scan_points(n_lo, n_hi)
    chain.checked_rates(ns)
    r = ratio_statistic(chain, ns)
    stats = tail_bounds(ns, r, candidate_starts(n_lo, n_hi))

    verdict = _tail_verdict(
        stats,
        1 + TOLERANCE,
        1 + margin,
        'ratio',
        margin=margin,
        n_lo=n_lo,
        n_hi=n_hi,
    )

    if verdict.recurrent:
        verdict.witness_c = min(verdict.witness_c, 1.0)

    logger.debug('classify_ratio %s: %s', chain, verdict)
    return verdict


def log_products(chain, N):
    """ log a_n = Σ_{k=1}^{n} log(μ_k / λ_k) for n = 1..N """
    ks = np.arange(1, N + 1, dtype=np.int64)
    chain.checked_rates(ks)
    return np.cumsum(chain.log_ratio(ks))


def log_partial_sums(chain, N):
    """ log S_m for m = 1..N, accumulated in log-space """
    return np.logaddexp.accumulate(log_products(chain, N))


def karlin_mcgregor_partial_sums(chain, N):
    """ S_m = Σ_{n=1}^{m} Π_{k=1}^{n} μ_k/λ_k for m = 1..N

    >>> from bdwalk.classifier.chains import ConstantChain
    >>> karlin_mcgregor_partial_sums(ConstantChain(0.5, 0.5), 4).round(12).tolist()
    [1.0, 2.0, 3.0, 4.0]
    """
    if not N >= 1:
        raise ConfigError([('N', 'must be >= 1, got {!r}'.format(N))])

    with np.errstate(over='ignore'):
        return np.exp(log_partial_sums(chain, int(N)))


def raabe_statistic(chain, n):
    """ R(n) = n·(a_n/a_{n+1} − 1) = n·(λ_{n+1}/μ_{n+1} − 1) """
    n_arr = np.asarray(n, dtype=float)
    if np.any(n_arr < 1):
        raise ConfigError([('n', 'must be >= 1')])

    chain.checked_rates(n_arr + 1)
    value = n_arr * chain.excess(n_arr + 1)
    return float(value) if np.ndim(value) == 0 else value


def raabe_from_products(chain, n_max):
    """ R(n) for n = 1..n_max computed from the products a_n themselves """
    log_a = log_products(chain, n_max + 1)
    ns = np.arange(1, n_max + 1, dtype=float)
    return ns * np.expm1(log_a[:-1] - log_a[1:])


def partial_sum_growth(log_a):
    """ Mass of the last octave of the series relative to the one before """
    N = len(log_a)
    previous = logsumexp(log_a[N // 4 : N // 2])
    last = logsumexp(log_a[N // 2 : N])
    with np.errstate(over='ignore'):
        return float(np.exp(last - previous))


def classify_series(chain, N=None, margin=None, n_lo=None):
    """ Raabe's test on the product series, checked against its partial sums

    A conclusive Raabe tail is only reported when the growth of the partial
    sums over the last octave agrees with it: a convergent series loses
    mass from octave to octave, a divergent one does not. """
    N = settings.DEFAULT_N_HI if N is None else int(N)
    if not N >= 100:
        raise ConfigError([('N', 'must be >= 100, got {!r}'.format(N))])

    n_lo = settings.DEFAULT_N_LO if n_lo is None else int(n_lo)
    n_lo = min(n_lo, N // 8)
    _, _, margin = _defaults(n_lo, N - 1, margin)

    ns = scan_points(n_lo, N - 1)
    R = raabe_statistic(chain, ns)
    stats = tail_bounds(ns, R, candidate_starts(n_lo, N - 1))

    growth = partial_sum_growth(log_products(chain, N))
    extra = dict(margin=margin, N=N, growth=growth)

    verdict = _tail_verdict(stats, 1 + TOLERANCE, 1 + margin, 'series', **extra)

    if verdict.recurrent and growth < DIVERGENT_GROWTH:
        logger.info('partial sums of %s converge against Raabe tail', chain)
        return Verdict.inconclusive(
            method='series', stats=stats, conflict=True, **extra
        )

    if verdict.transient and growth >= 1:
        logger.info('partial sums of %s diverge against Raabe tail', chain)
        return Verdict.inconclusive(
            method='series', stats=stats, conflict=True, **extra
        )

    if verdict.recurrent:
        verdict.witness_c = min(verdict.witness_c, 1.0)

    return verdict


METHODS = ('diagonal', 'ratio', 'series', 'diagonal-ratio')


def classify(target, method='diagonal', n_lo=None, n_hi=None, margin=None):
    """ Dispatches to the criterion named by ``method``

    Drift functions accept ``diagonal`` and ``diagonal-ratio`` (the ratio test on
    the diagonal chain λ_n = 1/2 + φ(n, n²)); chains accept ``ratio`` and
    ``series``. """
    if method not in METHODS:
        raise ConfigError(
            [('method', 'must be one of {}, got {!r}'.format(METHODS, method))]
        )

    if isinstance(target, DriftFunction):
        if method == 'diagonal':
            return classify_diagonal(target, n_lo, n_hi, margin)

        chain = DiagonalChain(target)
        if method == 'diagonal-ratio':
            method = 'ratio'

    elif isinstance(target, ChainSpec):
        if method in ('diagonal', 'diagonal-ratio'):
            message = '{!r} needs a drift function'.format(method)
            raise ConfigError([('method', message)])
        chain = target

    else:
        raise TypeError('can not classify {!r}'.format(target))

    if method == 'ratio':
        return classify_ratio(chain, n_lo, n_hi, margin)

    return classify_series(chain, n_hi, margin, n_lo)
