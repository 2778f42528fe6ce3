""" Drift functions φ(n, t) of the ±1 walk and the rates they induce

A walk in state n ≥ 1 at time t steps up with probability 1/2 + φ(n, t) and
down with probability 1/2 − φ(n, t); from state 0 it always steps up. Time is
a positive real everywhere, so the same function serves the discrete walk and
its continuous-time embedding.
"""

from collections import namedtuple
from dataclasses import dataclass, field

import numpy as np

from bdwalk.core.exceptions import ConfigError, DomainError

import logging

logger = logging.getLogger(__name__)


HALF = 0.5


class DriftFunction(object):
    """ Base class of the drift families

    Subclasses implement ``formula(n, t)`` for arrays with n ≥ 1. Values at
    n = 0 are 0 for every family: the step out of state 0 is forced. """

    family = None

    cap = None

    def formula(self, n, t):
        raise NotImplementedError

    def evaluate(self, n, t, check=True):
        n_arr = np.asarray(n, dtype=float)
        t_arr = np.asarray(t, dtype=float)

        with np.errstate(over='ignore', divide='ignore', invalid='ignore'):
            values = self.formula(n_arr, t_arr)
            values = np.where(n_arr == 0, 0.0, values)

        if self.cap is not None:
            values = np.minimum(values, self.cap)

        if check:
            _check_domain(values, n_arr, t_arr)

        if np.ndim(values) == 0:
            return float(values)
        return values

    __call__ = evaluate

    def to_dict(self):
        raise NotImplementedError

    def __str__(self):
        params = ', '.join(
            '{}={}'.format(k, v) for k, v in self.to_dict().items() if k != 'family'
        )
        return '{}({})'.format(self.family, params)


def _check_domain(values, n, t):
    values, n, t = np.broadcast_arrays(values, n, t)
    invalid = ~((values >= 0) & (values < HALF))
    if not invalid.any():
        return

    idx = np.unravel_index(np.argmax(invalid), invalid.shape)
    bad_n, bad_t, bad_value = float(n[idx]), float(t[idx]), float(values[idx])
    raise DomainError(
        'phi({:g}, {:g}) = {!r} is outside [0, 1/2)'.format(bad_n, bad_t, bad_value),
        n=bad_n,
        t=bad_t,
        value=bad_value,
    )


def _check_cap(cap):
    if cap is not None and not 0 < cap < HALF:
        raise ConfigError([('cap', 'must lie in (0, 1/2), got {!r}'.format(cap))])


@dataclass(frozen=True)
class PowerLaw(DriftFunction):
    """ φ(n, t) = scale · ρ · nᵅ / tᵝ """

    rho: float
    alpha: float
    beta: float
    scale: float = 1.0
    cap: float = None

    family = 'power_law'

    def __post_init__(self):
        errors = []
        if not self.rho > 0:
            errors.append(('rho', 'must be positive, got {!r}'.format(self.rho)))
        if not self.beta >= 0:
            # decreasing in t requires beta >= 0
            errors.append(('beta', 'must be >= 0, got {!r}'.format(self.beta)))
        if not self.scale > 0:
            errors.append(('scale', 'must be positive, got {!r}'.format(self.scale)))
        if errors:
            raise ConfigError(errors)
        _check_cap(self.cap)

    @classmethod
    def linear(cls, rho, cap=None):
        """ The walk with φ(n, t) = ρn / (2t) """
        return cls(rho=rho, alpha=1.0, beta=1.0, scale=HALF, cap=cap)

    @classmethod
    def boundary(cls, rho, alpha, cap=None):
        """ φ(n, t) = ρ nᵅ / t^((1+α)/2), on the curve α = 2β − 1 """
        return cls(rho=rho, alpha=alpha, beta=(1 + alpha) / 2, cap=cap)

    def formula(self, n, t):
        if self.alpha == 1:
            num = n
        elif self.alpha == 0:
            num = np.ones_like(n)
        else:
            num = np.power(n, self.alpha)

        if self.beta == 1:
            den = t
        elif self.beta == 0:
            den = np.ones_like(t)
        else:
            den = np.power(t, self.beta)

        return (self.scale * self.rho) * num / den

    def to_dict(self):
        return {
            'family': self.family,
            'rho': self.rho,
            'alpha': self.alpha,
            'beta': self.beta,
            'scale': self.scale,
            'cap': self.cap,
        }


@dataclass(frozen=True)
class Exponential(DriftFunction):
    """ φ(n, t) = exp(αn − βt) """

    alpha: float
    beta: float
    cap: float = None

    family = 'exponential'

    def __post_init__(self):
        if not self.beta > 0:
            message = 'must be positive, got {!r}'.format(self.beta)
            raise ConfigError([('beta', message)])
        _check_cap(self.cap)

    def formula(self, n, t):
        return np.exp(self.alpha * n - self.beta * t)

    def to_dict(self):
        return {
            'family': self.family,
            'alpha': self.alpha,
            'beta': self.beta,
            'cap': self.cap,
        }


@dataclass(frozen=True)
class Constant(DriftFunction):
    """ φ(n, t) = v for every n ≥ 1 """

    value: float

    family = 'constant'

    def formula(self, n, t):
        return np.full(np.broadcast(n, t).shape, float(self.value))

    def to_dict(self):
        return {'family': self.family, 'value': self.value}


TAIL_RULES = ('constant', 'zero')


@dataclass(frozen=True, eq=False)
class Tabulated(DriftFunction):
    """ φ looked up at the nearest grid point below (n, t)

    Beyond the last row (large n) the tail rule applies: ``constant`` keeps
    the last row, ``zero`` returns 0. Beyond the last column (large t) the
    last column is kept, arguments below the grid use its first row or
    column. """

    ns: np.ndarray
    ts: np.ndarray
    values: np.ndarray
    tail: str = 'constant'
    source: dict = field(default_factory=dict)

    family = 'tabulated'

    def __post_init__(self):
        if self.tail not in TAIL_RULES:
            raise ConfigError(
                [('tail', 'must be one of {}, got {!r}'.format(TAIL_RULES, self.tail))]
            )
        if self.values.shape != (len(self.ns), len(self.ts)):
            raise ConfigError([('table', 'values do not match the (n, t) grid')])

    @classmethod
    def from_rows(cls, rows, tail='constant', source=None):
        """ Builds the table from (n, t, phi) rows covering a full grid """
        rows = np.asarray(rows, dtype=float).reshape(-1, 3)
        ns = np.unique(rows[:, 0])
        ts = np.unique(rows[:, 1])

        values = np.full((len(ns), len(ts)), np.nan)
        i = np.searchsorted(ns, rows[:, 0])
        j = np.searchsorted(ts, rows[:, 1])
        values[i, j] = rows[:, 2]

        if np.isnan(values).any():
            missing = int(np.isnan(values).sum())
            raise ConfigError(
                [('table', '{} (n, t) cells of the grid are missing'.format(missing))]
            )

        return cls(ns=ns, ts=ts, values=values, tail=tail, source=source or {})

    @classmethod
    def from_csv(cls, path, tail='constant'):
        """ Loads a table from a CSV file with the header ``n,t,phi`` """
        rows = read_table(path)
        source = {'path': str(path)}
        return cls.from_rows(rows, tail=tail, source=source)

    @classmethod
    def homogeneous(cls, chain, n_max, tail='constant'):
        """ Time-independent table of a homogeneous birth-and-death chain

        φ_n = (λ_n − μ_n) / (2(λ_n + μ_n)), so that the walk's up-probability
        1/2 + φ_n equals λ_n / (λ_n + μ_n). """
        ns = np.arange(1, n_max + 1, dtype=float)
        birth, death = chain.rates(ns)
        phi = (birth - death) / (2 * (birth + death))
        source = {'chain': chain.to_dict(), 'n_max': n_max}
        return cls(
            ns=ns,
            ts=np.array([1.0]),
            values=phi.reshape(-1, 1),
            tail=tail,
            source=source,
        )

    def formula(self, n, t):
        n, t = np.broadcast_arrays(n, t)
        i = np.clip(np.searchsorted(self.ns, n, side='right') - 1, 0, None)
        j = np.clip(np.searchsorted(self.ts, t, side='right') - 1, 0, None)
        values = self.values[i, j]

        if self.tail == 'zero':
            values = np.where(n > self.ns[-1], 0.0, values)

        return values

    def to_dict(self):
        data = {'family': self.family, 'tail': self.tail}
        if self.source:
            data.update(self.source)
        else:
            rows = [
                [n, t, self.values[i, j]]
                for i, n in enumerate(self.ns)
                for j, t in enumerate(self.ts)
            ]
            data['rows'] = rows
        return data


def read_table(path):
    """ The (n, t, phi) rows of a CSV file with the header ``n,t,phi`` """
    try:
        data = np.genfromtxt(path, delimiter=',', names=True, dtype=float)
    except (OSError, ValueError) as ex:
        raise ConfigError([('path', 'could not read {}: {}'.format(path, ex))])

    names = data.dtype.names or ()
    if tuple(names) != ('n', 't', 'phi'):
        raise ConfigError([('path', 'expected columns n,t,phi in {}'.format(path))])

    return np.column_stack([np.atleast_1d(data[name]) for name in names])


def unordered_rows(rows):
    """ Indices of rows not strictly after their predecessor in (n, t) order

    >>> unordered_rows([[1, 1, 0.1], [1, 10, 0.1], [2, 1, 0.1]])
    []
    >>> unordered_rows([[1, 10, 0.1], [1, 1, 0.1], [1, 1, 0.2]])
    [1, 2]
    """
    rows = np.asarray(rows, dtype=float).reshape(-1, 3)
    n, t = rows[1:, 0], rows[1:, 1]
    prev_n, prev_t = rows[:-1, 0], rows[:-1, 1]
    ordered = (n > prev_n) | ((n == prev_n) & (t > prev_t))
    return [int(i) + 1 for i in np.nonzero(~ordered)[0]]


def from_dict(data):
    """ Builds a drift function from its config representation """
    data = dict(data)
    family = data.pop('family', None)
    cap = data.pop('cap', None)

    try:
        if family == 'power_law':
            return PowerLaw(
                rho=float(data['rho']),
                alpha=float(data['alpha']),
                beta=float(data['beta']),
                scale=float(data.get('scale', 1.0)),
                cap=cap,
            )

        if family == 'linear':
            return PowerLaw.linear(float(data['rho']), cap=cap)

        if family == 'boundary':
            return PowerLaw.boundary(float(data['rho']), float(data['alpha']), cap=cap)

        if family == 'exponential':
            return Exponential(
                alpha=float(data['alpha']), beta=float(data['beta']), cap=cap
            )

        if family == 'constant':
            return Constant(value=float(data['value']))

        if family == 'tabulated':
            return _tabulated_from_dict(data)

    except KeyError as ke:
        raise ConfigError([(ke.args[0], 'required by family {!r}'.format(family))])

    raise ConfigError([('family', 'unknown drift family {!r}'.format(family))])


def _tabulated_from_dict(data):
    tail = data.get('tail', 'constant')

    if data.get('path'):
        return Tabulated.from_csv(data['path'], tail=tail)

    if data.get('chain'):
        from bdwalk.classifier.chains import chain_from_dict

        chain = chain_from_dict(data['chain'])
        return Tabulated.homogeneous(chain, int(data['n_max']), tail=tail)

    if data.get('rows'):
        return Tabulated.from_rows(data['rows'], tail=tail)

    raise ConfigError([('path', 'tabulated drift needs a path, chain or rows')])


def evaluate(f, n, t):
    """ φ(n, t); raises DomainError outside [0, 1/2)

    >>> evaluate(PowerLaw(rho=0.5, alpha=1, beta=1), 4, 16)
    0.125
    >>> evaluate(Constant(0), 7, 3)
    0.0
    """
    return f.evaluate(n, t)


def diagonal(f, n):
    """ φ(n, n²), the quantity compared against c/(4n)

    >>> diagonal(PowerLaw.linear(0.5), 10)
    0.025
    """
    n = np.asarray(n, dtype=float)
    return f.evaluate(n, n * n)


class Violation(namedtuple('Violation', 'n t value invariant')):
    """ A sampled (n, t) at which a drift function breaks an assumption """

    RANGE = 'range'
    MONOTONE = 'monotone'

    def to_dict(self):
        return {
            'n': self.n,
            't': self.t,
            'value': self.value,
            'invariant': self.invariant,
        }


def sample_times(t_min, t_max, ratio=2):
    """ Geometric grid of times from t_min to t_max, both included

    >>> sample_times(1, 10)
    [1.0, 2.0, 4.0, 8.0, 10.0]
    """
    times = []
    t = float(t_min)
    while t < t_max:
        times.append(t)
        t *= ratio
    times.append(float(t_max))
    return times


def validate(f, n_max, t_max, wedge=True):
    """ Samples the assumptions on φ on {1..n_max} × geometric t ≤ t_max

    Returns a list of violations; it is empty iff 0 ≤ φ < 1/2 holds and φ is
    non-increasing in t at every sampled point. With ``wedge`` only times
    t ≥ n are sampled, the region in which the walk lives. """
    violations = []

    for n in range(1, int(n_max) + 1):
        t_min = max(1.0, float(n)) if wedge else 1.0
        if t_min > t_max:
            continue

        times = np.array(sample_times(t_min, t_max))
        values = f.evaluate(np.full_like(times, n), times, check=False)

        for t, value in zip(times, values):
            if not 0 <= value < HALF:
                violations.append(Violation(n, float(t), float(value), Violation.RANGE))

        increases = np.nonzero(values[1:] > values[:-1])[0]
        for idx in increases:
            violations.append(
                Violation(
                    n, float(times[idx + 1]), float(values[idx + 1]), Violation.MONOTONE
                )
            )

    if violations:
        logger.info('%d violations found for %s', len(violations), f)

    return violations


class RateSchedule(object):
    """ Birth and death rates λ = 1/2 + φ and μ = 1/2 − φ of a drift

    The death rate is computed as 1 − λ so that λ + μ = 1 holds exactly. In
    state 0 the walk is pushed up with rate 1. """

    def __init__(self, drift):
        self.drift = drift

    def birth(self, n, tau):
        n = np.asarray(n, dtype=float)
        value = np.where(n == 0, 1.0, HALF + np.asarray(self.drift.evaluate(n, tau)))
        return float(value) if np.ndim(value) == 0 else value

    def death(self, n, tau):
        value = 1.0 - np.asarray(self.birth(n, tau))
        return float(value) if np.ndim(value) == 0 else value

    def ratio(self, n, tau):
        """ λ_{n,τ} / μ_{n,τ} for n ≥ 1 """
        return self.birth(n, tau) / self.death(n, tau)


def diagonal_ratio(f, n):
    """ λ_{n,n²} / μ_{n,n²} = (1 + 2φ) / (1 − 2φ) with φ = φ(n, n²) """
    n = np.asarray(n, dtype=float)
    return RateSchedule(f).ratio(n, n * n)


def diagonal_statistic(f, n):
    """ s(n) = 4n · φ(n, n²) """
    n = np.asarray(n, dtype=float)
    return 4 * n * diagonal(f, n)


def expansion_error(f, n):
    """ |λ/μ − (1 + 4φ)| on the diagonal; of order φ² """
    phi = diagonal(f, n)
    return np.abs(diagonal_ratio(f, n) - (1 + 4 * phi))
