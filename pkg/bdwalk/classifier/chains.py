""" Homogeneous birth-and-death chains (λ_n, μ_n)

Every chain answers ``rates(n)`` for arrays of states. The criteria only use
ratios, through ``log_ratio(n) = log(μ_n / λ_n)`` and
``excess(n) = λ_n / μ_n − 1``; chains that know these in closed form
override them to keep full precision for large n.
"""

from dataclasses import dataclass, field

import numpy as np

from bdwalk.core.exceptions import ConfigError, InvalidChain
from bdwalk.drift.functions import HALF, DriftFunction, diagonal


class ChainSpec(object):
    """ Base class of birth-and-death chains with rates for n ≥ 0 """

    kind = None

    def rates(self, n):
        """ Returns the arrays (λ_n, μ_n); μ_0 is reported as 0 """
        raise NotImplementedError

    def birth(self, n):
        return self.rates(n)[0]

    def death(self, n):
        return self.rates(n)[1]

    def checked_rates(self, n):
        """ rates(n), raising InvalidChain for non-positive rates """
        n = np.asarray(n)
        birth, death = self.rates(n)
        birth, death, n = np.broadcast_arrays(birth, death, n)

        bad_birth = ~(birth > 0)
        if bad_birth.any():
            idx = np.argmax(bad_birth)
            raise InvalidChain(
                'birth rate at n={} is {!r}'.format(int(n.flat[idx]), birth.flat[idx]),
                n=int(n.flat[idx]),
                rate='birth',
            )

        bad_death = ~(death > 0) & (n >= 1)
        if bad_death.any():
            idx = np.argmax(bad_death)
            raise InvalidChain(
                'death rate at n={} is {!r}'.format(int(n.flat[idx]), death.flat[idx]),
                n=int(n.flat[idx]),
                rate='death',
            )

        return birth, death

    def log_ratio(self, n):
        """ log(μ_n / λ_n) for n ≥ 1 """
        birth, death = self.checked_rates(n)
        return np.log(death) - np.log(birth)

    def excess(self, n):
        """ λ_n / μ_n − 1 for n ≥ 1 """
        birth, death = self.checked_rates(n)
        return (birth - death) / death

    def scaled(self, factor):
        return ScaledChain(self, factor)

    def to_dict(self):
        raise NotImplementedError

    def __str__(self):
        params = ', '.join(
            '{}={}'.format(k, v) for k, v in self.to_dict().items() if k != 'kind'
        )
        return '{}({})'.format(self.kind, params)


@dataclass(frozen=True)
class ConstantChain(ChainSpec):
    """ λ_n = birth and μ_n = death for every n """

    birth_rate: float
    death_rate: float

    kind = 'constant'

    def rates(self, n):
        n = np.asarray(n, dtype=float)
        birth = np.full(n.shape, float(self.birth_rate))
        death = np.where(n == 0, 0.0, float(self.death_rate))
        return birth, death

    def to_dict(self):
        return {'kind': self.kind, 'birth': self.birth_rate, 'death': self.death_rate}


@dataclass(frozen=True)
class RatioChain(ChainSpec):
    """ λ_n / μ_n = 1 + c / (n + shift), normalised to λ_n + μ_n = 1 """

    c: float
    shift: float = 0.0
    birth0: float = HALF

    kind = 'ratio'

    def __post_init__(self):
        if not self.shift >= 0:
            raise ConfigError([('shift', 'must be >= 0, got {!r}'.format(self.shift))])
        if not 1 + self.c / (1 + self.shift) > 0:
            raise InvalidChain(
                'ratio 1 + c/(1 + shift) is not positive for c={!r}'.format(self.c),
                n=1,
                rate='death',
            )

    def ratio(self, n):
        return 1 + self.c / (np.asarray(n, dtype=float) + self.shift)

    def rates(self, n):
        n = np.asarray(n, dtype=float)
        with np.errstate(divide='ignore', invalid='ignore'):
            ratio = self.ratio(n)
            birth = np.where(n == 0, self.birth0, ratio / (1 + ratio))
            death = np.where(n == 0, 0.0, 1 / (1 + ratio))
        return birth, death

    def log_ratio(self, n):
        return -np.log1p(self.c / (np.asarray(n, dtype=float) + self.shift))

    def excess(self, n):
        return self.c / (np.asarray(n, dtype=float) + self.shift)

    def to_dict(self):
        return {
            'kind': self.kind,
            'c': self.c,
            'shift': self.shift,
            'birth0': self.birth0,
        }


@dataclass(frozen=True)
class DiagonalChain(ChainSpec):
    """ λ_n = 1/2 + φ(n, n²), μ_n = 1/2 − φ(n, n²), forced up in state 0 """

    drift: DriftFunction

    kind = 'diagonal'

    def phi(self, n):
        return np.asarray(diagonal(self.drift, np.asarray(n, dtype=float)))

    def rates(self, n):
        n = np.asarray(n, dtype=float)
        birth = np.where(n == 0, 1.0, HALF + self.phi(n))
        death = np.where(n == 0, 0.0, 1.0 - birth)
        return birth, death

    def log_ratio(self, n):
        two_phi = 2 * self.phi(n)
        return np.log1p(-two_phi) - np.log1p(two_phi)

    def excess(self, n):
        two_phi = 2 * self.phi(n)
        return 2 * two_phi / (1 - two_phi)

    def to_dict(self):
        return {'kind': self.kind, 'drift': self.drift.to_dict()}


@dataclass(frozen=True, eq=False)
class TabulatedChain(ChainSpec):
    """ Tabulated rates for n < len(birth) followed by an asymptotic chain """

    birth_rates: tuple
    death_rates: tuple
    tail: ChainSpec = field(default_factory=lambda: ConstantChain(HALF, HALF))

    kind = 'tabulated'

    def __post_init__(self):
        if len(self.birth_rates) != len(self.death_rates):
            raise ConfigError([('death', 'needs as many entries as birth')])
        if not len(self.birth_rates):
            raise ConfigError([('birth', 'needs at least one entry')])

        # the limits of the asymptotic rule must be positive
        far = np.array([2.0 ** 40])
        birth, death = self.tail.rates(far)
        if not (birth[0] > 0 and death[0] > 0):
            raise InvalidChain('asymptotic rates must have positive limits')

    def rates(self, n):
        n = np.asarray(n)
        size = len(self.birth_rates)
        idx = np.clip(n, 0, size - 1).astype(np.int64)

        tail_birth, tail_death = self.tail.rates(n)
        births = np.asarray(self.birth_rates, dtype=float)
        birth = np.where(n < size, births[idx], tail_birth)
        deaths = np.asarray(self.death_rates, dtype=float)
        death = np.where(n < size, deaths[idx], tail_death)
        death = np.where(n == 0, 0.0, death)
        return birth, death

    def to_dict(self):
        return {
            'kind': self.kind,
            'birth': list(self.birth_rates),
            'death': list(self.death_rates),
            'tail': self.tail.to_dict(),
        }


@dataclass(frozen=True)
class ScaledChain(ChainSpec):
    """ The rates of another chain multiplied by a positive factor """

    base: ChainSpec
    factor: float

    kind = 'scaled'

    def __post_init__(self):
        if not self.factor > 0:
            raise ConfigError([('factor', 'must be positive')])

    def rates(self, n):
        birth, death = self.base.rates(n)
        return birth * self.factor, death * self.factor

    def log_ratio(self, n):
        return self.base.log_ratio(n)

    def excess(self, n):
        return self.base.excess(n)

    def to_dict(self):
        return {'kind': self.kind, 'base': self.base.to_dict(), 'factor': self.factor}


def chain_from_dict(data):
    """ Builds a chain from its config representation """
    data = dict(data)
    kind = data.pop('kind', None)

    try:
        if kind == 'constant':
            return ConstantChain(float(data['birth']), float(data['death']))

        if kind == 'symmetric':
            return ConstantChain(HALF, HALF)

        if kind == 'ratio':
            return RatioChain(
                c=float(data['c']),
                shift=float(data.get('shift', 0.0)),
                birth0=float(data.get('birth0', HALF)),
            )

        if kind == 'diagonal':
            from bdwalk.drift.functions import from_dict

            return DiagonalChain(from_dict(data['drift']))

        if kind == 'tabulated':
            tail = data.get('tail')
            tail = chain_from_dict(tail) if tail else ConstantChain(HALF, HALF)
            return TabulatedChain(
                tuple(float(b) for b in data['birth']),
                tuple(float(d) for d in data['death']),
                tail,
            )

        if kind == 'scaled':
            return ScaledChain(chain_from_dict(data['base']), float(data['factor']))

    except KeyError as ke:
        raise ConfigError([(ke.args[0], 'required by chain kind {!r}'.format(kind))])

    raise ConfigError([('kind', 'unknown chain kind {!r}'.format(kind))])
