from dataclasses import dataclass, replace
from enum import Enum

from bdwalk.core.exceptions import ConfigError
from bdwalk.drift.functions import DriftFunction, from_dict


class Mode(str, Enum):
    DISCRETE = 'discrete'
    CONTINUOUS = 'continuous'

    def __str__(self):
        return self.value


class RateConvention(str, Enum):
    """ When φ is evaluated for a jump of the continuous-time process

    ``frozen`` uses the time of the previous jump, at which the rates were
    frozen; ``exact`` uses the instant of the jump itself. """

    FROZEN = 'frozen'
    EXACT = 'exact'

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class WalkConfig:
    """ Everything that determines a simulated walk

    Times are absolute: the walk starts in ``start_state`` at ``start_time``
    and runs until ``horizon``. """

    drift: DriftFunction
    start_state: int = 0
    start_time: int = 1
    horizon: int = 10000
    seed: int = 0
    mode: Mode = Mode.DISCRETE
    escape_level: int = None
    stop_at_escape: bool = False
    stop_at_return: bool = False
    rate_convention: RateConvention = RateConvention.FROZEN
    capture_path: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'mode', _enum(Mode, self.mode, 'mode'))
        object.__setattr__(
            self,
            'rate_convention',
            _enum(RateConvention, self.rate_convention, 'rate_convention'),
        )

        errors = []
        if not self.start_time >= 1:
            errors.append(
                ('start_time', 'must be >= 1, got {!r}'.format(self.start_time))
            )
        if not self.start_state >= 0:
            errors.append(
                ('start_state', 'must be >= 0, got {!r}'.format(self.start_state))
            )
        elif not self.start_state <= self.start_time:
            errors.append(
                (
                    'start_state',
                    'must not exceed start_time {!r} (the walk lives on n <= t)'.format(
                        self.start_time
                    ),
                )
            )
        if not self.horizon > self.start_time:
            errors.append(
                (
                    'horizon',
                    'must be larger than start_time, got {!r}'.format(self.horizon),
                )
            )
        if not self.seed >= 0:
            errors.append(('seed', 'must be >= 0, got {!r}'.format(self.seed)))
        if self.escape_level is not None and not self.escape_level >= 1:
            errors.append(
                ('escape_level', 'must be >= 1, got {!r}'.format(self.escape_level))
            )
        if self.stop_at_escape and self.escape_level is None:
            errors.append(('escape_level', 'is required by stop_at_escape'))

        if errors:
            raise ConfigError(errors)

    @property
    def steps(self):
        """ number of discrete steps from start_time to horizon """
        return int(self.horizon - self.start_time)

    def replace(self, **changes):
        return replace(self, **changes)

    def to_dict(self):
        return {
            'drift': self.drift.to_dict(),
            'start_state': self.start_state,
            'start_time': self.start_time,
            'horizon': self.horizon,
            'seed': self.seed,
            'mode': self.mode.value,
            'escape_level': self.escape_level,
            'stop_at_escape': self.stop_at_escape,
            'stop_at_return': self.stop_at_return,
            'rate_convention': self.rate_convention.value,
            'capture_path': self.capture_path,
        }

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        drift = data.pop('drift')
        if not isinstance(drift, DriftFunction):
            drift = from_dict(drift)
        return cls(drift=drift, **data)


def _enum(cls, value, name):
    try:
        return cls(value)
    except ValueError:
        choices = ', '.join(member.value for member in cls)
        message = 'must be one of {}, got {!r}'.format(choices, value)
        raise ConfigError([(name, message)])
