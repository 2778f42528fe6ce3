""" Statistics of simulated trajectories and ensembles """

from dataclasses import dataclass

import numpy as np

from bdwalk.core.exceptions import ConfigError
from bdwalk.utils import binomial_se

import logging

logger = logging.getLogger(__name__)


def _optional(value):
    """ NaN marks an event that did not happen """
    value = float(value)
    return None if np.isnan(value) else value


@dataclass(frozen=True)
class TrajectoryStats:
    """ Summary of one trajectory

    Times are absolute. ``max_before_return`` is the largest state visited
    before the first return to 0 (or over the whole run when there is no
    return). ``hit_upper`` is ``(level, time)`` of the first visit to the
    escape level. """

    returns_to_zero: int
    first_return_time: float
    max_state: int
    max_before_return: int
    final_state: int
    hit_upper: tuple
    time_at_zero: float
    steps: int
    draws: int
    path_sample: list = None

    def __post_init__(self):
        assert self.max_state >= self.final_state, (self.max_state, self.final_state)
        assert self.max_state >= self.max_before_return

    @property
    def returned(self):
        return self.returns_to_zero > 0

    def to_dict(self):
        data = {
            'returns_to_zero': self.returns_to_zero,
            'first_return_time': self.first_return_time,
            'max_state': self.max_state,
            'max_before_return': self.max_before_return,
            'final_state': self.final_state,
            'hit_upper': list(self.hit_upper) if self.hit_upper else None,
            'time_at_zero': self.time_at_zero,
            'steps': self.steps,
            'draws': self.draws,
        }
        if self.path_sample is not None:
            data['path_sample'] = self.path_sample
        return data


# fields of a Batch that hold one value per replica
REPLICA_FIELDS = (
    'returns_to_zero',
    'first_return_time',
    'max_state',
    'max_before_return',
    'final_state',
    'hit_time',
    'time_at_zero',
    'steps',
    'draws',
    'checkpoint_states',
)

# fields of a Batch that are summed over replicas
TOTAL_FIELDS = ('holding_sum', 'holding_sq', 'holding_count')



@dataclass(eq=False)
class Batch:
    """ Per-replica arrays of a contiguous range of replicas

    A batch is what the engine produces and what simulation tasks return.
    Batches of consecutive replica ranges concatenate into the batch of the
    whole ensemble. """

    first: int
    escape_level: int
    checkpoint_times: np.ndarray
    returns_to_zero: np.ndarray
    first_return_time: np.ndarray
    max_state: np.ndarray
    max_before_return: np.ndarray
    final_state: np.ndarray
    hit_time: np.ndarray
    time_at_zero: np.ndarray
    steps: np.ndarray
    draws: np.ndarray
    checkpoint_states: np.ndarray
    holding_sum: float = 0.0
    holding_sq: float = 0.0
    holding_count: int = 0
    cells: dict = None
    paths: list = None

    def __len__(self):
        return len(self.returns_to_zero)

    def trajectory(self, i, with_path=False):
        """ TrajectoryStats of replica ``first + i``

        With ``with_path`` the full captured path is attached, or the path
        decimated to the checkpoint times when none was captured. """
        hit = self.hit_time[i]
        hit_upper = None if np.isnan(hit) else (self.escape_level, float(hit))

        path = None
        if self.paths is not None:
            path = self.paths[i]
        elif with_path:
            path = [
                [t, int(s)]
                for t, s in zip(
                    self.checkpoint_times.tolist(), self.checkpoint_states[i]
                )
            ]
        return TrajectoryStats(
            returns_to_zero=int(self.returns_to_zero[i]),
            first_return_time=_optional(self.first_return_time[i]),
            max_state=int(self.max_state[i]),
            max_before_return=int(self.max_before_return[i]),
            final_state=int(self.final_state[i]),
            hit_upper=hit_upper,
            time_at_zero=float(self.time_at_zero[i]),
            steps=int(self.steps[i]),
            draws=int(self.draws[i]),
            path_sample=path,
        )

    def to_dict(self):
        data = {
            'first': self.first,
            'escape_level': self.escape_level,
            'checkpoint_times': self.checkpoint_times.tolist(),
            'cells': (
                {k: v.tolist() for k, v in self.cells.items()} if self.cells else None
            ),
            'paths': self.paths,
        }
        for name in REPLICA_FIELDS:
            data[name] = getattr(self, name).tolist()
        for name in TOTAL_FIELDS:
            data[name] = getattr(self, name)
        return data

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        cells = data.pop('cells')
        data['checkpoint_times'] = np.asarray(data['checkpoint_times'])
        for name in REPLICA_FIELDS:
            data[name] = np.asarray(data[name], dtype=_DTYPES.get(name, float))
        if data['checkpoint_states'].ndim == 1:
            data['checkpoint_states'] = data['checkpoint_states'].reshape(
                len(data['returns_to_zero']), -1
            )
        if cells:
            cells = {k: np.asarray(v) for k, v in cells.items()}
        return cls(cells=cells, **data)

    @classmethod
    def concatenate(cls, batches):
        """ Joins batches of consecutive replica ranges in replica order """
        batches = sorted(batches, key=lambda b: b.first)
        if not batches:
            raise ValueError('no batches to concatenate')

        head = batches[0]
        expected = head.first
        for batch in batches:
            if batch.first != expected:
                raise ValueError('batches do not cover a contiguous replica range')
            expected += len(batch)

        arrays = {
            name: np.concatenate([getattr(b, name) for b in batches])
            for name in REPLICA_FIELDS
        }
        totals = {name: sum(getattr(b, name) for b in batches) for name in TOTAL_FIELDS}

        cells = None
        if head.cells is not None:
            cells = {
                name: sum(b.cells[name] for b in batches) for name in head.cells
            }

        paths = None
        if head.paths is not None:
            paths = [path for b in batches for path in b.paths]

        return cls(
            first=head.first,
            escape_level=head.escape_level,
            checkpoint_times=head.checkpoint_times,
            cells=cells,
            paths=paths,
            **arrays,
            **totals,
        )


_DTYPES = {
    'returns_to_zero': np.int64,
    'max_state': np.int64,
    'max_before_return': np.int64,
    'final_state': np.int64,
    'steps': np.int64,
    'draws': np.int64,
    'checkpoint_states': np.int64,
}


class EnsembleStats(object):
    """ Frequencies and means over the replicas of an ensemble

    Every frequency comes with its binomial standard error
    sqrt(p(1 − p) / replicas); means come with the standard error of the
    sample mean. """

    def __init__(self, batch, config=None, max_rows=None):
        self.batch = batch
        self.config = config
        self.max_rows = max_rows

    @property
    def replicas(self):
        return len(self.batch)

    @property
    def escape_level(self):
        return self.batch.escape_level

    def se(self, p):
        return binomial_se(p, self.replicas)

    @property
    def return_frequency(self):
        return float(np.mean(self.batch.returns_to_zero > 0))

    @property
    def mean_returns(self):
        return float(np.mean(self.batch.returns_to_zero))

    @property
    def mean_returns_se(self):
        return _mean_se(self.batch.returns_to_zero)

    def escape_frequency(self, level=None):
        """ fraction of replicas that reach ``level`` before returning to 0 """
        level = self.escape_level if level is None else int(level)
        if level is None:
            raise ConfigError([('escape_level', 'no escape level given')])

        stopped = self.config is not None and self.config.stop_at_escape
        if stopped and level > self.escape_level:
            raise ConfigError(
                [
                    (
                        'escape_level',
                        'walks stopped at {}; cannot report level {}'.format(
                            self.escape_level, level
                        ),
                    )
                ]
            )

        return float(np.mean(self.batch.max_before_return >= level))

    def return_frequency_at(self, h):
        """ fraction of replicas whose first return happens at time <= h """
        times = self.batch.first_return_time
        with np.errstate(invalid='ignore'):
            return float(np.mean(times <= h))

    def mean_state_by_time(self):
        """ (times, E X_t, standard errors) at the checkpoint times """
        states = self.batch.checkpoint_states.astype(float)
        means = states.mean(axis=0)
        if self.replicas > 1:
            ses = states.std(axis=0, ddof=1) / np.sqrt(self.replicas)
        else:
            ses = np.full(len(means), np.nan)
        return self.batch.checkpoint_times, means, ses

    @property
    def mean_holding_time(self):
        count = self.batch.holding_count
        if not count:
            return None
        return self.batch.holding_sum / count

    @property
    def mean_holding_time_se(self):
        count = self.batch.holding_count
        if count < 2:
            return None
        mean = self.batch.holding_sum / count
        variance = (self.batch.holding_sq - count * mean ** 2) / (count - 1)
        return float(np.sqrt(max(variance, 0.0) / count))

    @property
    def row_count(self):
        """ number of per-replica rows in the serialised result """
        if self.max_rows is None:
            return self.replicas
        return min(self.max_rows, self.replicas)

    def summary(self):
        p = self.return_frequency
        data = {
            'replicas': self.replicas,
            'return_frequency': p,
            'return_se': self.se(p),
            'mean_returns': self.mean_returns,
            'mean_returns_se': self.mean_returns_se,
            'escape_level': self.escape_level,
            'escape_frequency': None,
            'escape_se': None,
            'mean_final_state': float(np.mean(self.batch.final_state)),
            'mean_max_state': float(np.mean(self.batch.max_state)),
        }
        if self.escape_level is not None:
            e = self.escape_frequency()
            data['escape_frequency'] = e
            data['escape_se'] = self.se(e)
        if self.batch.holding_count:
            data['mean_holding_time'] = self.mean_holding_time
            data['mean_holding_time_se'] = self.mean_holding_time_se
        return data

    def to_dict(self):
        times, means, ses = self.mean_state_by_time()
        data = {
            'summary': self.summary(),
            'mean_state_by_time': [
                {'t': t, 'mean': m, 'se': s} for t, m, s in zip(times, means, ses)
            ],
        }
        rows = self.row_count
        data['replicas'] = [self.batch.trajectory(i).to_dict() for i in range(rows)]
        return data

    def rows(self):
        """ one CSV row per replica followed by a summary row """
        rows = self.row_count
        for i in range(rows):
            traj = self.batch.trajectory(i)
            yield {
                'replica': self.batch.first + i,
                'returns_to_zero': traj.returns_to_zero,
                'first_return_time': traj.first_return_time,
                'max_state': traj.max_state,
                'max_before_return': traj.max_before_return,
                'final_state': traj.final_state,
                'hit_time': traj.hit_upper[1] if traj.hit_upper else None,
                'time_at_zero': traj.time_at_zero,
                'steps': traj.steps,
            }

        summary = self.summary()
        yield {
            'replica': 'summary',
            'returns_to_zero': summary['mean_returns'],
            'max_state': summary['mean_max_state'],
            'final_state': summary['mean_final_state'],
            'return_frequency': summary['return_frequency'],
            'return_se': summary['return_se'],
            'escape_frequency': summary['escape_frequency'],
            'escape_se': summary['escape_se'],
        }


# the summary row holds means in the per-replica columns and fills the
# frequency columns, which are empty for replicas
ROW_FIELDS = (
    'replica',
    'returns_to_zero',
    'first_return_time',
    'max_state',
    'max_before_return',
    'final_state',
    'hit_time',
    'time_at_zero',
    'steps',
    'return_frequency',
    'return_se',
    'escape_frequency',
    'escape_se',
)


def _mean_se(values):
    values = np.asarray(values, dtype=float)
    if len(values) < 2:
        return float('nan')
    return float(values.std(ddof=1) / np.sqrt(len(values)))
