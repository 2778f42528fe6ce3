""" Sample paths of the walk and ensembles of them """

from dataclasses import dataclass

import numpy as np
from celery import group
from scipy import stats

from django.conf import settings

from bdwalk.core.exceptions import ConfigError
from bdwalk.simulator.config import Mode
from bdwalk.simulator.engine import simulate_batch, step_states
from bdwalk.simulator.stats import Batch, EnsembleStats

import logging

logger = logging.getLogger(__name__)


# E φ(X_t, t) below this at the last grid time counts as vanishing
VANISHING_THRESHOLD = 0.01

# cells with fewer jumps are left out of the embedding check
MIN_CELL_JUMPS = 30

# |z| up to this counts as agreement
Z_LIMIT = 3.0


def step_discrete(state, time, drift, rng):
    """ One step from ``state`` at ``time``, using exactly one uniform of rng

    >>> from numpy.random import default_rng
    >>> from bdwalk.drift.functions import Constant
    >>> step_discrete(0, 5, Constant(0.2), default_rng(1))
    1
    """
    if state < 0:
        raise ConfigError([('state', 'must be >= 0, got {!r}'.format(state))])
    if time < 1:
        raise ConfigError([('time', 'must be >= 1, got {!r}'.format(time))])

    uniform = rng.random()
    return int(step_states(np.int64(state), time, drift, uniform))


def _single(cfg, mode):
    if cfg.mode is not mode:
        message = 'expected mode {}, got {}'.format(mode, cfg.mode)
        raise ConfigError([('mode', message)])
    batch = simulate_batch(cfg, 0, 1)
    return batch.trajectory(0, with_path=True)


def run_discrete(cfg):
    """ TrajectoryStats of replica 0 of a discrete-time config """
    return _single(cfg, Mode.DISCRETE)


def run_continuous(cfg):
    """ TrajectoryStats of replica 0 of a continuous-time config """
    return _single(cfg, Mode.CONTINUOUS)


def chunks(replicas, size=None):
    """ (first, count) ranges covering 0 .. replicas − 1

    >>> list(chunks(5, 2))
    [(0, 2), (2, 2), (4, 1)]
    """
    size = size or settings.ENSEMBLE_CHUNK_SIZE
    for first in range(0, replicas, size):
        yield first, min(size, replicas - first)


def run_ensemble(
    cfg, replicas, escape_level=None, checkpoints=None, cells=None, dispatch=True
):
    """ Simulates replicas 0 .. replicas − 1 of ``cfg``

    Replica i draws from its own stream derived from ``cfg.seed`` and i, so
    the result is the same whether the chunks run in one process or are
    dispatched as a celery group to any number of workers. """
    replicas = int(replicas)
    if replicas < 1:
        raise ConfigError([('replicas', 'must be >= 1, got {!r}'.format(replicas))])

    if escape_level is not None:
        cfg = cfg.replace(escape_level=int(escape_level))

    if checkpoints is not None:
        checkpoints = [float(t) for t in checkpoints]

    ranges = list(chunks(replicas))

    if dispatch and len(ranges) > 1:
        from bdwalk.simulator.tasks import simulate_chunk

        config = cfg.to_dict()
        job = group(
            simulate_chunk.s(config, first, count, checkpoints, cells)
            for first, count in ranges
        )
        results = job.apply_async().get()
        batches = [Batch.from_dict(result) for result in results]

    else:
        batches = [
            simulate_batch(cfg, first, count, checkpoints=checkpoints, cells=cells)
            for first, count in ranges
        ]

    batch = Batch.concatenate(batches)
    logger.info('ensemble of %d replicas of %s done', replicas, cfg.drift)
    return EnsembleStats(batch, cfg)


@dataclass(frozen=True)
class GrowthFit:
    """ log E X_t ≈ intercept + slope · log t """

    slope: float
    stderr: float
    intercept: float
    points: int

    def to_dict(self):
        return {
            'slope': self.slope,
            'stderr': self.stderr,
            'intercept': self.intercept,
            'points': self.points,
        }


def growth_exponent(ensemble, t_lo, t_hi):
    """ Fits log E X_t against log t over the checkpoints in [t_lo, t_hi] """
    times, means, _ = ensemble.mean_state_by_time()
    times = np.asarray(times, dtype=float)
    mask = (times >= t_lo) & (times <= t_hi) & (means > 0)
    if mask.sum() < 3:
        raise ConfigError(
            [
                (
                    't_lo',
                    'need at least three checkpoints with E X_t > 0 in [{}, {}]'.format(
                        t_lo, t_hi
                    ),
                )
            ]
        )

    fit = stats.linregress(np.log(times[mask]), np.log(means[mask]))
    return GrowthFit(
        slope=float(fit.slope),
        stderr=float(fit.stderr),
        intercept=float(fit.intercept),
        points=int(mask.sum()),
    )


@dataclass(frozen=True, eq=False)
class DriftReport:
    """ E φ(X_t, t) and E X_t / t on a grid of times """

    times: np.ndarray
    mean_phi: np.ndarray
    mean_phi_se: np.ndarray
    mean_state_ratio: np.ndarray
    trend: float
    vanishing: bool
    threshold: float

    def to_dict(self):
        return {
            'threshold': self.threshold,
            'trend': self.trend,
            'vanishing': self.vanishing,
            'grid': [
                {'t': t, 'mean_phi': m, 'se': s, 'mean_state_ratio': r}
                for t, m, s, r in zip(
                    self.times, self.mean_phi, self.mean_phi_se, self.mean_state_ratio
                )
            ],
        }


def drift_vanishing_check(cfg, replicas, t_grid, threshold=VANISHING_THRESHOLD):
    """ Estimates E φ(X_t, t) on an increasing grid of times

    ``trend`` is the slope of log E φ against log t over the grid times with
    a positive estimate (None when fewer than two). The drift counts as
    vanishing when the last estimate is below the first and below
    ``threshold``. """
    grid = np.asarray(t_grid, dtype=float)
    if len(grid) < 2 or not (np.diff(grid) > 0).all():
        raise ConfigError([('t_grid', 'must hold at least two increasing times')])

    ensemble = run_ensemble(cfg, replicas, checkpoints=grid)
    states = ensemble.batch.checkpoint_states
    times = np.asarray(ensemble.batch.checkpoint_times, dtype=float)

    phi = cfg.drift.evaluate(states, times[np.newaxis, :])
    mean_phi = phi.mean(axis=0)
    if replicas > 1:
        se = phi.std(axis=0, ddof=1) / np.sqrt(replicas)
    else:
        se = np.full(len(times), np.nan)
    ratio = (states / times[np.newaxis, :]).mean(axis=0)

    positive = mean_phi > 0
    trend = None
    if positive.sum() >= 2:
        fit = stats.linregress(np.log(times[positive]), np.log(mean_phi[positive]))
        trend = float(fit.slope)

    vanishing = bool(mean_phi[-1] < mean_phi[0] and mean_phi[-1] < threshold)
    return DriftReport(
        times=times,
        mean_phi=mean_phi,
        mean_phi_se=se,
        mean_state_ratio=ratio,
        trend=trend,
        vanishing=vanishing,
        threshold=threshold,
    )


@dataclass(frozen=True, eq=False)
class EmbeddingReport:
    """ Holding times and jump directions of the continuous-time process """

    mean_holding_time: float
    holding_se: float
    jumps: int
    state_max: int
    bucket_edges: np.ndarray
    cells: dict

    @property
    def holding_z(self):
        return (self.mean_holding_time - 1) / self.holding_se

    def z_scores(self):
        variance = self.cells['variance']
        with np.errstate(divide='ignore', invalid='ignore'):
            z = (self.cells['ups'] - self.cells['expected']) / np.sqrt(variance)
        return np.where(variance > 0, z, np.nan)

    def checked(self):
        """ mask of the cells with enough jumps to be judged """
        return (self.cells['jumps'] >= MIN_CELL_JUMPS) & (self.cells['variance'] > 0)

    @property
    def fraction_within(self):
        """ fraction of the judged cells with |z| <= Z_LIMIT """
        checked = self.checked()
        if not checked.any():
            return None
        z = self.z_scores()[checked]
        return float(np.mean(np.abs(z) <= Z_LIMIT))

    def rows(self):
        z = self.z_scores()
        jumps = self.cells['jumps']
        for i, j in zip(*np.nonzero(jumps)):
            yield {
                'state': int(i) + 1,
                't_lo': float(self.bucket_edges[j]),
                't_hi': float(self.bucket_edges[j + 1]),
                'jumps': int(jumps[i, j]),
                'up_frequency': float(self.cells['ups'][i, j] / jumps[i, j]),
                'expected_frequency': float(self.cells['expected'][i, j] / jumps[i, j]),
                'z': None if np.isnan(z[i, j]) else float(z[i, j]),
            }

    def to_dict(self):
        return {
            'mean_holding_time': self.mean_holding_time,
            'holding_se': self.holding_se,
            'holding_z': self.holding_z,
            'jumps': self.jumps,
            'fraction_within': self.fraction_within,
            'cells': list(self.rows()),
        }


def embedding_check(cfg, replicas, state_max, bucket_edges):
    """ Compares the simulated continuous-time process with its rates

    Runs ``cfg`` in continuous mode and counts, for every state up to
    ``state_max`` and every time bucket, the jumps and up-moves together with
    the expected number of up-moves Σ(1/2 + φ) and its variance. """
    edges = np.asarray(bucket_edges, dtype=float)
    if len(edges) < 2 or not (np.diff(edges) > 0).all():
        raise ConfigError([('bucket_edges', 'must hold at least two increasing times')])

    cfg = cfg.replace(mode=Mode.CONTINUOUS)
    cells = {'state_max': int(state_max), 'bucket_edges': edges.tolist()}
    ensemble = run_ensemble(cfg, replicas, cells=cells)

    batch = ensemble.batch
    return EmbeddingReport(
        mean_holding_time=ensemble.mean_holding_time,
        holding_se=ensemble.mean_holding_time_se,
        jumps=batch.holding_count,
        state_max=int(state_max),
        bucket_edges=edges,
        cells=batch.cells,
    )
