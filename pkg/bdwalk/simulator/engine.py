""" Vectorised simulation of a batch of replicas

All replicas of a batch advance together: in discrete mode one step per
round, in continuous mode one jump per round. Each replica consumes exactly
one row of uniforms from its own stream per round in which it is active, so
its trajectory does not depend on the other replicas of the batch.
"""

import numpy as np

from django.conf import settings

from bdwalk.core.exceptions import ConfigError
from bdwalk.drift.functions import HALF
from bdwalk.simulator.config import Mode, RateConvention
from bdwalk.simulator.stats import Batch
from bdwalk.simulator.streams import UniformBlocks

import logging

logger = logging.getLogger(__name__)


def checkpoint_times(start_time, horizon):
    """ start_time, start_time + 2^k for k >= 0, and the horizon

    >>> checkpoint_times(1, 10).tolist()
    [1, 2, 3, 5, 9, 10]

    >>> checkpoint_times(5, 6).tolist()
    [5, 6]
    """
    times = [start_time]
    offset = 1
    while start_time + offset < horizon:
        times.append(start_time + offset)
        offset *= 2
    times.append(horizon)
    return np.asarray(times, dtype=np.int64)


def _check_grid(grid, cfg):
    grid = np.unique(np.asarray(grid, dtype=float))
    if not len(grid):
        raise ConfigError([('t_grid', 'must not be empty')])
    if grid[0] < cfg.start_time or grid[-1] > cfg.horizon:
        raise ConfigError(
            [
                (
                    't_grid',
                    'times must lie in [{}, {}]'.format(cfg.start_time, cfg.horizon),
                )
            ]
        )
    return grid


def step_states(states, time, drift, uniforms):
    """ One step of the walk for every state, one uniform each

    A state n >= 1 moves up when its uniform is below 1/2 + φ(n, t); state 0
    always moves up. """
    phi = drift.evaluate(states, time)
    up = (states == 0) | (uniforms < HALF + phi)
    return np.where(up, states + 1, states - 1)


class _Engine(object):

    width = 1

    integer_times = False

    def __init__(self, cfg, first, count, checkpoints=None):
        self.cfg = cfg
        self.first = first
        self.count = count

        if checkpoints is None:
            self.times = checkpoint_times(cfg.start_time, cfg.horizon)
        else:
            self.times = _check_grid(checkpoints, cfg)

        self.blocks = UniformBlocks(cfg.seed, first, count, width=self.width)

        self.state = np.full(count, cfg.start_state, dtype=np.int64)
        self.clock = np.full(count, float(cfg.start_time))
        self.active = np.ones(count, dtype=bool)

        self.returns = np.zeros(count, dtype=np.int64)
        self.first_return = np.full(count, np.nan)
        self.max_state = self.state.copy()
        self.max_before_return = self.state.copy()
        self.hit_time = np.full(count, np.nan)
        self.time_at_zero = np.zeros(count)
        self.steps = np.zeros(count, dtype=np.int64)
        self.draws = np.zeros(count, dtype=np.int64)

        self.snapshots = np.zeros((count, len(self.times)), dtype=np.int64)
        self.next_checkpoint = np.zeros(count, dtype=np.int64)

        self.paths = None
        if cfg.capture_path:
            self.paths = [[[cfg.start_time, cfg.start_state]] for _ in range(count)]

        level = cfg.escape_level
        if level is not None and cfg.start_state >= level:
            self.hit_time[:] = cfg.start_time
            if cfg.stop_at_escape:
                self.active[:] = False

    def snapshot(self, idx, until):
        """ Records the current states of ``idx`` at due checkpoints

        A checkpoint is due when it lies before ``until``, the time at which
        the replica leaves its current state. """
        until = np.broadcast_to(np.asarray(until, dtype=float), idx.shape)
        n_times = len(self.times)

        while len(idx):
            ptr = self.next_checkpoint[idx]
            due = ptr < n_times
            due[due] = self.times[ptr[due]] < until[due]
            idx, until, ptr = idx[due], until[due], ptr[due]
            self.snapshots[idx, ptr] = self.state[idx]
            self.next_checkpoint[idx] = ptr + 1

    def moved(self, idx, states, now):
        """ Updates the statistics of ``idx`` after a move to ``states`` """
        cfg = self.cfg
        now = np.broadcast_to(np.asarray(now, dtype=float), idx.shape)

        before = np.isnan(self.first_return[idx])
        self.state[idx] = states
        self.clock[idx] = now
        self.steps[idx] += 1

        self.max_state[idx] = np.maximum(self.max_state[idx], states)
        pre = idx[before]
        self.max_before_return[pre] = np.maximum(
            self.max_before_return[pre], states[before]
        )

        zero = states == 0
        self.returns[idx[zero]] += 1
        first = zero & before
        self.first_return[idx[first]] = now[first]

        if cfg.escape_level is not None:
            up = states >= cfg.escape_level
            new_hit = up & np.isnan(self.hit_time[idx])
            self.hit_time[idx[new_hit]] = now[new_hit]
            if cfg.stop_at_escape:
                self.active[idx[up]] = False

        if cfg.stop_at_return:
            self.active[idx[zero]] = False

        if self.paths is not None:
            times = now.astype(np.int64) if self.integer_times else now
            for i, t, s in zip(idx.tolist(), times.tolist(), states.tolist()):
                self.paths[i].append([t, s])

    def batch(self, **totals):
        return Batch(
            first=self.first,
            escape_level=self.cfg.escape_level,
            checkpoint_times=self.times,
            returns_to_zero=self.returns,
            first_return_time=self.first_return,
            max_state=self.max_state,
            max_before_return=self.max_before_return,
            final_state=self.state.copy(),
            hit_time=self.hit_time,
            time_at_zero=self.time_at_zero,
            steps=self.steps,
            draws=self.draws,
            checkpoint_states=self.snapshots,
            paths=self.paths,
            **totals,
        )


class DiscreteEngine(_Engine):
    """ The walk observed at integer times """

    width = 1

    integer_times = True

    def run(self):
        cfg = self.cfg
        everyone = np.arange(self.count)
        self.snapshot(everyone, cfg.start_time + 1)

        for t in range(cfg.start_time, cfg.horizon):
            idx = np.flatnonzero(self.active)
            if not len(idx):
                break

            uniforms = self.blocks.take()[:, 0]
            states = step_states(self.state[idx], t, cfg.drift, uniforms[idx])
            self.draws[idx] += 1

            self.moved(idx, states, t + 1)
            self.time_at_zero[idx[states == 0]] += 1
            self.snapshot(idx, t + 2)

            if settings.DEBUG:
                assert (self.state[idx] <= t + 1).all(), 'walk left the wedge n <= t'

        self.snapshot(everyone, np.inf)
        return self.batch()


class ContinuousEngine(_Engine):
    """ The jump chain of the continuous-time birth-and-death process

    λ + μ = 1 in every state, so holding times are unit-mean exponentials;
    state 0 jumps up at rate 1. The jump direction is drawn with φ at the
    time of the previous jump (frozen rates) or at the jump instant. """

    width = 2

    def __init__(self, cfg, first, count, checkpoints=None, cells=None):
        super().__init__(cfg, first, count, checkpoints)
        self.holding_sum = 0.0
        self.holding_sq = 0.0
        self.holding_count = 0

        self.cells = None
        if cells:
            self.state_max = int(cells['state_max'])
            self.edges = np.asarray(cells['bucket_edges'], dtype=float)
            if self.state_max < 1 or len(self.edges) < 2:
                raise ConfigError(
                    [('cells', 'need state_max >= 1 and at least two bucket edges')]
                )
            shape = (self.state_max, len(self.edges) - 1)
            self.cells = {
                'jumps': np.zeros(shape),
                'ups': np.zeros(shape),
                'expected': np.zeros(shape),
                'variance': np.zeros(shape),
            }

    def tally(self, states, when, p_up, up):
        """ counts jumps and up-moves per (state, time bucket) """
        bucket = np.searchsorted(self.edges, when, side='right') - 1
        keep = (
            (states >= 1)
            & (states <= self.state_max)
            & (bucket >= 0)
            & (bucket < len(self.edges) - 1)
        )
        cell = (states[keep] - 1, bucket[keep])
        p = p_up[keep]
        np.add.at(self.cells['jumps'], cell, 1)
        np.add.at(self.cells['ups'], cell, up[keep])
        np.add.at(self.cells['expected'], cell, p)
        np.add.at(self.cells['variance'], cell, p * (1 - p))

    def run(self):
        cfg = self.cfg
        horizon = float(cfg.horizon)
        exact = cfg.rate_convention is RateConvention.EXACT
        everyone = np.arange(self.count)

        while True:
            idx = np.flatnonzero(self.active)
            if not len(idx):
                break

            uniforms = self.blocks.take()
            self.draws[idx] += 2

            start = self.clock[idx]
            hold = -np.log1p(-uniforms[idx, 0])
            arrival = start + hold
            self.snapshot(idx, arrival)

            late = arrival > horizon
            if late.any():
                done = idx[late]
                zero = done[self.state[done] == 0]
                self.time_at_zero[zero] += horizon - self.clock[zero]
                self.active[done] = False

                keep = ~late
                idx, start = idx[keep], start[keep]
                hold, arrival = hold[keep], arrival[keep]
                if not len(idx):
                    continue

            states = self.state[idx]
            zero = states == 0
            self.time_at_zero[idx[zero]] += hold[zero]

            self.holding_sum += float(hold.sum())
            self.holding_sq += float(np.dot(hold, hold))
            self.holding_count += len(hold)

            when = arrival if exact else start
            phi = cfg.drift.evaluate(states, when)
            p_up = np.where(zero, 1.0, HALF + phi)
            up = uniforms[idx, 1] < p_up

            if self.cells is not None:
                self.tally(states, when, p_up, up)

            self.moved(idx, np.where(up, states + 1, states - 1), arrival)

        self.snapshot(everyone, np.inf)
        return self.batch(
            holding_sum=self.holding_sum,
            holding_sq=self.holding_sq,
            holding_count=self.holding_count,
            cells=self.cells,
        )


def simulate_batch(cfg, first, count, checkpoints=None, cells=None):
    """ Simulates replicas ``first .. first + count − 1`` of ``cfg`` """
    if count < 1:
        raise ConfigError([('replicas', 'must be >= 1, got {!r}'.format(count))])

    if cfg.mode is Mode.CONTINUOUS:
        engine = ContinuousEngine(cfg, first, count, checkpoints, cells)
    else:
        if cells:
            raise ConfigError([('mode', 'cell counts need the continuous mode')])
        engine = DiscreteEngine(cfg, first, count, checkpoints)

    logger.debug(
        'simulating replicas %d..%d of %s', first, first + count - 1, cfg.drift
    )
    return engine.run()
