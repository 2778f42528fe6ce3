import json
import os
import tempfile
import unittest

import numpy as np
import pytest
from numpy.random import default_rng

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test.utils import override_settings

from bdwalk.classifier.chains import RatioChain
from bdwalk.core.exceptions import ConfigError, DomainError
from bdwalk.drift.functions import Constant, Exponential, PowerLaw, Tabulated
from bdwalk.oracle.ladder import HittingProblem, hit_probability
from bdwalk.simulator.config import Mode, RateConvention, WalkConfig
from bdwalk.simulator.engine import simulate_batch, step_states
from bdwalk.simulator.stats import Batch, EnsembleStats
from bdwalk.simulator.streams import UniformBlocks, replica_generator
from bdwalk.simulator.tasks import simulate_chunk
from bdwalk.simulator.walks import (
    drift_vanishing_check,
    embedding_check,
    growth_exponent,
    run_continuous,
    run_discrete,
    run_ensemble,
    step_discrete,
)
from bdwalk.test import run_command, run_command_csv, synthetic_batch


SYMMETRIC = Constant(0)


def pooled_se(p, q, n):
    """ standard error of the difference of two frequencies over n trials """
    mean = (p + q) / 2
    return np.sqrt(mean * (1 - mean) * 2 / n)


class StepTests(unittest.TestCase):
    """ Test single steps of the discrete walk """

    def test_forced_step(self):
        rng = default_rng(1)
        for t in range(1, 200):
            self.assertEqual(step_discrete(0, t, Constant(0.3), rng), 1)

    def test_symmetric_fraction(self):
        rng = default_rng(2)
        states = np.full(10 ** 6, 5)
        moved = step_states(states, 16, SYMMETRIC, rng.random(10 ** 6))
        self.assertTrue(set(np.unique(moved)) <= {4, 6})
        self.assertAlmostEqual(np.mean(moved == 6), 0.5, delta=0.002)

    def test_power_law_fraction(self):
        drift = PowerLaw(rho=0.5, alpha=1, beta=1)
        rng = default_rng(3)
        states = np.full(10 ** 6, 4)
        moved = step_states(states, 16, drift, rng.random(10 ** 6))
        self.assertAlmostEqual(np.mean(moved == 5), 0.625, delta=0.002)

    def test_single_draw(self):
        rng = default_rng(4)
        step_discrete(3, 10, Constant(0.1), rng)

        reference = default_rng(4)
        reference.random()
        self.assertEqual(rng.random(), reference.random())

    def test_domain_error(self):
        with self.assertRaises(DomainError):
            step_discrete(5, 5, PowerLaw(rho=1, alpha=1, beta=1), default_rng(5))

    def test_invalid_arguments(self):
        with self.assertRaises(ConfigError):
            step_discrete(-1, 5, SYMMETRIC, default_rng(6))
        with self.assertRaises(ConfigError):
            step_discrete(0, 0, SYMMETRIC, default_rng(6))


class StreamTests(unittest.TestCase):
    """ Test the per-replica random streams """

    def test_rows_depend_on_replica_only(self):
        blocks = UniformBlocks(11, 0, 5, block_size=3)
        rows = np.array([blocks.take()[:, 0] for _ in range(10)])

        for i in range(5):
            expected = replica_generator(11, i).random(10)
            np.testing.assert_array_equal(rows[:, i], expected)

        single = UniformBlocks(11, 3, 1, block_size=7)
        own = np.array([single.take()[0, 0] for _ in range(10)])
        np.testing.assert_array_equal(own, rows[:, 3])

    def test_draw_counter(self):
        blocks = UniformBlocks(1, 0, 2, width=2, block_size=4)
        for _ in range(5):
            self.assertEqual(blocks.take().shape, (2, 2))
        self.assertEqual(blocks.draws, 10)


class WalkConfigTests(unittest.TestCase):
    """ Test validation of walk configurations """

    def test_defaults(self):
        cfg = WalkConfig(drift=SYMMETRIC)
        self.assertEqual(cfg.start_time, 1)
        self.assertEqual(cfg.start_state, 0)
        self.assertIs(cfg.mode, Mode.DISCRETE)
        self.assertEqual(cfg.steps, 9999)

    def test_violations(self):
        with self.assertRaises(ConfigError) as cm:
            WalkConfig(drift=SYMMETRIC, start_state=5, start_time=2, horizon=1)
        fields = [field for field, _ in cm.exception.violations]
        self.assertEqual(fields, ['start_state', 'horizon'])

    def test_stop_needs_level(self):
        with self.assertRaises(ConfigError) as cm:
            WalkConfig(drift=SYMMETRIC, stop_at_escape=True)
        self.assertEqual(cm.exception.violations[0][0], 'escape_level')

    def test_mode_names(self):
        cfg = WalkConfig(drift=SYMMETRIC, mode='continuous', rate_convention='exact')
        self.assertIs(cfg.mode, Mode.CONTINUOUS)
        self.assertIs(cfg.rate_convention, RateConvention.EXACT)

        with self.assertRaises(ConfigError):
            WalkConfig(drift=SYMMETRIC, mode='gillespie')

    def test_dict(self):
        cfg = WalkConfig(
            drift=PowerLaw.linear(0.3), horizon=500, seed=3, escape_level=20
        )
        self.assertEqual(WalkConfig.from_dict(cfg.to_dict()), cfg)


class RunDiscreteTests(unittest.TestCase):
    """ Test single discrete-time trajectories """

    def test_reproducible(self):
        cfg = WalkConfig(drift=PowerLaw.linear(0.4), horizon=3000, seed=17)
        self.assertEqual(run_discrete(cfg), run_discrete(cfg))

        other = run_discrete(cfg.replace(seed=18))
        self.assertNotEqual(run_discrete(cfg).path_sample, other.path_sample)

    def test_one_draw_per_step(self):
        traj = run_discrete(WalkConfig(drift=Constant(0.1), horizon=500, seed=1))
        self.assertEqual(traj.steps, 499)
        self.assertEqual(traj.draws, 499)

    def test_path(self):
        cfg = WalkConfig(drift=SYMMETRIC, horizon=2000, seed=5, capture_path=True)
        traj = run_discrete(cfg)

        times = [t for t, _ in traj.path_sample]
        states = [s for _, s in traj.path_sample]
        self.assertEqual(times, list(range(1, 2001)))
        self.assertTrue(all(s >= 0 for s in states))
        self.assertTrue(all(s <= t for t, s in traj.path_sample))
        self.assertTrue(all(abs(a - b) == 1 for a, b in zip(states, states[1:])))
        self.assertTrue(all(b == 1 for a, b in zip(states, states[1:]) if a == 0))

        zeros = [t for t, s in traj.path_sample[1:] if s == 0]
        self.assertEqual(traj.returns_to_zero, len(zeros))
        self.assertEqual(traj.time_at_zero, len(zeros))
        if zeros:
            self.assertEqual(traj.first_return_time, zeros[0])
        self.assertEqual(traj.max_state, max(states))
        self.assertEqual(traj.final_state, states[-1])

    def test_decimated_path(self):
        traj = run_discrete(WalkConfig(drift=SYMMETRIC, horizon=100, seed=5))
        times = [t for t, _ in traj.path_sample]
        self.assertEqual(times, [1, 2, 3, 5, 9, 17, 33, 65, 100])
        self.assertEqual(traj.path_sample[0], [1, 0])
        self.assertEqual(traj.path_sample[1], [2, 1])
        self.assertEqual(traj.path_sample[-1][1], traj.final_state)

    def test_wedge_assertion(self):
        with override_settings(DEBUG=True):
            traj = run_discrete(WalkConfig(drift=Constant(0.4), horizon=300, seed=2))
        self.assertLessEqual(traj.max_state, 299)

    def test_mode(self):
        with self.assertRaises(ConfigError):
            run_discrete(WalkConfig(drift=SYMMETRIC, mode='continuous'))

    def test_start_at_escape_level(self):
        cfg = WalkConfig(
            drift=SYMMETRIC,
            start_state=5,
            start_time=5,
            escape_level=5,
            stop_at_escape=True,
        )
        traj = run_discrete(cfg)
        self.assertEqual(traj.steps, 0)
        self.assertEqual(traj.hit_upper, (5, 5.0))

    def test_domain_error(self):
        cfg = WalkConfig(drift=PowerLaw(rho=1, alpha=1, beta=1), horizon=100)
        with self.assertRaises(DomainError):
            run_discrete(cfg)


class RunContinuousTests(unittest.TestCase):
    """ Test single trajectories of the continuous-time process """

    def test_reproducible(self):
        cfg = WalkConfig(
            drift=PowerLaw.linear(0.4, cap=0.45),
            horizon=2000,
            seed=3,
            mode='continuous',
        )
        self.assertEqual(run_continuous(cfg), run_continuous(cfg))

    def test_path(self):
        cfg = WalkConfig(
            drift=SYMMETRIC, horizon=500, seed=4, mode='continuous', capture_path=True
        )
        traj = run_continuous(cfg)
        times = [t for t, _ in traj.path_sample]
        states = [s for _, s in traj.path_sample]

        self.assertTrue(all(a < b for a, b in zip(times, times[1:])))
        self.assertLessEqual(times[-1], 500)
        self.assertTrue(all(abs(a - b) == 1 for a, b in zip(states, states[1:])))
        self.assertEqual(traj.steps, len(states) - 1)
        self.assertEqual(traj.draws, 2 * (traj.steps + 1))

    def test_mode(self):
        with self.assertRaises(ConfigError):
            run_continuous(WalkConfig(drift=SYMMETRIC))


class EnsembleTests(unittest.TestCase):
    """ Test ensembles and their statistics """

    def test_gamblers_ruin(self):
        cfg = WalkConfig(
            drift=SYMMETRIC,
            start_state=10,
            start_time=10,
            horizon=20000,
            seed=1,
            stop_at_escape=True,
            stop_at_return=True,
            escape_level=50,
        )
        ensemble = run_ensemble(cfg, 2000)
        p = ensemble.escape_frequency(50)
        self.assertLess(abs(p - 0.2), 4 * ensemble.se(0.2))

        # a stopped walk does not know about higher levels
        with self.assertRaises(ConfigError):
            ensemble.escape_frequency(60)

        self.assertGreaterEqual(ensemble.escape_frequency(30), p)
        self.assertTrue((ensemble.batch.returns_to_zero <= 1).all())

    def test_homogeneous_chain_against_oracle(self):
        chain = RatioChain(2)
        drift = Tabulated.homogeneous(chain, 100)
        cfg = WalkConfig(
            drift=drift,
            start_state=1,
            start_time=1,
            horizon=100000,
            seed=2,
            escape_level=50,
            stop_at_escape=True,
            stop_at_return=True,
        )
        ensemble = run_ensemble(cfg, 2000)
        expected = hit_probability(HittingProblem(chain, 1, 0, 50))
        self.assertLess(
            abs(ensemble.escape_frequency(50) - expected), 4 * ensemble.se(expected)
        )

    def test_chunking_does_not_change_results(self):
        cfg = WalkConfig(drift=PowerLaw.linear(0.3), horizon=400, seed=9)
        with override_settings(ENSEMBLE_CHUNK_SIZE=1000):
            whole = run_ensemble(cfg, 23).batch
        with override_settings(ENSEMBLE_CHUNK_SIZE=5):
            dispatched = run_ensemble(cfg, 23).batch
            direct = run_ensemble(cfg, 23, dispatch=False).batch

        for batch in (dispatched, direct):
            np.testing.assert_array_equal(batch.final_state, whole.final_state)
            np.testing.assert_array_equal(
                batch.checkpoint_states, whole.checkpoint_states
            )
            np.testing.assert_array_equal(
                batch.first_return_time, whole.first_return_time
            )

    def test_symmetric_walk_returns(self):
        cfg = WalkConfig(drift=SYMMETRIC, horizon=10000, seed=4)
        ensemble = run_ensemble(cfg, 200)
        self.assertGreater(ensemble.return_frequency, 0.95)
        self.assertEqual(
            ensemble.return_frequency_at(10000), ensemble.return_frequency
        )
        self.assertEqual(ensemble.return_frequency_at(1), 0.0)

    def test_transient_walk_returns_less(self):
        recurrent = run_ensemble(
            WalkConfig(drift=PowerLaw.linear(0.25), horizon=10000, seed=5), 400
        )
        transient = run_ensemble(
            WalkConfig(drift=PowerLaw.linear(0.75), horizon=10000, seed=5), 400
        )
        self.assertLess(transient.return_frequency, 0.85)
        self.assertLess(
            transient.return_frequency, recurrent.return_frequency - 0.15
        )
        self.assertGreater(transient.mean_state_by_time()[1][-1], 50)

    def test_mean_state_by_time(self):
        ensemble = run_ensemble(WalkConfig(drift=SYMMETRIC, horizon=65, seed=1), 50)
        times, means, ses = ensemble.mean_state_by_time()
        self.assertEqual(times.tolist(), [1, 2, 3, 5, 9, 17, 33, 65])
        self.assertEqual(means[0], 0)
        self.assertEqual(means[1], 1)
        self.assertTrue((means >= 0).all())
        self.assertEqual(ses[1], 0)

    def test_stop_at_return(self):
        cfg = WalkConfig(drift=SYMMETRIC, horizon=1000, seed=3, stop_at_return=True)
        batch = run_ensemble(cfg, 100).batch
        returned = batch.returns_to_zero == 1
        self.assertTrue((batch.returns_to_zero <= 1).all())
        self.assertTrue((batch.final_state[returned] == 0).all())
        stopped_at = batch.first_return_time[returned]
        self.assertTrue((batch.steps[returned] == stopped_at - 1).all())

    def test_summary(self):
        cfg = WalkConfig(drift=Constant(0.2), horizon=500, seed=6, escape_level=20)
        ensemble = run_ensemble(cfg, 100)
        summary = ensemble.summary()
        self.assertEqual(summary['replicas'], 100)
        self.assertTrue(0 <= summary['return_frequency'] <= 1)
        p = summary['escape_frequency']
        self.assertAlmostEqual(summary['escape_se'], np.sqrt(p * (1 - p) / 100))

        ensemble.max_rows = 10
        rows = list(ensemble.rows())
        self.assertEqual(len(rows), 11)
        self.assertEqual(rows[-1]['replica'], 'summary')
        self.assertEqual(len(ensemble.to_dict()['replicas']), 10)

    def test_replicas(self):
        with self.assertRaises(ConfigError):
            run_ensemble(WalkConfig(drift=SYMMETRIC), 0)


class ContinuousEnsembleTests(unittest.TestCase):
    """ Test the continuous-time embedding """

    def test_holding_times(self):
        cfg = WalkConfig(drift=SYMMETRIC, horizon=2000, seed=7, mode='continuous')
        ensemble = run_ensemble(cfg, 100)
        self.assertGreater(ensemble.batch.holding_count, 150000)
        self.assertLess(
            abs(ensemble.mean_holding_time - 1), 4 * ensemble.mean_holding_time_se
        )

    def test_return_frequency_matches_discrete(self):
        discrete = run_ensemble(WalkConfig(drift=SYMMETRIC, horizon=10000, seed=8), 400)
        continuous = run_ensemble(
            WalkConfig(drift=SYMMETRIC, horizon=10000, seed=8, mode='continuous'), 400
        )
        p, q = discrete.return_frequency, continuous.return_frequency
        self.assertLessEqual(abs(p - q), 4 * pooled_se(p, q, 400))

    def test_embedding_check(self):
        drift = PowerLaw.linear(0.5, cap=0.45)
        for convention in RateConvention:
            cfg = WalkConfig(
                drift=drift, horizon=500, seed=9, rate_convention=convention
            )
            report = embedding_check(cfg, 200, 10, [1, 10, 100, 500])

            self.assertLess(abs(report.holding_z), 4)
            self.assertGreaterEqual(report.fraction_within, 0.9)
            self.assertLessEqual(report.cells['jumps'].sum(), report.jumps)

            rows = list(report.rows())
            self.assertTrue(all(1 <= row['state'] <= 10 for row in rows))

    def test_bucket_edges(self):
        with self.assertRaises(ConfigError):
            embedding_check(WalkConfig(drift=SYMMETRIC), 10, 5, [10, 1])

    def test_cells_need_continuous_mode(self):
        with self.assertRaises(ConfigError):
            simulate_batch(
                WalkConfig(drift=SYMMETRIC),
                0,
                3,
                cells={'state_max': 3, 'bucket_edges': [1, 10]},
            )


class DriftVanishingTests(unittest.TestCase):
    """ Test the estimate of E φ(X_t, t) """

    def test_linear(self):
        cfg = WalkConfig(drift=PowerLaw.linear(0.5), horizon=10000, seed=10)
        report = drift_vanishing_check(cfg, 200, [10, 100, 1000, 10000])
        self.assertLess(report.trend, -0.2)
        self.assertTrue((np.diff(report.mean_phi) < 0).all())
        self.assertLess(report.mean_state_ratio[-1], report.mean_state_ratio[0])

    def test_constant(self):
        cfg = WalkConfig(drift=Constant(0.1), horizon=1000, seed=11)
        report = drift_vanishing_check(cfg, 100, [10, 100, 1000])
        self.assertFalse(report.vanishing)
        self.assertAlmostEqual(report.mean_phi[-1], 0.1)

    def test_exponential(self):
        cfg = WalkConfig(drift=Exponential(1, 1, cap=0.45), horizon=101, seed=12)
        report = drift_vanishing_check(cfg, 200, [10, 50, 100])
        self.assertLess(report.mean_phi[-1], 1e-6)
        self.assertTrue(report.vanishing)

    def test_grid(self):
        cfg = WalkConfig(drift=SYMMETRIC, horizon=100)
        with self.assertRaises(ConfigError):
            drift_vanishing_check(cfg, 10, [50, 10])
        with self.assertRaises(ConfigError):
            drift_vanishing_check(cfg, 10, [10, 500])


class GrowthExponentTests(unittest.TestCase):
    """ Test the regression of log E X_t on log t """

    def test_synthetic(self):
        times = np.array([1, 100, 400, 1600, 6400])
        states = np.vstack([np.sqrt(times) * k for k in (1, 2, 3)]).astype(np.int64)
        ensemble = EnsembleStats(synthetic_batch(times, states))
        fit = growth_exponent(ensemble, 100, 6400)
        self.assertAlmostEqual(fit.slope, 0.5, places=10)
        self.assertEqual(fit.points, 4)

    def test_too_few_points(self):
        times = np.array([1, 2, 3])
        ensemble = EnsembleStats(synthetic_batch(times, [[0, 1, 2]]))
        with self.assertRaises(ConfigError):
            growth_exponent(ensemble, 2, 3)

    @pytest.mark.slow
    def test_linear_walk(self):
        cfg = WalkConfig(drift=PowerLaw.linear(0.6), horizon=100000, seed=13)
        fit = growth_exponent(run_ensemble(cfg, 10000), 1000, 100000)
        self.assertGreaterEqual(fit.slope, 0.5)
        self.assertLessEqual(fit.slope, 0.7)


class OraclePropertyTests(unittest.TestCase):
    """ Escape frequencies of homogeneous chains against the oracle """

    @pytest.mark.slow
    def test_property_sweep(self):
        rng = default_rng(14)
        agreeing = 0
        for i, c in enumerate(rng.uniform(0, 3, size=100)):
            chain = RatioChain(float(c), shift=1)
            cfg = WalkConfig(
                drift=Tabulated.homogeneous(chain, 100),
                start_state=1,
                horizon=10 ** 6,
                seed=i,
                escape_level=30,
                stop_at_escape=True,
                stop_at_return=True,
            )
            ensemble = run_ensemble(cfg, 10000)
            expected = hit_probability(HittingProblem(chain, 1, 0, 30))
            if abs(ensemble.escape_frequency(30) - expected) <= 3 * ensemble.se(
                expected
            ):
                agreeing += 1

        self.assertGreaterEqual(agreeing, 97)

    @pytest.mark.slow
    def test_embedding_acceptance(self):
        drift = PowerLaw.linear(0.5, cap=0.45)
        cfg = WalkConfig(drift=drift, horizon=10000, seed=15)
        report = embedding_check(cfg, 100, 20, [1, 100, 1000, 10000])
        self.assertGreater(report.jumps, 10 ** 6 * 0.99)
        self.assertLess(abs(report.mean_holding_time - 1), 0.003)
        self.assertGreaterEqual(report.fraction_within, 0.95)


class TaskTests(unittest.TestCase):
    """ Test the simulation task """

    def test_chunk(self):
        cfg = WalkConfig(drift=PowerLaw.linear(0.3), horizon=300, seed=16)
        data = simulate_chunk(cfg.to_dict(), 4, 6)
        batch = Batch.from_dict(data)
        direct = simulate_batch(cfg, 4, 6)

        self.assertEqual(batch.first, 4)
        np.testing.assert_array_equal(batch.checkpoint_states, direct.checkpoint_states)
        np.testing.assert_array_equal(batch.max_state, direct.max_state)

    def test_concatenate(self):
        cfg = WalkConfig(drift=SYMMETRIC, horizon=100, seed=1)
        parts = [simulate_batch(cfg, 5, 5), simulate_batch(cfg, 0, 5)]
        whole = Batch.concatenate(parts)
        np.testing.assert_array_equal(
            whole.final_state, simulate_batch(cfg, 0, 10).final_state
        )

        with self.assertRaises(ValueError):
            Batch.concatenate([simulate_batch(cfg, 0, 5), simulate_batch(cfg, 6, 5)])


class SimulateCommandTests(unittest.TestCase):
    """ Test the simulate command """

    def test_ensemble(self):
        data = run_command(
            'simulate',
            '--family',
            'linear',
            '--rho',
            '0.25',
            '--horizon',
            '200',
            '--replicas',
            '20',
            '--seed',
            '3',
        )
        self.assertEqual(data['manifest']['command'], 'simulate')
        self.assertEqual(data['manifest']['seed'], 3)
        self.assertEqual(data['result']['ensemble']['summary']['replicas'], 20)
        self.assertEqual(len(data['result']['ensemble']['replicas']), 20)

    def test_seed(self):
        args = ('--family', 'constant', '--value', '0.1', '--horizon', '100')
        first = run_command('simulate', *args, '--seed', '5')
        second = run_command('simulate', *args, '--seed', '5')
        self.assertEqual(first['result'], second['result'])

    def test_replay(self):
        args = ('--family', 'linear', '--rho', '0.3', '--horizon', '300')
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'first.json')
            call_command(
                'simulate', *args, '--replicas', '7', '--output', path, '--silent'
            )
            with open(path, encoding='utf-8') as fp:
                first = json.load(fp)

            replayed = run_command('simulate', '--replay', path)

        self.assertEqual(replayed['manifest']['seed'], first['manifest']['seed'])
        self.assertEqual(replayed['result'], first['result'])

    def test_path_csv(self):
        manifest, lines = run_command_csv(
            'simulate',
            '--family',
            'constant',
            '--value',
            '0',
            '--horizon',
            '10',
            '--seed',
            '1',
            '--capture-path',
        )
        self.assertEqual(manifest['options']['capture_path'], True)
        self.assertEqual(lines[0], 't,state')
        self.assertEqual(lines[1], '1,0')
        self.assertEqual(len(lines), 11)

    def test_invalid_input(self):
        with self.assertRaises(CommandError) as cm:
            run_command(
                'simulate', '--family', 'constant', '--value', '0', '--horizon', '0'
            )
        self.assertEqual(cm.exception.returncode, 2)
        self.assertIn('horizon', str(cm.exception))
