import io
import json
import os
import tempfile
import unittest

from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import override_settings

from bdwalk.classifier.verdicts import Label
from bdwalk.core.exceptions import ConfigError
from bdwalk.drift.functions import Constant, Exponential, PowerLaw
from bdwalk.experiments import regions
from bdwalk.experiments.examples import example_spec, run_example
from bdwalk.experiments.forms import expand_range
from bdwalk.experiments.report import (
    CONSISTENT_RECURRENT,
    NO_SIMULATION,
    compare_return_frequencies,
    evidence_report,
)
from bdwalk.experiments.spec import apply_overrides, load_config, parse_spec
from bdwalk.experiments.sweep import CSV_FIELDS, SweepResult, phase_sweep
from bdwalk.simulator.config import WalkConfig
from bdwalk.simulator.walks import run_ensemble
from bdwalk.test import run_command, run_command_csv, write_temp


RECURRENT = Label.RECURRENT.value
TRANSIENT = Label.TRANSIENT.value
INCONCLUSIVE = Label.INCONCLUSIVE.value


# φ = 0.1 on the grid {1, 10} × {1, 100}
TABLE = 'n,t,phi\n1,1,0.1\n1,100,0.1\n10,1,0.1\n10,100,0.1\n'


def without_runtime(records):
    return [{k: v for k, v in r.items() if k != 'runtime'} for r in records]


def fields(exception):
    return [name for name, _message in exception.violations]


class LoadConfigTests(unittest.TestCase):
    """ Test reading and validating experiment configs """

    def test_minimal_config_defaults(self):
        spec = parse_spec({'drift': {'family': 'linear', 'rho': 0.3}})
        self.assertEqual(spec.name, 'sweep')
        self.assertEqual(spec.grid, {'rho': [0.3]})
        self.assertEqual(spec.classifier['method'], 'diagonal')
        self.assertEqual(spec.classifier['n_lo'], settings.DEFAULT_N_LO)
        self.assertEqual(spec.classifier['n_hi'], settings.DEFAULT_N_HI)
        self.assertEqual(spec.classifier['margin'], settings.DEFAULT_MARGIN)
        self.assertEqual(spec.oracle['horizon_states'], 1000)
        self.assertEqual(spec.simulation['replicas'], 0)
        self.assertEqual(spec.simulation['mode'], 'discrete')
        self.assertEqual(spec.validation['n_max'], 100)
        self.assertEqual(spec.band, 0.05)
        self.assertEqual(spec.outputs, ['json'])
        self.assertIsNone(spec.seed)
        self.assertFalse(spec.simulates)
        self.assertEqual(spec.points(), [{'rho': 0.3}])

    def test_negative_rho_names_rho(self):
        with self.assertRaises(ConfigError) as cm:
            parse_spec({'drift': {'family': 'linear', 'rho': -1}})
        self.assertEqual(fields(cm.exception), ['drift.rho'])

    def test_unknown_key_suggests(self):
        with self.assertRaises(ConfigError) as cm:
            parse_spec({'drift': {'family': 'linear', 'rno': 0.3}})
        self.assertIn(
            ('drift.rno', "unknown key; did you mean 'rho'?"), cm.exception.violations
        )

    def test_unknown_section(self):
        with self.assertRaises(ConfigError) as cm:
            parse_spec({'drift': {'family': 'linear', 'rho': 1}, 'simulaton': {}})
        self.assertIn("did you mean 'simulation'?", str(cm.exception))

    def test_every_violation_reported(self):
        config = {
            'drift': {'family': 'linear', 'rho': -1},
            'classifier': {'n_lo': 0},
            'simulation': {'replicas': -5},
            'band': -1,
        }
        with self.assertRaises(ConfigError) as cm:
            parse_spec(config)
        self.assertEqual(
            sorted(fields(cm.exception)),
            ['band', 'classifier.n_lo', 'drift.rho', 'simulation.replicas'],
        )

    def test_missing_drift(self):
        with self.assertRaises(ConfigError) as cm:
            parse_spec({'name': 'x'})
        self.assertEqual(fields(cm.exception), ['drift'])

    def test_family_parameters(self):
        with self.assertRaises(ConfigError) as cm:
            parse_spec({'drift': {'family': 'boundary', 'rho': 0.1, 'beta': 1}})
        self.assertEqual(sorted(fields(cm.exception)), ['drift.alpha', 'drift.beta'])

    def test_range_grid(self):
        spec = parse_spec(
            {
                'drift': {
                    'family': 'boundary',
                    'rho': 0.1,
                    'alpha': {'start': 0, 'stop': 0.3, 'step': 0.1},
                }
            }
        )
        self.assertEqual(spec.grid['alpha'], [0.0, 0.1, 0.2, 0.3])

    def test_empty_grid(self):
        with self.assertRaises(ConfigError) as cm:
            parse_spec({'drift': {'family': 'linear', 'rho': []}})
        self.assertEqual(fields(cm.exception), ['drift.rho'])

    def test_bad_range(self):
        with self.assertRaises(ConfigError) as cm:
            parse_spec(
                {
                    'drift': {
                        'family': 'linear',
                        'rho': {'start': 1, 'stop': 0, 'step': 0.1},
                    }
                }
            )
        self.assertIn('stop must not be below start', str(cm.exception))

    def test_restricted_grid(self):
        spec = parse_spec(
            {
                'drift': {
                    'family': 'power_law',
                    'rho': 1,
                    'alpha': [0, 0.5, 1],
                    'beta': [0.5, 1],
                },
                'restrict': 'beta_gt_alpha',
            }
        )
        points = [(p['alpha'], p['beta']) for p in spec.points()]
        self.assertEqual(points, [(0.0, 0.5), (0.0, 1.0), (0.5, 1.0)])

    def test_round_trip(self):
        spec = example_spec(2, {'seed': 4, 'replicas': 10})
        self.assertEqual(parse_spec(spec.to_dict()), spec)

    def test_load_config(self):
        path = write_temp(json.dumps({'drift': {'family': 'linear', 'rho': [0.2]}}))
        try:
            spec = load_config(path)
        finally:
            os.remove(path)
        self.assertEqual(spec.family, 'linear')

    def test_parse_error_position(self):
        path = write_temp('{\n  "drift": \n}')
        try:
            with self.assertRaises(ConfigError) as cm:
                load_config(path)
        finally:
            os.remove(path)
        self.assertEqual(cm.exception.line, 3)
        self.assertIn('line 3', str(cm.exception))

    def test_tabulated_family(self):
        path = write_temp(TABLE, suffix='.csv')
        try:
            spec = parse_spec({'drift': {'family': 'tabulated', 'path': path}})
            copy = parse_spec(spec.to_dict())
        finally:
            os.remove(path)
        self.assertEqual(spec.fixed, {'path': path, 'tail': 'constant'})
        self.assertEqual(spec.points(), [{}])
        self.assertEqual(copy, spec)

    def test_tabulated_rows_out_of_order(self):
        path = write_temp('n,t,phi\n1,100,0.1\n1,1,0.1\n', suffix='.csv')
        try:
            with self.assertRaises(ConfigError) as cm:
                parse_spec({'drift': {'family': 'tabulated', 'path': path}})
        finally:
            os.remove(path)
        self.assertEqual(fields(cm.exception), ['drift.path'])
        self.assertIn('line 3', str(cm.exception))

    def test_tabulated_missing_file(self):
        with self.assertRaises(ConfigError) as cm:
            parse_spec({'drift': {'family': 'tabulated', 'path': '/no/phi.csv'}})
        self.assertEqual(fields(cm.exception), ['drift.path'])
        self.assertIn('could not read', str(cm.exception))

    def test_tabulated_needs_path(self):
        with self.assertRaises(ConfigError) as cm:
            parse_spec({'drift': {'family': 'tabulated'}})
        self.assertEqual(fields(cm.exception), ['drift.path'])

    def test_tabulated_tail_choice(self):
        path = write_temp(TABLE, suffix='.csv')
        try:
            with self.assertRaises(ConfigError) as cm:
                parse_spec(
                    {'drift': {'family': 'tabulated', 'path': path, 'tail': 'linear'}}
                )
        finally:
            os.remove(path)
        self.assertEqual(fields(cm.exception), ['drift.tail'])

    def test_path_of_parametric_family(self):
        with self.assertRaises(ConfigError) as cm:
            parse_spec({'drift': {'family': 'linear', 'rho': 0.3, 'path': 'phi.csv'}})
        self.assertEqual(fields(cm.exception), ['drift.path'])

    def test_unknown_override(self):
        with self.assertRaises(ConfigError) as cm:
            apply_overrides({}, {'rno': 1})
        self.assertIn("did you mean 'rho'?", str(cm.exception))


class RegionTests(unittest.TestCase):
    """ Test the analytic phase diagram """

    def test_example_points(self):
        self.assertEqual(regions.expected_label(PowerLaw(1, 0.5, 0.6)), Label.TRANSIENT)
        self.assertEqual(regions.expected_label(PowerLaw(1, 0, 0.75)), Label.RECURRENT)
        self.assertEqual(
            regions.expected_label(PowerLaw.linear(0.3)), Label.RECURRENT
        )
        self.assertEqual(
            regions.expected_label(PowerLaw.boundary(0.2, 0.5)), Label.RECURRENT
        )
        self.assertEqual(
            regions.expected_label(PowerLaw.boundary(0.3, -1)), Label.TRANSIENT
        )
        self.assertEqual(regions.expected_label(Exponential(2, 0.1)), Label.RECURRENT)

    def test_critical(self):
        drift = PowerLaw.boundary(0.25, 0)
        self.assertIsNone(regions.expected_label(drift))
        self.assertEqual(regions.boundary_distance(drift), 0)
        self.assertFalse(regions.outside_region(drift))

    def test_outside_region(self):
        # β ≥ 1 on the transient side of α = 2β − 1
        drift = PowerLaw(1, 1.5, 1.2, cap=0.45)
        self.assertIsNone(regions.expected_label(drift))
        self.assertTrue(regions.outside_region(drift))
        self.assertTrue(regions.outside_region(Constant(0.1)))
        self.assertIsNone(regions.boundary_distance(Constant(0.1)))

    def test_distance(self):
        drift = PowerLaw(1, 0.2, 0.5)
        self.assertAlmostEqual(
            regions.boundary_distance(drift), 0.2 / 5 ** 0.5, delta=1e-12
        )


class ExampleTests(unittest.TestCase):
    """ Test the four worked examples """

    def test_example_1_threshold(self):
        grid = expand_range(0.05, 0.45, 0.05) + expand_range(0.55, 0.95, 0.05)
        sweep = run_example(1, {'rho': grid})
        self.assertEqual(len(sweep), 18)
        for record in sweep:
            expected = RECURRENT if record['rho'] < 0.5 else TRANSIENT
            self.assertEqual(record['label'], expected, record['rho'])
            self.assertEqual(record['expected'], expected)
            self.assertEqual(record['ratio_label'], expected)
            self.assertIsNone(record['error'])

    def test_example_1_default_grid(self):
        spec = example_spec(1)
        rhos = [p['rho'] for p in spec.points()]
        self.assertEqual(rhos[0], 0.1)
        self.assertEqual(rhos[-1], 0.9)
        self.assertNotIn(0.5, rhos)
        self.assertEqual(len(rhos), 16)

    def test_example_2_phase_diagram(self):
        sweep = run_example(2)
        self.assertEqual(len(sweep), 280)

        for record in sweep:
            alpha, beta = record['alpha'], record['beta']
            self.assertGreater(beta, alpha)
            self.assertIsNone(record['error'], record)

            to_curve = abs(alpha - (2 * beta - 1)) / 5 ** 0.5
            to_diagonal = abs(alpha - beta) / 2 ** 0.5
            if min(to_curve, to_diagonal) > 0.05:
                if alpha < min(beta, 2 * beta - 1):
                    expected = RECURRENT
                else:
                    self.assertTrue(0 <= beta < 1 and 2 * beta - 1 < alpha < beta)
                    expected = TRANSIENT
                self.assertEqual(record['label'], expected, (alpha, beta))
            else:
                self.assertIn(
                    record['label'], (record['expected'], INCONCLUSIVE), (alpha, beta)
                )

    def test_example_2_transient_point(self):
        sweep = run_example(2, {'alpha': 0.5, 'beta': 0.6})
        (record,) = sweep.records
        self.assertEqual(record['label'], TRANSIENT)
        self.assertEqual(record['expected'], TRANSIENT)
        self.assertFalse(record['outside_stated_region'])

    def test_example_3(self):
        sweep = run_example(3, {'rho': [0.05, 0.15, 0.35, 0.45]})
        self.assertEqual(len(sweep), 20)
        for record in sweep:
            self.assertEqual(record['beta'], (1 + record['alpha']) / 2)
            expected = RECURRENT if record['rho'] < 0.25 else TRANSIENT
            self.assertEqual(record['label'], expected, record['parameters'])

    def test_example_4(self):
        sweep = run_example(4)
        self.assertEqual(len(sweep), 6)
        for record in sweep:
            self.assertEqual(record['label'], RECURRENT, record['parameters'])
            self.assertEqual(record['expected'], RECURRENT)

    def test_unknown_example(self):
        with self.assertRaises(ConfigError) as cm:
            run_example(5)
        self.assertEqual(fields(cm.exception), ['id'])


class PhaseSweepTests(unittest.TestCase):
    """ Test sweeps over custom grids """

    def test_boundary_threshold(self):
        spec = parse_spec(
            {
                'drift': {
                    'family': 'power_law',
                    'rho': [0.2, 0.3],
                    'alpha': -1,
                    'beta': 0,
                },
                'seed': 1,
            }
        )
        labels = [r['label'] for r in phase_sweep(spec)]
        self.assertEqual(labels, [RECURRENT, TRANSIENT])

    def test_recurrent_point(self):
        spec = parse_spec(
            {
                'drift': {
                    'family': 'power_law',
                    'rho': 1,
                    'alpha': 0,
                    'beta': 0.75,
                    'cap': 0.45,
                },
                'seed': 1,
            }
        )
        (record,) = phase_sweep(spec).records
        self.assertEqual(record['label'], RECURRENT)
        self.assertGreaterEqual(record['oracle_escape'], 0)
        self.assertLessEqual(record['oracle_escape'], 1)

    def test_invalid_model(self):
        spec = parse_spec(
            {
                'drift': {
                    'family': 'power_law',
                    'rho': [0.3, 1],
                    'alpha': 1,
                    'beta': 1,
                },
                'seed': 1,
            }
        )
        valid, invalid = phase_sweep(spec).records
        self.assertEqual(valid['label'], TRANSIENT)
        self.assertFalse(valid['invalid_model'])
        self.assertTrue(invalid['invalid_model'])
        self.assertIsNone(invalid['label'])
        self.assertTrue(invalid['error'].startswith('invalid-model'))
        self.assertTrue(invalid['violations'])

    def test_point_errors_recorded(self):
        spec = parse_spec(
            {
                'drift': {
                    'family': 'power_law',
                    'rho': 0.1,
                    'alpha': 0,
                    'beta': [-0.5, 0.5],
                },
                'seed': 1,
            }
        )
        broken, fine = phase_sweep(spec).records
        self.assertIn('beta', broken['error'])
        self.assertIsNone(broken['label'])
        self.assertEqual(fine['label'], RECURRENT)
        self.assertIsNone(fine['error'])

    def test_tabulated_drift(self):
        path = write_temp(TABLE, suffix='.csv')
        try:
            labels = {}
            for tail in ('constant', 'zero'):
                drift = {'family': 'tabulated', 'path': path, 'tail': tail}
                spec = parse_spec({'drift': drift, 'seed': 1})
                (record,) = phase_sweep(spec).records
                labels[tail] = record['label']
        finally:
            os.remove(path)

        # φ stays 0.1 beyond the table, or drops to 0
        self.assertEqual(labels, {'constant': TRANSIENT, 'zero': RECURRENT})
        self.assertEqual(record['drift'], drift)
        self.assertIsNone(record['expected'])
        self.assertIsNone(record['error'])

    def test_seed_required(self):
        spec = parse_spec({'drift': {'family': 'linear', 'rho': 0.3}})
        with self.assertRaises(ConfigError):
            phase_sweep(spec)

    def test_records_carry_seeds(self):
        sweep = run_example(1, {'rho': [0.3, 0.7], 'seed': 9})
        seeds = [r['seed'] for r in sweep]
        self.assertEqual(len(set(seeds)), 2)
        self.assertEqual(sweep.seed, 9)

    def test_reproducible(self):
        overrides = {'rho': [0.3, 0.7], 'replicas': 30, 'horizon': 200, 'seed': 5}
        first = run_example(1, overrides, dispatch=False)
        second = run_example(1, overrides, dispatch=False)
        self.assertEqual(
            without_runtime(first.records), without_runtime(second.records)
        )
        self.assertIsNotNone(first.records[0]['mc'])

    @override_settings(SWEEP_CHUNK_SIZE=1)
    def test_dispatch_matches_sequential(self):
        overrides = {'rho': [0.2, 0.4, 0.6], 'replicas': 20, 'horizon': 100, 'seed': 2}
        parallel = run_example(1, overrides, dispatch=True)
        sequential = run_example(1, overrides, dispatch=False)
        self.assertEqual(
            without_runtime(parallel.records), without_runtime(sequential.records)
        )

    def test_mc_summary(self):
        sweep = run_example(
            1, {'rho': 0.3, 'replicas': 50, 'horizon': 1000, 'escape_level': 20}
        )
        mc = sweep.records[0]['mc']
        self.assertEqual(mc['replicas'], 50)
        levels = [e['level'] for e in mc['escape_by_level']]
        self.assertEqual(levels, [5, 10, 20])
        frequencies = [r['frequency'] for r in mc['returns_by_horizon']]
        self.assertEqual(frequencies, sorted(frequencies))
        self.assertAlmostEqual(frequencies[-1], mc['return_frequency'])

    def test_to_dict(self):
        sweep = run_example(4, {'alpha': 1, 'beta': 1})
        data = sweep.to_dict()
        self.assertEqual(data['counts'][RECURRENT], 1)
        self.assertEqual(data['spec']['drift']['family'], 'exponential')
        restored = SweepResult.from_dict(json.loads(json.dumps(data)))
        self.assertEqual([r['label'] for r in restored], [r['label'] for r in sweep])
        self.assertEqual(restored.spec, sweep.spec)

    def test_rows(self):
        sweep = run_example(3, {'rho': 0.2, 'alpha': 0})
        (row,) = list(sweep.rows())
        self.assertEqual(list(row), list(CSV_FIELDS))
        self.assertEqual(row['label'], RECURRENT)
        self.assertIsNone(row['mc_return_freq'])

    def test_gnuplot(self):
        sweep = run_example(4)
        out = io.StringIO()
        sweep.write_gnuplot(out)
        lines = out.getvalue().splitlines()

        comments = [line for line in lines if line.startswith('#')]
        self.assertIn('# boundary: alpha = 2*beta - 1 for beta < 1', comments)
        self.assertIn('# boundary: alpha = beta', comments)

        data = [line for line in lines if not line.startswith('#')]
        self.assertEqual(data.count(''), 1)
        self.assertEqual(data[0], '0.5 0.1 NaN -1')
        self.assertEqual(len([line for line in data if line]), 6)


class EvidenceReportTests(unittest.TestCase):
    """ Test the Monte Carlo evidence report """

    def test_empty_sweep(self):
        sweep = SweepResult(example_spec(1, {'seed': 1}), [])
        report = evidence_report(sweep)
        self.assertEqual(report['points'], [])
        self.assertEqual(report['comparisons'], [])
        self.assertEqual(report['flagged'], [])
        self.assertEqual(report['summary']['points'], 0)

    def test_without_simulation(self):
        report = evidence_report(run_example(1, {'rho': 0.3}))
        self.assertEqual(report['points'][0]['evidence'], NO_SIMULATION)
        self.assertEqual(report['flagged'], [])

    def test_transient_returns_less(self):
        sweep = run_example(
            1,
            {
                'rho': [0.25, 0.75],
                'replicas': 1000,
                'horizon': 10000,
                'escape_level': 50,
                'seed': 3,
            },
        )
        report = evidence_report(sweep)
        (comparison,) = report['comparisons']
        self.assertEqual(comparison['recurrent'], 0)
        self.assertEqual(comparison['transient'], 1)
        self.assertEqual(comparison['outcome'], 'consistent')
        self.assertGreater(comparison['z'], 5)
        self.assertEqual(report['flagged'], [])

    def test_exponential_recurrence(self):
        sweep = run_example(
            4,
            {'alpha': 1, 'beta': 1, 'replicas': 1000, 'horizon': 2000, 'seed': 4},
        )
        report = evidence_report(sweep)
        (point,) = report['points']
        self.assertEqual(point['evidence'], CONSISTENT_RECURRENT)
        self.assertEqual(report['summary']['consistent'], 1)

    def test_disagreement_flagged(self):
        sweep = run_example(1, {'rho': 0.3, 'seed': 1})
        record = dict(sweep.records[0], label=TRANSIENT)
        report = evidence_report(SweepResult(sweep.spec, [record]))
        (flag,) = report['flagged']
        self.assertEqual(flag['index'], 0)
        self.assertEqual(len(flag['reasons']), 2)

    def test_compare_ensembles(self):
        cfg = WalkConfig(drift=Constant(0), horizon=200, seed=1)
        a = run_ensemble(cfg, 100)
        comparison = compare_return_frequencies(a, a)
        self.assertEqual(comparison['difference'], 0)
        self.assertEqual(comparison['z'], 0)

    def test_compare_degenerate(self):
        one = {'return_frequency': 1.0, 'return_se': 0.0}
        half = {'return_frequency': 0.5, 'return_se': 0.0}
        self.assertEqual(compare_return_frequencies(one, half)['z'], float('inf'))


class SweepCommandTests(unittest.TestCase):
    """ Test the sweep and example commands """

    def test_example_3_transient(self):
        data = run_command('example', '3', '--rho', '0.3')
        records = data['result']['sweep']['records']
        self.assertEqual(len(records), 5)
        self.assertEqual({r['label'] for r in records}, {TRANSIENT})
        self.assertEqual(data['manifest']['seed'], 0)
        self.assertEqual(data['manifest']['options']['spec']['drift']['rho'], [0.3])

    def test_example_csv(self):
        manifest, lines = run_command_csv('example', '4')
        self.assertEqual(manifest['command'], 'example')
        header = 'alpha,beta,rho,label,c,n0,mc_return_freq,mc_se'
        self.assertTrue(lines[0].startswith(header))
        self.assertEqual(len(lines), 7)

    def test_sweep_replay(self):
        config = {
            'name': 'small',
            'drift': {'family': 'linear', 'rho': [0.3, 0.7]},
            'simulation': {'replicas': 20, 'horizon': 100},
        }
        experiment = write_temp(json.dumps(config))
        try:
            with tempfile.TemporaryDirectory() as tmp:
                path = os.path.join(tmp, 'first.json')
                call_command('sweep', experiment, '--output', path, '--silent')
                with open(path, encoding='utf-8') as fp:
                    first = json.load(fp)

                os.remove(experiment)
                replayed = run_command('sweep', '--replay', path)
        finally:
            if os.path.exists(experiment):
                os.remove(experiment)

        self.assertEqual(replayed['manifest']['seed'], first['manifest']['seed'])
        self.assertEqual(
            without_runtime(replayed['result']['sweep']['records']),
            without_runtime(first['result']['sweep']['records']),
        )

    def test_sweep_gnuplot(self):
        config = {'drift': {'family': 'linear', 'rho': 0.3}, 'seed': 1}
        experiment = write_temp(json.dumps(config))
        try:
            with tempfile.TemporaryDirectory() as tmp:
                dat = os.path.join(tmp, 'phase.dat')
                data = run_command('sweep', experiment, '--gnuplot', dat)
                with open(dat, encoding='utf-8') as fp:
                    lines = fp.read().splitlines()
        finally:
            os.remove(experiment)

        self.assertEqual(data['result']['gnuplot'], dat)
        self.assertEqual(lines[-1], '1.0 1.0 0.3 -1')

    def test_gnuplot_output_without_directory(self):
        config = {
            'drift': {'family': 'linear', 'rho': 0.3},
            'seed': 1,
            'outputs': ['json', 'gnuplot'],
        }
        experiment = write_temp(json.dumps(config))
        try:
            with override_settings(OUTPUT_DIR=None):
                with self.assertRaises(CommandError) as cm:
                    run_command('sweep', experiment)
        finally:
            os.remove(experiment)

        self.assertEqual(cm.exception.returncode, 2)
        self.assertIn('outputs: gnuplot needs --gnuplot', str(cm.exception))

    def test_gnuplot_output_directory(self):
        config = {
            'drift': {'family': 'linear', 'rho': 0.3},
            'seed': 1,
            'outputs': ['json', 'gnuplot'],
        }
        experiment = write_temp(json.dumps(config))
        try:
            with tempfile.TemporaryDirectory() as tmp:
                with override_settings(OUTPUT_DIR=tmp):
                    data = run_command('sweep', experiment)
                written = os.listdir(tmp)
        finally:
            os.remove(experiment)

        self.assertEqual(len(written), 1)
        self.assertTrue(written[0].startswith('sweep-'))
        self.assertTrue(written[0].endswith('.dat'))
        self.assertEqual(os.path.basename(data['result']['gnuplot']), written[0])

    def test_sweep_evidence(self):
        data = run_command('example', '1', '--rho', '0.3', '--evidence')
        self.assertEqual(data['result']['evidence']['summary']['points'], 1)

    def test_missing_experiment(self):
        with self.assertRaises(CommandError) as cm:
            run_command('sweep')
        self.assertEqual(cm.exception.returncode, 2)
        self.assertIn('experiment', str(cm.exception))

    def test_invalid_config(self):
        experiment = write_temp(json.dumps({'drift': {'family': 'linear', 'rno': 1}}))
        try:
            with self.assertRaises(CommandError) as cm:
                run_command('sweep', experiment)
        finally:
            os.remove(experiment)
        self.assertEqual(cm.exception.returncode, 2)
        self.assertIn("did you mean 'rho'?", str(cm.exception))
