import io
import json
import os
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from unittest import mock

import numpy as np

from django.core.management.base import CommandError
from django.test import override_settings

from bdwalk.cli import main
from bdwalk.core.checks import check_numeric_settings, check_output_dir
from bdwalk.core.config import read_json_config, unknown_keys
from bdwalk.core.exceptions import ConfigError, DomainError, describe
from bdwalk.core.output import MANIFEST_PREFIX, read_manifest, write_csv, write_json
from bdwalk.test import run_command, write_temp


class ConfigTests(unittest.TestCase):
    """ Test reading JSON config files """

    def test_missing_file(self):
        with self.assertRaises(ConfigError) as cm:
            read_json_config('/nonexistent/config.json')
        self.assertEqual(cm.exception.violations[0][0], 'config')

    def test_not_an_object(self):
        path = write_temp('[1, 2]')
        try:
            with self.assertRaises(ConfigError) as cm:
                read_json_config(path)
        finally:
            os.remove(path)
        self.assertIn('must be an object', str(cm.exception))

    def test_parse_error(self):
        path = write_temp('{"rho": 0.3,}')
        try:
            with self.assertRaises(ConfigError) as cm:
                read_json_config(path)
        finally:
            os.remove(path)
        self.assertEqual(cm.exception.line, 1)
        self.assertEqual(cm.exception.column, 13)

    def test_no_suggestion_for_distant_keys(self):
        self.assertEqual(
            unknown_keys({'zzzzzz': 1}, ['rho']), [('zzzzzz', 'unknown key')]
        )


class ErrorTests(unittest.TestCase):
    def test_format(self):
        ex = ConfigError([('rho', 'must be positive'), (None, 'bad')], line=2, column=5)
        self.assertEqual(str(ex), 'line 2, column 5: rho: must be positive; bad')

    def test_string_violation(self):
        self.assertEqual(ConfigError('broken').violations, [(None, 'broken')])

    def test_describe_domain_error(self):
        ex = DomainError('phi(1, 1) = 0.7 is not in [0, 1/2)', n=1, t=1, value=0.7)
        self.assertEqual(
            describe(ex), 'DomainError: phi(1, 1) = 0.7 is not in [0, 1/2)'
        )


class OutputTests(unittest.TestCase):
    """ Test result files and their manifests """

    def test_csv_manifest(self):
        out = io.StringIO()
        count = write_csv(
            out, {'command': 'x'}, ['a', 'b'], [{'a': 0.1, 'b': None}, {'a': 2}]
        )
        lines = out.getvalue().splitlines()
        self.assertEqual(count, 2)
        self.assertEqual(lines[0], MANIFEST_PREFIX + '{"command": "x"}')
        self.assertEqual(lines[1:], ['a,b', '0.1,', '2,'])

    def test_json_non_finite_numbers(self):
        out = io.StringIO()
        result = {
            'frequency': np.float64(1.0),
            'se': np.float64('nan'),
            'z': float('inf'),
            'curve': np.array([0.5, np.nan]),
        }
        write_json(out, {'command': 'x'}, result)

        def reject(constant):
            raise ValueError('{} is not valid JSON'.format(constant))

        data = json.loads(out.getvalue(), parse_constant=reject)
        expected = {'frequency': 1.0, 'se': None, 'z': None, 'curve': [0.5, None]}
        self.assertEqual(data['result'], expected)

    def test_read_manifest_without_manifest(self):
        path = write_temp(json.dumps({'result': 1}))
        try:
            with self.assertRaises(ConfigError) as cm:
                read_manifest(path)
        finally:
            os.remove(path)
        self.assertEqual(cm.exception.violations[0][0], 'replay')

    def test_replay_of_other_command(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'hit.json')
            main(
                [
                    'oracle',
                    'hit',
                    '--symmetric',
                    '--b',
                    '4',
                    '--k',
                    '2',
                    '--output',
                    path,
                    '--silent',
                ]
            )
            with self.assertRaises(CommandError) as cm:
                run_command('classify', '--replay', path)

        self.assertEqual(cm.exception.returncode, 2)
        self.assertIn("command 'oracle'", str(cm.exception))


class CheckTests(unittest.TestCase):
    """ Test the system checks of the settings """

    def test_defaults_pass(self):
        self.assertEqual(check_numeric_settings(), [])

    @override_settings(DEFAULT_N_LO=0)
    def test_non_positive(self):
        ids = [e.id for e in check_numeric_settings()]
        self.assertEqual(ids, ['core.E001'])

    @override_settings(DEFAULT_N_LO=64, DEFAULT_N_HI=32)
    def test_range(self):
        ids = [e.id for e in check_numeric_settings()]
        self.assertEqual(ids, ['core.E002'])

    @override_settings(DEFAULT_MARGIN=1.5)
    def test_margin(self):
        ids = [e.id for e in check_numeric_settings()]
        self.assertEqual(ids, ['core.E003'])

    def test_output_dir_is_file(self):
        path = write_temp('')
        try:
            with override_settings(OUTPUT_DIR=path):
                ids = [e.id for e in check_output_dir()]
        finally:
            os.remove(path)
        self.assertEqual(ids, ['core.E004'])

    def test_missing_output_dir(self):
        with tempfile.TemporaryDirectory() as tmp:
            with override_settings(OUTPUT_DIR=os.path.join(tmp, 'results')):
                ids = [e.id for e in check_output_dir()]
        self.assertEqual(ids, ['core.W001'])


class MainTests(unittest.TestCase):
    """ Test the exit codes of the command line """

    def run_main(self, *args):
        """ Runs main with the result written to a temporary file

        Returns the exit code and the parsed result, or None. """
        stderr = io.StringIO()
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'result.json')
            argv = list(args) + ['--output', path, '--silent']
            with redirect_stderr(stderr):
                code = main(argv)

            data = None
            if os.path.exists(path):
                with open(path, encoding='utf-8') as fp:
                    data = json.load(fp)

        self.stderr = stderr.getvalue()
        return code, data

    def test_classify(self):
        code, data = self.run_main('classify', '--family', 'linear', '--rho', '0.25')
        self.assertEqual(code, 0)
        self.assertEqual(data['result']['verdict']['label'], 'Recurrent')
        self.assertEqual(data['manifest']['command'], 'classify')
        self.assertEqual(data['manifest']['options']['rho'], 0.25)

    def test_oracle_hit(self):
        code, data = self.run_main(
            'oracle', 'hit', '--a', '0', '--b', '50', '--k', '10', '--symmetric'
        )
        self.assertEqual(code, 0)
        self.assertAlmostEqual(data['result']['probability'], 0.2, delta=1e-12)

    def test_invalid_value(self):
        code, data = self.run_main('classify', '--family', 'linear', '--rho', '-1')
        self.assertEqual(code, 2)
        self.assertIsNone(data)
        self.assertIn('rho', self.stderr)

    def test_unknown_flag(self):
        code, _data = self.run_main('classify', '--rno', '0.3')
        self.assertEqual(code, 2)

    def test_missing_argument(self):
        code, _data = self.run_main('oracle', 'hit', '--symmetric', '--k', '3')
        self.assertEqual(code, 2)
        self.assertIn('b: required by hit', self.stderr)

    def test_runtime_failure(self):
        target = 'bdwalk.classifier.management.commands.classify.classify'
        with mock.patch(target, side_effect=RuntimeError('boom')):
            code, data = self.run_main(
                'classify', '--family', 'linear', '--rho', '0.25'
            )
        self.assertEqual(code, 1)
        self.assertIsNone(data)
        self.assertIn('boom', self.stderr)

    def test_unknown_subcommand(self):
        stderr = io.StringIO()
        with redirect_stderr(stderr):
            self.assertEqual(main(['migrate']), 2)
        self.assertIn("unknown subcommand 'migrate'", stderr.getvalue())

    def test_usage(self):
        stdout = io.StringIO()
        with redirect_stdout(stdout):
            self.assertEqual(main(['--help']), 0)
            self.assertEqual(main([]), 2)
        self.assertIn('subcommands:', stdout.getvalue())
