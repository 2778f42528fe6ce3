import math
import os
import tempfile
import unittest

import numpy as np

from bdwalk.classifier.chains import RatioChain
from bdwalk.core.exceptions import ConfigError, DomainError
from bdwalk.drift.functions import (
    Constant,
    Exponential,
    PowerLaw,
    RateSchedule,
    Tabulated,
    Violation,
    diagonal,
    diagonal_ratio,
    evaluate,
    expansion_error,
    from_dict,
    validate,
)


class EvaluateTests(unittest.TestCase):
    """ Test φ(n, t) of the built-in families """

    def test_power_law(self):
        self.assertEqual(evaluate(PowerLaw(rho=0.5, alpha=1, beta=1), 4, 16), 0.125)

    def test_constant_zero(self):
        self.assertEqual(evaluate(Constant(0), 7, 3), 0.0)

    def test_exponential(self):
        value = evaluate(Exponential(alpha=1, beta=1), 2, 10)
        self.assertAlmostEqual(value, math.exp(-8), delta=1e-16)

    def test_forced_step_at_zero(self):
        # α < 0 would be infinite at n = 0
        f = PowerLaw(rho=1, alpha=-1, beta=0, cap=0.45)
        self.assertEqual(evaluate(f, 0, 5), 0.0)

    def test_half_is_rejected(self):
        f = PowerLaw(rho=0.5, alpha=1, beta=1)
        with self.assertRaises(DomainError) as cm:
            evaluate(f, 10, 10)

        self.assertEqual(cm.exception.n, 10)
        self.assertEqual(cm.exception.value, 0.5)

    def test_cap(self):
        f = Exponential(alpha=2, beta=0.1, cap=0.45)
        self.assertEqual(evaluate(f, 20, 1), 0.45)

    def test_vectorized(self):
        f = PowerLaw.linear(0.5)
        values = evaluate(f, np.array([1, 2, 4]), np.array([4, 8, 16]))
        np.testing.assert_array_equal(values, [0.0625, 0.0625, 0.0625])

    def test_invalid_parameters(self):
        with self.assertRaises(ConfigError) as cm:
            PowerLaw(rho=-1, alpha=1, beta=-0.5)

        fields = [field for field, _msg in cm.exception.violations]
        self.assertEqual(fields, ['rho', 'beta'])

        with self.assertRaises(ConfigError):
            Exponential(alpha=1, beta=0)

        with self.assertRaises(ConfigError):
            PowerLaw(rho=1, alpha=0, beta=1, cap=0.5)


class DiagonalTests(unittest.TestCase):
    """ Test φ(n, n²) """

    def test_linear(self):
        self.assertAlmostEqual(diagonal(PowerLaw.linear(0.5), 10), 0.025, places=15)

    def test_boundary_family(self):
        f = PowerLaw(rho=1, alpha=0, beta=0.5)
        self.assertAlmostEqual(diagonal(f, 25), 0.04, places=15)
        self.assertEqual(PowerLaw.boundary(1, 0), f)

    def test_exponential(self):
        value = diagonal(Exponential(alpha=1, beta=1), 5)
        self.assertAlmostEqual(value, math.exp(-20), delta=1e-20)

    def test_bitwise_equal_to_evaluate(self):
        f = PowerLaw(rho=0.3, alpha=0.7, beta=0.9)
        for n in (1, 3, 17, 1000, 65537):
            self.assertEqual(diagonal(f, n), evaluate(f, n, n * n))


class RateTests(unittest.TestCase):
    def test_rates_sum_to_one(self):
        rates = RateSchedule(PowerLaw(rho=0.3, alpha=0.4, beta=0.8))
        ns = np.arange(0, 200)
        taus = np.linspace(200, 5000, 200)
        total = rates.birth(ns, taus) + rates.death(ns, taus)
        np.testing.assert_array_equal(total, np.ones_like(total))

    def test_forced_up_at_zero(self):
        rates = RateSchedule(Constant(0.1))
        self.assertEqual(rates.birth(0, 3.5), 1.0)
        self.assertEqual(rates.death(0, 3.5), 0.0)

    def test_diagonal_expansion(self):
        f = PowerLaw.linear(0.4)
        ns = np.array([10, 100, 1000])
        phi = diagonal(f, ns)

        # the ratio is 1 + 4φ up to terms of order φ²
        self.assertTrue(np.all(expansion_error(f, ns) <= 10 * phi ** 2))
        self.assertTrue(np.all(diagonal_ratio(f, ns) > 1))


class ValidateTests(unittest.TestCase):
    """ Test sampling of the assumptions on φ """

    def test_exceeds_half(self):
        violations = validate(PowerLaw.linear(3), n_max=10, t_max=10)
        self.assertTrue(violations)
        self.assertIn(Violation(10, 10.0, 1.5, Violation.RANGE), violations)

    def test_constant(self):
        self.assertEqual(validate(Constant(0.1), n_max=10, t_max=100), [])

    def test_wedge(self):
        f = PowerLaw.linear(0.5)
        self.assertEqual(validate(f, n_max=10, t_max=100), [])

        # outside the wedge n ≤ t the formula exceeds 1/2
        self.assertTrue(validate(f, n_max=10, t_max=100, wedge=False))

    def test_increasing_in_t(self):
        table = Tabulated.from_rows(
            [[1, 1, 0.1], [1, 2, 0.2], [2, 1, 0.1], [2, 2, 0.1]]
        )
        violations = validate(table, n_max=2, t_max=4, wedge=False)
        self.assertEqual([v.invariant for v in violations], [Violation.MONOTONE])
        self.assertEqual(violations[0].n, 1)

    def test_monotone_families(self):
        for f in (
            PowerLaw(rho=0.2, alpha=0.5, beta=1.0, cap=0.45),
            PowerLaw.boundary(0.2, -0.5),
            Exponential(alpha=1, beta=1, cap=0.45),
        ):
            self.assertEqual(validate(f, n_max=30, t_max=1e6), [], str(f))


class TabulatedTests(unittest.TestCase):
    """ Test lookups in tabulated drift functions """

    def setUp(self):
        self.table = Tabulated.from_rows(
            [
                [1, 1, 0.3],
                [1, 10, 0.2],
                [5, 1, 0.25],
                [5, 10, 0.05],
            ]
        )

    def test_nearest_lower(self):
        self.assertEqual(evaluate(self.table, 3, 9.5), 0.3)
        self.assertEqual(evaluate(self.table, 3, 10), 0.2)
        self.assertEqual(evaluate(self.table, 7, 100), 0.05)

    def test_zero_tail(self):
        table = Tabulated(
            self.table.ns, self.table.ts, self.table.values, tail='zero'
        )
        self.assertEqual(evaluate(table, 6, 10), 0.0)
        self.assertEqual(evaluate(table, 5, 10), 0.05)

    def test_incomplete_grid(self):
        with self.assertRaises(ConfigError):
            Tabulated.from_rows([[1, 1, 0.1], [2, 2, 0.1]])

    def test_from_csv(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'phi.csv')
            with open(path, 'w') as fp:
                fp.write('n,t,phi\n1,1,0.3\n1,10,0.2\n5,1,0.25\n5,10,0.05\n')

            table = from_dict({'family': 'tabulated', 'path': path})

        self.assertEqual(evaluate(table, 5, 12), 0.05)
        self.assertEqual(table.to_dict()['path'], path)

    def test_homogeneous_chain(self):
        chain = RatioChain(c=2)
        table = Tabulated.homogeneous(chain, 100)
        rates = RateSchedule(table)

        for n in (1, 10, 100):
            birth, death = chain.rates(np.array([n]))
            self.assertAlmostEqual(rates.birth(n, 1e6), birth[0], places=14)
            self.assertAlmostEqual(rates.death(n, 5.0), death[0], places=14)


class FromDictTests(unittest.TestCase):
    def test_families(self):
        self.assertEqual(
            from_dict({'family': 'linear', 'rho': 0.25}), PowerLaw.linear(0.25)
        )
        self.assertEqual(
            from_dict({'family': 'boundary', 'rho': 0.3, 'alpha': 0.5}),
            PowerLaw(rho=0.3, alpha=0.5, beta=0.75),
        )
        self.assertEqual(
            from_dict({'family': 'exponential', 'alpha': 1, 'beta': 1, 'cap': 0.45}),
            Exponential(1.0, 1.0, 0.45),
        )

    def test_round_trip(self):
        f = PowerLaw(rho=0.3, alpha=0.2, beta=0.9, cap=0.45)
        self.assertEqual(from_dict(f.to_dict()), f)

    def test_missing_parameter(self):
        with self.assertRaises(ConfigError) as cm:
            from_dict({'family': 'power_law', 'rho': 1, 'alpha': 1})

        self.assertEqual(cm.exception.violations[0][0], 'beta')

    def test_unknown_family(self):
        with self.assertRaises(ConfigError):
            from_dict({'family': 'gaussian'})
