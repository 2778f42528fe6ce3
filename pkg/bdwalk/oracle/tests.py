import unittest

import numpy as np

from bdwalk.classifier.chains import ConstantChain, RatioChain, ScaledChain
from bdwalk.core.exceptions import ConfigError, InvalidChain, NotNormalizable
from bdwalk.oracle.ladder import (
    HittingProblem,
    escape_probability,
    expected_returns,
    hit_probability,
    partial_sum_escape,
)
from bdwalk.oracle.stationary import balance_residual, stationary


SYMMETRIC = ConstantChain(0.5, 0.5)


class HitProbabilityTests(unittest.TestCase):
    """ Test the gambler's-ruin formula """

    def test_symmetric(self):
        p = hit_probability(HittingProblem(SYMMETRIC, 10, 0, 50))
        self.assertAlmostEqual(p, 0.2, delta=1e-12)

    def test_single_unknown(self):
        # λ₁/μ₁ = 2
        chain = ConstantChain(2 / 3, 1 / 3)
        p = hit_probability(HittingProblem(chain, 1, 0, 2))
        self.assertAlmostEqual(p, 2 / 3, places=14)

    def test_absorbing_levels(self):
        chain = RatioChain(2)
        self.assertEqual(hit_probability(HittingProblem(chain, 3, 3, 40)), 0.0)
        self.assertEqual(hit_probability(HittingProblem(chain, 40, 3, 40)), 1.0)

    def test_monotone_in_start(self):
        chain = RatioChain(-1.5, shift=3)
        values = [
            hit_probability(HittingProblem(chain, k, 2, 60)) for k in range(2, 61)
        ]
        self.assertTrue(all(a <= b for a, b in zip(values, values[1:])))

    def test_biased_chain_does_not_overflow(self):
        chain = ConstantChain(0.3, 0.7)
        p = hit_probability(HittingProblem(chain, 500, 0, 10 ** 5))
        self.assertEqual(p, 0.0)

        p = hit_probability(HittingProblem(ConstantChain(0.7, 0.3), 1, 0, 10 ** 5))
        self.assertAlmostEqual(p, 1 - 3 / 7, places=12)

    def test_invalid_problem(self):
        with self.assertRaises(ConfigError) as cm:
            HittingProblem(SYMMETRIC, 60, 0, 50)
        self.assertEqual(cm.exception.violations[0][0], 'k')

        with self.assertRaises(ConfigError):
            HittingProblem(SYMMETRIC, 0, 5, 5)

    def test_scale_invariance(self):
        chain = RatioChain(0.7, shift=3)
        scaled = ScaledChain(chain, 3.0)
        problem = HittingProblem(chain, 7, 1, 90)
        self.assertEqual(
            hit_probability(problem),
            hit_probability(HittingProblem(scaled, 7, 1, 90)),
        )


class ReturnsTests(unittest.TestCase):
    """ Test escape and return probabilities """

    def test_symmetric(self):
        estimate = expected_returns(SYMMETRIC, 10 ** 6)
        self.assertAlmostEqual(estimate.escape, 1e-6, delta=1e-15)
        self.assertAlmostEqual(estimate.return_probability, 1, places=5)
        self.assertTrue(estimate.decreasing)

    def test_transient_chain(self):
        estimate = expected_returns(RatioChain(2), 1000)

        # S_∞ = 1, so the escape probability tends to 1/2
        self.assertAlmostEqual(estimate.escape, partial_sum_escape(RatioChain(2), 1000))
        self.assertGreater(estimate.escape, 0.5)
        self.assertFalse(estimate.infinite_returns)

    def test_recurrent_chain(self):
        estimate = expected_returns(ConstantChain(0.4, 0.6), 100)
        self.assertTrue(estimate.infinite_returns)
        self.assertLess(estimate.escape, 1e-6)

    def test_harmonic_chain(self):
        estimate = expected_returns(RatioChain(1), 1000)
        harmonic = np.sum(1 / np.arange(1, 1001))
        self.assertAlmostEqual(estimate.escape, 1 / harmonic, places=12)
        self.assertTrue(estimate.decreasing)

    def test_partial_sum_consistency(self):
        rng = np.random.default_rng(7)
        for c in rng.uniform(-3, 3, size=100):
            chain = RatioChain(float(c), shift=3)
            escape = expected_returns(chain, 1000).escape
            expected = partial_sum_escape(chain, 1000)
            self.assertLess(abs(escape - expected), 1e-10 * expected, str(chain))

    def test_hit_probability_cross_check(self):
        chain = RatioChain(2)
        self.assertEqual(
            escape_probability(chain, 1000),
            hit_probability(HittingProblem(chain, 1, 0, 1000)),
        )

    def test_horizon(self):
        with self.assertRaises(ConfigError):
            expected_returns(SYMMETRIC, 1)


class StationaryTests(unittest.TestCase):
    """ Test stationary distributions and the balance equations """

    def test_geometric(self):
        P = stationary(ConstantChain(1 / 3, 2 / 3), 100)
        self.assertAlmostEqual(P[0], 0.5, delta=1e-12)
        self.assertAlmostEqual(P[1], 0.25, delta=1e-12)

        expected = 0.5 * 0.5 ** np.arange(101)
        np.testing.assert_allclose(P.probabilities, expected, rtol=1e-12, atol=1e-15)

    def test_residual(self):
        for chain in (
            ConstantChain(1 / 3, 2 / 3),
            ConstantChain(0.2, 0.7),
            RatioChain(-3, shift=3),
        ):
            P = stationary(chain, 200)
            self.assertLess(balance_residual(P, chain), 1e-12, str(chain))
            self.assertLessEqual(P.total, 1 + 1e-12)
            self.assertGreaterEqual(P.total, 1 - P.tail_bound - 1e-12)

    def test_null_recurrent(self):
        with self.assertRaises(NotNormalizable) as cm:
            stationary(SYMMETRIC, 1000)
        self.assertIn('growth', cm.exception.diagnostics)

    def test_uniform_segment(self):
        self.assertEqual(balance_residual(np.full(20, 0.05), SYMMETRIC), 0)

    def test_perturbed(self):
        chain = ConstantChain(1 / 3, 2 / 3)
        P = 0.5 * 0.5 ** np.arange(101)
        P[0] += 0.01
        P /= P.sum()
        self.assertGreater(balance_residual(P, chain), 1e-3)

    def test_scale_invariance(self):
        chain = ConstantChain(0.2, 0.7)
        P = stationary(chain, 100)
        Q = stationary(ScaledChain(chain, 4.0), 100)
        np.testing.assert_allclose(P.probabilities, Q.probabilities, rtol=1e-12)

    def test_invalid_chain(self):
        with self.assertRaises(InvalidChain):
            stationary(ConstantChain(0.5, 0.0), 100)
