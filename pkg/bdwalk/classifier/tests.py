import unittest

import numpy as np

from bdwalk.classifier.chains import (
    ConstantChain,
    DiagonalChain,
    RatioChain,
    ScaledChain,
    TabulatedChain,
    chain_from_dict,
)
from bdwalk.classifier.criteria import (
    classify,
    classify_diagonal,
    classify_ratio,
    classify_series,
    karlin_mcgregor_partial_sums,
    raabe_from_products,
    raabe_statistic,
)
from bdwalk.classifier.verdicts import Label, Verdict
from bdwalk.core.exceptions import ConfigError, DomainError, InvalidChain
from bdwalk.drift.functions import Constant, Exponential, PowerLaw
from bdwalk.test import run_command


# smaller scan range than the default to keep the tests quick
N_HI = 2 ** 16


class DiagonalCriterionTests(unittest.TestCase):
    """ Test the diagonal test on the families with known behaviour """

    def assertLabel(self, f, label, **kwargs):
        verdict = classify_diagonal(f, n_hi=kwargs.pop('n_hi', N_HI), **kwargs)
        self.assertEqual(verdict.label, label, '{}: {}'.format(f, verdict))
        return verdict

    def test_linear_threshold(self):
        for rho in np.round(np.arange(0.05, 0.5, 0.05), 2):
            verdict = self.assertLabel(PowerLaw.linear(rho), Label.RECURRENT)
            self.assertLess(verdict.witness_c, 1)

        for rho in np.round(np.arange(0.55, 1.0, 0.05), 2):
            verdict = self.assertLabel(PowerLaw.linear(rho), Label.TRANSIENT)
            self.assertGreater(verdict.witness_c, 1)

    def test_witness(self):
        verdict = self.assertLabel(PowerLaw.linear(0.25), Label.RECURRENT)
        self.assertAlmostEqual(verdict.witness_c, 0.5, places=12)
        self.assertEqual(verdict.witness_n0, 16)

    def test_boundary_family(self):
        self.assertLabel(PowerLaw(rho=0.3, alpha=0, beta=0.5), Label.TRANSIENT)

        for alpha in (-1, -0.5, 0, 0.5, 1):
            for rho in (0.05, 0.15):
                self.assertLabel(PowerLaw.boundary(rho, alpha), Label.RECURRENT)
            for rho in (0.35, 0.45):
                self.assertLabel(PowerLaw.boundary(rho, alpha), Label.TRANSIENT)

    def test_exponential(self):
        self.assertLabel(Exponential(alpha=1, beta=1), Label.RECURRENT)

        for alpha in (0.5, 1, 2):
            for beta in (0.1, 1):
                f = Exponential(alpha=alpha, beta=beta, cap=0.45)
                self.assertLabel(f, Label.RECURRENT)

    def test_symmetric(self):
        verdict = self.assertLabel(Constant(0), Label.RECURRENT)
        self.assertEqual(verdict.witness_c, 0)

    def test_critical_value(self):
        verdict = self.assertLabel(PowerLaw.linear(0.5), Label.INCONCLUSIVE)
        stats = verdict.to_dict()['stats']
        self.assertTrue(stats)
        self.assertEqual(set(stats[0]), {'n0', 'sup', 'inf'})

    def test_domain_error(self):
        with self.assertRaises(DomainError):
            classify_diagonal(PowerLaw(rho=1, alpha=2, beta=0.5), n_hi=N_HI)

    def test_range(self):
        with self.assertRaises(ConfigError):
            classify_diagonal(Constant(0), n_lo=100, n_hi=10)

        with self.assertRaises(ConfigError):
            classify_diagonal(Constant(0), margin=0)


class RatioCriterionTests(unittest.TestCase):
    """ Test the ratio criterion on homogeneous chains """

    def test_transient(self):
        verdict = classify_ratio(RatioChain(2), n_hi=N_HI)
        self.assertEqual(verdict.label, Label.TRANSIENT)
        self.assertGreater(verdict.witness_c, 1)

    def test_symmetric(self):
        verdict = classify_ratio(ConstantChain(0.5, 0.5), n_hi=N_HI)
        self.assertEqual(verdict.label, Label.RECURRENT)
        self.assertEqual(verdict.witness_c, 0)

    def test_boundary_chain(self):
        verdict = classify_ratio(RatioChain(1), n_hi=N_HI)
        self.assertEqual(verdict.label, Label.RECURRENT)
        self.assertLessEqual(verdict.witness_c, 1)

    def test_invalid_chain(self):
        chain = TabulatedChain((0.5, 0.5, 0.5), (0.0, 0.5, 0.0))
        with self.assertRaises(InvalidChain) as cm:
            classify_ratio(chain, n_lo=1, n_hi=64)
        self.assertEqual(cm.exception.n, 2)

        with self.assertRaises(InvalidChain):
            RatioChain(-3)

    def test_scale_invariance(self):
        for chain in (RatioChain(2), RatioChain(0.5, shift=3), ConstantChain(0.4, 0.6)):
            scaled = ScaledChain(chain, 7.5)
            self.assertEqual(
                classify_ratio(chain, n_hi=N_HI).to_dict(),
                classify_ratio(scaled, n_hi=N_HI).to_dict(),
            )
            ns = np.arange(1, 500)
            np.testing.assert_array_equal(
                raabe_statistic(chain, ns), raabe_statistic(scaled, ns)
            )

    def test_diagonal_consistency(self):
        for f in (
            PowerLaw.linear(0.25),
            PowerLaw.linear(0.75),
            PowerLaw.boundary(0.15, 0.5),
            PowerLaw.boundary(0.4, -1),
            Exponential(alpha=1, beta=1),
        ):
            diagonal = classify_diagonal(f, n_hi=N_HI)
            ratio = classify_ratio(DiagonalChain(f), n_hi=N_HI)
            if diagonal.conclusive and ratio.conclusive:
                self.assertEqual(diagonal.label, ratio.label, str(f))


class SeriesTests(unittest.TestCase):
    """ Test the product series and Raabe's test """

    def test_symmetric_partial_sums(self):
        sums = karlin_mcgregor_partial_sums(ConstantChain(0.5, 0.5), 1000)
        np.testing.assert_allclose(sums, np.arange(1, 1001), rtol=1e-12)

    def test_convergent_partial_sums(self):
        sums = karlin_mcgregor_partial_sums(RatioChain(2), 10 ** 6)
        self.assertLess(abs(sums[-1] - 1), 2e-6)

    def test_harmonic_partial_sums(self):
        m = 10 ** 4
        sums = karlin_mcgregor_partial_sums(RatioChain(1), m)
        harmonic = np.cumsum(1 / np.arange(1, m + 2))
        np.testing.assert_allclose(sums, harmonic[1:] - 1, rtol=1e-10)

    def test_partial_sums_increase(self):
        for chain in (RatioChain(2), RatioChain(-2, shift=3), ConstantChain(0.5, 0.5)):
            sums = karlin_mcgregor_partial_sums(chain, 5000)
            self.assertTrue(np.all(np.diff(sums) > 0), str(chain))

    def test_raabe(self):
        self.assertEqual(raabe_statistic(ConstantChain(0.5, 0.5), 10), 0)
        self.assertAlmostEqual(raabe_statistic(RatioChain(2), 1000), 2000 / 1001)
        self.assertAlmostEqual(raabe_statistic(RatioChain(1), 9), 0.9)

    def test_raabe_identity(self):
        chain = RatioChain(2)
        ns = np.arange(1, 10 ** 4 + 1)
        from_products = raabe_from_products(chain, 10 ** 4)
        np.testing.assert_allclose(
            from_products, raabe_statistic(chain, ns), rtol=1e-10
        )

    def test_series_verdicts(self):
        cases = [
            (RatioChain(2), Label.TRANSIENT),
            (ConstantChain(0.5, 0.5), Label.RECURRENT),
            (RatioChain(1), Label.RECURRENT),
        ]
        for chain, label in cases:
            self.assertEqual(classify_series(chain, N=N_HI).label, label, str(chain))

    def test_small_N(self):
        with self.assertRaises(ConfigError):
            classify_series(RatioChain(2), N=50)

        self.assertEqual(classify_series(RatioChain(3), N=100).label, Label.TRANSIENT)

    def test_agreement(self):
        rng = np.random.default_rng(20140331)
        for c in rng.uniform(-3, 3, size=100):
            chain = RatioChain(float(c), shift=3)
            ratio = classify_ratio(chain, n_hi=4096)
            series = classify_series(chain, N=4096)
            if ratio.conclusive and series.conclusive:
                self.assertEqual(ratio.label, series.label, str(chain))


class DispatchTests(unittest.TestCase):
    def test_methods(self):
        f = PowerLaw.linear(0.75)
        self.assertEqual(classify(f, 'diagonal', n_hi=N_HI).label, Label.TRANSIENT)
        verdict = classify(f, 'diagonal-ratio', n_hi=N_HI)
        self.assertEqual(verdict.label, Label.TRANSIENT)

        chain = RatioChain(1)
        self.assertEqual(classify(chain, 'ratio', n_hi=N_HI).label, Label.RECURRENT)
        self.assertEqual(classify(chain, 'series', n_hi=N_HI).label, Label.RECURRENT)

    def test_wrong_target(self):
        with self.assertRaises(ConfigError):
            classify(RatioChain(1), 'diagonal')

        with self.assertRaises(ConfigError):
            classify(RatioChain(1), 'bertrand')


class ClassifyCommandTests(unittest.TestCase):
    """ Test the classify command on drifts at the threshold """

    def test_critical_power_law(self):
        # 4n·φ(n, n²) = 1 for every n, inside the margin on both sides
        data = run_command(
            'classify',
            '--family',
            'power_law',
            '--rho',
            '0.25',
            '--alpha',
            '1',
            '--beta',
            '1',
        )
        verdict = data['result']['verdict']
        self.assertEqual(verdict['label'], Label.INCONCLUSIVE.value)
        self.assertIsNone(verdict['c'])
        for stats in verdict['stats']:
            self.assertAlmostEqual(stats['sup'], 1.0, delta=1e-12)
            self.assertAlmostEqual(stats['inf'], 1.0, delta=1e-12)

    def test_below_threshold(self):
        args = ['--family', 'power_law', '--rho', '0.2', '--alpha', '1', '--beta', '1']
        data = run_command('classify', *args)
        self.assertEqual(data['result']['verdict']['label'], Label.RECURRENT.value)


class ChainTests(unittest.TestCase):
    def test_from_dict(self):
        self.assertEqual(
            chain_from_dict({'kind': 'ratio', 'c': 2}), RatioChain(2.0, 0.0)
        )
        self.assertEqual(
            chain_from_dict({'kind': 'symmetric'}), ConstantChain(0.5, 0.5)
        )
        chain = chain_from_dict(
            {'kind': 'diagonal', 'drift': {'family': 'linear', 'rho': 0.25}}
        )
        self.assertEqual(chain.drift, PowerLaw.linear(0.25))

        with self.assertRaises(ConfigError):
            chain_from_dict({'kind': 'ratio'})

    def test_tabulated_prefix(self):
        chain = TabulatedChain((1.0, 0.6), (0.0, 0.4), RatioChain(2))
        birth, death = chain.rates(np.array([0, 1, 2]))
        np.testing.assert_array_equal(birth[:2], [1.0, 0.6])
        self.assertAlmostEqual(death[2], 1 / (2 + 1))

    def test_diagonal_chain(self):
        chain = DiagonalChain(PowerLaw.linear(0.5))
        birth, death = chain.rates(np.array([0, 10]))
        np.testing.assert_allclose(birth, [1.0, 0.525])
        np.testing.assert_allclose(death, [0.0, 0.475])
        self.assertAlmostEqual(float(chain.excess(10)), 0.525 / 0.475 - 1)


class VerdictTests(unittest.TestCase):
    def test_to_dict(self):
        verdict = Verdict(Label.TRANSIENT, 1.5, 32, {'method': 'diagonal', 'stats': []})
        self.assertEqual(
            verdict.to_dict(),
            {
                'label': 'Transient',
                'c': 1.5,
                'n0': 32,
                'stats': [],
                'method': 'diagonal',
            },
        )
        self.assertEqual(Verdict.from_dict(verdict.to_dict()), verdict)
