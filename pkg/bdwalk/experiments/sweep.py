""" Sweeps of a drift family over a parameter grid

Every grid point is validated, classified by the diagonal criterion and
by the ratio test on its diagonal chain, checked against the exact escape
probability of that chain and, when the experiment asks for it, simulated. Grid
points are independent: each has its own seed derived from the sweep seed
and its index, so the records do not depend on how the points are split
between workers.
"""

import itertools
import math
import time

from celery import group

from django.conf import settings

from bdwalk.classifier.chains import DiagonalChain
from bdwalk.classifier.criteria import classify
from bdwalk.classifier.verdicts import Label
from bdwalk.core.exceptions import BdwalkError, ConfigError, describe
from bdwalk.drift.functions import validate
from bdwalk.experiments import regions
from bdwalk.experiments.spec import parse_spec
from bdwalk.oracle.ladder import escape_probability
from bdwalk.simulator.config import WalkConfig
from bdwalk.simulator.streams import child_seed
from bdwalk.simulator.walks import run_ensemble
from bdwalk.utils import format_number, progress, to_jsonable

import logging

logger = logging.getLogger(__name__)


# violations kept in a record of an invalid model
MAX_VIOLATIONS = 10


def _new_record(spec, index, point):
    return {
        'index': index,
        'parameters': dict(point),
        'seed': child_seed(spec.seed, index),
        'drift': None,
        'alpha': point.get('alpha'),
        'beta': point.get('beta'),
        'rho': point.get('rho'),
        'label': None,
        'c': None,
        'n0': None,
        'verdict': None,
        'expected': None,
        'boundary_distance': None,
        'in_band': False,
        'outside_stated_region': None,
        'ratio_label': None,
        'oracle_escape': None,
        'mc': None,
        'invalid_model': False,
        'violations': [],
        'error': None,
        'runtime': None,
    }


def mc_summary(ensemble, cfg):
    """ Return and escape frequencies of an ensemble at several scales

    Return frequencies are given at 1/100, 1/10 and all of the simulated
    time span, escape frequencies at a quarter, half and all of the escape
    level. """
    summary = ensemble.summary()
    span = cfg.horizon - cfg.start_time

    summary['returns_by_horizon'] = []
    for h in (cfg.start_time + span / 100, cfg.start_time + span / 10, cfg.horizon):
        p = ensemble.return_frequency_at(h)
        summary['returns_by_horizon'].append(
            {'horizon': h, 'frequency': p, 'se': ensemble.se(p)}
        )

    level = cfg.escape_level
    summary['escape_by_level'] = []
    for b in sorted({max(1, level // 4), max(1, level // 2), level}):
        e = ensemble.escape_frequency(b)
        summary['escape_by_level'].append(
            {'level': b, 'frequency': e, 'se': ensemble.se(e)}
        )

    return summary


def simulate_point(spec, drift, seed):
    sim = spec.simulation
    cfg = WalkConfig(
        drift=drift,
        start_state=0,
        start_time=sim['start_time'],
        horizon=sim['horizon'],
        seed=seed,
        mode=sim['mode'],
        escape_level=sim['escape_level'],
        rate_convention=sim['rate_convention'],
    )
    # the sweep itself is split over workers
    ensemble = run_ensemble(cfg, sim['replicas'], dispatch=False)
    return mc_summary(ensemble, cfg)


def evaluate_point(spec, index, point):
    """ The record of one grid point; errors end up in its ``error`` field """
    started = time.perf_counter()
    record = _new_record(spec, index, point)

    try:
        drift = spec.drift(point)
        record['drift'] = drift.to_dict()
        record['alpha'], record['beta'], record['rho'] = regions.exponents(drift)

        expected = regions.expected_label(drift)
        distance = regions.boundary_distance(drift)
        record['expected'] = expected.value if expected else None
        record['boundary_distance'] = distance
        record['in_band'] = distance is not None and distance <= spec.band + 1e-9
        record['outside_stated_region'] = regions.outside_region(drift)

        check = spec.validation
        violations = validate(drift, check['n_max'], check['t_max'])
        if violations:
            first = violations[0]
            record['invalid_model'] = True
            record['violations'] = [v.to_dict() for v in violations[:MAX_VIOLATIONS]]
            record['error'] = 'invalid-model: phi({:g}, {:g}) = {!r} ({})'.format(
                first.n, first.t, first.value, first.invariant
            )
            return record

        cls = spec.classifier
        verdict = classify(
            drift, cls['method'], cls['n_lo'], cls['n_hi'], cls['margin']
        )
        record['verdict'] = verdict.to_dict()
        record['label'] = verdict.label.value
        record['c'] = verdict.witness_c
        record['n0'] = verdict.witness_n0

        ratio = classify(
            drift, 'diagonal-ratio', cls['n_lo'], cls['n_hi'], cls['margin']
        )
        record['ratio_label'] = ratio.label.value

        chain = DiagonalChain(drift)
        record['oracle_escape'] = escape_probability(
            chain, spec.oracle['horizon_states']
        )

        if spec.simulates:
            record['mc'] = simulate_point(spec, drift, record['seed'])

    except BdwalkError as ex:
        logger.warning('grid point %d (%s) failed: %s', index, point, ex)
        record['error'] = describe(ex)

    except Exception as ex:
        logger.exception('grid point %d (%s) failed', index, point)
        record['error'] = describe(ex)

    finally:
        record['runtime'] = time.perf_counter() - started

    return record


def evaluate_range(spec, first, count):
    """ Records of the grid points ``first .. first + count − 1`` """
    points = spec.points()[first : first + count]
    records = [evaluate_point(spec, first + i, p) for i, p in enumerate(points)]
    return to_jsonable(records)


def sweep_ranges(points, size=None):
    """ (first, count) chunks of the grid

    >>> sweep_ranges(5, 2)
    [(0, 2), (2, 2), (4, 1)]
    """
    size = size or settings.SWEEP_CHUNK_SIZE
    return [(first, min(size, points - first)) for first in range(0, points, size)]


def phase_sweep(spec, dispatch=True, show_progress=False):
    """ Evaluates every grid point of ``spec``; returns a SweepResult

    With ``dispatch`` the chunks of the grid run as a celery group and are
    re-assembled by index. """
    if spec.seed is None:
        raise ConfigError([('seed', 'a sweep needs a seed')])

    total = len(spec.points())
    ranges = sweep_ranges(total)
    logger.info(
        'sweeping %d grid points of %s in %d chunks', total, spec.name, len(ranges)
    )

    if dispatch and len(ranges) > 1:
        from bdwalk.experiments.tasks import evaluate_points

        data = spec.to_dict()
        job = group(evaluate_points.s(data, first, count) for first, count in ranges)
        parts = job.apply_async().get()

    else:
        parts = []
        for first, count in ranges:
            parts.append(evaluate_range(spec, first, count))
            if show_progress:
                progress(first + count, total, spec.name)

    records = sorted(itertools.chain.from_iterable(parts), key=lambda r: r['index'])
    result = SweepResult(spec, records)

    errors = sum(1 for r in records if r['error'])
    if errors:
        logger.warning('%d of %d grid points have errors', errors, total)

    return result


# the flat CSV columns; the first eight are fixed
CSV_FIELDS = (
    'alpha',
    'beta',
    'rho',
    'label',
    'c',
    'n0',
    'mc_return_freq',
    'mc_se',
    'expected',
    'ratio_label',
    'boundary_distance',
    'in_band',
    'outside_stated_region',
    'oracle_escape',
    'mc_escape_freq',
    'mc_escape_se',
    'invalid_model',
    'seed',
    'runtime',
    'error',
)


class SweepResult(object):
    """ One record per grid point, in grid order """

    def __init__(self, spec, records):
        self.spec = spec
        self.records = list(records)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def seed(self):
        return self.spec.seed

    def counts(self):
        """ number of records per label; 'none' counts points without verdict """
        counts = {label.value: 0 for label in Label}
        counts['none'] = 0
        for record in self.records:
            counts[record['label'] or 'none'] += 1
        return counts

    def to_dict(self):
        return {
            'name': self.spec.name,
            'seed': self.seed,
            'spec': self.spec.to_dict(),
            'counts': self.counts(),
            'records': self.records,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(parse_spec(data['spec']), data['records'])

    def rows(self):
        for record in self.records:
            mc = record['mc'] or {}
            row = {name: record.get(name) for name in CSV_FIELDS}
            row['mc_return_freq'] = mc.get('return_frequency')
            row['mc_se'] = mc.get('return_se')
            row['mc_escape_freq'] = mc.get('escape_frequency')
            row['mc_escape_se'] = mc.get('escape_se')
            yield row

    def write_gnuplot(self, fp):
        """ Phase dataset: one block of ``alpha beta rho code`` lines per β

        Blocks are separated by a blank line. Codes are −1 for recurrent,
        0 for inconclusive and 1 for transient; points without a verdict
        get NaN. """
        fp.write('# {} (seed {})\n'.format(self.spec.name, self.seed))
        fp.write('# columns: alpha beta rho code\n')
        fp.write('# codes: -1 Recurrent, 0 Inconclusive, 1 Transient\n')
        for line in regions.BOUNDARIES:
            fp.write('# {}\n'.format(line))

        blocks = itertools.groupby(self.records, key=lambda r: r['beta'])
        for n, (_beta, records) in enumerate(blocks):
            if n:
                fp.write('\n')
            for record in records:
                fp.write(' '.join(_gnuplot_values(record)) + '\n')


def _gnuplot_values(record):
    label = record['label']
    code = Label(label).code if label else None
    values = (record['alpha'], record['beta'], record['rho'], code)
    return ['NaN' if _missing(v) else format_number(v) for v in values]


def _missing(value):
    return value is None or (isinstance(value, float) and math.isnan(value))
