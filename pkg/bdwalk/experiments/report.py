""" Monte Carlo evidence for the analytic verdicts of a sweep

Simulation can only be consistent with a verdict, never prove it. Each
conclusive point is checked on its own, and points that differ only in ρ
are compared pairwise: a transient point should return less often than a
recurrent point with smaller drift. Anything that contradicts a verdict by
more than CONFLICT_Z combined standard errors is flagged, as are points
where the diagonal test, the ratio test and the expected region disagree.
"""

import math
from collections import defaultdict

from bdwalk.classifier.verdicts import Label

import logging

logger = logging.getLogger(__name__)


# z beyond which two frequencies count as clearly different
CONFLICT_Z = 5.0

# a frequency this many standard errors away from a value is away from it
EVIDENCE_Z = 3.0

# return frequency that counts as close to 1 on its own
RETURN_NEAR_ONE = 0.99

CONSISTENT_RECURRENT = 'consistent with recurrence'
CONSISTENT_TRANSIENT = 'consistent with transience'
NOT_CORROBORATED = 'not corroborated'
NO_SIMULATION = 'no simulation'
NO_VERDICT = 'no analytic verdict'


def _frequency(ensemble):
    """ (return frequency, standard error) of EnsembleStats or a summary """
    if isinstance(ensemble, dict):
        return ensemble['return_frequency'], ensemble['return_se']
    p = ensemble.return_frequency
    return p, ensemble.se(p)


def compare_return_frequencies(a, b):
    """ z-score of the difference of two return frequencies

    >>> compare_return_frequencies(
    ...     {'return_frequency': 0.9, 'return_se': 0.03},
    ...     {'return_frequency': 0.5, 'return_se': 0.04})
    {'difference': 0.4, 'se': 0.05, 'z': 8.0}
    """
    pa, sa = _frequency(a)
    pb, sb = _frequency(b)
    difference = round(pa - pb, 12)
    se = round(math.sqrt(sa ** 2 + sb ** 2), 12)

    if se > 0:
        z = round(difference / se, 12)
    elif difference == 0:
        z = 0.0
    else:
        z = math.copysign(math.inf, difference)

    return {'difference': difference, 'se': se, 'z': z}


def recurrence_evidence(mc):
    """ Whether the unreturned fraction shrinks with the horizon

    The return frequency counts as approaching 1 when it is at least
    RETURN_NEAR_ONE, or when the fraction of walks without a return at the
    horizon is clearly below that at a tenth of the time span. """
    curve = mc['returns_by_horizon']
    early, last = curve[-2], curve[-1]
    se = math.sqrt(early['se'] ** 2 + last['se'] ** 2)
    shrinking = last['frequency'] - early['frequency'] > EVIDENCE_Z * se
    near_one = last['frequency'] >= RETURN_NEAR_ONE

    return {
        'return_frequency': last['frequency'],
        'return_se': last['se'],
        'returns_by_horizon': curve,
        'near_one': near_one,
        'shrinking_unreturned': shrinking,
        'consistent': near_one or shrinking,
    }


def transience_evidence(mc):
    """ Whether returns stay away from 1 and escapes persist with the level

    For a transient walk the frequency of reaching level b before a return
    tends to a positive limit as b grows; ``escape_ratio`` compares the
    highest level with the lowest. """
    p, se = mc['return_frequency'], mc['return_se']
    away = p < 1 and 1 - p > EVIDENCE_Z * se

    curve = mc['escape_by_level']
    low, high = curve[0], curve[-1]
    positive = high['frequency'] > EVIDENCE_Z * high['se']
    ratio = high['frequency'] / low['frequency'] if low['frequency'] else None

    return {
        'return_frequency': p,
        'return_se': se,
        'escape_by_level': curve,
        'escape_ratio': ratio,
        'away_from_one': away,
        'escape_persists': positive,
        'consistent': away and positive,
    }


def point_evidence(record):
    entry = {
        'index': record['index'],
        'parameters': record['parameters'],
        'label': record['label'],
        'expected': record['expected'],
    }

    label = record['label']
    if label not in (Label.RECURRENT.value, Label.TRANSIENT.value):
        entry['evidence'] = NO_VERDICT
        return entry

    mc = record['mc']
    if not mc:
        entry['evidence'] = NO_SIMULATION
        return entry

    if label == Label.RECURRENT.value:
        details = recurrence_evidence(mc)
        consistent = CONSISTENT_RECURRENT
    else:
        details = transience_evidence(mc)
        consistent = CONSISTENT_TRANSIENT

    entry['details'] = details
    entry['evidence'] = consistent if details['consistent'] else NOT_CORROBORATED
    return entry


def _line_key(record):
    """ the drift of a record without ρ; records with equal keys form a line """
    drift = dict(record['drift'] or {})
    drift.pop('rho', None)
    return tuple(sorted(drift.items()))


def pairwise_comparisons(records):
    """ Recurrent against transient points on the same ρ line

    Drift grows with ρ, so the recurrent point should return more often. A
    transient point returning more often by CONFLICT_Z combined standard
    errors is a conflict. """
    lines = defaultdict(lambda: {Label.RECURRENT.value: [], Label.TRANSIENT.value: []})
    for record in records:
        if record['mc'] and record['label'] in (
            Label.RECURRENT.value,
            Label.TRANSIENT.value,
        ):
            lines[_line_key(record)][record['label']].append(record)

    comparisons = []
    for line in lines.values():
        for rec in line[Label.RECURRENT.value]:
            for tra in line[Label.TRANSIENT.value]:
                comparison = compare_return_frequencies(rec['mc'], tra['mc'])
                z = comparison['z']
                if z > CONFLICT_Z:
                    outcome = 'consistent'
                elif z < -CONFLICT_Z:
                    outcome = 'conflict'
                else:
                    outcome = 'unresolved'
                comparison.update(
                    recurrent=rec['index'], transient=tra['index'], outcome=outcome
                )
                comparisons.append(comparison)

    return comparisons


def _flags(record):
    reasons = []
    label, ratio, expected = record['label'], record['ratio_label'], record['expected']
    conclusive = (Label.RECURRENT.value, Label.TRANSIENT.value)

    if label in conclusive and ratio in conclusive and label != ratio:
        reasons.append('diagonal test says {}, ratio test says {}'.format(label, ratio))

    if label in conclusive and expected and label != expected:
        if record['in_band']:
            logger.info(
                'point %d near a boundary: %s, expected %s',
                record['index'],
                label,
                expected,
            )
        else:
            reasons.append('verdict {} outside the {} region'.format(label, expected))

    return reasons


def evidence_report(sweep):
    """ Monte Carlo corroboration of every conclusive verdict of a sweep """
    records = list(sweep.records)
    points = [point_evidence(record) for record in records]
    comparisons = pairwise_comparisons(records)

    reasons = defaultdict(list)
    for record in records:
        reasons[record['index']] += _flags(record)

    for comparison in comparisons:
        if comparison['outcome'] != 'conflict':
            continue
        message = 'returns more often than recurrent point {} (z = {:.1f})'.format(
            comparison['recurrent'], comparison['z']
        )
        reasons[comparison['transient']].append(message)
        message = 'returns less often than transient point {} (z = {:.1f})'.format(
            comparison['transient'], comparison['z']
        )
        reasons[comparison['recurrent']].append(message)

    flagged = [
        {'index': index, 'reasons': messages}
        for index, messages in sorted(reasons.items())
        if messages
    ]
    for flag in flagged:
        logger.warning(
            'point %d flagged: %s', flag['index'], '; '.join(flag['reasons'])
        )

    def count(evidence):
        return sum(1 for p in points if p['evidence'] == evidence)

    return {
        'points': points,
        'comparisons': comparisons,
        'flagged': flagged,
        'summary': {
            'points': len(points),
            'consistent': count(CONSISTENT_RECURRENT) + count(CONSISTENT_TRANSIENT),
            'not_corroborated': count(NOT_CORROBORATED),
            'no_simulation': count(NO_SIMULATION),
            'no_verdict': count(NO_VERDICT),
            'comparisons': len(comparisons),
            'conflicts': sum(1 for c in comparisons if c['outcome'] == 'conflict'),
            'flagged': len(flagged),
        },
    }
