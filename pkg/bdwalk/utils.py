# -*- coding: utf-8 -*-

import json
import math
import subprocess
import sys
import difflib

import numpy as np

from django.conf import settings

import logging

logger = logging.getLogger(__name__)


def progress(val, max_val, status_str='', max_width=50, stream=sys.stderr):

    factor = float(val) / max_val if max_val > 0 else 0

    # progress as percentage
    percentage_str = '{val:.2%}'.format(val=factor)

    # progress bar filled with #s
    factor = min(int(factor * max_width), max_width)
    progress_str = '#' * factor + ' ' * (max_width - factor)

    # insert percentage into bar
    percentage_start = int((max_width - len(percentage_str)) / 2)
    progress_str = (
        progress_str[:percentage_start]
        + percentage_str
        + progress_str[percentage_start + len(percentage_str) :]
    )

    print('\r', end=' ', file=stream)
    print(
        '[ %s ] %s / %s | %s' % (progress_str, val, max_val, status_str),
        end=' ',
        file=stream,
    )
    stream.flush()


def geometric_grid(lo, hi, ratio=2):
    """ Integers lo, lo*ratio, lo*ratio**2, ... that do not exceed hi

    >>> geometric_grid(16, 300)
    [16, 32, 64, 128, 256]

    >>> geometric_grid(3, 3)
    [3]

    >>> geometric_grid(5, 4)
    []
    """
    values = []
    value = lo
    while value <= hi:
        values.append(int(value))
        value *= ratio
    return values


def log_spaced_integers(lo, hi, per_octave=16):
    """ Sorted unique integers spread evenly on a log scale over [lo, hi]

    >>> log_spaced_integers(1, 8, per_octave=1)
    [1, 2, 4, 8]

    >>> log_spaced_integers(10, 10)
    [10]
    """
    if hi < lo:
        return []
    num = max(2, int(math.ceil(math.log2(hi / lo) * per_octave)) + 1)
    values = np.unique(np.rint(np.geomspace(lo, hi, num)).astype(np.int64))
    return [int(v) for v in values]


def suggest_key(key, candidates):
    """ Returns the candidate that is closest to the misspelled key, or None

    >>> suggest_key('rno', ['rho', 'alpha', 'beta'])
    'rho'

    >>> suggest_key('xyz', ['rho', 'alpha']) is None
    True
    """
    matches = difflib.get_close_matches(key, candidates, n=1, cutoff=0.6)
    return matches[0] if matches else None


def binomial_se(p, n):
    """ Standard error of a binomial frequency p estimated from n trials

    >>> binomial_se(0.5, 4)
    0.25

    >>> binomial_se(0.5, 0)
    nan
    """
    if n <= 0:
        return float('nan')
    return math.sqrt(p * (1 - p) / n)


def to_jsonable(obj):
    """ Converts numpy values, tuples and objects with to_dict() for json

    >>> to_jsonable({'a': np.float64(0.5), 'b': (np.int64(1), 2)})
    {'a': 0.5, 'b': [1, 2]}
    """
    if hasattr(obj, 'to_dict'):
        return to_jsonable(obj.to_dict())

    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}

    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]

    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]

    if isinstance(obj, np.integer):
        return int(obj)

    if isinstance(obj, np.floating):
        return float(obj)

    if isinstance(obj, np.bool_):
        return bool(obj)

    return obj


def finite_or_none(obj):
    """ Replaces NaN and infinite floats by None, which JSON can represent

    >>> finite_or_none({'se': float('nan'), 'z': [1.5, float('-inf')]})
    {'se': None, 'z': [1.5, None]}
    """
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None

    if isinstance(obj, dict):
        return {k: finite_or_none(v) for k, v in obj.items()}

    if isinstance(obj, list):
        return [finite_or_none(v) for v in obj]

    return obj


def dumps(obj, **kwargs):
    """ json.dumps for results; floats keep full precision (repr)

    Non-finite numbers are written as null.

    >>> dumps({'p': np.float64(0.25), 'se': np.float64('nan')})
    '{"p": 0.25, "se": null}'
    """
    return json.dumps(finite_or_none(to_jsonable(obj)), allow_nan=False, **kwargs)


def format_number(value):
    """ Locale-independent, full-precision text for a CSV cell

    >>> format_number(0.1)
    '0.1'

    >>> format_number(None)
    ''

    >>> format_number(np.float64(1) / 3)
    '0.3333333333333333'
    """
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def get_git_head():
    """ returns the commit and message of the current git HEAD """

    try:
        pr = subprocess.Popen(
            'git log -n 1 --oneline'.split(),
            cwd=settings.BASE_DIR,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
        )

    except OSError:
        return None, None

    (out, err) = pr.communicate()
    if err or not out:
        return None, None

    outs = [o.decode('utf-8') for o in out.split()]
    commit = outs[0]
    msg = ' '.join(outs[1:])
    return commit, msg
