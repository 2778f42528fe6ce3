""" Reading JSON config files """

import json

from bdwalk.core.exceptions import ConfigError
from bdwalk.utils import suggest_key


def read_json_config(path):
    """ Parses a JSON config file; parse errors carry line and column """
    try:
        with open(path, encoding='utf-8') as fp:
            text = fp.read()

    except OSError as ex:
        raise ConfigError([('config', 'can not read {}: {}'.format(path, ex))])

    try:
        data = json.loads(text)

    except json.JSONDecodeError as ex:
        raise ConfigError([(None, ex.msg)], line=ex.lineno, column=ex.colno)

    if not isinstance(data, dict):
        message = 'top level of {} must be an object'.format(path)
        raise ConfigError([('config', message)])

    return data


def unknown_keys(data, allowed, prefix=''):
    """ Violations for every key of ``data`` not in ``allowed``

    >>> unknown_keys({'rno': 1, 'alpha': 2}, ['rho', 'alpha', 'beta'])
    [('rno', "unknown key; did you mean 'rho'?")]

    >>> unknown_keys({'x': 1}, ['rho'], prefix='drift.')
    [('drift.x', 'unknown key')]
    """
    violations = []
    for key in data:
        if key in allowed:
            continue

        suggestion = suggest_key(key, list(allowed))
        if suggestion:
            message = 'unknown key; did you mean {!r}?'.format(suggestion)
        else:
            message = 'unknown key'
        violations.append((prefix + key, message))

    return violations


def check_keys(data, allowed, prefix=''):
    violations = unknown_keys(data, allowed, prefix)
    if violations:
        raise ConfigError(violations)
