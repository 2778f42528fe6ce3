""" Result files with an embedded run manifest

JSON results are written as ``{"manifest": ..., "result": ...}``; CSV files
start with a ``# manifest: <json>`` line followed by a header row. The
manifest holds everything needed to run the command again.
"""

import csv
import json
import os
import sys
from contextlib import contextmanager
from datetime import datetime, timezone

from django.conf import settings

import bdwalk
from bdwalk.core.exceptions import ConfigError
from bdwalk.utils import dumps, format_number, get_git_head

import logging

logger = logging.getLogger(__name__)


FORMATS = ('json', 'csv')

MANIFEST_PREFIX = '# manifest: '


def build_manifest(command, options, seed=None):
    commit, _msg = get_git_head()
    return {
        'command': command,
        'options': options,
        'seed': seed,
        'version': bdwalk.__version__,
        'git': commit,
        'created': datetime.now(timezone.utc).isoformat(),
    }


def default_path(command, fmt):
    """ Output path below OUTPUT_DIR, or None for stdout """
    if not settings.OUTPUT_DIR:
        return None
    stamp = datetime.now(timezone.utc).strftime('%Y%m%dT%H%M%S')
    name = '{}-{}.{}'.format(command, stamp, fmt)
    return os.path.join(settings.OUTPUT_DIR, name)


@contextmanager
def open_output(path, stream=None):
    if not path:
        yield stream or sys.stdout
        return

    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)

    with open(path, 'w', encoding='utf-8', newline='') as fp:
        yield fp

    logger.info('Result written to %s', path)


def write_json(fp, manifest, result):
    fp.write(dumps({'manifest': manifest, 'result': result}, indent=2) + '\n')


def write_csv(fp, manifest, fieldnames, rows):
    """ Streams ``rows`` (dicts) to ``fp`` below the manifest line """
    fp.write(MANIFEST_PREFIX + dumps(manifest) + '\n')
    writer = csv.DictWriter(fp, fieldnames=fieldnames, extrasaction='ignore')
    writer.writeheader()

    count = 0
    for row in rows:
        writer.writerow({k: format_number(v) for k, v in row.items()})
        count += 1
    return count


def read_manifest(path):
    """ Extracts the manifest from a JSON or CSV result file """
    try:
        with open(path, encoding='utf-8') as fp:
            first = fp.readline()
            if first.startswith(MANIFEST_PREFIX):
                return json.loads(first[len(MANIFEST_PREFIX) :])

            fp.seek(0)
            data = json.load(fp)

    except OSError as ex:
        raise ConfigError([('replay', 'can not read {}: {}'.format(path, ex))])

    except json.JSONDecodeError as ex:
        raise ConfigError(
            [('replay', 'not a result file: {}'.format(ex.msg))],
            line=ex.lineno,
            column=ex.colno,
        )

    if not isinstance(data, dict) or 'manifest' not in data:
        raise ConfigError([('replay', '{} holds no manifest'.format(path))])

    return data['manifest']
