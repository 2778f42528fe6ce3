import io
import json
import os
import tempfile

import numpy as np

from django.core.management import call_command

from bdwalk.core.output import MANIFEST_PREFIX
from bdwalk.simulator.stats import Batch


def run_command(name, *args):
    """ Runs a management command, returns its parsed JSON output """
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, 'result.json')
        call_command(name, *args, '--output', path, '--silent')
        with open(path, encoding='utf-8') as fp:
            return json.load(fp)


def run_command_csv(name, *args):
    """ Runs a management command with CSV output

    Returns the manifest and the lines below it """
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, 'result.csv')
        call_command(name, *args, '--output', path, '--format', 'csv', '--silent')
        with open(path, encoding='utf-8') as fp:
            lines = fp.read().splitlines()

    manifest = json.loads(lines[0][len(MANIFEST_PREFIX) :])
    return manifest, lines[1:]


def write_temp(content, suffix='.json'):
    """ Writes content to a temporary file and returns its path

    The caller removes the file. """
    fd, path = tempfile.mkstemp(suffix=suffix)
    with io.open(fd, 'w', encoding='utf-8') as fp:
        fp.write(content)
    return path


def synthetic_batch(times, states, escape_level=None, returns=None):
    """ A Batch with the given checkpoint states, for testing statistics """
    states = np.asarray(states, dtype=np.int64)
    count = states.shape[0]
    zeros = np.zeros(count, dtype=np.int64)
    returns = zeros if returns is None else np.asarray(returns, dtype=np.int64)
    return Batch(
        first=0,
        escape_level=escape_level,
        checkpoint_times=np.asarray(times),
        returns_to_zero=returns,
        first_return_time=np.full(count, np.nan),
        max_state=states.max(axis=1),
        max_before_return=states.max(axis=1),
        final_state=states[:, -1].copy(),
        hit_time=np.full(count, np.nan),
        time_at_zero=np.zeros(count),
        steps=zeros,
        draws=zeros,
        checkpoint_states=states,
    )
