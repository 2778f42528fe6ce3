""" Experiment configs: a drift family over a parameter grid

A config is a JSON object with the sections ``drift``, ``classifier``,
``oracle``, ``simulation`` and ``validation``, each validated by a form of
``bdwalk.experiments.forms``. All violations are collected and reported at
once, unknown keys included.
"""

import itertools
from dataclasses import dataclass, field

from django.conf import settings

from bdwalk.core.config import read_json_config, unknown_keys
from bdwalk.core.exceptions import ConfigError
from bdwalk.drift.functions import from_dict
from bdwalk.experiments.forms import (
    GRID_ORDER,
    ClassifierForm,
    DriftForm,
    ExperimentForm,
    OracleForm,
    SimulationForm,
    ValidationForm,
)
from bdwalk.simulator.config import Mode, RateConvention


def section_defaults():
    """ The documented defaults of every section """
    return {
        'classifier': {
            'method': 'diagonal',
            'n_lo': settings.DEFAULT_N_LO,
            'n_hi': settings.DEFAULT_N_HI,
            'margin': settings.DEFAULT_MARGIN,
        },
        'oracle': {'horizon_states': 1000},
        'simulation': {
            'replicas': 0,
            'horizon': 10000,
            'escape_level': 100,
            'start_time': 1,
            'mode': Mode.DISCRETE.value,
            'rate_convention': RateConvention.FROZEN.value,
        },
        'validation': {'n_max': 100, 't_max': 10000.0},
    }


TOP_DEFAULTS = {
    'name': 'sweep',
    'restrict': '',
    'band': 0.05,
    'seed': None,
    'outputs': ['json'],
}

SECTIONS = {
    'drift': DriftForm,
    'classifier': ClassifierForm,
    'oracle': OracleForm,
    'simulation': SimulationForm,
    'validation': ValidationForm,
}


@dataclass
class ExperimentSpec:
    """ A validated experiment config """

    name: str
    family: str
    grid: dict
    fixed: dict = field(default_factory=dict)
    restrict: str = ''
    classifier: dict = field(default_factory=dict)
    oracle: dict = field(default_factory=dict)
    simulation: dict = field(default_factory=dict)
    validation: dict = field(default_factory=dict)
    band: float = 0.05
    seed: int = None
    outputs: list = field(default_factory=lambda: ['json'])

    def points(self):
        """ Parameter dicts of all grid points, in iteration order """
        names = [name for name in GRID_ORDER if name in self.grid]
        points = []
        for values in itertools.product(*(self.grid[name] for name in names)):
            point = dict(zip(names, values))
            if self.restrict == 'beta_gt_alpha' and not _beta_above_alpha(point):
                continue
            points.append(point)
        return points

    def drift(self, point):
        data = {'family': self.family}
        data.update({k: v for k, v in self.fixed.items() if v is not None})
        data.update(point)
        return from_dict(data)

    @property
    def simulates(self):
        return self.simulation.get('replicas', 0) > 0

    def to_dict(self):
        drift = {'family': self.family}
        drift.update({k: v for k, v in self.fixed.items() if v is not None})
        drift.update(self.grid)
        return {
            'name': self.name,
            'drift': drift,
            'restrict': self.restrict,
            'classifier': dict(self.classifier),
            'oracle': dict(self.oracle),
            'simulation': dict(self.simulation),
            'validation': dict(self.validation),
            'band': self.band,
            'seed': self.seed,
            'outputs': list(self.outputs),
        }


def _beta_above_alpha(point):
    """ β > α and β ≥ 0 """
    alpha, beta = point.get('alpha'), point.get('beta')
    if alpha is None or beta is None:
        return True
    return beta >= 0 and beta - alpha > 1e-9


def _form_violations(form, prefix):
    return [
        (prefix + name, str(message))
        for name, messages in form.errors.items()
        for message in messages
    ]


def parse_spec(data):
    """ Validates a config dict and returns the ExperimentSpec

    Raises a ConfigError that lists every violation found. """
    if not isinstance(data, dict):
        raise ConfigError([('config', 'must be an object')])

    allowed = set(TOP_DEFAULTS) | set(SECTIONS)
    violations = unknown_keys(data, sorted(allowed))
    defaults = section_defaults()
    cleaned = {}

    for section, form_class in SECTIONS.items():
        given = data.get(section, {})
        if section == 'drift' and section not in data:
            violations.append(('drift', 'a drift section is required'))
            continue
        if not isinstance(given, dict):
            violations.append((section, 'must be an object'))
            continue

        prefix = section + '.'
        violations += unknown_keys(given, list(form_class.base_fields), prefix)

        form = form_class(dict(defaults.get(section, {}), **given))
        if form.is_valid():
            cleaned[section] = form.cleaned_data
        else:
            violations += _form_violations(form, prefix)

    top = {k: data.get(k, v) for k, v in TOP_DEFAULTS.items()}
    form = ExperimentForm(top)
    if form.is_valid():
        cleaned['top'] = form.cleaned_data
    else:
        violations += _form_violations(form, '')

    if violations:
        raise ConfigError(violations)

    drift = cleaned['drift']
    family = drift['family']
    grid = {
        name: drift[name]
        for name in GRID_ORDER
        if drift.get(name) is not None
    }
    fixed = {
        name: drift[name]
        for name in ('scale', 'cap', 'path', 'tail')
        if drift.get(name) not in (None, '')
    }
    top = cleaned['top']

    spec = ExperimentSpec(
        name=top['name'],
        family=family,
        grid=grid,
        fixed=fixed,
        restrict=top['restrict'] or '',
        classifier=cleaned['classifier'],
        oracle=cleaned['oracle'],
        simulation=cleaned['simulation'],
        validation=cleaned['validation'],
        band=top['band'],
        seed=top['seed'],
        outputs=list(top['outputs']),
    )

    if not spec.points():
        raise ConfigError([('drift', 'the grid has no points')])

    return spec


def load_config(path):
    """ Reads and validates an experiment config file """
    return parse_spec(read_json_config(path))


# where each override key lives in a config
OVERRIDES = {
    'rho': 'drift',
    'alpha': 'drift',
    'beta': 'drift',
    'value': 'drift',
    'scale': 'drift',
    'cap': 'drift',
    'method': 'classifier',
    'n_lo': 'classifier',
    'n_hi': 'classifier',
    'margin': 'classifier',
    'horizon_states': 'oracle',
    'replicas': 'simulation',
    'horizon': 'simulation',
    'escape_level': 'simulation',
    'start_time': 'simulation',
    'mode': 'simulation',
    'rate_convention': 'simulation',
    'name': None,
    'band': None,
    'seed': None,
}


def apply_overrides(data, overrides):
    """ A copy of config ``data`` with ``overrides`` set

    >>> apply_overrides({'drift': {'rho': [1]}}, {'rho': 0.3, 'seed': 2})
    {'drift': {'rho': 0.3}, 'seed': 2}
    """
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    violations = unknown_keys(overrides, sorted(OVERRIDES))
    if violations:
        raise ConfigError(violations)

    data = {k: dict(v) if isinstance(v, dict) else v for k, v in data.items()}
    for key, value in overrides.items():
        section = OVERRIDES[key]
        if section is None:
            data[key] = value
        else:
            data.setdefault(section, {})[key] = value
    return data
