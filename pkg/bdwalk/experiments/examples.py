""" The four worked examples as built-in experiment configs """

from bdwalk.core.exceptions import ConfigError
from bdwalk.experiments.forms import expand_range
from bdwalk.experiments.spec import apply_overrides, parse_spec
from bdwalk.experiments.sweep import phase_sweep


EXAMPLES = {
    # the walk with φ = ρn / (2t); recurrent below ρ = 1/2, transient above
    1: {
        'name': 'example-1',
        'drift': {
            'family': 'linear',
            'rho': expand_range(0.1, 0.45, 0.05) + expand_range(0.55, 0.9, 0.05),
        },
    },
    # φ ≍ nᵅ / tᵝ over the (α, β) plane
    2: {
        'name': 'example-2',
        'drift': {
            'family': 'power_law',
            'rho': 1,
            'alpha': {'start': -1, 'stop': 1.5, 'step': 0.1},
            'beta': {'start': 0, 'stop': 1.5, 'step': 0.1},
            'cap': 0.45,
        },
        'restrict': 'beta_gt_alpha',
    },
    # the curve α = 2β − 1, threshold ρ = 1/4
    3: {
        'name': 'example-3',
        'drift': {
            'family': 'boundary',
            'alpha': [-1, -0.5, 0, 0.5, 1],
            'rho': [0.05, 0.1, 0.15, 0.2, 0.3, 0.35, 0.4, 0.45],
        },
    },
    # φ = exp(αn − βt), recurrent everywhere
    4: {
        'name': 'example-4',
        'drift': {
            'family': 'exponential',
            'alpha': [0.5, 1, 2],
            'beta': [0.1, 1],
            'cap': 0.45,
        },
    },
}


def example_config(example_id, overrides=None):
    """ The config of an example with ``overrides`` applied """
    if example_id not in EXAMPLES:
        message = 'must be one of {}, got {!r}'.format(sorted(EXAMPLES), example_id)
        raise ConfigError([('id', message)])
    return apply_overrides(EXAMPLES[example_id], overrides)


def example_spec(example_id, overrides=None):
    return parse_spec(example_config(example_id, overrides))


def run_example(example_id, overrides=None, dispatch=True, show_progress=False):
    """ Sweeps the grid of an example

    ``overrides`` replace single settings, e.g. ``{'rho': 0.3}`` restricts
    the ρ grid to one value and ``{'replicas': 1000}`` adds simulations.
    Without a seed in the overrides seed 0 is used. """
    overrides = dict(overrides or {})
    if overrides.get('seed') is None:
        overrides['seed'] = 0
    spec = example_spec(example_id, overrides)
    return phase_sweep(spec, dispatch=dispatch, show_progress=show_progress)
