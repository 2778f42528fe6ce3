""" Forms validating the sections of an experiment config

Every drift parameter is either a number, a list of numbers or a range
``{start, stop, step}``; parameters given as more than one value span the
grid of the experiment.
"""

from django import forms

from bdwalk.core.exceptions import ConfigError
from bdwalk.drift.functions import HALF, TAIL_RULES, Tabulated, read_table, unordered_rows
from bdwalk.simulator.config import Mode, RateConvention


FAMILIES = ('power_law', 'linear', 'boundary', 'exponential', 'constant', 'tabulated')

# grid parameters in the order they are iterated, outermost first
GRID_ORDER = ('beta', 'alpha', 'rho', 'value')

REQUIRED = {
    'power_law': ('rho', 'alpha', 'beta'),
    'linear': ('rho',),
    'boundary': ('rho', 'alpha'),
    'exponential': ('alpha', 'beta'),
    'constant': ('value',),
    'tabulated': (),
}

RESTRICTIONS = ('', 'beta_gt_alpha')

OUTPUTS = ('json', 'csv', 'gnuplot')

# longest grid a range may expand to
MAX_GRID = 10000


def _choices(values):
    return [(v, v) for v in values]


def expand_range(start, stop, step):
    """ start, start + step, ... up to and including stop

    >>> expand_range(0.1, 0.45, 0.05)
    [0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45]

    >>> expand_range(1, 1, 0.5)
    [1.0]
    """
    count = int((stop - start) / step + 1e-9) + 1
    return [round(start + k * step, 10) for k in range(count)]


class GridField(forms.Field):
    """ A number, a list of numbers or a ``{start, stop, step}`` range """

    def __init__(self, *args, positive=False, **kwargs):
        super().__init__(*args, **kwargs)
        self.positive = positive

    def to_python(self, value):
        if value is None:
            return None

        if isinstance(value, dict):
            values = self._range(value)
        elif isinstance(value, (list, tuple)):
            values = list(value)
        else:
            values = [value]

        if not values:
            raise forms.ValidationError('grid must not be empty')

        numbers = []
        for v in values:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise forms.ValidationError('{!r} is not a number'.format(v))
            numbers.append(float(v))

        if self.positive and min(numbers) <= 0:
            raise forms.ValidationError(
                'must be positive, got {!r}'.format(min(numbers))
            )

        return numbers

    def _range(self, value):
        keys = {'start', 'stop', 'step'}
        if set(value) != keys:
            raise forms.ValidationError('a range needs exactly start, stop and step')

        try:
            start, stop, step = (float(value[k]) for k in ('start', 'stop', 'step'))
        except (TypeError, ValueError):
            raise forms.ValidationError('start, stop and step must be numbers')

        if step <= 0:
            raise forms.ValidationError('step must be positive')
        if stop < start:
            raise forms.ValidationError('stop must not be below start')
        if (stop - start) / step >= MAX_GRID:
            raise forms.ValidationError(
                'range has more than {} values'.format(MAX_GRID)
            )

        return expand_range(start, stop, step)


class DriftForm(forms.Form):
    family = forms.ChoiceField(choices=_choices(FAMILIES))
    rho = GridField(required=False, positive=True)
    alpha = GridField(required=False)
    beta = GridField(required=False)
    value = GridField(required=False)
    scale = forms.FloatField(required=False)
    cap = forms.FloatField(required=False)
    path = forms.CharField(required=False)
    tail = forms.ChoiceField(choices=_choices(TAIL_RULES), required=False)

    def clean_scale(self):
        scale = self.cleaned_data.get('scale')
        if scale is not None and scale <= 0:
            raise forms.ValidationError('must be positive')
        return scale

    def clean_cap(self):
        cap = self.cleaned_data.get('cap')
        if cap is not None and not 0 < cap < HALF:
            raise forms.ValidationError('must lie in (0, 1/2)')
        return cap

    def clean(self):
        data = super().clean()
        family = data.get('family')
        if family not in REQUIRED:
            return data

        for name in GRID_ORDER:
            if name in self.errors:
                continue
            if name in REQUIRED[family] and data.get(name) is None:
                self.add_error(name, 'required by family {!r}'.format(family))
            elif name not in REQUIRED[family] and data.get(name) is not None:
                self.add_error(name, 'not a parameter of family {!r}'.format(family))

        unused = 'not a parameter of family {!r}'.format(family)
        if family == 'tabulated':
            for name in ('scale', 'cap'):
                if data.get(name) is not None:
                    self.add_error(name, unused)
            self._clean_table(data)
        else:
            for name in ('path', 'tail'):
                if data.get(name):
                    self.add_error(name, unused)
        return data

    def _clean_table(self, data):
        """ Checks that the CSV table exists, is ordered and covers a grid """
        path = data.get('path')
        data['tail'] = data.get('tail') or 'constant'
        if not path:
            self.add_error('path', "required by family 'tabulated'")
            return

        try:
            rows = read_table(path)
            unordered = unordered_rows(rows)
            if unordered:
                # the header is line 1
                line = unordered[0] + 2
                message = 'rows must be strictly increasing in (n, t), line {} is not'
                self.add_error('path', message.format(line))
                return
            Tabulated.from_rows(rows, tail=data['tail'])
        except ConfigError as ex:
            for _field, message in ex.violations:
                self.add_error('path', message)


class ClassifierForm(forms.Form):
    method = forms.ChoiceField(choices=_choices(('diagonal', 'diagonal-ratio')))
    n_lo = forms.IntegerField(min_value=1)
    n_hi = forms.IntegerField(min_value=2)
    margin = forms.FloatField(min_value=0, max_value=1)

    def clean(self):
        data = super().clean()
        n_lo, n_hi = data.get('n_lo'), data.get('n_hi')
        if n_lo is not None and n_hi is not None and n_hi <= n_lo:
            self.add_error('n_hi', 'must be above n_lo')
        return data


class OracleForm(forms.Form):
    horizon_states = forms.IntegerField(min_value=2)


class SimulationForm(forms.Form):
    replicas = forms.IntegerField(min_value=0)
    horizon = forms.IntegerField(min_value=2)
    escape_level = forms.IntegerField(min_value=1)
    start_time = forms.IntegerField(min_value=1)
    mode = forms.ChoiceField(choices=_choices([m.value for m in Mode]))
    rate_convention = forms.ChoiceField(
        choices=_choices([c.value for c in RateConvention])
    )

    def clean(self):
        data = super().clean()
        start, horizon = data.get('start_time'), data.get('horizon')
        if start is not None and horizon is not None and horizon <= start:
            self.add_error('horizon', 'must be above start_time')
        return data


class ValidationForm(forms.Form):
    n_max = forms.IntegerField(min_value=1)
    t_max = forms.FloatField(min_value=1)


class ExperimentForm(forms.Form):
    name = forms.CharField(max_length=100)
    restrict = forms.ChoiceField(choices=_choices(RESTRICTIONS), required=False)
    band = forms.FloatField(min_value=0)
    seed = forms.IntegerField(min_value=0, required=False)
    outputs = forms.MultipleChoiceField(choices=_choices(OUTPUTS))


