from dataclasses import dataclass, field
from enum import Enum


class Label(str, Enum):
    RECURRENT = 'Recurrent'
    TRANSIENT = 'Transient'
    INCONCLUSIVE = 'Inconclusive'

    def __str__(self):
        return self.value

    @property
    def code(self):
        """ numeric code used in phase-diagram datasets """
        return {'Recurrent': -1, 'Inconclusive': 0, 'Transient': 1}[self.value]


@dataclass
class Verdict:
    """ A recurrence / transience label with the evidence it rests on

    For conclusive labels ``witness_c`` is the bound that held on the whole
    sampled tail starting at ``witness_n0``. """

    label: Label
    witness_c: float = None
    witness_n0: int = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def conclusive(self):
        return self.label != Label.INCONCLUSIVE

    @property
    def recurrent(self):
        return self.label == Label.RECURRENT

    @property
    def transient(self):
        return self.label == Label.TRANSIENT

    @classmethod
    def inconclusive(cls, **diagnostics):
        return cls(Label.INCONCLUSIVE, diagnostics=diagnostics)

    def to_dict(self):
        data = {
            'label': self.label.value,
            'c': self.witness_c,
            'n0': self.witness_n0,
            'stats': self.diagnostics.get('stats', []),
        }
        data.update({k: v for k, v in self.diagnostics.items() if k != 'stats'})
        return data

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        label = Label(data.pop('label'))
        c = data.pop('c', None)
        n0 = data.pop('n0', None)
        return cls(label, c, n0, diagnostics=data)

    def __str__(self):
        if not self.conclusive:
            return str(self.label)
        return '{} (c={:.4g}, n0={})'.format(
            self.label, self.witness_c, self.witness_n0
        )
