""" Errors raised by the bdwalk apps """


class BdwalkError(Exception):
    """ Base class of all errors raised for invalid models or inputs """


class DomainError(BdwalkError, ValueError):
    """ raised when a drift function leaves [0, 1/2) at some (n, t)

    This signals an invalid model rather than a numeric bug. """

    def __init__(self, message, n=None, t=None, value=None):
        super().__init__(message)
        self.n = n
        self.t = t
        self.value = value


class InvalidChain(BdwalkError, ValueError):
    """ raised when a birth-and-death chain has a non-positive rate """

    def __init__(self, message, n=None, rate=None):
        super().__init__(message)
        self.n = n
        self.rate = rate


class NotNormalizable(BdwalkError):
    """ raised when stationary masses do not decay over the truncation range """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ConfigError(BdwalkError):
    """ raised for config files or options that can not be used

    ``violations`` is a list of ``(field, message)`` pairs; ``line`` and
    ``column`` are set for parse errors. """

    def __init__(self, violations, line=None, column=None):
        if isinstance(violations, str):
            violations = [(None, violations)]

        self.violations = list(violations)
        self.line = line
        self.column = column
        super().__init__(self.format())

    def format(self):
        parts = []
        for field, message in self.violations:
            if field:
                parts.append('{}: {}'.format(field, message))
            else:
                parts.append(message)

        text = '; '.join(parts)
        if self.line is not None:
            text = 'line {}, column {}: {}'.format(self.line, self.column, text)
        return text


def describe(ex):
    """ One-line diagnostic for an error, naming the offending field

    >>> describe(ConfigError([('rho', 'must be positive')]))
    'invalid input: rho: must be positive'
    """
    if isinstance(ex, ConfigError):
        return 'invalid input: {}'.format(ex.format())
    return '{}: {}'.format(type(ex).__name__, ex)
