"""Exceptions raised by coexistsim."""


class CoexistError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(CoexistError, ValueError):
    """An argument violates the precondition of an operation."""


class OutOfRange(CoexistError, ArithmeticError):
    """An interior equilibrium formula produced a probability outside [0, 1].

    This signals a parameter regime the closed forms do not cover; the value is
    reported instead of being clamped.
    """

    def __init__(self, message, value=None, network_age=None):
        CoexistError.__init__(self, message)
        self.value = value
        self.network_age = network_age


class ConfigError(CoexistError, ValueError):
    """A configuration file or mapping could not be parsed or validated."""

    def __init__(self, message, path=None, line=None, key=None):
        CoexistError.__init__(self, message)
        self.path = path
        self.line = line
        self.key = key

    def __str__(self):
        where = []
        if self.path:
            where.append(str(self.path))
        if self.line:
            where.append(str(self.line))
        prefix = ':'.join(where)
        if self.key:
            prefix = '%s: %s' % (prefix, self.key) if prefix else self.key
        message = CoexistError.__str__(self)
        return '%s: %s' % (prefix, message) if prefix else message
