"""Exception types shared across the package.

The CLI maps these onto exit codes: usage errors exit 1, ConfigError and
its subclasses exit 2, everything else derived from BeliefDialogError
exits 3.
"""


class BeliefDialogError(Exception):
    """Base class for all errors raised by this package."""


class InputError(BeliefDialogError):
    """A runtime input violates a precondition (empty corpus, unknown id, ...)."""


class ConfigError(BeliefDialogError):
    """A configuration artifact (rule file, FSM file, shapes) is invalid."""


class RuleParseError(ConfigError):
    """Syntax error in a rule or fact file; carries line/column."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        loc = ""
        if line is not None:
            loc = f" at line {line}" + (f", column {column}" if column is not None else "")
        super().__init__(message + loc)


class SafetyError(ConfigError):
    """A rule is not Datalog-safe (head variable unbound in the body)."""


class ModelFormatError(ConfigError):
    """A model file is corrupt, truncated, or structurally inconsistent."""


class NumericError(BeliefDialogError):
    """A numeric computation produced a non-finite value."""


class ResourceLimitError(BeliefDialogError):
    """An inference run exceeded its limits; carries the partial result."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
