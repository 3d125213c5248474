"""
Exception hierarchy for the head automata toolkit.

Input-kind errors (bad model files, bad corpus lines) map to exit status 2 in
the command-line surface; everything else is an internal error.
"""

from typing import Optional


class HeadAutomataError(Exception):
    """Base class for every error raised by this package."""


class ModelFormatError(HeadAutomataError, ValueError):
    def __init__(self, message: str, path: Optional[str] = None, location: Optional[str] = None):
        self.path = path
        self.location = location
        prefix = ""
        if path:
            prefix = f"{path}: "
        if location:
            prefix += f"{location}: "
        super().__init__(prefix + message)


class InputFormatError(HeadAutomataError, ValueError):
    def __init__(self, reason: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        self.reason = reason
        where = f"{path or '<input>'}:{line if line is not None else '?'}"
        super().__init__(f"{where}: {reason}")


class CostDomainError(HeadAutomataError, ValueError):
    """Raised when a non-positive probability is turned into a cost."""


class ImpossibleDerivationError(HeadAutomataError):
    """A derivation uses a parameter the model does not have."""

    def __init__(self, parameter: str):
        self.parameter = parameter
        super().__init__(f"impossible derivation: missing parameter {parameter}")


class SamplingFailureError(HeadAutomataError):
    pass


class CapacityError(HeadAutomataError):
    pass


class TreebankError(HeadAutomataError, ValueError):
    pass


INPUT_ERRORS = (ModelFormatError, InputFormatError, TreebankError)
