"""Exception hierarchy shared across the toolkit.

`exit_code` groups errors into the CLI's three failure classes:
1 = configuration, 2 = data, 3 = numeric/convergence.
"""


class LinkPredError(Exception):
    exit_code = 2


class ConfigError(LinkPredError):
    exit_code = 1


class ParseError(LinkPredError):
    """Malformed input line; carries the 1-based line number."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class ReferentialError(LinkPredError):
    """Edge file references a node absent from the attribute file."""


class ValidationError(LinkPredError):
    pass


class DomainError(LinkPredError):
    """Operation called outside its domain (unknown node, bad labels, ...)."""


class SamplingError(LinkPredError):
    """Rejection sampling exhausted its attempt budget."""


class SchemaError(LinkPredError):
    """Feature-matrix columns do not match what a model was trained on."""


class StratificationError(LinkPredError):
    """A cross-validation fold ended up with a single class."""


class DependencyError(LinkPredError):
    """A pipeline stage is missing an upstream artifact."""


class ConvergenceError(LinkPredError):
    exit_code = 3

    def __init__(self, message, duality_gap=None):
        if duality_gap is not None:
            message = f"{message} (duality gap estimate: {duality_gap:.6g})"
        super().__init__(message)
        self.duality_gap = duality_gap


class DivergenceError(LinkPredError):
    exit_code = 3


class NumericError(LinkPredError):
    exit_code = 3
