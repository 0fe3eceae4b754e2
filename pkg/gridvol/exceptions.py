class GridvolError(ValueError):
    """Base class for every error raised by the modeling pipeline."""


class GapTooLarge(GridvolError):
    pass


class EndpointMissing(GridvolError):
    pass


class DomainError(GridvolError):
    pass


class InsufficientData(GridvolError):
    pass


class ConstantSeries(GridvolError):
    pass


class SingularDesign(GridvolError):
    pass


class DegenerateResiduals(GridvolError):
    pass


class AlignmentError(GridvolError):
    pass


class SpecMismatch(GridvolError):
    pass


class VarianceNonPositive(GridvolError):
    pass


class NonFinite(GridvolError):
    pass


class RangeError(GridvolError):
    pass


class ConfigError(GridvolError):
    pass


class MissingData(GridvolError):
    pass


class ParseError(GridvolError):
    """Malformed input file; `row` is the 1-based data row (header excluded) when known."""
    def __init__(self, message, row=None):
        super().__init__(message if row is None else f"row {row}: {message}")
        self.row = row


class DuplicateDate(ParseError):
    pass


class ConvergenceWarning(UserWarning):
    pass


class InterventionOutOfRangeWarning(UserWarning):
    pass


class StageFailed(GridvolError):
    """A pipeline error tagged with the run stage it came from."""
    def __init__(self, stage, error):
        super().__init__(f"{stage}: {error}")
        self.stage = stage
        self.error = error
