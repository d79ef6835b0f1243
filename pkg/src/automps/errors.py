"""Exception hierarchy shared by every module of the package."""


class AutoMPSError(Exception):
    """Base class for all domain errors raised by automps."""


class DimensionError(AutoMPSError):
    pass


class LabelError(AutoMPSError):
    pass


class SplitError(AutoMPSError):
    pass


class DegenerateMetricError(AutoMPSError):
    pass


class SymbolError(AutoMPSError):
    pass


class CompositionError(AutoMPSError):
    pass


class SizeError(AutoMPSError):
    pass


class ShapeError(AutoMPSError):
    pass


class EditError(AutoMPSError):
    pass


class GaugeError(AutoMPSError):
    pass


class RangeError(AutoMPSError):
    pass


class HermiticityError(AutoMPSError):
    pass


class SpecError(AutoMPSError):
    """Spec-file diagnostic carrying a 1-based line and column."""

    def __init__(self, message, line=None, col=None, source="<spec>"):
        self.message = message
        self.line = line
        self.col = col
        self.source = source
        super().__init__(str(self))

    def __str__(self):
        if self.line is None:
            return f"{self.source}: {self.message}"
        return f"{self.source}:{self.line}:{self.col}: {self.message}"
