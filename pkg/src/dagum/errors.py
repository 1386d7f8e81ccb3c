"""Exception hierarchy shared by all modules."""


class DagumError(Exception):
    pass


class DomainError(DagumError, ValueError):
    """Argument outside the mathematical domain of a function."""


class PoleError(DomainError):
    """A gamma factor sits on (or within tolerance of) a pole.

    ``index`` is the pole order n for Gamma(-n) when raised by the gamma
    family, or the offending series index k when raised by a series.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class DivergenceError(DomainError):
    pass


class RegimeError(DagumError, ValueError):
    """Parameters or argument outside the regime where a method is valid."""


class ResonanceError(RegimeError):
    def __init__(self, message, report):
        super().__init__(message)
        self.report = report


class QuadratureError(DagumError, RuntimeError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
