"""Exception hierarchy shared by the library modules and the CLI."""


class ToricError(Exception):
    """Base class for every error raised by the toolkit"""


class NonUniqueSolutionError(ToricError, ValueError):
    """A linear system expected to have one solution has a solution space"""


class FanValidationError(ToricError):
    """Raised when a fan fails one of the smooth/complete checks"""

    def __init__(self, report):
        self.report = report
        failed = ', '.join(check.name for check in report.failures) or 'unknown'
        super().__init__(f"fan '{report.fan_name}' failed validation: {failed}")


class FanMismatchError(ToricError, ValueError):
    """A divisor or collection was used against a fan it does not live on"""


class NonFiniteCohomologyError(ToricError):
    """A sign pattern with non-zero homology has an unbounded character region"""


class RepresentationError(ToricError, ValueError):
    """A coefficient vector does not represent the stated line bundle"""


class FibrationError(ToricError):
    """Fibration data fails to assemble, or a fan is not a fiber bundle"""


class CollectionError(ToricError, ValueError):
    """An ordered collection is malformed"""


class PreconditionError(ToricError, ValueError):
    """An operation's documented precondition does not hold"""


class TwistSearchExhausted(ToricError):
    """No twist multiple up to the cap produced a strongly exceptional sequence"""

    def __init__(self, t_cap, best_report, attempts):
        self.t_cap = t_cap
        self.best_report = best_report
        self.attempts = attempts
        super().__init__(
            f"no strongly exceptional sequence for t <= {t_cap} "
            f"(best attempt left {best_report.violations} non-vanishing entries)"
        )


class FormatError(ToricError, ValueError):
    """A document does not follow the documented grammar"""

    def __init__(self, message, source='<input>', line=None, column=None):
        self.source = source
        self.line = line
        self.column = column
        where = source
        if line is not None:
            where = f"{source}:{line}:{column}"
        super().__init__(f"{where}: {message}")


class CatalogError(ToricError, ValueError):
    """Unknown catalog entry or parameters outside the catalog range"""
