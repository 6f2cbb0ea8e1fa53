"""Domain exceptions shared by the engines and the command line."""

class EstimationError(Exception):
    """Base error carrying a human-readable detail and a process exit code"""

    def __init__(self, detail: str, exit_code: int = 1):
        super().__init__(detail)
        self.detail = detail
        self.exit_code = exit_code

    def __str__(self) -> str:
        return self.detail


class DimensionMismatchError(EstimationError, ValueError):
    pass


class DegenerateSampleError(EstimationError, ValueError):
    def __init__(self, axis: int):
        super().__init__(f"degenerate sample axis {axis}: stddev and interquartile range are both zero")
        self.axis = axis


class BracketExpansionError(EstimationError, RuntimeError):
    pass


class InvalidSpecError(EstimationError, ValueError):
    pass


class InputFileError(EstimationError):
    """A model, sample, policy or spec file could not be read"""
