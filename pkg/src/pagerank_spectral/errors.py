"""Exception hierarchy shared by every module of the package."""


class PageRankError(Exception):
    """Base class for all package errors."""


class InputError(PageRankError, ValueError):
    """Malformed or out-of-range input."""


class EmptyGraphError(InputError):
    """A graph with zero nodes was supplied."""


class DimensionError(InputError):
    """Vector or matrix shapes do not agree."""


class ParseError(InputError):
    """An edge-list line could not be parsed."""

    def __init__(self, lineno: int, message: str):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


class DenseCapError(PageRankError):
    """Refusal to densify a matrix larger than the configured cap."""


class EigenConvergenceError(PageRankError):
    """Shifted QR failed to deflate some eigenvalues within its iteration cap."""

    def __init__(self, failed: list[int], iterations: int):
        self.failed = list(failed)
        self.iterations = iterations
        super().__init__(
            f"QR iteration did not converge after {iterations} sweeps; "
            f"undeflated indices {self.failed}"
        )


class InsufficientTraceError(PageRankError):
    """Too few usable ratios in a convergence trace to estimate a rate."""

    def __init__(self, message: str, excluded: int = 0):
        self.excluded = excluded
        super().__init__(message)
