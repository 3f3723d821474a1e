"""Exception hierarchy. Everything raised on purpose derives from PermlabError."""


class PermlabError(Exception):
    """Base class for domain errors (the CLI maps these to exit status 1)."""


class DimensionError(PermlabError, ValueError):
    pass


class PreconditionError(PermlabError, ValueError):
    pass


class OrderGuardError(PermlabError):
    """Matrix order exceeds a configured evaluation limit."""

    def __init__(self, what: str, n: int, limit: int):
        super().__init__(f"{what}: order {n} exceeds the configured limit {limit}")
        self.n = n
        self.limit = limit


class InfeasibleError(PermlabError):
    pass
