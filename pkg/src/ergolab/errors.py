"""Exception types shared across the package."""


class ErgolabError(Exception):
    """Base class for all package errors."""


class InvalidWordError(ErgolabError, ValueError):
    pass


class UnsupportedExactQuery(ErgolabError):
    """An exact value was requested from an oracle measure."""


class TooShortError(ErgolabError, ValueError):
    """A word is shorter than the level of the function it is fed to."""


class DepthError(ErgolabError):
    """A preimage table does not reach a needed word."""

    def __init__(self, sigma: str, depth: int):
        self.sigma = sigma
        self.depth = depth
        super().__init__(f"preimage table (depth {depth}) has no entry for sigma={sigma!r}")


class TruncationError(ErgolabError):
    """A construction needs stage indices the truncated family does not have."""

    def __init__(self, missing, what: str = "stage"):
        self.missing = sorted(missing)
        shown = ", ".join(str(m) for m in self.missing[:12])
        more = "" if len(self.missing) <= 12 else f" (+{len(self.missing) - 12} more)"
        super().__init__(f"missing {what} indices: {shown}{more}")


class PreconditionError(ErgolabError, ValueError):
    pass


class SizeGuardError(ErgolabError):
    def __init__(self, guard: str, value, limit):
        self.guard = guard
        super().__init__(f"size guard {guard} exceeded: {value} > {limit}")


class InvalidTransformation(ErgolabError, ValueError):
    pass


class UndefinedRatio(ErgolabError, ZeroDivisionError):
    pass
