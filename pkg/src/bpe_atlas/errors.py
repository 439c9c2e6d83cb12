"""Exception hierarchy shared by all modules."""


class BpeAtlasError(Exception):
    """Base class for library errors."""


class InvalidArgument(BpeAtlasError, ValueError):
    pass


class HorizonExceeded(BpeAtlasError):
    """A computation needs vertices beyond the materialized depth.

    Rebuild the graph with a larger ``depth``; nothing is silently truncated.
    """


class NotLeftInvertible(BpeAtlasError):
    pass


class InfiniteDimensionalKernel(BpeAtlasError):
    pass


class DivergentSeries(BpeAtlasError):
    pass


class NoLoopAtRoot(BpeAtlasError):
    pass


class ConfigError(BpeAtlasError):
    pass
