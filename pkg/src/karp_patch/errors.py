"""Exception hierarchy shared by every module of the package."""


class KarpPatchError(Exception):
    """Base class for all package errors."""


class DegreeInfeasible(KarpPatchError, ValueError):
    """No simple digraph on n vertices can meet the requested degree bound."""


class ParseError(KarpPatchError, ValueError):
    """Instance text is not valid JSON or a field has the wrong shape."""


class SchemaError(KarpPatchError, ValueError):
    """Instance parses but violates a structural rule (self-arc, negative cost, ...)."""


class Infeasible(KarpPatchError):
    """The bipartite double cover has no perfect matching."""


class MissingArc(KarpPatchError, ValueError):
    pass


class NoPatchAvailable(KarpPatchError):
    """No pair of arcs on distinct cycles has both replacement arcs present."""


class InvalidMove(KarpPatchError, ValueError):
    pass


class Stuck(KarpPatchError):
    """Patching dead-ended before a single cycle remained.

    The partial cover and the moves applied so far are kept on the exception
    so callers can inspect how far the loop got.
    """

    def __init__(self, cover, trace):
        super().__init__(f"no patching pair left with {len(cover.cycles)} cycles remaining")
        self.cover = cover
        self.trace = trace


class InvalidTour(KarpPatchError, ValueError):
    pass


class TooLarge(KarpPatchError, ValueError):
    pass


class ConfigError(KarpPatchError, ValueError):
    pass
