"""Exception hierarchy shared by all modules."""


class SabotageError(Exception):
    """Base class for every error raised by the package."""


class ParseError(SabotageError):
    pass


class ValidationError(SabotageError):
    def __init__(self, invariant, detail=""):
        self.invariant = invariant
        msg = invariant if not detail else f"{invariant}: {detail}"
        super().__init__(msg)


class IllegalMove(SabotageError):
    pass


class ArenaTooLarge(SabotageError):
    def __init__(self, limit):
        self.limit = limit
        super().__init__(f"arena exceeds {limit} vertices")


class UnboundedBudget(SabotageError):
    pass


class UnsupportedSemantics(SabotageError):
    pass


class StrategyIncomplete(SabotageError):
    pass


class SpaceBoundExceeded(SabotageError):
    pass
