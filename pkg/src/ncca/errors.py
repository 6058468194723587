"""Exception hierarchy shared by all modules."""


class NCCAError(ValueError):
    """Base class for every error raised by this package."""


class InvalidDimension(NCCAError):
    pass


class InvalidPair(NCCAError):
    pass


class InvalidCell(NCCAError):
    pass


class InvalidState(NCCAError):
    pass


class InvalidConfig(NCCAError):
    """A neighborhood configuration or configuration does not fit the rule."""


class InvalidRule(NCCAError):
    """A local function was expected to be a local rule (range within Q)."""


class Unsupported(NCCAError):
    pass


class BudgetExceeded(NCCAError):
    """Raised when an exhaustive check would exceed its configuration budget."""

    def __init__(self, needed: int, budget: int):
        super().__init__(f"{needed} configurations needed, budget is {budget}")
        self.needed = needed
        self.budget = budget
