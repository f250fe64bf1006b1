"""Exception types shared across the toolkit."""


class PretestError(Exception):
    """Base class for all toolkit errors."""


class ParseError(PretestError):
    """A file could not be parsed; carries a line/record locator."""

    def __init__(self, message: str, locator: str = ""):
        self.locator = locator
        super().__init__(f"{message} ({locator})" if locator else message)


class BankValidationError(PretestError):
    """Loaded content violates a structural invariant."""


class LowCandidateCountWarning(UserWarning):
    """An item was pretested on fewer candidates than the usual convention."""
