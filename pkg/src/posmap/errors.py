class InvalidInputError(ValueError):
    """Argument violates an operation's precondition."""


class InvalidStateError(RuntimeError):
    """Object is not in a state that supports the requested operation."""


class SearchFailure(RuntimeError):
    """No local minimisation in a multistart search converged."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
