"""Exception types shared across the package."""


class BudgetExceeded(RuntimeError):
    """An exhaustive computation would exceed its configured size cap."""

    def __init__(self, what: str, size: int, cap: int):
        self.what = what
        self.size = size
        self.cap = cap
        super().__init__(f"{what}: size {size} exceeds budget {cap}")


class ValidationError(ValueError):
    """Input object violates a structural precondition."""


class ConfigError(ValueError):
    """Malformed run configuration or moment specification."""
