"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Malformed input: bad axis names, unnormalised weights, missing table entries."""


class InconsistencyError(ValueError):
    """Two measures disagree on a shared marginal beyond tolerance."""

    def __init__(self, message, gap):
        super().__init__(f"{message} (gap={gap:.12g})")
        self.gap = gap
