class FrobcatError(Exception):
    """Base class for all library errors."""


class InputError(FrobcatError):
    """Invalid input or violated operation contract."""


class HypothesisError(InputError):
    """A rigid-context hypothesis failed. Carries every violated hypothesis."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class InternalCheckError(FrobcatError):
    """An internal consistency assertion failed; indicates a bug or a broken
    hypothesis that slipped past validation."""
