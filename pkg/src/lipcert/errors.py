class InvalidInput(ValueError):
    """User-supplied data violates a documented precondition."""


class SoundnessError(RuntimeError):
    """An internally produced certificate failed its own replay.

    This is never a user error: any occurrence is a bug in the library.
    """
