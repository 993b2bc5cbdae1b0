"""Exception types shared across the package."""


class ResourceLimitError(RuntimeError):
    """Raised when a requested computation exceeds a documented guard.

    The message names the limit that was hit, so callers (and the CLI,
    which maps this to exit code 3) can distinguish a refusal from a
    genuine internal failure.
    """
