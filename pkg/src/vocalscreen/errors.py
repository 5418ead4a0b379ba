"""Shared exception base for the package.

Every module defines its own concrete exceptions next to the code that
raises them; they all inherit from :class:`VocalScreenError` so callers
(notably the CLI) can catch pipeline failures with one handler.
"""


class VocalScreenError(Exception):
    """Base class for all errors raised by this package."""
