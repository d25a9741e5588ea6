"""Shared exception hierarchy.

Every error raised on purpose by this package derives from ToolkitError so
callers (and the command line driver) can catch one type.
"""


class ToolkitError(Exception):
    """Base class for all errors raised by kgmarkov."""
