"""Exception types shared across the package.

Exit-code mapping used by the CLI: ConfigError -> 2, DataError -> 3,
InvariantError -> 4.
"""


class TopicLifeError(Exception):
    """Base class for all package errors."""


class ConfigError(TopicLifeError):
    """Invalid or incomplete run configuration."""


class DataError(TopicLifeError):
    """Malformed input data (corpus rows, vector files, lexicons)."""


class InvariantError(TopicLifeError):
    """An internal consistency check failed; indicates a bug."""
