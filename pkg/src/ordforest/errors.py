"""Exception types shared across the package.

The CLI maps these onto process exit codes: ConfigError -> 1,
DataError / ShapeError -> 2, NumericError -> 3.
"""


class OrdForestError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(OrdForestError):
    """Invalid configuration value, bad CLI usage, or malformed config file."""


class DataError(OrdForestError):
    """Dataset problems: unreadable files, unparsable cells, off-grid labels."""


class ShapeError(OrdForestError):
    """Array argument whose shape does not match the declared contract."""


class NumericError(OrdForestError):
    """Non-finite values or numerically undefined results."""
