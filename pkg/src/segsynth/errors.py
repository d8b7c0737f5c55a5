class ConfigError(ValueError):
    """Raised for parameter combinations the generator cannot honour."""


class OutOfRangeError(IndexError):
    pass


class DatasetError(RuntimeError):
    """Dataset directory is missing or unreadable as a whole."""
