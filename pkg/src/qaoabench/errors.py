class BenchError(Exception):
    """Base class for errors raised by qaoabench."""


class ConfigError(BenchError, ValueError):
    """Invalid sizes, counts or option combinations."""


class InputError(BenchError, ValueError):
    """Arguments that do not fit together (length or dimension mismatch)."""


class OutputError(BenchError, OSError):
    """A result file could not be read or written."""
