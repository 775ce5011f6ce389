"""Exception hierarchy shared by every stage of the pipeline."""


class CambiError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(CambiError, ValueError):
    """Input container or header is malformed."""


class TruncationError(CambiError, ValueError):
    """Input ends in the middle of a frame."""


class ConfigError(CambiError, ValueError):
    """Invalid hyperparameter or geometry combination."""


class EmptyInputError(CambiError, ValueError):
    """An operation that needs at least one frame or score got none."""


class SpecError(CambiError, ValueError):
    """Invalid synthetic stimulus description."""
