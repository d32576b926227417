"""Exception hierarchy shared by the codec, the optimizer and the CLI."""


class HSMatchError(Exception):
    """Base class. ``code`` is the machine-readable name used by the CLI."""

    code = "Error"
    exit_status = 1

    @classmethod
    def code_path(cls) -> str:
        """Dotted codes from the broadest library class down, e.g. CapacityExceeded.MessageTooLarge."""
        chain = [k.code for k in reversed(cls.__mro__)
                 if isinstance(k, type) and issubclass(k, HSMatchError) and k is not HSMatchError]
        return ".".join(dict.fromkeys(chain))


class PGMError(HSMatchError, ValueError):
    code = "PGMError"
    exit_status = 2


class PGMHeaderError(PGMError):
    code = "PGMHeaderError"


class PGMDepthError(PGMError):
    code = "PGMDepthError"


class PGMTruncatedError(PGMError):
    code = "PGMTruncatedError"


class DimensionMismatch(HSMatchError, ValueError):
    code = "DimensionMismatch"


class ImageTooSmall(HSMatchError, ValueError):
    code = "ImageTooSmall"


class InvalidPeak(HSMatchError, ValueError):
    code = "InvalidPeak"


class InfeasibleMatching(HSMatchError):
    """No matching saturates the left vertex set."""

    code = "InfeasibleMatching"


class NoFeasiblePlan(HSMatchError):
    code = "NoFeasiblePlan"
    exit_status = 3


class InvalidPlan(HSMatchError, ValueError):
    code = "InvalidPlan"


class CapacityExceeded(HSMatchError):
    code = "CapacityExceeded"
    exit_status = 3


class MessageTooLarge(CapacityExceeded):
    code = "MessageTooLarge"


class AuxOverflow(HSMatchError):
    code = "AuxOverflow"
    exit_status = 3


class CorruptAux(HSMatchError):
    code = "CorruptAux"
    exit_status = 4


class AmbiguousBin(CorruptAux):
    code = "AmbiguousBin"
