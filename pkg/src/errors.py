"""
Exception hierarchy for the object counter and CLI exit-status mapping.
"""
from pydantic import ValidationError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_INTERNAL = 3


class ObjectCounterError(Exception):
    """Base class for all object counter errors."""


# --- Image codec ---

class ImageFormatError(ObjectCounterError, ValueError):
    """A PNM byte stream could not be decoded."""


class MalformedHeader(ImageFormatError):
    pass


class UnsupportedMaxval(ImageFormatError):
    pass


class TruncatedPayload(ImageFormatError):
    pass


# --- Processing stages ---

class InvalidSigma(ObjectCounterError, ValueError):
    pass


class EmptyImage(ObjectCounterError, ValueError):
    pass


class EmptyHistogram(ObjectCounterError, ValueError):
    pass


class DegenerateHistogram(ObjectCounterError, ValueError):
    """Fewer occupied histogram bins than requested classes."""


class ImageTooSmall(ObjectCounterError, ValueError):
    pass


class InvalidSpec(ObjectCounterError, ValueError):
    """Scene layout violates margin or overlap rules."""


# --- Corpora ---

class CorpusError(ObjectCounterError):
    pass


class CorpusNotFound(CorpusError):
    pass


class TruthFormatError(CorpusError, ValueError):
    pass


def exit_status_for(exc: BaseException) -> int:
    """Map an exception to the CLI exit status."""
    if isinstance(exc, (ValidationError, InvalidSpec)):
        return EXIT_USAGE
    if isinstance(exc, (ImageFormatError, ImageTooSmall, EmptyImage, CorpusError, OSError)):
        return EXIT_IO
    return EXIT_INTERNAL
