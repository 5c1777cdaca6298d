"""Exception hierarchy shared by every kpsc module."""


class KpscError(Exception):
    """Base class for all codec errors."""


class ProfileError(KpscError):
    """An incidence profile is malformed or cannot be resolved."""


class UnknownProfileError(ProfileError):
    pass


class SequenceError(KpscError):
    """A key-point sequence violates a model invariant."""


class BitstreamError(KpscError):
    """Malformed compressed data."""


class TruncatedStreamError(BitstreamError):
    def __init__(self, message="truncated stream", frame=None):
        if frame is not None:
            message = f"{message} (frame {frame})"
        super().__init__(message)
        self.frame = frame


class BadMagicError(BitstreamError):
    pass


class UnsupportedVersionError(BitstreamError):
    pass


class CodingOverflowError(KpscError, OverflowError):
    """A value falls outside the range the entropy coder accepts."""


class ModeUnavailableError(KpscError):
    """A prediction mode's references are missing for this point."""


class ParseError(KpscError):
    """Input text or document could not be parsed."""

    def __init__(self, message, location=None):
        if location is not None:
            message = f"{location}: {message}"
        super().__init__(message)
        self.location = location
