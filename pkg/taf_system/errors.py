"""Exception hierarchy shared by every stage of the toolkit."""

from typing import Optional


class TafSystemError(Exception):
    """Base class for all toolkit errors."""


class MalformedParseError(TafSystemError):
    """A bracketed parse string violates the intent/slot grammar."""

    def __init__(self, message: str, offset: int = 0):
        super().__init__(f"{message} (at byte {offset})")
        self.reason = message
        self.offset = offset


class FormatError(TafSystemError):
    """A dataset record cannot be read under its declared format."""

    def __init__(self, message: str, path: Optional[str] = None, line_number: Optional[int] = None):
        location = ""
        if path is not None:
            location = f"{path}:{line_number}: " if line_number is not None else f"{path}: "
        super().__init__(f"{location}{message}")
        self.reason = message
        self.path = path
        self.line_number = line_number


class JoinError(TafSystemError):
    """An id is present in only one of two datasets that must be joined."""


class EmptyCorpusError(TafSystemError):
    pass


class DegenerateInitError(TafSystemError):
    """An HMM initialisation assigns zero probability to an observed word pair."""


class UnanchoredSlotError(TafSystemError):
    """A slot value cannot be located in the tokens of its utterance."""

    def __init__(self, label: str, value: str):
        super().__init__(f"Slot {label} value {value!r} not found in source tokens")
        self.label = label
        self.value = value


class MissingTranslationError(TafSystemError):
    pass


class FillerUnavailableError(TafSystemError):
    """The filler backend failed to produce outputs."""


class LengthMismatchError(TafSystemError):
    pass


class ConfigError(TafSystemError):
    pass
