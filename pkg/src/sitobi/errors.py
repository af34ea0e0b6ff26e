"""Exception hierarchy shared by every sitobi module."""


class SitobiError(Exception):
    """Base class for all errors raised by this package."""


class AudioError(SitobiError):
    """Unreadable, unsupported, or structurally invalid audio input."""


class InventoryError(SitobiError):
    """Bad phone inventory or phone mapping data."""


class ModelError(SitobiError):
    """Invalid model parameters or model file contents."""


class AlignmentError(SitobiError):
    """Forced alignment could not be performed or failed mid-corpus."""


class SyllabificationError(SitobiError):
    """Phone sequence cannot be grouped into legal syllables."""


class VowellessWordError(SyllabificationError):
    """A word contains no vowel phone and cannot anchor a syllable."""


class ProsodyError(SitobiError):
    """Invalid input to intensity or break index computation."""


class PitchError(SitobiError):
    """Invalid input to pitch extraction or contour labeling."""


class LangIdError(SitobiError):
    """Invalid frequency table or unscorable word."""


class DocumentError(SitobiError):
    """Annotation document violates a tier consistency invariant."""


class FormatError(SitobiError):
    """Malformed TextGrid, label, table, or transcription file."""


class ConfigError(SitobiError):
    """Malformed configuration file or out-of-range setting."""


class PipelineError(SitobiError):
    """A pipeline stage failed; message carries the stage name."""
