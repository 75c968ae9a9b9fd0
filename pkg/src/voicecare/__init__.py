"""Voice questionnaire engine for spoken care check-ins.

Builds sessions out of small, separately testable parts: a bit-exact WAV
codec, a chunked record loop with silence detection, pluggable speech and
emotion providers (offline mocks included), questionnaire ingestion, the
session state machine, an append-only record store, and a REST gateway.
"""

from voicecare.audio import (
    DRIVER_FORMAT,
    SOURCE_FORMAT,
    AudioClip,
    AudioFormat,
    MalformedFile,
    UnsupportedFormat,
    convert,
    parse_wav,
    rms_level,
    write_wav,
)

__version__ = "0.1.0"

__all__ = [
    "AudioClip",
    "AudioFormat",
    "DRIVER_FORMAT",
    "SOURCE_FORMAT",
    "MalformedFile",
    "UnsupportedFormat",
    "convert",
    "parse_wav",
    "rms_level",
    "write_wav",
    "__version__",
]
