"""Speech and language capability contracts with offline and remote backends.

Five capabilities drive a spoken session: language detection, speech to
text, text to speech, translation, and emotion scoring. Everything in the
engine talks to them through one small duck-typed surface (see
``SpeechProviders``), so the deterministic offline mocks and the remote
HTTP client are interchangeable.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, runtime_checkable

from voicecare.audio import AudioClip

EMOTION_LABELS = ("joy", "anger", "sadness", "fear", "disgust")


class NoSpeech(RuntimeError):
    """No intelligible speech in the supplied audio."""


class EmptyText(ValueError):
    """An operation that needs text received an empty string."""


class EmptyGuessList(ValueError):
    """Language selection got no guesses to choose from."""


class ProviderUnavailable(RuntimeError):
    """A remote provider could not be reached or answered abnormally."""


@dataclass(frozen=True)
class LanguageGuess:
    code: str
    confidence: float

    def __post_init__(self):
        if not self.code or self.code != self.code.lower():
            raise ValueError(f"language code must be non-empty lowercase, got {self.code!r}")
        if not 0 <= self.confidence <= 1:
            raise ValueError(f"confidence must be in [0, 1], got {self.confidence}")


@dataclass(frozen=True)
class Transcript:
    text: str
    language: str
    confidence: float

    def __post_init__(self):
        if not 0 <= self.confidence <= 1:
            raise ValueError(f"confidence must be in [0, 1], got {self.confidence}")


@dataclass(frozen=True)
class EmotionScores:
    """Five emotion confidences in [0, 1] plus a [-1, 1] sentiment axis."""

    joy: float
    anger: float
    sadness: float
    fear: float
    disgust: float
    sentiment: float = 0.0

    def __post_init__(self):
        for label in EMOTION_LABELS:
            value = getattr(self, label)
            if not 0 <= value <= 1:
                raise ValueError(f"{label} must be in [0, 1], got {value}")
        if not -1 <= self.sentiment <= 1:
            raise ValueError(f"sentiment must be in [-1, 1], got {self.sentiment}")

    def as_dict(self) -> dict[str, float]:
        return {label: getattr(self, label) for label in EMOTION_LABELS} | {
            "sentiment": self.sentiment
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EmotionScores":
        return cls(**{k: float(data[k]) for k in (*EMOTION_LABELS, "sentiment") if k in data})


@runtime_checkable
class SpeechProviders(Protocol):
    """The capability bundle a session engine needs."""

    def detect_language(self, clip: AudioClip) -> list[LanguageGuess]: ...

    def transcribe(self, clip: AudioClip, language: str) -> Transcript: ...

    def synthesize(self, text: str, language: str, rate: float = 1.0) -> AudioClip: ...

    def translate(self, text: str, source: str, target: str) -> str: ...

    def analyze_emotion(self, text: str) -> EmotionScores: ...


def select_language(guesses: list[LanguageGuess]) -> str:
    """Highest-confidence guess; ties break toward the alphabetically
    earlier code so selection stays deterministic."""
    if not guesses:
        raise EmptyGuessList("no language guesses to select from")
    return min(guesses, key=lambda g: (-g.confidence, g.code)).code


_LANGUAGE_TAG = re.compile(r"^[a-z]{2}(-[a-zA-Z0-9]+)*$")


def valid_language_tag(tag: str) -> bool:
    return bool(_LANGUAGE_TAG.match(tag))


@dataclass
class ProviderConfig:
    """Selects the provider backend and its data sources.

    ``fixtures`` maps exact answer text to a score vector, overriding the
    keyword lexicon; ``lexicon_dir`` holds ``<src>-<tgt>.tsv`` translation
    tables and ``emotion-en.tsv``. Both default to the data packaged with
    the library when left unset.
    """

    mode: str = "mock"
    remote_base_url: str | None = None
    fixtures: dict[str, EmotionScores] | None = None
    lexicon_dir: str | Path | None = None

    def __post_init__(self):
        if self.mode not in ("mock", "remote"):
            raise ValueError(f"mode must be 'mock' or 'remote', got {self.mode!r}")
        if self.mode == "remote" and not self.remote_base_url:
            raise ValueError("remote mode requires remote_base_url")


def load_emotion_fixtures(path) -> dict[str, EmotionScores]:
    """Read a JSON map of text to score vector (the fixture file format)."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    return {text: EmotionScores.from_dict(vec) for text, vec in raw.items()}


def build_providers(config: ProviderConfig):
    if config.mode == "remote":
        from voicecare.providers.remote import RemoteProviders

        return RemoteProviders(config.remote_base_url)
    from voicecare.providers.mock import MockProviders

    return MockProviders(fixtures=config.fixtures, lexicon_dir=config.lexicon_dir)


__all__ = [
    "EMOTION_LABELS",
    "EmotionScores",
    "EmptyGuessList",
    "EmptyText",
    "LanguageGuess",
    "NoSpeech",
    "ProviderConfig",
    "ProviderUnavailable",
    "SpeechProviders",
    "Transcript",
    "build_providers",
    "load_emotion_fixtures",
    "select_language",
    "valid_language_tag",
]
