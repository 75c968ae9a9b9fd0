"""Deterministic offline providers.

The mock text-to-speech encodes its input as audible per-character tones
and stamps the text and language into the clip's metadata chunk. Because
chunk sources and the noise gate carry metadata through unchanged, the mock
speech-to-text and language detection can invert synthesis exactly, which
lets the whole pipeline run end to end with no network and no models.

Translation walks a word-level bilingual lexicon; emotion scoring matches
exact fixture texts first and falls back to keyword weights. Both data
sets ship with the package and can be overridden per instance.
"""

from __future__ import annotations

import math
from importlib import resources
from pathlib import Path

import numpy as np

from voicecare.audio import DRIVER_FORMAT, AudioClip, rms_level, round_half_away
from voicecare.providers import (
    EMOTION_LABELS,
    EmotionScores,
    EmptyText,
    LanguageGuess,
    NoSpeech,
    Transcript,
)

TEXT_KEY = "text"
LANGUAGE_KEY = "language"

CHAR_SECONDS = 0.045
TONE_AMPLITUDE = 0.35

_LEADING_PUNCT = "¿¡«\"([{"
_TRAILING_PUNCT = ".,!?;:»\")]}"


def _default_lexicon_dir() -> Path:
    return Path(str(resources.files("voicecare").joinpath("data/lexicons")))


def _default_fixtures() -> dict[str, EmotionScores]:
    from voicecare.providers import load_emotion_fixtures

    path = resources.files("voicecare").joinpath("data/fixtures/emotions.json")
    return load_emotion_fixtures(str(path))


def _strip_token(token: str) -> tuple[str, str, str]:
    start, end = 0, len(token)
    while start < end and token[start] in _LEADING_PUNCT:
        start += 1
    while end > start and token[end - 1] in _TRAILING_PUNCT:
        end -= 1
    return token[:start], token[start:end], token[end:]


class MockProviders:
    """All five capabilities, deterministic and network-free."""

    def __init__(self, fixtures=None, lexicon_dir=None,
                 languages=("en", "es", "fr"), silence_threshold: float = 0.01):
        self.languages = tuple(languages)
        self.silence_threshold = silence_threshold
        self._lexicon_dir = Path(lexicon_dir) if lexicon_dir else _default_lexicon_dir()
        self._fixtures = dict(fixtures) if fixtures is not None else _default_fixtures()
        self._translations: dict[tuple[str, str], dict[str, str]] = {}
        self._emotion_lexicon: dict[str, list[tuple[str, float]]] | None = None

    # -- audio side -------------------------------------------------------

    def synthesize(self, text: str, language: str, rate: float = 1.0) -> AudioClip:
        """Per-character tones in driver format; text and language ride in
        the metadata chunk. Duration is proportional to len(text) / rate."""
        if not text.strip():
            raise EmptyText("cannot synthesize empty text")
        if rate <= 0:
            raise ValueError("speech rate must be positive")
        frames_per_char = max(1, int(round(CHAR_SECONDS / rate * DRIVER_FORMAT.sample_rate_hz)))
        peak = TONE_AMPLITUDE * DRIVER_FORMAT.full_scale
        segments = []
        t = np.arange(frames_per_char, dtype=np.float64) / DRIVER_FORMAT.sample_rate_hz
        for ch in text:
            freq = 300.0 + (ord(ch) % 32) * 25.0
            segments.append(peak * np.sin(2 * math.pi * freq * t))
        mono = round_half_away(np.concatenate(segments)).astype(np.int32)
        frames = np.repeat(mono.reshape(-1, 1), 2, axis=1)
        return AudioClip(DRIVER_FORMAT, frames, {TEXT_KEY: text, LANGUAGE_KEY: language})

    def detect_language(self, clip: AudioClip) -> list[LanguageGuess]:
        """The tagged language scores 0.9; the rest of the inventory splits
        the remainder evenly. Untagged speech scores uniformly."""
        if rms_level(clip) < self.silence_threshold:
            raise NoSpeech("clip is silent")
        tagged = clip.metadata.get(LANGUAGE_KEY)
        inventory = sorted(set(self.languages) | ({tagged} if tagged else set()))
        if tagged:
            others = [code for code in inventory if code != tagged]
            guesses = [LanguageGuess(tagged, 0.9)]
            if others:
                share = 0.1 / len(others)
                guesses += [LanguageGuess(code, share) for code in others]
        else:
            share = 1.0 / len(inventory)
            guesses = [LanguageGuess(code, share) for code in inventory]
        return sorted(guesses, key=lambda g: (-g.confidence, g.code))

    def transcribe(self, clip: AudioClip, language: str) -> Transcript:
        """Reads back the embedded text; confidence 1.0 when the embedded
        language matches the requested one, 0.5 otherwise."""
        if rms_level(clip) < self.silence_threshold:
            raise NoSpeech("clip is silent")
        text = clip.metadata.get(TEXT_KEY)
        if text is None:
            raise NoSpeech("clip carries no embedded text")
        confidence = 1.0 if clip.metadata.get(LANGUAGE_KEY) == language else 0.5
        return Transcript(text, language, confidence)

    # -- text side --------------------------------------------------------

    def translate(self, text: str, source: str, target: str) -> str:
        if source == target:
            return text
        lexicon = self._translation_lexicon(source, target)
        out = []
        for token in text.split():
            lead, core, trail = _strip_token(token)
            out.append(lead + lexicon.get(core.lower(), core) + trail)
        return " ".join(out)

    def analyze_emotion(self, text: str) -> EmotionScores:
        """Fixture vector on exact text match, keyword-weight sums
        otherwise; the five emotion fields are scaled to sum at most 1."""
        if not text.strip():
            raise EmptyText("cannot score empty text")
        if text in self._fixtures:
            return self._fixtures[text]
        lexicon = self._load_emotion_lexicon()
        totals = {label: 0.0 for label in EMOTION_LABELS}
        sentiment = 0.0
        for token in text.split():
            _, core, _ = _strip_token(token)
            for label, weight in lexicon.get(core.lower(), ()):
                if label == "positive":
                    sentiment += weight
                elif label == "negative":
                    sentiment -= weight
                else:
                    totals[label] += weight
        emotion_sum = sum(totals.values())
        if emotion_sum > 1.0:
            totals = {k: v / emotion_sum for k, v in totals.items()}
        return EmotionScores(**totals, sentiment=max(-1.0, min(1.0, sentiment)))

    # -- data loading -----------------------------------------------------

    def _translation_lexicon(self, source: str, target: str) -> dict[str, str]:
        key = (source, target)
        if key not in self._translations:
            path = self._lexicon_dir / f"{source}-{target}.tsv"
            table: dict[str, str] = {}
            if path.exists():
                for line in path.read_text(encoding="utf-8").splitlines():
                    line = line.strip()
                    if not line or line.startswith("#"):
                        continue
                    src, _, dst = line.partition("\t")
                    if dst:
                        table[src.strip().lower()] = dst.strip()
            self._translations[key] = table
        return self._translations[key]

    def _load_emotion_lexicon(self) -> dict[str, list[tuple[str, float]]]:
        if self._emotion_lexicon is None:
            path = self._lexicon_dir / "emotion-en.tsv"
            table: dict[str, list[tuple[str, float]]] = {}
            if path.exists():
                for line in path.read_text(encoding="utf-8").splitlines():
                    line = line.strip()
                    if not line or line.startswith("#"):
                        continue
                    parts = line.split("\t")
                    if len(parts) != 3:
                        continue
                    token, label, weight = parts
                    if label not in (*EMOTION_LABELS, "positive", "negative"):
                        continue
                    table.setdefault(token.strip().lower(), []).append((label, float(weight)))
            self._emotion_lexicon = table
        return self._emotion_lexicon
