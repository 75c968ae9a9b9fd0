"""HTTP client for remote provider services.

One JSON request per capability call, audio carried as base64 WAV:

    POST {base}/detect     {"audio_wav_base64"}            -> {"guesses": [{"code", "confidence"}, ...]}
    POST {base}/stt        {"audio_wav_base64", "language"} -> {"text", "language", "confidence"}
    POST {base}/tts        {"text", "language", "rate"}     -> {"audio_wav_base64"}
    POST {base}/translate  {"text", "source", "target"}     -> {"text"}
    POST {base}/emotion    {"text"}                          -> {"joy", ..., "sentiment"}

A service answers 422 with {"error": "no_speech"} or {"error": "empty_text"}
to signal those conditions; any other failure, including transport errors,
surfaces as ProviderUnavailable. Requests are stateless and idempotent, so
callers may safely retry.
"""

from __future__ import annotations

import base64

import requests

from voicecare.audio import AudioClip, parse_wav, write_wav
from voicecare.providers import (
    EmotionScores,
    EmptyText,
    LanguageGuess,
    NoSpeech,
    ProviderUnavailable,
    Transcript,
)

_SIGNAL_ERRORS = {"no_speech": NoSpeech, "empty_text": EmptyText}


class RemoteProviders:
    def __init__(self, base_url: str, timeout: float = 30.0, session=None):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self._http = session or requests.Session()

    def _post(self, endpoint: str, payload: dict) -> dict:
        url = f"{self.base_url}/{endpoint}"
        try:
            response = self._http.post(url, json=payload, timeout=self.timeout)
        except requests.RequestException as exc:
            raise ProviderUnavailable(f"POST {url} failed: {exc}") from exc
        if response.status_code == 422:
            try:
                code = response.json().get("error")
            except ValueError:
                code = None
            if code in _SIGNAL_ERRORS:
                raise _SIGNAL_ERRORS[code](f"remote provider reported {code}")
        if not 200 <= response.status_code < 300:
            raise ProviderUnavailable(f"POST {url} returned {response.status_code}")
        try:
            return response.json()
        except ValueError as exc:
            raise ProviderUnavailable(f"POST {url} returned non-JSON body") from exc

    def detect_language(self, clip: AudioClip) -> list[LanguageGuess]:
        body = self._post("detect", {"audio_wav_base64": _encode(clip)})
        guesses = [LanguageGuess(g["code"], float(g["confidence"])) for g in body["guesses"]]
        return sorted(guesses, key=lambda g: (-g.confidence, g.code))

    def transcribe(self, clip: AudioClip, language: str) -> Transcript:
        body = self._post("stt", {"audio_wav_base64": _encode(clip), "language": language})
        return Transcript(body["text"], body.get("language", language),
                          float(body.get("confidence", 1.0)))

    def synthesize(self, text: str, language: str, rate: float = 1.0) -> AudioClip:
        if not text.strip():
            raise EmptyText("cannot synthesize empty text")
        body = self._post("tts", {"text": text, "language": language, "rate": rate})
        return parse_wav(base64.b64decode(body["audio_wav_base64"]))

    def translate(self, text: str, source: str, target: str) -> str:
        if source == target:
            return text
        body = self._post("translate", {"text": text, "source": source, "target": target})
        return body["text"]

    def analyze_emotion(self, text: str) -> EmotionScores:
        if not text.strip():
            raise EmptyText("cannot score empty text")
        return EmotionScores.from_dict(self._post("emotion", {"text": text}))


def _encode(clip: AudioClip) -> str:
    return base64.b64encode(write_wav(clip)).decode("ascii")
