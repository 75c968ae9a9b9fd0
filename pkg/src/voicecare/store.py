"""Append-only persistence for questionnaires and session records.

On-disk layout under one root directory::

    questionnaires/<id>.manifest      JSON questionnaire manifest
    sessions/<id>/answer-<n>.wav      recorded answer for question position n
    sessions/<id>/welcome.wav         welcome reply used for language detection
    sessions/<id>/manifest            JSON session record, written last

A session is visible exactly when its ``manifest`` file exists: audio files
are written first and the manifest is published with a temp-file rename, so
readers never observe a half-saved session. Once written, a session
manifest never changes except for its ``advice`` field.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass
from pathlib import Path

from voicecare.audio import AudioClip, write_wav
from voicecare.providers import EmotionScores, Transcript
from voicecare.questionnaire import (
    Questionnaire,
    questionnaire_from_dict,
    questionnaire_to_dict,
)
from voicecare.session import AnswerRecord, SessionRecord

SESSION_SCHEMA_VERSION = 1

_SAFE_ID = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_-]*$")
_AUDIO_REF = re.compile(r"^(answer-\d+|welcome)\.wav$")


class StorageFailure(RuntimeError):
    pass


class AlreadyExists(StorageFailure):
    pass


class NotFound(StorageFailure):
    pass


@dataclass(frozen=True)
class SessionSummary:
    id: str
    questionnaire_id: str
    detected_language: str
    final_label: str | None
    started_at: str
    status: str


def _answer_to_dict(answer: AnswerRecord) -> dict:
    return {
        "question_id": answer.question_id,
        "audio_ref": answer.audio_ref,
        "transcript_user": (
            {
                "text": answer.transcript_user.text,
                "language": answer.transcript_user.language,
                "confidence": answer.transcript_user.confidence,
            }
            if answer.transcript_user
            else None
        ),
        "transcript_specialist": answer.transcript_specialist,
        "transcript_emotion_lang": answer.transcript_emotion_lang,
        "emotion": answer.emotion.as_dict() if answer.emotion else None,
        "repeats_used": answer.repeats_used,
        "no_response": answer.no_response,
    }


def _answer_from_dict(data: dict) -> AnswerRecord:
    transcript = data.get("transcript_user")
    emotion = data.get("emotion")
    return AnswerRecord(
        question_id=data["question_id"],
        audio_ref=data.get("audio_ref"),
        transcript_user=(
            Transcript(transcript["text"], transcript["language"], transcript["confidence"])
            if transcript
            else None
        ),
        transcript_specialist=data.get("transcript_specialist"),
        transcript_emotion_lang=data.get("transcript_emotion_lang"),
        emotion=EmotionScores.from_dict(emotion) if emotion else None,
        repeats_used=data.get("repeats_used", 0),
        no_response=data.get("no_response", False),
    )


def record_to_dict(record: SessionRecord) -> dict:
    return {
        "schema_version": SESSION_SCHEMA_VERSION,
        "id": record.id,
        "questionnaire_id": record.questionnaire_id,
        "device_id": record.device_id,
        "started_at": record.started_at,
        "detected_language": record.detected_language,
        "language_fallback": record.language_fallback,
        "status": record.status,
        "answers": [_answer_to_dict(a) for a in record.answers],
        "mean_emotion": record.mean_emotion.as_dict() if record.mean_emotion else None,
        "final_label": record.final_label,
        "advice": record.advice,
        "welcome_ref": record.welcome_ref,
    }


def record_from_dict(data: dict) -> SessionRecord:
    mean = data.get("mean_emotion")
    return SessionRecord(
        id=data["id"],
        questionnaire_id=data["questionnaire_id"],
        device_id=data.get("device_id", ""),
        started_at=data["started_at"],
        detected_language=data["detected_language"],
        language_fallback=data.get("language_fallback", False),
        status=data.get("status", "completed"),
        answers=[_answer_from_dict(a) for a in data.get("answers", [])],
        mean_emotion=EmotionScores.from_dict(mean) if mean else None,
        final_label=data.get("final_label"),
        advice=data.get("advice"),
        welcome_ref=data.get("welcome_ref"),
    )


class RecordStore:
    """Directory-backed store; safe for many readers and per-id writers."""

    def __init__(self, root):
        self.root = Path(root)
        self.questionnaire_dir = self.root / "questionnaires"
        self.session_dir = self.root / "sessions"
        self.questionnaire_dir.mkdir(parents=True, exist_ok=True)
        self.session_dir.mkdir(parents=True, exist_ok=True)

    # The two seams below are the only mutating filesystem operations; the
    # crash-safety tests inject faults here.
    def _write_bytes(self, path: Path, data: bytes) -> None:
        path.write_bytes(data)

    def _publish(self, tmp: Path, final: Path) -> None:
        os.replace(tmp, final)

    # -- questionnaires ----------------------------------------------------

    def save_questionnaire(self, q: Questionnaire) -> str:
        if not _SAFE_ID.match(q.id):
            raise StorageFailure(f"unsafe questionnaire id {q.id!r}")
        path = self.questionnaire_dir / f"{q.id}.manifest"
        if path.exists():
            raise AlreadyExists(f"questionnaire {q.id} already stored")
        payload = json.dumps(questionnaire_to_dict(q), ensure_ascii=False, indent=2)
        tmp = path.with_name(f".{path.name}.tmp")
        try:
            self._write_bytes(tmp, payload.encode("utf-8"))
            self._publish(tmp, path)
        except OSError as exc:
            raise StorageFailure(f"saving questionnaire {q.id}: {exc}") from exc
        return q.id

    def load_questionnaire(self, questionnaire_id: str) -> Questionnaire:
        path = self.questionnaire_dir / f"{questionnaire_id}.manifest"
        if not _SAFE_ID.match(questionnaire_id) or not path.exists():
            raise NotFound(f"questionnaire {questionnaire_id} not found")
        return questionnaire_from_dict(json.loads(path.read_text(encoding="utf-8")))

    def list_questionnaires(self) -> list[Questionnaire]:
        out = []
        for path in sorted(self.questionnaire_dir.glob("*.manifest")):
            out.append(questionnaire_from_dict(json.loads(path.read_text(encoding="utf-8"))))
        return out

    # -- sessions ------------------------------------------------------------

    def save_session(self, record: SessionRecord, clips: dict[int, AudioClip],
                     welcome: AudioClip | None = None) -> str:
        """Write audio first, then publish the manifest atomically.

        ``clips`` maps question position to the recorded answer clip;
        ``audio_ref`` fields are assigned here. Raises AlreadyExists for a
        duplicate session id; a crash at any point leaves either no visible
        session or the complete one.
        """
        if not _SAFE_ID.match(record.id):
            raise StorageFailure(f"unsafe session id {record.id!r}")
        directory = self.session_dir / record.id
        manifest = directory / "manifest"
        if manifest.exists():
            raise AlreadyExists(f"session {record.id} already stored")
        directory.mkdir(parents=True, exist_ok=True)
        try:
            for position, clip in sorted(clips.items()):
                ref = f"answer-{position}.wav"
                self._write_bytes(directory / ref, write_wav(clip))
                record.answers[position].audio_ref = ref
            if welcome is not None:
                self._write_bytes(directory / "welcome.wav", write_wav(welcome))
                record.welcome_ref = "welcome.wav"
            payload = json.dumps(record_to_dict(record), ensure_ascii=False, indent=2)
            tmp = directory / ".manifest.tmp"
            self._write_bytes(tmp, payload.encode("utf-8"))
            self._publish(tmp, manifest)
        except OSError as exc:
            raise StorageFailure(f"saving session {record.id}: {exc}") from exc
        return record.id

    def load_session(self, session_id: str) -> SessionRecord:
        manifest = self.session_dir / session_id / "manifest"
        if not _SAFE_ID.match(session_id) or not manifest.exists():
            raise NotFound(f"session {session_id} not found")
        return record_from_dict(json.loads(manifest.read_text(encoding="utf-8")))

    def list_sessions(self, questionnaire_id: str | None = None,
                      started_after: str | None = None,
                      started_before: str | None = None) -> list[SessionSummary]:
        """Summaries of visible sessions, newest first."""
        summaries = []
        for manifest in self.session_dir.glob("*/manifest"):
            data = json.loads(manifest.read_text(encoding="utf-8"))
            if questionnaire_id and data["questionnaire_id"] != questionnaire_id:
                continue
            if started_after and data["started_at"] < started_after:
                continue
            if started_before and data["started_at"] > started_before:
                continue
            summaries.append(
                SessionSummary(
                    id=data["id"],
                    questionnaire_id=data["questionnaire_id"],
                    detected_language=data["detected_language"],
                    final_label=data.get("final_label"),
                    started_at=data["started_at"],
                    status=data.get("status", "completed"),
                )
            )
        return sorted(summaries, key=lambda s: (s.started_at, s.id), reverse=True)

    def attach_advice(self, session_id: str, advice: str) -> SessionRecord:
        """Set the one mutable field; idempotent for equal text."""
        record = self.load_session(session_id)
        record.advice = advice
        directory = self.session_dir / session_id
        payload = json.dumps(record_to_dict(record), ensure_ascii=False, indent=2)
        tmp = directory / ".manifest.tmp"
        try:
            self._write_bytes(tmp, payload.encode("utf-8"))
            self._publish(tmp, directory / "manifest")
        except OSError as exc:
            raise StorageFailure(f"attaching advice to {session_id}: {exc}") from exc
        return record

    def emotion_series(self, session_id: str) -> list[tuple[int, EmotionScores | None]]:
        """Per-question emotion vectors in position order, None where the
        question went unanswered."""
        record = self.load_session(session_id)
        return [(i, answer.emotion) for i, answer in enumerate(record.answers)]

    def audio_path(self, session_id: str, ref: str) -> Path:
        """Resolve a stored audio attachment, refusing unknown names."""
        if not _SAFE_ID.match(session_id) or not _AUDIO_REF.match(ref):
            raise NotFound(f"audio {ref} of session {session_id} not found")
        path = self.session_dir / session_id / ref
        if not (self.session_dir / session_id / "manifest").exists() or not path.exists():
            raise NotFound(f"audio {ref} of session {session_id} not found")
        return path
