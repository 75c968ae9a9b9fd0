"""The spoken session: welcome, language detection, ask/record/score loop.

One session walks a questionnaire in order. The opening welcome prompt is
played and the reply's language fixes the conversation language for the
whole session (falling back to the specialist's language when the user
never replies). Each question is translated, synthesized, played, and
recorded; a user who stays silent hears the same question again, a bounded
number of times, and unanswered questions are flagged rather than dropped.
Answered questions carry the user-language transcript, its specialist and
emotion-language translations, and an emotion score vector; the session
ends with the field-wise mean of the scored answers and its dominant
emotion label.
"""

from __future__ import annotations

import time
import uuid
from collections import deque
from contextlib import contextmanager
from dataclasses import dataclass, field
from datetime import datetime, timezone

from voicecare.audio import DRIVER_FORMAT, AudioClip
from voicecare.capture import (
    Answered,
    CollectingSink,
    FileChunkSource,
    RecordPolicy,
    SilentChunkSource,
    SinkFailure,
    SourceFailure,
    playback,
    record_answer,
)
from voicecare.providers import (
    EMOTION_LABELS,
    EmotionScores,
    NoSpeech,
    ProviderUnavailable,
    Transcript,
    select_language,
)

# failures that end the session early but still persist a padded record
_ABORT_ERRORS = (ProviderUnavailable, SourceFailure, SinkFailure)
from voicecare.questionnaire import Question, Questionnaire

STATUS_COMPLETED = "completed"
STATUS_ABORTED = "aborted"


class SessionAborted(RuntimeError):
    """A provider died mid-session; the partial record was persisted."""

    def __init__(self, record: "SessionRecord", cause: Exception):
        super().__init__(f"session {record.id} aborted: {cause}")
        self.record = record
        self.cause = cause


@dataclass(frozen=True)
class SessionPolicy:
    max_repeats: int = 2
    record: RecordPolicy = field(default_factory=RecordPolicy)
    emotion_language: str = "en"

    def __post_init__(self):
        if not 0 <= self.max_repeats <= 5:
            raise ValueError("max_repeats must be between 0 and 5")


@dataclass
class AnswerRecord:
    """One question's outcome inside a session record.

    ``no_response`` is true exactly when audio, transcripts, and emotion
    are all absent.
    """

    question_id: str
    audio_ref: str | None = None
    transcript_user: Transcript | None = None
    transcript_specialist: str | None = None
    transcript_emotion_lang: str | None = None
    emotion: EmotionScores | None = None
    repeats_used: int = 0
    no_response: bool = False


@dataclass
class SessionRecord:
    """The persisted multimedia record of one full questionnaire run."""

    id: str
    questionnaire_id: str
    device_id: str
    started_at: str
    detected_language: str
    language_fallback: bool
    status: str
    answers: list[AnswerRecord]
    mean_emotion: EmotionScores | None
    final_label: str | None
    advice: str | None = None
    welcome_ref: str | None = None


@dataclass(frozen=True)
class LanguageDetection:
    language: str
    fell_back: bool
    attempts: int
    reply: AudioClip | None


class ScriptedSessionAudio:
    """Audio front fed from prepared clips instead of live hardware.

    Each recording attempt consumes the next clip in the queue; a None
    entry, or an exhausted queue, plays out as pure silence. Prompts go to
    an in-memory sink.
    """

    def __init__(self, replies: list[AudioClip | None]):
        self._replies = deque(replies)
        self.sink = CollectingSink()

    def begin_recording(self, policy: RecordPolicy):
        clip = self._replies.popleft() if self._replies else None
        if clip is None:
            return SilentChunkSource(DRIVER_FORMAT, policy.chunk_seconds)
        return FileChunkSource(clip, policy.chunk_seconds)

    def playback_sink(self):
        return self.sink


@contextmanager
def _stage(timer, position, stage):
    if timer is None:
        yield
        return
    start = time.perf_counter()
    try:
        yield
    finally:
        timer.add(position, stage, time.perf_counter() - start)


def detect_user_language(welcome_text: str, specialist_language: str, providers,
                         audio_io, policy: SessionPolicy) -> LanguageDetection:
    """Play the welcome prompt and pick the reply's top-scoring language.

    Silent replies retry up to ``policy.max_repeats`` times; when every
    attempt stays silent the specialist's language is used and the fallback
    flag is set.
    """
    welcome = providers.synthesize(welcome_text, specialist_language)
    attempts = 0
    while attempts <= policy.max_repeats:
        attempts += 1
        playback(welcome, audio_io.playback_sink())
        outcome = record_answer(audio_io.begin_recording(policy.record), policy.record)
        if isinstance(outcome, Answered):
            try:
                guesses = providers.detect_language(outcome.clip)
            except NoSpeech:
                continue
            return LanguageDetection(select_language(guesses), False, attempts, outcome.clip)
    return LanguageDetection(specialist_language, True, attempts, None)


def ask_question(question: Question, user_language: str, specialist_language: str,
                 providers, audio_io, policy: SessionPolicy,
                 timer=None) -> tuple[AnswerRecord, AudioClip | None]:
    """Ask one question and build its answer record.

    The prompt is synthesized once and replayed on every repeat. An
    answered recording is transcribed in the user's language and translated
    for the specialist and for the emotion scorer; equal translation
    requests are deduplicated so a shared specialist/emotion language costs
    one call.
    """
    pos = question.position
    prompt_text = question.text
    if user_language != specialist_language:
        with _stage(timer, pos, "translate"):
            prompt_text = providers.translate(prompt_text, specialist_language, user_language)
    with _stage(timer, pos, "tts"):
        prompt = providers.synthesize(prompt_text, user_language)

    repeats = 0
    clip = None
    while True:
        with _stage(timer, pos, "playback"):
            playback(prompt, audio_io.playback_sink())
        with _stage(timer, pos, "record"):
            outcome = record_answer(audio_io.begin_recording(policy.record), policy.record)
        if isinstance(outcome, Answered):
            try:
                with _stage(timer, pos, "stt"):
                    transcript = providers.transcribe(outcome.clip, user_language)
                clip = outcome.clip
                break
            except NoSpeech:
                pass  # unintelligible counts the same as silence
        if repeats >= policy.max_repeats:
            return AnswerRecord(question.id, repeats_used=repeats, no_response=True), None
        repeats += 1

    translated: dict[tuple[str, str, str], str] = {}

    def translate_once(text, source, target):
        if source == target:
            return text
        key = (text, source, target)
        if key not in translated:
            with _stage(timer, pos, "translate"):
                translated[key] = providers.translate(text, source, target)
        return translated[key]

    specialist_text = translate_once(transcript.text, user_language, specialist_language)
    emotion_text = translate_once(transcript.text, user_language, policy.emotion_language)
    with _stage(timer, pos, "emotion"):
        emotion = providers.analyze_emotion(emotion_text)
    record = AnswerRecord(
        question_id=question.id,
        transcript_user=transcript,
        transcript_specialist=specialist_text,
        transcript_emotion_lang=emotion_text,
        emotion=emotion,
        repeats_used=repeats,
        no_response=False,
    )
    return record, clip


def final_emotion(scores: EmotionScores) -> str:
    """Dominant emotion label; ties resolve to the earlier canonical label
    (joy, anger, sadness, fear, disgust)."""
    best = max(EMOTION_LABELS, key=lambda label: getattr(scores, label))
    return best.upper()


def aggregate(answers: list[AnswerRecord]) -> tuple[EmotionScores | None, str | None]:
    """Field-wise mean over the scored answers plus its dominant label;
    (None, None) when nothing was scored."""
    scored = [a.emotion for a in answers if a.emotion is not None]
    if not scored:
        return None, None
    n = len(scored)
    mean = EmotionScores(
        **{label: sum(getattr(e, label) for e in scored) / n for label in EMOTION_LABELS},
        sentiment=sum(e.sentiment for e in scored) / n,
    )
    return mean, final_emotion(mean)


def run_session(questionnaire: Questionnaire, providers, audio_io,
                policy: SessionPolicy, device_id: str, store,
                timer=None) -> SessionRecord:
    """Run the whole questionnaire and persist the outcome.

    The record always holds one answer per question: when a provider dies
    mid-session the remaining questions are padded as no-response, the
    record is persisted with status ``aborted``, and SessionAborted is
    raised carrying it.
    """
    session_id = uuid.uuid4().hex[:16]
    started_at = datetime.now(timezone.utc).isoformat(timespec="seconds")
    answers: list[AnswerRecord] = []
    clips: dict[int, AudioClip] = {}
    status = STATUS_COMPLETED
    failure: Exception | None = None

    try:
        detection = detect_user_language(
            questionnaire.welcome_text, questionnaire.specialist_language,
            providers, audio_io, policy,
        )
    except _ABORT_ERRORS as exc:
        detection = LanguageDetection(questionnaire.specialist_language, True, 0, None)
        status = STATUS_ABORTED
        failure = exc

    if status == STATUS_COMPLETED:
        for question in questionnaire.questions:
            try:
                record, clip = ask_question(
                    question, detection.language, questionnaire.specialist_language,
                    providers, audio_io, policy, timer=timer,
                )
            except _ABORT_ERRORS as exc:
                status = STATUS_ABORTED
                failure = exc
                break
            answers.append(record)
            if clip is not None:
                clips[question.position] = clip

    for question in questionnaire.questions[len(answers):]:
        answers.append(AnswerRecord(question.id, repeats_used=0, no_response=True))

    mean, label = aggregate(answers)
    record = SessionRecord(
        id=session_id,
        questionnaire_id=questionnaire.id,
        device_id=device_id,
        started_at=started_at,
        detected_language=detection.language,
        language_fallback=detection.fell_back,
        status=status,
        answers=answers,
        mean_emotion=mean,
        final_label=label,
    )
    with _stage(timer, None, "store"):
        store.save_session(record, clips, welcome=detection.reply)
    if status == STATUS_ABORTED:
        raise SessionAborted(record, failure)
    return record
