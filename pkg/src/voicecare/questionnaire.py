"""Question sets: text extraction, manifest persistence, prompt rendering.

Care staff author question sets either as a JSON manifest or as a plain
text document. Document import keeps only sentences that end with a
question mark: a sentence runs from the character after the previous
terminator ('.', '!', '?', or a blank line) up to and including its '?'.
"""

from __future__ import annotations

import json
import os
import shutil
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from voicecare.audio import write_wav
from voicecare.providers import valid_language_tag

MANIFEST_SCHEMA_VERSION = 1

_SENTENCE_TERMINATORS = ".!?"


class InvalidManifest(ValueError):
    """Manifest failed validation; ``problems`` lists field-level issues."""

    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


@dataclass(frozen=True)
class Question:
    id: str
    text: str
    position: int

    def __post_init__(self):
        if not self.id:
            raise ValueError("question id must be non-empty")
        if not self.text.strip() or not self.text.endswith("?"):
            raise ValueError(f"question {self.id}: text must be non-empty and end with '?'")
        if self.position < 0:
            raise ValueError(f"question {self.id}: position must be >= 0")


@dataclass(frozen=True)
class Questionnaire:
    id: str
    title: str
    specialist_language: str
    welcome_text: str
    questions: tuple[Question, ...]

    def __post_init__(self):
        problems = _questionnaire_problems(self)
        if problems:
            raise InvalidManifest(problems)

    def question_at(self, position: int) -> Question:
        return self.questions[position]


@dataclass(frozen=True)
class PromptCache:
    """Rendered prompt audio, one WAV per question of one questionnaire."""

    questionnaire_id: str
    language: str
    entries: dict[str, Path] = field(default_factory=dict)


def _questionnaire_problems(q) -> list[str]:
    problems = []
    if not q.id:
        problems.append("id: must be non-empty")
    if not valid_language_tag(q.specialist_language):
        problems.append(f"specialist_language: invalid tag {q.specialist_language!r}")
    if not q.welcome_text.strip():
        problems.append("welcome_text: must be non-empty")
    if not q.questions:
        problems.append("questions: at least one question required")
    positions = [question.position for question in q.questions]
    if positions != list(range(len(positions))):
        problems.append(f"questions: positions must be 0..{len(positions) - 1} without gaps")
    ids = [question.id for question in q.questions]
    if len(set(ids)) != len(ids):
        problems.append("questions: ids must be unique")
    return problems


def extract_questions(document_text: str) -> list[Question]:
    """Pull the question sentences out of a plain-text document.

    Line endings are normalized first, so CRLF and LF documents extract
    identically; a blank line acts as a sentence terminator, a single
    newline is ordinary whitespace.
    """
    text = document_text.replace("\r\n", "\n").replace("\r", "\n")
    segments: list[str] = []
    buf: list[str] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in _SENTENCE_TERMINATORS:
            buf.append(ch)
            segments.append("".join(buf))
            buf = []
            i += 1
        elif ch == "\n" and i + 1 < n and text[i + 1] == "\n":
            segments.append("".join(buf))
            buf = []
            while i < n and text[i] == "\n":
                i += 1
        else:
            buf.append(ch)
            i += 1
    if buf:
        segments.append("".join(buf))

    texts = [s.strip() for s in segments]
    texts = [s for s in texts if s.endswith("?")]
    return [Question(id=f"q{pos + 1}", text=s, position=pos) for pos, s in enumerate(texts)]


def questionnaire_from_dict(data: dict, generate_id: bool = False) -> Questionnaire:
    """Build and validate a questionnaire from manifest-shaped data.

    Raises InvalidManifest naming every offending field rather than
    stopping at the first problem.
    """
    if not isinstance(data, dict):
        raise InvalidManifest(["manifest: must be a JSON object"])
    problems = []
    qid = data.get("id") or (uuid.uuid4().hex[:12] if generate_id else "")
    title = data.get("title", "")
    language = data.get("specialist_language", "")
    welcome = data.get("welcome_text", "")
    raw_questions = data.get("questions", [])
    if not isinstance(raw_questions, list):
        raise InvalidManifest(["questions: must be a list"])

    questions = []
    for i, raw in enumerate(raw_questions):
        if not isinstance(raw, dict):
            problems.append(f"questions[{i}]: must be an object")
            continue
        q_id = raw.get("id") or f"q{i + 1}"
        q_text = raw.get("text", "")
        position = raw.get("position", i)
        if not isinstance(q_text, str) or not q_text.strip() or not q_text.endswith("?"):
            problems.append(f"questions[{i}] ({q_id}): text must be non-empty and end with '?'")
            continue
        try:
            questions.append(Question(str(q_id), q_text, int(position)))
        except (ValueError, TypeError) as exc:
            problems.append(f"questions[{i}] ({q_id}): {exc}")

    if problems:
        # surface structural problems together with whole-set ones
        shell = _Shell(qid, language, welcome, questions)
        raise InvalidManifest(problems + _questionnaire_problems(shell))
    try:
        return Questionnaire(str(qid), str(title), str(language), str(welcome),
                             tuple(questions))
    except InvalidManifest:
        raise
    except (ValueError, TypeError) as exc:
        raise InvalidManifest([str(exc)]) from exc


@dataclass
class _Shell:
    id: str
    specialist_language: str
    welcome_text: str
    questions: list


def questionnaire_to_dict(q: Questionnaire) -> dict:
    return {
        "schema_version": MANIFEST_SCHEMA_VERSION,
        "id": q.id,
        "title": q.title,
        "specialist_language": q.specialist_language,
        "welcome_text": q.welcome_text,
        "questions": [
            {"id": question.id, "text": question.text, "position": question.position}
            for question in q.questions
        ],
    }


def load_questionnaire(path) -> Questionnaire:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidManifest([f"manifest: unreadable ({exc})"]) from exc
    return questionnaire_from_dict(data)


def save_questionnaire(q: Questionnaire, path) -> None:
    """Write the manifest via temp-then-rename so readers never see a
    partial file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(f".{path.name}.tmp")
    tmp.write_text(json.dumps(questionnaire_to_dict(q), ensure_ascii=False, indent=2),
                   encoding="utf-8")
    os.replace(tmp, path)


def prerender_prompts(q: Questionnaire, providers, language: str, dest_root) -> PromptCache:
    """Render one prompt WAV per question into
    ``dest_root/<questionnaire id>/<language>/``.

    Questions are translated first when the target language differs from
    the authoring language. The directory is built in a temp location and
    renamed into place, so a provider failure publishes nothing.
    """
    dest_root = Path(dest_root)
    final_dir = dest_root / q.id / language
    tmp_dir = dest_root / f".tmp-{q.id}-{language}-{os.getpid()}"
    if tmp_dir.exists():
        shutil.rmtree(tmp_dir)
    tmp_dir.mkdir(parents=True)
    try:
        entries: dict[str, Path] = {}
        for question in q.questions:
            text = question.text
            if language != q.specialist_language:
                text = providers.translate(text, q.specialist_language, language)
            clip = providers.synthesize(text, language)
            path = tmp_dir / f"{question.id}.wav"
            path.write_bytes(write_wav(clip))
            entries[question.id] = final_dir / f"{question.id}.wav"
    except Exception:
        shutil.rmtree(tmp_dir, ignore_errors=True)
        raise
    if final_dir.exists():
        shutil.rmtree(final_dir)
    final_dir.parent.mkdir(parents=True, exist_ok=True)
    os.rename(tmp_dir, final_dir)
    return PromptCache(q.id, language, entries)
