"""Per-question stage timing for session runs.

Wall time of one answered question decomposes into seven stages: tts,
playback, record, stt, translate, emotion, and store. Absolute numbers
depend entirely on the providers and hardware in play, so the bench
reports the decomposition rather than chasing any particular total;
storage happens once per session and is apportioned evenly across
questions in the table.
"""

from __future__ import annotations

import statistics
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path

from voicecare.providers.mock import MockProviders
from voicecare.questionnaire import Question, Questionnaire
from voicecare.session import ScriptedSessionAudio, SessionPolicy, run_session
from voicecare.store import RecordStore

STAGES = ("tts", "playback", "record", "stt", "translate", "emotion", "store")

_BENCH_QUESTIONS = [
    "How are you feeling today?",
    "Did you sleep well?",
    "Who visited you this morning?",
    "Did you eat anything today?",
    "What is your mood this morning?",
]
_BENCH_ANSWERS_FR = [
    "je suis si heureux de vivre ici",
    "j'ai bien dormi cette nuit",
    "je me sens seul aujourd'hui",
    "oui j'ai très bien mangé",
    "je suis fatigué mais content",
]


class StageTimer:
    """Collects per-question stage durations during one session run."""

    def __init__(self):
        self.cells: dict[tuple[int | None, str], float] = defaultdict(float)

    def add(self, position: int | None, stage: str, seconds: float) -> None:
        self.cells[(position, stage)] += seconds


@dataclass
class BenchReport:
    question_count: int
    repetitions: int
    samples: dict[tuple[int, str], list[float]]

    def mean(self, position: int, stage: str) -> float:
        return statistics.fmean(self.samples[(position, stage)])

    def stddev(self, position: int, stage: str) -> float:
        return statistics.pstdev(self.samples[(position, stage)])

    def question_total(self, position: int) -> float:
        return sum(self.mean(position, stage) for stage in STAGES)

    def text_table(self) -> str:
        def cell(position, stage):
            mean = self.mean(position, stage)
            if self.repetitions > 1:
                return f"{mean:.4f}±{self.stddev(position, stage):.4f}"
            return f"{mean:.4f}"

        header = ["question"] + list(STAGES) + ["total"]
        rows = [header]
        for position in range(self.question_count):
            rows.append(
                [f"q{position + 1}"]
                + [cell(position, stage) for stage in STAGES]
                + [f"{self.question_total(position):.4f}"]
            )
        widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
        lines = ["  ".join(value.ljust(widths[i]) for i, value in enumerate(row)) for row in rows]
        return "\n".join(lines)

    def csv_text(self) -> str:
        lines = ["question,stage,mean_seconds,stddev_seconds,samples"]
        for position in range(self.question_count):
            for stage in STAGES:
                values = ";".join(f"{v:.6f}" for v in self.samples[(position, stage)])
                lines.append(
                    f"q{position + 1},{stage},{self.mean(position, stage):.6f},"
                    f"{self.stddev(position, stage):.6f},{values}"
                )
        return "\n".join(lines) + "\n"


def bench_scenario(question_count: int = 3):
    """A questionnaire plus scripted French replies for repeatable timing
    runs; the reply audio comes from the offline synthesizer either way."""
    questions = tuple(
        Question(f"q{i + 1}", _BENCH_QUESTIONS[i % len(_BENCH_QUESTIONS)], i)
        for i in range(question_count)
    )
    questionnaire = Questionnaire(
        id="bench",
        title="Timing scenario",
        specialist_language="en",
        welcome_text="Hello, this is a timing run.",
        questions=questions,
    )
    voice = MockProviders()
    welcome_reply = voice.synthesize("bonjour", "fr")
    answers = [
        voice.synthesize(_BENCH_ANSWERS_FR[i % len(_BENCH_ANSWERS_FR)], "fr")
        for i in range(question_count)
    ]
    return questionnaire, welcome_reply, answers


def run_bench(questionnaire, welcome_reply, answers, repetitions: int,
              providers, policy: SessionPolicy, store_root) -> BenchReport:
    """Run the session ``repetitions`` times and collect stage samples."""
    store = RecordStore(Path(store_root))
    n = len(questionnaire.questions)
    samples: dict[tuple[int, str], list[float]] = defaultdict(list)
    for _ in range(repetitions):
        timer = StageTimer()
        audio = ScriptedSessionAudio([welcome_reply] + list(answers))
        run_session(questionnaire, providers, audio, policy, "bench", store, timer=timer)
        store_share = timer.cells.get((None, "store"), 0.0) / n
        for position in range(n):
            for stage in STAGES:
                if stage == "store":
                    samples[(position, stage)].append(store_share)
                else:
                    samples[(position, stage)].append(timer.cells.get((position, stage), 0.0))
    return BenchReport(n, repetitions, dict(samples))
