"""Full session walkthrough: welcome, detection, ask loop, persistence.

Runs a three-question check-in against scripted French replies (the second
question is met with silence once, so the engine repeats it), then shows
the stored record, the per-question emotion series, and the on-disk layout.

Run:  python3 demos/04_full_session.py
"""

import tempfile
from pathlib import Path

from voicecare.capture import RecordPolicy
from voicecare.providers.mock import MockProviders
from voicecare.questionnaire import Question, Questionnaire
from voicecare.session import ScriptedSessionAudio, SessionPolicy, run_session
from voicecare.store import RecordStore

questionnaire = Questionnaire(
    id="morning-checkin",
    title="Morning check-in",
    specialist_language="en",
    welcome_text="Good morning, let us talk for a minute.",
    questions=(
        Question("q1", "How are you feeling today?", 0),
        Question("q2", "Did you sleep well?", 1),
        Question("q3", "Who visited you this morning?", 2),
    ),
)

voice = MockProviders()  # stands in for the user's mouth as well
replies = [
    voice.synthesize("bonjour", "fr"),                      # welcome reply
    voice.synthesize("je suis si heureux de vivre ici", "fr"),
    None,                                                   # silence: q2 is repeated
    voice.synthesize("j'ai bien dormi", "fr"),
    voice.synthesize("je me sens seul aujourd'hui", "fr"),
]

policy = SessionPolicy(max_repeats=2, record=RecordPolicy(chunk_seconds=1.0))
root = Path(tempfile.mkdtemp(prefix="voicecare-demo-"))
store = RecordStore(root)

record = run_session(questionnaire, MockProviders(), ScriptedSessionAudio(replies),
                     policy, "demo-device", store)

print(f"session {record.id} [{record.status}], language {record.detected_language}")
for answer in record.answers:
    if answer.no_response:
        print(f"  {answer.question_id}: no response after {answer.repeats_used} repeats")
    else:
        print(f"  {answer.question_id}: {answer.transcript_specialist!r} "
              f"(repeats {answer.repeats_used}, joy {answer.emotion.joy:.2f})")
print(f"mean emotion: {record.mean_emotion.as_dict()}")
print(f"final label:  {record.final_label}")

print("\nper-question emotion series:")
for position, scores in store.emotion_series(record.id):
    print(f"  q{position + 1}: {'-' if scores is None else round(scores.joy, 2)}")

print(f"\nstore layout under {root}:")
for path in sorted(root.rglob("*")):
    if path.is_file():
        print(f"  {path.relative_to(root)}  ({path.stat().st_size} bytes)")
