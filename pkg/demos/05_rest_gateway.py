"""REST gateway walkthrough, no server process needed.

Drives the HTTP surface in process with a test client: imports a plain-text
document into a questionnaire, submits a session from uploaded WAV answers,
reads the chart-ready results, and attaches specialist advice.

Run:  python3 demos/05_rest_gateway.py
"""

import io
import tempfile

from fastapi.testclient import TestClient

from voicecare.audio import write_wav
from voicecare.gateway import GatewayConfig
from voicecare.gateway.app import create_app
from voicecare.providers.mock import MockProviders

config = GatewayConfig(data_root=tempfile.mkdtemp(prefix="voicecare-demo-"),
                       chunk_seconds=1.0)
client = TestClient(create_app(config))

# Author by pasting a document; only the ?-sentences survive.
imported = client.post("/questionnaires/import", json={
    "text": "Intro note for staff. How are you feeling today? "
            "Remember to smile. Did you sleep well?",
    "title": "Imported check-in",
    "specialist_language": "en",
}).json()
qid = imported["id"]
print(f"imported questionnaire {qid}:")
for q in imported["questionnaire"]["questions"]:
    print(f"  {q['position']}: {q['text']}")

# Submit a session: one WAV per recording attempt, welcome reply first.
voice = MockProviders()
files = [("welcome", ("welcome.wav", io.BytesIO(write_wav(voice.synthesize("bonjour", "fr"))),
                      "audio/wav"))]
for i, text in enumerate(["je suis si heureux de vivre ici", "j'ai bien dormi"]):
    wav = io.BytesIO(write_wav(voice.synthesize(text, "fr")))
    files.append(("answer", (f"answer-{i}.wav", wav, "audio/wav")))
record = client.post("/sessions", data={"questionnaire_id": qid}, files=files).json()
print(f"\nsession {record['id']}: {record['status']}, "
      f"language {record['detected_language']}, label {record['final_label']}")

# The results document is what the browser console charts from.
results = client.get(f"/sessions/{record['id']}/results").json()
print(f"mean emotion: { {k: round(v, 3) for k, v in results['mean_emotion'].items()} }")
for q in results["questions"]:
    print(f"  q{q['position'] + 1} {q['question_text']!r} -> "
          f"{q['transcript_specialist']!r}, audio at {q['audio_url']}")

client.post(f"/sessions/{record['id']}/advice", json={"advice": "Schedule a social visit."})
updated = client.get(f"/sessions/{record['id']}").json()
print(f"\nadvice now reads: {updated['advice']!r}")
