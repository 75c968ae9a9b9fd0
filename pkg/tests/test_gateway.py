"""REST endpoints, bench timing shape, and the command line."""

import io
import json
import socket

import pytest
from fastapi.testclient import TestClient

from voicecare.audio import DRIVER_FORMAT, parse_wav, silence_clip, write_wav
from voicecare.gateway import GatewayConfig
from voicecare.gateway.app import create_app
from voicecare.gateway.bench import STAGES, bench_scenario, run_bench
from voicecare.gateway.cli import main as cli_main
from voicecare.providers.mock import MockProviders
from voicecare.session import SessionPolicy

MANIFEST = {
    "title": "Wellbeing check",
    "specialist_language": "en",
    "welcome_text": "Hello, welcome to your check-in.",
    "questions": [
        {"id": "q1", "text": "How are you feeling today?", "position": 0},
        {"id": "q2", "text": "Did you sleep well?", "position": 1},
        {"id": "q3", "text": "Who visited you this morning?", "position": 2},
    ],
}


@pytest.fixture()
def client(tmp_path):
    config = GatewayConfig(data_root=tmp_path / "data", chunk_seconds=1.0)
    app = create_app(config)
    with TestClient(app) as client:
        yield client


def wav_upload(name, clip):
    return ("answer", (name, io.BytesIO(write_wav(clip)), "audio/wav"))


def make_session(client, mock, with_retry_silence=False):
    created = client.post("/questionnaires", json=MANIFEST)
    assert created.status_code == 201
    qid = created.json()["id"]
    answers = [
        mock.synthesize("je suis si heureux de vivre ici", "fr"),
        mock.synthesize("j'ai bien dormi", "fr"),
        mock.synthesize("je me sens seul aujourd'hui", "fr"),
    ]
    files = [("welcome", ("welcome.wav", io.BytesIO(write_wav(mock.synthesize("bonjour", "fr"))),
                          "audio/wav"))]
    if with_retry_silence:
        answers.insert(1, silence_clip(DRIVER_FORMAT, seconds=1.0))
    for i, clip in enumerate(answers):
        files.append(wav_upload(f"answer-{i}.wav", clip))
    response = client.post("/sessions", data={"questionnaire_id": qid}, files=files)
    assert response.status_code == 200, response.text
    return qid, response.json()


class TestQuestionnaireEndpoints:
    def test_create_from_manifest(self, client):
        response = client.post("/questionnaires", json=MANIFEST)
        assert response.status_code == 201
        body = response.json()
        assert body["questionnaire"]["questions"][0]["text"] == "How are you feeling today?"
        fetched = client.get(f"/questionnaires/{body['id']}")
        assert fetched.status_code == 200
        assert fetched.json()["title"] == "Wellbeing check"

    def test_invalid_manifest_is_400_with_problems(self, client):
        bad = dict(MANIFEST, questions=[{"id": "q1", "text": "no mark", "position": 0}])
        response = client.post("/questionnaires", json=bad)
        assert response.status_code == 400
        assert response.json()["error"] == "invalid_manifest"
        assert any("q1" in p for p in response.json()["problems"])

    def test_import_document(self, client):
        response = client.post(
            "/questionnaires/import",
            json={"text": "A? B. C?", "title": "Imported", "specialist_language": "en"},
        )
        assert response.status_code == 201
        questions = response.json()["questionnaire"]["questions"]
        assert [q["text"] for q in questions] == ["A?", "C?"]

    def test_import_without_questions_is_400(self, client):
        response = client.post("/questionnaires/import", json={"text": "No marks here."})
        assert response.status_code == 400
        assert response.json()["error"] == "no_questions"

    def test_import_preview_does_not_persist(self, client):
        response = client.post("/questionnaires/import",
                               json={"text": "Keep this one?", "preview": True})
        assert response.status_code == 200
        assert response.json()["preview"] is True
        assert client.get("/questionnaires").json()["questionnaires"] == []

    def test_unknown_questionnaire_404(self, client):
        assert client.get("/questionnaires/ghost").status_code == 404


class TestSessionEndpoints:
    def test_submit_full_session(self, client):
        mock = MockProviders()
        qid, record = make_session(client, mock)
        assert record["status"] == "completed"
        assert record["detected_language"] == "fr"
        assert len(record["answers"]) == 3
        assert [a["repeats_used"] for a in record["answers"]] == [0, 0, 0]
        assert record["mean_emotion"] is not None
        # durably stored before the response was returned
        stored = client.get(f"/sessions/{record['id']}")
        assert stored.status_code == 200
        assert stored.json() == record

    def test_silent_then_retry_upload_pair(self, client):
        mock = MockProviders()
        _, record = make_session(client, mock, with_retry_silence=True)
        assert [a["repeats_used"] for a in record["answers"]] == [0, 1, 0]
        assert all(not a["no_response"] for a in record["answers"])

    def test_missing_upload_is_no_response(self, client):
        mock = MockProviders()
        created = client.post("/questionnaires", json=MANIFEST)
        qid = created.json()["id"]
        files = [
            ("welcome", ("welcome.wav", io.BytesIO(write_wav(mock.synthesize("bonjour", "fr"))),
                         "audio/wav")),
            wav_upload("answer-0.wav", mock.synthesize("je suis heureux", "fr")),
            wav_upload("answer-1.wav", mock.synthesize("j'ai bien dormi", "fr")),
        ]
        response = client.post("/sessions", data={"questionnaire_id": qid}, files=files)
        record = response.json()
        assert record["answers"][2]["no_response"] is True
        assert record["answers"][2]["repeats_used"] == 2

    def test_unknown_questionnaire_404(self, client):
        response = client.post("/sessions", data={"questionnaire_id": "ghost"})
        assert response.status_code == 404

    def test_malformed_wav_400(self, client):
        created = client.post("/questionnaires", json=MANIFEST)
        qid = created.json()["id"]
        files = [("welcome", ("welcome.wav", io.BytesIO(b"not a wav"), "audio/wav"))]
        response = client.post("/sessions", data={"questionnaire_id": qid}, files=files)
        assert response.status_code == 400
        assert response.json()["error"] == "malformed_wav"

    def test_list_sessions_and_filters(self, client):
        mock = MockProviders()
        qid, record = make_session(client, mock)
        listed = client.get("/sessions").json()["sessions"]
        assert [s["id"] for s in listed] == [record["id"]]
        assert client.get("/sessions", params={"questionnaire_id": "other"}).json() == {
            "sessions": []
        }

    def test_results_document(self, client):
        mock = MockProviders()
        qid, record = make_session(client, mock)
        results = client.get(f"/sessions/{record['id']}/results")
        assert results.status_code == 200
        doc = results.json()
        assert doc["mean_emotion"] == record["mean_emotion"]
        assert doc["final_label"] == record["final_label"]
        assert [q["position"] for q in doc["questions"]] == [0, 1, 2]
        assert doc["questions"][0]["question_text"] == "How are you feeling today?"
        assert doc["questions"][0]["emotion"] is not None
        assert doc["questions"][0]["audio_url"].endswith("answer-0.wav")

    def test_audio_attachment_roundtrip(self, client):
        mock = MockProviders()
        _, record = make_session(client, mock)
        url = f"/sessions/{record['id']}/audio/answer-0.wav"
        response = client.get(url)
        assert response.status_code == 200
        clip = parse_wav(response.content)
        assert clip.metadata["text"] == "je suis si heureux de vivre ici"

    def test_attach_advice(self, client):
        mock = MockProviders()
        _, record = make_session(client, mock)
        response = client.post(f"/sessions/{record['id']}/advice",
                               json={"advice": "increase visits"})
        assert response.status_code == 200
        assert response.json()["advice"] == "increase visits"
        assert client.get(f"/sessions/{record['id']}").json()["advice"] == "increase visits"

    def test_advice_validation(self, client):
        mock = MockProviders()
        _, record = make_session(client, mock)
        assert client.post(f"/sessions/{record['id']}/advice", json={}).status_code == 400

    def test_mock_mode_makes_no_outbound_connections(self, client, monkeypatch):
        refused = []

        def guard(self, *args, **kwargs):
            refused.append(args)
            raise AssertionError("outbound network connection attempted")

        monkeypatch.setattr(socket.socket, "connect", guard)
        mock = MockProviders()
        _, record = make_session(client, mock)
        assert record["status"] == "completed"
        assert refused == []


class TestBench:
    def test_three_questions_seven_stages_all_positive(self, tmp_path):
        questionnaire, welcome, answers = bench_scenario(3)
        policy = SessionPolicy()
        report = run_bench(questionnaire, welcome, answers, 1, MockProviders(), policy,
                           tmp_path)
        assert report.question_count == 3
        assert set(stage for _, stage in report.samples) == set(STAGES)
        for position in range(3):
            for stage in STAGES:
                assert report.mean(position, stage) > 0, (position, stage)

    def test_repetitions_give_stats(self, tmp_path):
        questionnaire, welcome, answers = bench_scenario(2)
        report = run_bench(questionnaire, welcome, answers, 5, MockProviders(),
                           SessionPolicy(), tmp_path)
        assert all(len(v) == 5 for v in report.samples.values())
        table = report.text_table()
        assert "±" in table
        csv_text = report.csv_text()
        assert csv_text.splitlines()[0] == "question,stage,mean_seconds,stddev_seconds,samples"
        assert len(csv_text.splitlines()) == 1 + 2 * len(STAGES)

    def test_table_shape(self, tmp_path):
        questionnaire, welcome, answers = bench_scenario(3)
        report = run_bench(questionnaire, welcome, answers, 1, MockProviders(),
                           SessionPolicy(), tmp_path)
        lines = report.text_table().splitlines()
        assert len(lines) == 4  # header + 3 questions
        assert lines[0].split()[:1] == ["question"]


class TestCli:
    def test_import_run_inspect_flow(self, tmp_path, capsys):
        doc = tmp_path / "doc.txt"
        doc.write_text("How are you feeling today? Note. Did you sleep well?", encoding="utf-8")
        data_root = str(tmp_path / "data")
        assert cli_main(["import-doc", str(doc), "--data-root", data_root,
                         "--title", "Imported"]) == 0
        qid = capsys.readouterr().out.strip()

        mock = MockProviders()
        welcome = tmp_path / "welcome.wav"
        welcome.write_bytes(write_wav(mock.synthesize("bonjour", "fr")))
        a1 = tmp_path / "a1.wav"
        a1.write_bytes(write_wav(mock.synthesize("je suis heureux", "fr")))
        a2 = tmp_path / "a2.wav"
        a2.write_bytes(write_wav(mock.synthesize("j'ai bien dormi", "fr")))
        assert cli_main(["run", qid, "--data-root", data_root, "--welcome", str(welcome),
                         "--answers", str(a1), str(a2)]) == 0
        record = json.loads(capsys.readouterr().out)
        assert record["detected_language"] == "fr"
        assert len(record["answers"]) == 2

        assert cli_main(["inspect", "--data-root", data_root]) == 0
        out = capsys.readouterr().out
        assert qid in out
        assert record["id"] in out

    def test_bench_command(self, tmp_path, capsys):
        csv_path = tmp_path / "bench.csv"
        assert cli_main(["bench", "--questions", "2", "--repetitions", "2",
                         "--data-root", str(tmp_path / "data"), "--csv", str(csv_path)]) == 0
        out = capsys.readouterr().out
        assert "question" in out and "store" in out
        assert csv_path.exists()

    def test_import_preview(self, tmp_path, capsys):
        doc = tmp_path / "doc.txt"
        doc.write_text("Only one question here?", encoding="utf-8")
        assert cli_main(["import-doc", str(doc), "--preview"]) == 0
        manifest = json.loads(capsys.readouterr().out)
        assert manifest["questions"][0]["text"] == "Only one question here?"
