"""HTTP surface of the engine.

Endpoints (bodies JSON unless noted; see docs/rest_api.md for schemas):

    POST /questionnaires               create from a manifest
    POST /questionnaires/import        create from a plain-text document
    GET  /questionnaires               list manifests
    GET  /questionnaires/{id}          one manifest
    POST /sessions                     run a session from uploaded WAVs (multipart)
    GET  /sessions                     summaries, filterable
    GET  /sessions/{id}                full session record
    GET  /sessions/{id}/results        chart-ready results document
    POST /sessions/{id}/advice         attach specialist advice
    GET  /sessions/{id}/audio/{ref}    stored WAV bytes
"""

from __future__ import annotations

from dataclasses import asdict

from fastapi import FastAPI, File, Form, Request, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from voicecare.audio import DRIVER_FORMAT, MalformedFile, UnsupportedFormat, convert, parse_wav
from voicecare.gateway import GatewayConfig
from voicecare.providers import build_providers
from voicecare.questionnaire import (
    InvalidManifest,
    extract_questions,
    questionnaire_from_dict,
    questionnaire_to_dict,
)
from voicecare.session import ScriptedSessionAudio, SessionAborted, run_session
from voicecare.store import AlreadyExists, NotFound, RecordStore, record_to_dict


def _error(status: int, code: str, detail=None, **extra) -> JSONResponse:
    body = {"error": code}
    if detail is not None:
        body["detail"] = detail
    body.update(extra)
    return JSONResponse(status_code=status, content=body)


def results_document(record, questionnaire) -> dict:
    """Everything the console charts need, joined with question text."""
    texts = {}
    if questionnaire is not None:
        texts = {q.position: q.text for q in questionnaire.questions}
    questions = []
    for position, answer in enumerate(record.answers):
        questions.append(
            {
                "position": position,
                "question_id": answer.question_id,
                "question_text": texts.get(position),
                "no_response": answer.no_response,
                "repeats_used": answer.repeats_used,
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
                "audio_url": (
                    f"/sessions/{record.id}/audio/{answer.audio_ref}"
                    if answer.audio_ref
                    else None
                ),
            }
        )
    return {
        "session_id": record.id,
        "questionnaire_id": record.questionnaire_id,
        "status": record.status,
        "started_at": record.started_at,
        "detected_language": record.detected_language,
        "language_fallback": record.language_fallback,
        "mean_emotion": record.mean_emotion.as_dict() if record.mean_emotion else None,
        "final_label": record.final_label,
        "advice": record.advice,
        "questions": questions,
    }


def create_app(config: GatewayConfig | None = None) -> FastAPI:
    config = config or GatewayConfig.from_env()
    config.ensure_data_root()
    store = RecordStore(config.data_root)
    providers = build_providers(config.provider_config())
    policy = config.session_policy()

    app = FastAPI(title="voicecare gateway", version="0.1.0")
    # the console may be served from another port on the same machine
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])
    app.state.config = config
    app.state.store = store
    app.state.providers = providers

    @app.exception_handler(NotFound)
    async def not_found(request: Request, exc: NotFound):
        return _error(404, "not_found", str(exc))

    @app.post("/questionnaires", status_code=201)
    async def create_questionnaire(manifest: dict):
        try:
            questionnaire = questionnaire_from_dict(manifest, generate_id=True)
            store.save_questionnaire(questionnaire)
        except InvalidManifest as exc:
            return _error(400, "invalid_manifest", problems=exc.problems)
        except AlreadyExists as exc:
            return _error(409, "already_exists", str(exc))
        return {"id": questionnaire.id, "questionnaire": questionnaire_to_dict(questionnaire)}

    @app.post("/questionnaires/import", status_code=201)
    async def import_document(body: dict):
        text = body.get("text", "")
        questions = extract_questions(text)
        if not questions:
            return _error(400, "no_questions", "document contains no question sentences")
        manifest = {
            "title": body.get("title", "Imported questionnaire"),
            "specialist_language": body.get("specialist_language", "en"),
            "welcome_text": body.get("welcome_text", "Welcome. Please answer after each question."),
            "questions": [
                {"id": q.id, "text": q.text, "position": q.position} for q in questions
            ],
        }
        if body.get("preview"):
            return JSONResponse(status_code=200, content={"preview": True, "questionnaire": manifest})
        try:
            questionnaire = questionnaire_from_dict(manifest, generate_id=True)
            store.save_questionnaire(questionnaire)
        except InvalidManifest as exc:
            return _error(400, "invalid_manifest", problems=exc.problems)
        return {"id": questionnaire.id, "questionnaire": questionnaire_to_dict(questionnaire)}

    @app.get("/questionnaires")
    async def list_questionnaires():
        return {"questionnaires": [questionnaire_to_dict(q) for q in store.list_questionnaires()]}

    @app.get("/questionnaires/{questionnaire_id}")
    async def get_questionnaire(questionnaire_id: str):
        return questionnaire_to_dict(store.load_questionnaire(questionnaire_id))

    @app.post("/sessions")
    async def submit_session(
        questionnaire_id: str = Form(...),
        device_id: str = Form("uploaded"),
        welcome: UploadFile | None = File(default=None),
        answer: list[UploadFile] = File(default=[]),
    ):
        questionnaire = store.load_questionnaire(questionnaire_id)

        async def read_clip(upload):
            raw = await upload.read()
            try:
                return convert(parse_wav(raw), DRIVER_FORMAT)
            except (MalformedFile, UnsupportedFormat, ValueError) as exc:
                raise MalformedFile(f"{upload.filename}: {exc}") from exc

        try:
            replies = []
            replies.append(await read_clip(welcome) if welcome is not None else None)
            for upload in answer:
                replies.append(await read_clip(upload))
        except MalformedFile as exc:
            return _error(400, "malformed_wav", str(exc))

        audio = ScriptedSessionAudio(replies)
        try:
            record = run_session(questionnaire, providers, audio, policy, device_id, store)
        except SessionAborted as exc:
            return _error(
                502, "provider_unavailable", str(exc.cause), session_id=exc.record.id
            )
        return record_to_dict(record)

    @app.get("/sessions")
    async def list_sessions(
        questionnaire_id: str | None = None,
        started_after: str | None = None,
        started_before: str | None = None,
    ):
        summaries = store.list_sessions(
            questionnaire_id=questionnaire_id,
            started_after=started_after,
            started_before=started_before,
        )
        return {"sessions": [asdict(s) for s in summaries]}

    @app.get("/sessions/{session_id}")
    async def get_session(session_id: str):
        return record_to_dict(store.load_session(session_id))

    @app.get("/sessions/{session_id}/results")
    async def get_results(session_id: str):
        record = store.load_session(session_id)
        try:
            questionnaire = store.load_questionnaire(record.questionnaire_id)
        except NotFound:
            questionnaire = None
        return results_document(record, questionnaire)

    @app.post("/sessions/{session_id}/advice")
    async def attach_advice(session_id: str, body: dict):
        advice = body.get("advice")
        if not isinstance(advice, str) or not advice.strip():
            return _error(400, "invalid_advice", "body must carry a non-empty 'advice' string")
        record = store.attach_advice(session_id, advice)
        return record_to_dict(record)

    @app.get("/sessions/{session_id}/audio/{ref}")
    async def get_audio(session_id: str, ref: str):
        path = store.audio_path(session_id, ref)
        return Response(content=path.read_bytes(), media_type="audio/wav")

    return app
