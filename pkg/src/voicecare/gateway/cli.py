"""Command line entry points: serve, run, import-doc, bench, inspect."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from voicecare.audio import DRIVER_FORMAT, convert, parse_wav
from voicecare.gateway import GatewayConfig
from voicecare.gateway.bench import bench_scenario, run_bench
from voicecare.providers import build_providers
from voicecare.questionnaire import (
    extract_questions,
    load_questionnaire,
    questionnaire_from_dict,
)
from voicecare.session import ScriptedSessionAudio, SessionAborted, run_session
from voicecare.store import RecordStore, record_to_dict


def _add_common(parser):
    parser.add_argument("--data-root", default=None,
                        help="store directory (default voicecare-data, env VOICECARE_DATA_ROOT)")
    parser.add_argument("--provider-mode", choices=("mock", "remote"), default=None,
                        help="speech providers to use (env VOICECARE_PROVIDER_MODE)")
    parser.add_argument("--remote-url", default=None,
                        help="base URL for remote providers (env VOICECARE_REMOTE_URL)")


def _config(args) -> GatewayConfig:
    return GatewayConfig.from_env(
        data_root=args.data_root,
        provider_mode=args.provider_mode,
        remote_base_url=args.remote_url,
    )


def _load_clip(path: str):
    return convert(parse_wav(Path(path).read_bytes()), DRIVER_FORMAT)


def cmd_serve(args) -> int:
    import uvicorn

    from voicecare.gateway.app import create_app

    config = _config(args)
    if args.host:
        config.host = args.host
    if args.port:
        config.port = args.port
    uvicorn.run(create_app(config), host=config.host, port=config.port)
    return 0


def cmd_run(args) -> int:
    config = _config(args)
    config.ensure_data_root()
    store = RecordStore(config.data_root)
    manifest = Path(args.questionnaire)
    if manifest.exists():
        questionnaire = load_questionnaire(manifest)
        try:
            store.save_questionnaire(questionnaire)
        except Exception:
            pass  # already stored is fine for replays
    else:
        questionnaire = store.load_questionnaire(args.questionnaire)

    replies = [_load_clip(args.welcome) if args.welcome else None]
    replies += [_load_clip(p) for p in args.answers or []]
    providers = build_providers(config.provider_config())
    audio = ScriptedSessionAudio(replies)
    try:
        record = run_session(questionnaire, providers, audio, config.session_policy(),
                             args.device_id, store)
    except SessionAborted as exc:
        print(json.dumps(record_to_dict(exc.record), ensure_ascii=False, indent=2))
        print(f"session aborted: {exc.cause}", file=sys.stderr)
        return 1
    print(json.dumps(record_to_dict(record), ensure_ascii=False, indent=2))
    return 0


def cmd_import_doc(args) -> int:
    text = Path(args.document).read_text(encoding="utf-8")
    questions = extract_questions(text)
    if not questions:
        print("no question sentences found in the document", file=sys.stderr)
        return 1
    manifest = {
        "title": args.title,
        "specialist_language": args.language,
        "welcome_text": args.welcome_text,
        "questions": [{"id": q.id, "text": q.text, "position": q.position} for q in questions],
    }
    if args.preview:
        print(json.dumps(manifest, ensure_ascii=False, indent=2))
        return 0
    questionnaire = questionnaire_from_dict(manifest, generate_id=True)
    config = _config(args)
    config.ensure_data_root()
    RecordStore(config.data_root).save_questionnaire(questionnaire)
    print(questionnaire.id)
    return 0


def cmd_bench(args) -> int:
    config = _config(args)
    config.ensure_data_root()
    questionnaire, welcome_reply, answers = bench_scenario(args.questions)
    providers = build_providers(config.provider_config())
    policy = config.session_policy()
    report = run_bench(questionnaire, welcome_reply, answers, args.repetitions,
                       providers, policy, config.data_root / "bench")
    print(report.text_table())
    if args.csv:
        Path(args.csv).write_text(report.csv_text(), encoding="utf-8")
        print(f"csv written to {args.csv}", file=sys.stderr)
    return 0


def cmd_inspect(args) -> int:
    config = _config(args)
    config.ensure_data_root()
    store = RecordStore(config.data_root)
    if args.session:
        record = store.load_session(args.session)
        print(json.dumps(record_to_dict(record), ensure_ascii=False, indent=2))
        return 0
    if args.questionnaire:
        from voicecare.questionnaire import questionnaire_to_dict

        print(json.dumps(questionnaire_to_dict(store.load_questionnaire(args.questionnaire)),
                         ensure_ascii=False, indent=2))
        return 0
    print("questionnaires:")
    for q in store.list_questionnaires():
        print(f"  {q.id}  {q.title!r}  {len(q.questions)} questions  [{q.specialist_language}]")
    print("sessions (newest first):")
    for s in store.list_sessions():
        print(f"  {s.id}  {s.started_at}  q={s.questionnaire_id}  lang={s.detected_language}  "
              f"label={s.final_label}  {s.status}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="voicecare",
        description="Voice questionnaire engine: serve the REST gateway or drive "
                    "sessions, imports, and benchmarks from files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="start the REST gateway")
    _add_common(p)
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("run", help="run one session from WAV files")
    _add_common(p)
    p.add_argument("questionnaire", help="manifest path or stored questionnaire id")
    p.add_argument("--welcome", help="WAV reply to the welcome prompt")
    p.add_argument("--answers", nargs="*", default=[],
                   help="WAV files consumed one per recording attempt, in order")
    p.add_argument("--device-id", default="cli")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("import-doc", help="extract questions from a text document")
    _add_common(p)
    p.add_argument("document")
    p.add_argument("--title", default="Imported questionnaire")
    p.add_argument("--language", default="en")
    p.add_argument("--welcome-text", default="Welcome. Please answer after each question.")
    p.add_argument("--preview", action="store_true",
                   help="print the manifest instead of saving it")
    p.set_defaults(func=cmd_import_doc)

    p = sub.add_parser("bench", help="time the pipeline stages per question")
    _add_common(p)
    p.add_argument("--questions", type=int, default=3)
    p.add_argument("--repetitions", type=int, default=1)
    p.add_argument("--csv", help="also write the samples as CSV")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("inspect", help="list or dump stored records")
    _add_common(p)
    p.add_argument("--session", help="session id to dump")
    p.add_argument("--questionnaire", help="questionnaire id to dump")
    p.set_defaults(func=cmd_inspect)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
