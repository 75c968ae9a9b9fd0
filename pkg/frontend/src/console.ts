/** DOM wiring for the specialist console page.
 *
 * Three panes: questionnaire list + editor, session browser, session
 * detail (transcripts with playback, the raw emotion table, both charts,
 * advice). All data arrives through GatewayClient; the page recomputes
 * nothing.
 */

import { GatewayClient } from "./api.js";
import { renderMeanPie, renderQuestionSeries } from "./charts.js";
import {
  EditorState,
  canSave,
  editorProblems,
  importDocumentFlow,
  newEditorState,
  toManifest,
} from "./editor.js";
import { EMOTION_LABELS, type SessionResults } from "./types.js";

const SESSION_POLL_MS = 5000;

// same-origin by default; ?gateway=http://host:8080 points elsewhere
const gatewayBase =
  typeof location !== "undefined"
    ? new URLSearchParams(location.search).get("gateway") ?? ""
    : "";
const client = new GatewayClient(gatewayBase);
let editor: EditorState = newEditorState();
let selectedQuestionnaire: string | undefined;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function escapeHtml(text: string): string {
  const div = document.createElement("div");
  div.textContent = text;
  return div.innerHTML;
}

// -- questionnaires ---------------------------------------------------------

async function refreshQuestionnaires(): Promise<void> {
  const { questionnaires } = await client.listQuestionnaires();
  el("questionnaire-list").innerHTML = questionnaires
    .map(
      (q) =>
        `<li><a href="#" data-qid="${escapeHtml(q.id ?? "")}">${escapeHtml(q.title)}</a>` +
        ` <span class="muted">${q.questions.length} questions, ${escapeHtml(q.specialist_language)}</span></li>`,
    )
    .join("");
  for (const link of el("questionnaire-list").querySelectorAll("a")) {
    link.addEventListener("click", (event) => {
      event.preventDefault();
      selectedQuestionnaire = (link as HTMLAnchorElement).dataset.qid;
      void refreshSessions();
    });
  }
}

function renderEditor(): void {
  el("editor-rows").innerHTML = editor.rows
    .map(
      (row, i) =>
        `<div class="row"><input data-row="${i}" value="${escapeHtml(row.text)}"/>` +
        `<button data-remove="${i}">×</button></div>`,
    )
    .join("");
  for (const input of el("editor-rows").querySelectorAll("input")) {
    input.addEventListener("input", () => {
      const index = Number((input as HTMLInputElement).dataset.row);
      editor.rows[index]!.text = (input as HTMLInputElement).value;
      renderProblems();
    });
  }
  for (const button of el("editor-rows").querySelectorAll("button")) {
    button.addEventListener("click", () => {
      editor.rows.splice(Number((button as HTMLButtonElement).dataset.remove), 1);
      renderEditor();
    });
  }
  renderProblems();
}

function renderProblems(): void {
  const problems = editorProblems(editor);
  el("editor-problems").innerHTML = problems.map((p) => `<li>${escapeHtml(p)}</li>`).join("");
  (el("editor-save") as HTMLButtonElement).disabled = !canSave(editor);
  el("import-error").textContent = editor.importError ?? "";
}

function wireEditor(): void {
  el("editor-title").addEventListener("input", (e) => {
    editor.title = (e.target as HTMLInputElement).value;
  });
  el("editor-language").addEventListener("input", (e) => {
    editor.specialistLanguage = (e.target as HTMLInputElement).value;
    renderProblems();
  });
  el("editor-welcome").addEventListener("input", (e) => {
    editor.welcomeText = (e.target as HTMLInputElement).value;
    renderProblems();
  });
  el("editor-add").addEventListener("click", () => {
    editor.rows.push({ id: `q${editor.rows.length + 1}`, text: "" });
    renderEditor();
  });
  el("editor-import").addEventListener("click", () => {
    void (async () => {
      const text = (el("import-box") as HTMLTextAreaElement).value;
      editor = await importDocumentFlow(client, editor, text);
      renderEditor();
    })();
  });
  el("editor-save").addEventListener("click", () => {
    void (async () => {
      await client.createQuestionnaire(toManifest(editor));
      editor = newEditorState();
      (el("editor-title") as HTMLInputElement).value = "";
      (el("import-box") as HTMLTextAreaElement).value = "";
      renderEditor();
      await refreshQuestionnaires();
    })();
  });
}

// -- sessions ---------------------------------------------------------------

async function refreshSessions(): Promise<void> {
  const { sessions } = await client.listSessions(selectedQuestionnaire);
  el("session-filter").textContent = selectedQuestionnaire
    ? `filtered by ${selectedQuestionnaire}`
    : "all questionnaires";
  el("session-list").innerHTML = sessions
    .map(
      (s) =>
        `<li><a href="#" data-sid="${escapeHtml(s.id)}">${escapeHtml(s.started_at)}</a> ` +
        `<span class="muted">${escapeHtml(s.detected_language)} · ` +
        `${escapeHtml(s.final_label ?? "-")} · ${escapeHtml(s.status)}</span></li>`,
    )
    .join("");
  for (const link of el("session-list").querySelectorAll("a")) {
    link.addEventListener("click", (event) => {
      event.preventDefault();
      void showSession((link as HTMLAnchorElement).dataset.sid!);
    });
  }
}

function emotionTable(results: SessionResults): string {
  const header = EMOTION_LABELS.map((l) => `<th>${l}</th>`).join("");
  const rows = results.questions
    .map((q) => {
      const cells = q.emotion
        ? EMOTION_LABELS.map((l) => `<td>${q.emotion![l].toFixed(2)}</td>`).join("")
        : `<td colspan="5" class="muted">no response</td>`;
      return `<tr><td>q${q.position + 1}</td>${cells}</tr>`;
    })
    .join("");
  const meanCells = results.mean_emotion
    ? EMOTION_LABELS.map((l) => `<td>${results.mean_emotion![l].toFixed(3)}</td>`).join("")
    : `<td colspan="5" class="muted">-</td>`;
  return (
    `<table><tr><th></th>${header}</tr>${rows}` +
    `<tr class="mean"><td>mean</td>${meanCells}</tr></table>`
  );
}

async function showSession(sessionId: string): Promise<void> {
  const results = await client.getResults(sessionId);
  el("detail-heading").textContent =
    `${results.session_id} · ${results.detected_language} · ${results.final_label ?? "no label"}`;
  el("mean-pie").innerHTML = renderMeanPie(results.mean_emotion).svg;
  el("question-series").innerHTML = renderQuestionSeries(results.questions).svg;
  el("emotion-table").innerHTML = emotionTable(results);
  el("transcripts").innerHTML = results.questions
    .map((q) => {
      const audio = q.audio_url
        ? `<audio controls src="${client.audioUrl(q.audio_url)}"></audio>`
        : "";
      const body = q.no_response
        ? `<em>no response (after ${q.repeats_used} repeats)</em>`
        : `<div>user: ${escapeHtml(q.transcript_user?.text ?? "")}</div>` +
          `<div>specialist: ${escapeHtml(q.transcript_specialist ?? "")}</div>`;
      return (
        `<section class="answer"><h4>q${q.position + 1}: ${escapeHtml(q.question_text ?? "")}</h4>` +
        `${body}${audio}</section>`
      );
    })
    .join("");
  const adviceBox = el("advice-box") as HTMLTextAreaElement;
  adviceBox.value = results.advice ?? "";
  (el("advice-save") as HTMLButtonElement).onclick = () => {
    void (async () => {
      await client.attachAdvice(sessionId, adviceBox.value);
      el("advice-status").textContent = "saved";
    })();
  };
  el("detail").classList.remove("hidden");
}

// -- boot ---------------------------------------------------------------------

export function boot(): void {
  wireEditor();
  renderEditor();
  void refreshQuestionnaires();
  void refreshSessions();
  window.setInterval(() => void refreshSessions(), SESSION_POLL_MS);
}

if (typeof document !== "undefined" && document.getElementById("console-root")) {
  boot();
}
