/** Questionnaire editor state and the document-import flow.
 *
 * The save gate mirrors the gateway's manifest validation so a specialist
 * sees problems inline instead of a rejected request; the gateway remains
 * the authority and re-validates everything.
 */

import type { GatewayClient } from "./api.js";
import { ApiError } from "./api.js";
import type { QuestionManifest, QuestionnaireManifest } from "./types.js";

export interface QuestionRow {
  id: string;
  text: string;
}

export interface EditorState {
  title: string;
  specialistLanguage: string;
  welcomeText: string;
  rows: QuestionRow[];
  importText: string;
  importError: string | null;
}

export function newEditorState(): EditorState {
  return {
    title: "",
    specialistLanguage: "en",
    welcomeText: "Welcome. Please answer after each question.",
    rows: [],
    importText: "",
    importError: null,
  };
}

export function rowProblem(row: QuestionRow): string | null {
  const text = row.text.trim();
  if (!text) return "question text is empty";
  if (!text.endsWith("?")) return "question must end with '?'";
  return null;
}

export function editorProblems(state: EditorState): string[] {
  const problems: string[] = [];
  if (!state.welcomeText.trim()) problems.push("welcome text is empty");
  if (!/^[a-z]{2}(-[a-zA-Z0-9]+)*$/.test(state.specialistLanguage)) {
    problems.push("specialist language must be a tag like 'en' or 'fr'");
  }
  if (state.rows.length === 0) problems.push("add at least one question");
  state.rows.forEach((row, i) => {
    const problem = rowProblem(row);
    if (problem) problems.push(`question ${i + 1}: ${problem}`);
  });
  return problems;
}

/** The editor refuses to save while any row lacks its terminal mark. */
export function canSave(state: EditorState): boolean {
  return editorProblems(state).length === 0;
}

export function toManifest(state: EditorState): QuestionnaireManifest {
  return {
    title: state.title || "Untitled questionnaire",
    specialist_language: state.specialistLanguage,
    welcome_text: state.welcomeText,
    questions: state.rows.map((row, position) => ({
      id: row.id || `q${position + 1}`,
      text: row.text.trim(),
      position,
    })),
  };
}

export function rowsFromManifest(questions: QuestionManifest[]): QuestionRow[] {
  return [...questions]
    .sort((a, b) => a.position - b.position)
    .map((q) => ({ id: q.id, text: q.text }));
}

/** Line endings never matter: normalize before the text leaves the page. */
export function normalizeDocument(text: string): string {
  return text.replace(/\r\n/g, "\n").replace(/\r/g, "\n");
}

/** Ask the gateway to extract questions from pasted text, then populate
 * editor rows for confirmation. Zero extracted questions becomes an inline
 * error rather than an exception. */
export async function importDocumentFlow(
  client: GatewayClient,
  state: EditorState,
  rawText: string,
): Promise<EditorState> {
  const text = normalizeDocument(rawText);
  if (!text.trim()) {
    return { ...state, importError: "paste or drop a document first" };
  }
  try {
    const preview = await client.importPreview(text, state.specialistLanguage);
    return {
      ...state,
      rows: rowsFromManifest(preview.questionnaire.questions),
      importText: text,
      importError: null,
    };
  } catch (error) {
    if (error instanceof ApiError && error.code === "no_questions") {
      return { ...state, importError: "no question sentences found in the document" };
    }
    throw error;
  }
}
