/** Thin typed client over the documented gateway endpoints, nothing else. */

import type { QuestionnaireManifest, SessionResults, SessionSummary } from "./types.js";

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly problems: string[] = [],
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let code = "error";
  let detail = response.statusText;
  let problems: string[] = [];
  try {
    const body = await response.json();
    code = body.error ?? code;
    detail = body.detail ?? detail;
    problems = body.problems ?? [];
  } catch {
    // non-JSON error body, keep the status text
  }
  return new ApiError(response.status, code, detail, problems);
}

export class GatewayClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  listQuestionnaires(): Promise<{ questionnaires: QuestionnaireManifest[] }> {
    return this.request("/questionnaires");
  }

  getQuestionnaire(id: string): Promise<QuestionnaireManifest> {
    return this.request(`/questionnaires/${encodeURIComponent(id)}`);
  }

  createQuestionnaire(manifest: QuestionnaireManifest): Promise<{ id: string }> {
    return this.post("/questionnaires", manifest);
  }

  /** Preview import: extraction happens on the gateway, nothing persists. */
  importPreview(text: string, language: string): Promise<{ questionnaire: QuestionnaireManifest }> {
    return this.post("/questionnaires/import", {
      text,
      specialist_language: language,
      preview: true,
    });
  }

  listSessions(questionnaireId?: string): Promise<{ sessions: SessionSummary[] }> {
    const query = questionnaireId
      ? `?questionnaire_id=${encodeURIComponent(questionnaireId)}`
      : "";
    return this.request(`/sessions${query}`);
  }

  getResults(sessionId: string): Promise<SessionResults> {
    return this.request(`/sessions/${encodeURIComponent(sessionId)}/results`);
  }

  attachAdvice(sessionId: string, advice: string): Promise<unknown> {
    return this.post(`/sessions/${encodeURIComponent(sessionId)}/advice`, { advice });
  }

  /** Stored WAV bytes are served by the gateway; audio tags point here. */
  audioUrl(path: string): string {
    return `${this.baseUrl}${path}`;
  }
}
