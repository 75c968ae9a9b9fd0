/** Payload shapes of the gateway REST API (see ../docs/rest_api.md). */

export const EMOTION_LABELS = ["joy", "anger", "sadness", "fear", "disgust"] as const;
export type EmotionLabel = (typeof EMOTION_LABELS)[number];

export interface EmotionScores {
  joy: number;
  anger: number;
  sadness: number;
  fear: number;
  disgust: number;
  sentiment: number;
}

export interface QuestionManifest {
  id: string;
  text: string;
  position: number;
}

export interface QuestionnaireManifest {
  schema_version?: number;
  id?: string;
  title: string;
  specialist_language: string;
  welcome_text: string;
  questions: QuestionManifest[];
}

export interface Transcript {
  text: string;
  language: string;
  confidence: number;
}

export interface SessionSummary {
  id: string;
  questionnaire_id: string;
  detected_language: string;
  final_label: string | null;
  started_at: string;
  status: string;
}

export interface QuestionResult {
  position: number;
  question_id: string;
  question_text: string | null;
  no_response: boolean;
  repeats_used: number;
  transcript_user: Transcript | null;
  transcript_specialist: string | null;
  transcript_emotion_lang: string | null;
  emotion: EmotionScores | null;
  audio_url: string | null;
}

export interface SessionResults {
  session_id: string;
  questionnaire_id: string;
  status: string;
  started_at: string;
  detected_language: string;
  language_fallback: boolean;
  mean_emotion: EmotionScores | null;
  final_label: string | null;
  advice: string | null;
  questions: QuestionResult[];
}
