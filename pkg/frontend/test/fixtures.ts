/** Recorded gateway responses for a three-answer reference session, taken
 * verbatim from a live gateway run; the tests render from these with no
 * server anywhere. */

import type { QuestionnaireManifest, SessionResults, SessionSummary } from "../src/types.js";

export const RESULTS_FIXTURE: SessionResults = {
  session_id: "0b2792c9ac0c42c2",
  questionnaire_id: "reference-check",
  status: "completed",
  started_at: "2026-08-08T15:04:42+00:00",
  detected_language: "en",
  language_fallback: false,
  mean_emotion: {
    joy: 0.32666666666666666,
    anger: 0.30333333333333334,
    sadness: 0.26666666666666666,
    fear: 0.03333333333333333,
    disgust: 0.03,
    sentiment: -0.19999999999999998,
  },
  final_label: "JOY",
  advice: null,
  questions: [
    {
      position: 0,
      question_id: "q1",
      question_text: "How do you feel about living here?",
      no_response: false,
      repeats_used: 0,
      transcript_user: {
        text: "I'm so happy to live here",
        language: "en",
        confidence: 1.0,
      },
      transcript_specialist: "I'm so happy to live here",
      transcript_emotion_lang: "I'm so happy to live here",
      emotion: { joy: 0.87, anger: 0.01, sadness: 0.04, fear: 0.01, disgust: 0.01, sentiment: 0.9 },
      audio_url: "/sessions/0b2792c9ac0c42c2/audio/answer-0.wav",
    },
    {
      position: 1,
      question_id: "q2",
      question_text: "How do you feel about the world?",
      no_response: false,
      repeats_used: 0,
      transcript_user: {
        text: "I hate this world",
        language: "en",
        confidence: 1.0,
      },
      transcript_specialist: "I hate this world",
      transcript_emotion_lang: "I hate this world",
      emotion: { joy: 0.09, anger: 0.05, sadness: 0.72, fear: 0.07, disgust: 0.06, sentiment: -0.8 },
      audio_url: "/sessions/0b2792c9ac0c42c2/audio/answer-1.wav",
    },
    {
      position: 2,
      question_id: "q3",
      question_text: "Is there anything you cannot accept?",
      no_response: false,
      repeats_used: 0,
      transcript_user: {
        text: "I can't tolerate this. I don't understand why people do that.",
        language: "en",
        confidence: 1.0,
      },
      transcript_specialist: "I can't tolerate this. I don't understand why people do that.",
      transcript_emotion_lang: "I can't tolerate this. I don't understand why people do that.",
      emotion: { joy: 0.02, anger: 0.85, sadness: 0.04, fear: 0.02, disgust: 0.02, sentiment: -0.7 },
      audio_url: "/sessions/0b2792c9ac0c42c2/audio/answer-2.wav",
    },
  ],
};

export const SESSIONS_FIXTURE: { sessions: SessionSummary[] } = {
  sessions: [
    {
      id: "0b2792c9ac0c42c2",
      questionnaire_id: "reference-check",
      detected_language: "en",
      final_label: "JOY",
      started_at: "2026-08-08T15:04:42+00:00",
      status: "completed",
    },
  ],
};

export const QUESTIONNAIRE_FIXTURE: QuestionnaireManifest = {
  schema_version: 1,
  id: "reference-check",
  title: "Three reference answers",
  specialist_language: "en",
  welcome_text: "Welcome to the session.",
  questions: [
    { id: "q1", text: "How do you feel about living here?", position: 0 },
    { id: "q2", text: "How do you feel about the world?", position: 1 },
    { id: "q3", text: "Is there anything you cannot accept?", position: 2 },
  ],
};
