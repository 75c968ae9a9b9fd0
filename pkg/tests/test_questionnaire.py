"""Question extraction, manifest round trips, prompt pre-rendering."""

import pytest

from voicecare.audio import parse_wav
from voicecare.providers import ProviderUnavailable
from voicecare.providers.mock import MockProviders
from voicecare.questionnaire import (
    InvalidManifest,
    Question,
    Questionnaire,
    extract_questions,
    load_questionnaire,
    prerender_prompts,
    questionnaire_from_dict,
    save_questionnaire,
)


def make_questionnaire(n_questions=3, language="en"):
    return Questionnaire(
        id="wellbeing-check",
        title="Morning wellbeing check",
        specialist_language=language,
        welcome_text="Hello, let us begin.",
        questions=tuple(
            Question(f"q{i + 1}", f"Question number {i + 1}?", i) for i in range(n_questions)
        ),
    )


class TestExtractQuestions:
    def test_mixed_document(self):
        # hand oracle: sentences end at . ! ? and only ?-sentences stay
        doc = "How are you? I see. Did you sleep well?"
        assert [q.text for q in extract_questions(doc)] == [
            "How are you?",
            "Did you sleep well?",
        ]

    def test_empty_document(self):
        assert extract_questions("") == []

    def test_inverted_spanish_marks_retained(self):
        assert [q.text for q in extract_questions("¿Cómo estás?")] == ["¿Cómo estás?"]

    def test_positions_in_document_order(self):
        doc = "A? Filler. B? C?"
        questions = extract_questions(doc)
        assert [(q.position, q.text) for q in questions] == [(0, "A?"), (1, "B?"), (2, "C?")]

    def test_blank_line_terminates_sentence(self):
        doc = "Is this kept?\n\nthis has no mark\n\nAnd this one?"
        assert [q.text for q in extract_questions(doc)] == ["Is this kept?", "And this one?"]

    def test_single_newline_is_whitespace(self):
        doc = "Did you sleep\nwell last night?"
        assert [q.text for q in extract_questions(doc)] == ["Did you sleep\nwell last night?"]

    def test_crlf_and_lf_agree(self):
        lf = "First one?\nStatement here.\n\nSecond one?\n"
        crlf = lf.replace("\n", "\r\n")
        assert [q.text for q in extract_questions(lf)] == [
            q.text for q in extract_questions(crlf)
        ]

    def test_exclamations_are_dropped(self):
        assert extract_questions("Wonderful! Great day!") == []

    def test_extraction_stability(self):
        # re-extracting questions interleaved with filler returns the same list
        doc = "Alpha? Noise. Beta two? More noise! Gamma three?"
        first = [q.text for q in extract_questions(doc)]
        rebuilt = " Padding sentence. ".join(first)
        assert [q.text for q in extract_questions(rebuilt)] == first

    def test_every_result_ends_with_mark(self):
        doc = "One? Two. Three! Four? Five\n\nSix?"
        for q in extract_questions(doc):
            assert q.text.strip()
            assert q.text.endswith("?")


class TestManifests:
    def test_save_then_load_round_trip(self, tmp_path):
        q = make_questionnaire()
        path = tmp_path / "check.manifest"
        save_questionnaire(q, path)
        assert load_questionnaire(path) == q

    def test_zero_questions_rejected(self):
        with pytest.raises(InvalidManifest) as err:
            questionnaire_from_dict(
                {
                    "id": "x",
                    "title": "t",
                    "specialist_language": "en",
                    "welcome_text": "hi",
                    "questions": [],
                }
            )
        assert any("at least one question" in p for p in err.value.problems)

    def test_missing_question_mark_names_the_question(self):
        with pytest.raises(InvalidManifest) as err:
            questionnaire_from_dict(
                {
                    "id": "x",
                    "title": "t",
                    "specialist_language": "en",
                    "welcome_text": "hi",
                    "questions": [
                        {"id": "q1", "text": "Fine?", "position": 0},
                        {"id": "q2", "text": "Not a question", "position": 1},
                    ],
                }
            )
        assert any("q2" in p for p in err.value.problems)

    def test_gapped_positions_rejected(self):
        with pytest.raises(InvalidManifest) as err:
            questionnaire_from_dict(
                {
                    "id": "x",
                    "title": "t",
                    "specialist_language": "en",
                    "welcome_text": "hi",
                    "questions": [
                        {"id": "q1", "text": "A?", "position": 0},
                        {"id": "q2", "text": "B?", "position": 2},
                    ],
                }
            )
        assert any("positions" in p for p in err.value.problems)

    def test_bad_language_tag_rejected(self):
        with pytest.raises(InvalidManifest) as err:
            questionnaire_from_dict(
                {
                    "id": "x",
                    "title": "t",
                    "specialist_language": "English",
                    "welcome_text": "hi",
                    "questions": [{"id": "q1", "text": "A?", "position": 0}],
                }
            )
        assert any("specialist_language" in p for p in err.value.problems)

    def test_unreadable_file(self, tmp_path):
        bad = tmp_path / "broken.manifest"
        bad.write_text("{not json", encoding="utf-8")
        with pytest.raises(InvalidManifest):
            load_questionnaire(bad)


class TestPrerenderPrompts:
    def test_cache_complete_with_translated_metadata(self, tmp_path):
        q = make_questionnaire(3, language="en")
        providers = MockProviders()
        cache = prerender_prompts(q, providers, "fr", tmp_path)
        assert set(cache.entries) == {"q1", "q2", "q3"}
        for question in q.questions:
            clip = parse_wav(cache.entries[question.id].read_bytes())
            expected = providers.translate(question.text, "en", "fr")
            assert clip.metadata["text"] == expected
            assert clip.metadata["language"] == "fr"

    def test_rerender_is_byte_identical(self, tmp_path):
        q = make_questionnaire(2)
        providers = MockProviders()
        cache1 = prerender_prompts(q, providers, "en", tmp_path)
        blobs1 = {k: v.read_bytes() for k, v in cache1.entries.items()}
        cache2 = prerender_prompts(q, providers, "en", tmp_path)
        blobs2 = {k: v.read_bytes() for k, v in cache2.entries.items()}
        assert blobs1 == blobs2

    def test_failure_publishes_nothing(self, tmp_path):
        q = make_questionnaire(3)

        class FlakyProviders(MockProviders):
            def __init__(self):
                super().__init__()
                self.calls = 0

            def synthesize(self, text, language, rate=1.0):
                self.calls += 1
                if self.calls == 2:
                    raise ProviderUnavailable("tts down")
                return super().synthesize(text, language, rate)

        with pytest.raises(ProviderUnavailable):
            prerender_prompts(q, FlakyProviders(), "en", tmp_path)
        assert not (tmp_path / q.id).exists()
        assert not list(tmp_path.glob(".tmp-*"))
