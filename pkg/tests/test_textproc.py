"""Text ingestion: splitting, tokenization, truncation, tf-idf."""

import json
import math
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sgsum import textproc as tp


class TestSplitSentences:
    def test_three_terminal_marks(self):
        assert tp.split_sentences("A. B? C!") == ["A.", "B?", "C!"]

    def test_abbreviation_guard(self):
        assert tp.split_sentences("Dr. Smith left. He ran.") == \
            ["Dr. Smith left.", "He ran."]

    def test_no_terminator(self):
        assert tp.split_sentences("one sentence") == ["one sentence"]

    def test_empty_input(self):
        assert tp.split_sentences("") == []

    def test_concatenation_preserved_modulo_whitespace(self):
        text = "Mr. Jones visited the U.S. office. It was closed! Why? Nobody knew."
        pieces = tp.split_sentences(text)
        assert "".join(pieces).replace(" ", "") == text.replace(" ", "")

    def test_question_marks_never_guarded(self):
        assert tp.split_sentences("Really? Dr. Who said so.") == \
            ["Really?", "Dr. Who said so."]


class TestTokenize:
    def test_punctuation_split_off(self):
        assert tp.tokenize("The cat, sat.") == ["the", "cat", ",", "sat", "."]

    def test_empty(self):
        assert tp.tokenize("") == []

    def test_acronym_with_hyphen(self):
        assert tp.tokenize("U.S.-based") == ["u.s.", "-", "based"]

    def test_contraction_kept_whole(self):
        assert tp.tokenize("don't stop") == ["don't", "stop"]

    @given(st.text(alphabet="abc .?!',-XY2", max_size=60))
    @settings(max_examples=200)
    def test_idempotent_on_rejoined_tokens(self, text):
        tokens = tp.tokenize(text)
        assert tp.tokenize(" ".join(tokens)) == tokens


class TestDocumentSet:
    def test_global_index_matches_lexicographic_order(self):
        ds = tp.make_document_set("x", [["a b.", "c d."], ["e f.", "g h.", "i j."]])
        flat = ds.sentences
        assert [s.global_index for s in flat] == list(range(ds.size))
        assert [(s.doc_index, s.sent_index) for s in flat] == \
            sorted((s.doc_index, s.sent_index) for s in flat)

    def test_empty_sentences_dropped(self):
        ds = tp.make_document_set("x", [["a b.", "   ", "c d."]])
        assert ds.size == 2

    def test_no_documents_rejected(self):
        with pytest.raises(ValueError):
            tp.make_document_set("x", [])

    def test_raw_string_documents_are_split(self):
        ds = tp.make_document_set("x", ["First one. Second one."])
        assert ds.size == 2

    def test_multi_reference_summary(self):
        ds = tp.make_document_set("x", [["a b."]],
                                  summary=[["ref one."], ["ref two."]])
        assert len(ds.gold_token_lists()) == 2


class TestTruncateSet:
    def _set_with_token_counts(self, counts):
        docs = [[" ".join(f"w{i}x{j}" for j in range(c)) for i, c in enumerate(counts)]]
        return tp.make_document_set("x", docs)

    def test_crossing_sentence_dropped(self):
        ds = self._set_with_token_counts([500, 300])
        out = tp.truncate_set(ds, 768)
        assert [len(s.tokens) for s in out.sentences] == [500]

    def test_all_kept_under_limit(self):
        ds = self._set_with_token_counts([200, 200, 200])
        out = tp.truncate_set(ds, 768)
        assert [len(s.tokens) for s in out.sentences] == [200, 200, 200]

    def test_oversized_first_sentence_kept_truncated_with_warning(self):
        ds = self._set_with_token_counts([900])
        with pytest.warns(UserWarning):
            out = tp.truncate_set(ds, 768)
        assert [len(s.tokens) for s in out.sentences] == [768]

    def test_idempotent(self):
        ds = self._set_with_token_counts([400, 300, 200])
        once = tp.truncate_set(ds, 768)
        twice = tp.truncate_set(once, 768)
        assert [s.tokens for s in twice.sentences] == [s.tokens for s in once.sentences]

    def test_rejects_nonpositive_budget(self):
        ds = self._set_with_token_counts([3])
        with pytest.raises(ValueError):
            tp.truncate_set(ds, 0)


class TestTfidf:
    def test_identical_sentences_identical_vectors(self):
        ds = tp.make_document_set("x", [["storm flood", "storm flood"]])
        u, v = tp.build_tfidf(ds)
        assert u == v

    def test_ubiquitous_term_weight_zero(self):
        ds = tp.make_document_set("x", [["storm flood", "storm river"]])
        vectors = tp.build_tfidf(ds)
        assert all(vec["storm"] == 0.0 for vec in vectors)

    def test_hand_computed_weight(self):
        ds = tp.make_document_set("x", [["a b", "b c"]])
        vectors = tp.build_tfidf(ds)
        assert vectors[0]["a"] == pytest.approx(math.log(2), abs=1e-12)
        assert vectors[0]["b"] == 0.0

    def test_all_stopword_sentence_gets_zero_vector(self):
        ds = tp.make_document_set("x", [["the of and", "storm flood"]])
        vectors = tp.build_tfidf(ds)
        assert vectors[0] == {}
        assert tp.tfidf_cosine(vectors[0], vectors[1]) == 0.0

    def test_cosine_of_disjoint_vectors(self):
        assert tp.tfidf_cosine({"a": 1.0}, {"b": 1.0}) == 0.0

    def test_cosine_of_equal_vectors(self):
        v = {"a": 0.5, "b": 1.5}
        assert tp.tfidf_cosine(v, v) == pytest.approx(1.0)


class TestJsonl:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "data.jsonl"
        record = {"id": "s1", "docs": [["First one.", "Second one."]],
                  "summary": ["First one."]}
        path.write_text(json.dumps(record) + "\n")
        sets = tp.read_jsonl_dataset(path)
        assert len(sets) == 1
        assert sets[0].id == "s1"
        assert sets[0].size == 2

    def test_malformed_line_reports_line_number(self, tmp_path):
        path = tmp_path / "data.jsonl"
        path.write_text('{"id": "ok", "docs": [["a."]]}\nnot json\n')
        with pytest.raises(ValueError, match="line 2"):
            tp.read_jsonl_dataset(path)
