import os
import tempfile

from django.test import SimpleTestCase
from hypothesis import given, strategies as st

from topicmodels.corpus import build_corpus, load_corpus, save_corpus, tokenize
from topicmodels.exceptions import CorpusFormatError, EmptyCorpusError


class TokenizeTests(SimpleTestCase):

    def test_lowercases_strips_and_removes_stopwords(self):
        self.assertEqual(tokenize("The cat, the CAT!", {"the"}), ["cat", "cat"])

    def test_empty_text(self):
        self.assertEqual(tokenize("", set()), [])

    def test_digits_are_stripped_inside_words(self):
        self.assertEqual(tokenize("covid19 spreads fast", set()), ["covid", "spreads", "fast"])


class BuildCorpusTests(SimpleTestCase):

    def test_short_documents_are_dropped(self):
        corpus = build_corpus([["a", "b", "c"], ["a", "b", "c", "d"]], 4)
        self.assertEqual(corpus.M, 1)
        self.assertEqual(corpus.V, 4)

    def test_single_type_document(self):
        corpus = build_corpus([["x", "x", "x", "x"]], 4)
        self.assertEqual((corpus.M, corpus.V), (1, 1))
        self.assertEqual(corpus.documents[0].tokens, (0, 0, 0, 0))

    def test_no_filtering_at_threshold_one(self):
        corpus = build_corpus([["a"], ["b"]], 1)
        self.assertEqual((corpus.M, corpus.V), (2, 2))

    def test_ids_follow_first_occurrence(self):
        corpus = build_corpus([["b", "a", "b"], ["c", "a"]], 1)
        self.assertEqual(corpus.vocabulary.id_to_token, ("b", "a", "c"))
        self.assertEqual(corpus.documents[1].tokens, (2, 1))

    def test_no_surviving_documents(self):
        with self.assertRaises(EmptyCorpusError):
            build_corpus([["a"], ["b", "c"]], 4)

    @given(st.lists(st.lists(st.sampled_from("abcdefg"), max_size=8), min_size=1, max_size=6),
           st.integers(min_value=1, max_value=4))
    def test_built_corpus_invariants(self, token_lists, min_doc_len):
        if not any(len(tokens) >= min_doc_len for tokens in token_lists):
            return
        corpus = build_corpus(token_lists, min_doc_len)
        vocabulary = corpus.vocabulary
        for token, i in vocabulary.token_to_id.items():
            self.assertEqual(vocabulary.id_to_token[i], token)
        self.assertEqual(sorted(vocabulary.token_to_id.values()), list(range(vocabulary.size)))
        for document in corpus.documents:
            self.assertGreaterEqual(document.length, min_doc_len)
            self.assertTrue(all(token < corpus.V for token in document.tokens))
        self.assertEqual(build_corpus(token_lists, min_doc_len), corpus)


class CorpusFileTests(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.path = os.path.join(self.tmp.name, "sample.corpus")

    def tearDown(self):
        self.tmp.cleanup()

    def write(self, text):
        with open(self.path, "w", encoding="utf-8") as handle:
            handle.write(text)

    def test_round_trip(self):
        corpus = build_corpus([["a"], ["b"]], 1)
        save_corpus(corpus, self.path)
        self.assertEqual(load_corpus(self.path), corpus)

    def test_file_layout(self):
        save_corpus(build_corpus([["a", "b"], ["b", "b"]], 1), self.path)
        with open(self.path, encoding="utf-8") as handle:
            self.assertEqual(handle.read(), "2 2\na\nb\n0 1\n1 1\n")

    def test_unknown_token_reports_line(self):
        self.write("2 2\na\nb\n0 1\n0 5\n")
        with self.assertRaises(CorpusFormatError) as caught:
            load_corpus(self.path)
        self.assertEqual(caught.exception.line, 5)

    def test_non_integer_id_reports_line(self):
        self.write("2 1\na\nb\n0 b\n")
        with self.assertRaises(CorpusFormatError) as caught:
            load_corpus(self.path)
        self.assertEqual(caught.exception.line, 4)

    def test_empty_file(self):
        self.write("")
        with self.assertRaisesMessage(EmptyCorpusError, "zero documents"):
            load_corpus(self.path)
