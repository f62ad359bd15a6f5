import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from credgraph.features import (DEFAULT_TIME_SCALE, META_DIM,
                                WordEmbeddingTable, clean_post_text,
                                engagement_meta, entity_features, fit_tfidf,
                                report_stance_rule, tokenize)
from credgraph.graph import Stance

STOP = frozenset({"the", "a", "is", "this", "of", "out"})


class TestFitTfidf:
    def test_two_doc_vocabulary(self):
        model = fit_tfidf(["a b", "b c"])
        assert set(model.vocabulary) == {"a", "b", "c"}
        assert model.doc_freq[model.index["b"]] == 2
        assert model.num_documents == 2

    def test_ubiquitous_term_has_zero_idf(self):
        model = fit_tfidf(["b x", "b y", "b z"])
        assert model.idf("b") == 0.0
        assert model.transform("b b b")[model.index["b"]] == 0.0

    def test_five_doc_hand_table(self):
        # Oracle: tf * ln(N/df) computed by hand for every (doc, term).
        docs = ["cat dog", "cat cat fish", "dog fish", "cat bird", "fish"]
        model = fit_tfidf(docs)
        assert model.vocabulary == ("bird", "cat", "dog", "fish")
        df = {"bird": 1, "cat": 3, "dog": 2, "fish": 3}
        tf = [
            {"cat": 1, "dog": 1},
            {"cat": 2, "fish": 1},
            {"dog": 1, "fish": 1},
            {"cat": 1, "bird": 1},
            {"fish": 1},
        ]
        for doc, counts in zip(docs, tf):
            vec = model.transform(doc)
            for j, term in enumerate(model.vocabulary):
                want = counts.get(term, 0) * math.log(5 / df[term])
                assert vec[j] == pytest.approx(want, abs=1e-12)

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError):
            fit_tfidf([])

    def test_vocab_cap_keeps_most_frequent(self):
        model = fit_tfidf(["x y", "x z", "x w"], vocab_size=1)
        assert model.vocabulary == ("x",)


class TestEntityFeatures:
    @pytest.fixture
    def models(self):
        tfidf = fit_tfidf(["cat dog", "cat fish", "bird"])
        emb = WordEmbeddingTable({
            "cat": np.array([1.0, 0.0]),
            "dog": np.array([0.0, 1.0]),
            "fish": np.array([2.0, 2.0]),
        }, dim=2)
        return tfidf, emb

    def test_empty_text_zero_vector(self, models):
        tfidf, emb = models
        vec = entity_features("", tfidf, emb)
        assert vec.shape == (len(tfidf.vocabulary) + 2,)
        assert not vec.any()

    def test_single_word_proportional_to_embedding(self, models):
        tfidf, emb = models
        vec = entity_features("dog", tfidf, emb)
        w = math.log(3 / 1)  # tf=1, df(dog)=1, N=3
        semantic = vec[-2:]
        want = w * np.array([0.0, 1.0]) / max(1.0, w)
        assert semantic == pytest.approx(want)

    def test_two_word_weighted_mean(self, models):
        # Oracle: straight-line arithmetic on the definition.
        tfidf, emb = models
        vec = entity_features("dog dog cat", tfidf, emb)
        w_dog = 2 * math.log(3 / 1)
        w_cat = 1 * math.log(3 / 2)
        expected = (w_dog * np.array([0.0, 1.0]) + w_cat * np.array([1.0, 0.0]))
        expected /= max(1.0, w_dog + w_cat)
        assert vec[-2:] == pytest.approx(expected, abs=1e-12)
        assert vec[tfidf.index["dog"]] == pytest.approx(w_dog)
        assert vec[tfidf.index["cat"]] == pytest.approx(w_cat)

    def test_all_oov_text_zero_semantic(self, models):
        tfidf, emb = models
        vec = entity_features("quasar nebula", tfidf, emb)
        assert not vec.any()

    def test_dimension_shared_across_entities(self, models):
        tfidf, emb = models
        dims = {entity_features(t, tfidf, emb).shape
                for t in ["cat dog", "", "bird", "totally new words"]}
        assert dims == {(len(tfidf.vocabulary) + 2,)}


GOLDEN_CLEANING = [
    ("Hello World", "hello world"),
    ("The cat!", "cat"),
    ("http://example.com link here", "link here"),
    ("MiXeD CaSe TeXt", "mixed case text"),
    ("emoji \U0001F600 test", "emoji test"),
    ("punctuation, everywhere; right?", "punctuation everywhere right"),
    ("  spaces   collapse  ", "spaces collapse"),
    ("numbers 123 stay", "numbers 123 stay"),
    ("", ""),
    ("the a of", ""),
    ("www.site.org trailing", "trailing"),
    ("dash-separated words", "dash separated words"),
    ("apostrophe's here", "apostrophe s here"),
    ("UPPER http://x.y/z?q=1 LOWER", "upper lower"),
    ("tabs\tand\nnewlines", "tabs and newlines"),
    ("repeat repeat repeat", "repeat repeat repeat"),
    ("Check THIS out!! http://x.co \U0001F631", "check"),
    ("underscore_split test", "underscore split test"),
    ("comma,separated,values", "comma separated values"),
    ("\U0001F642\U0001F642 pure emoji", "pure emoji"),
]


class TestCleanPostText:
    @pytest.mark.parametrize("raw,want", GOLDEN_CLEANING)
    def test_golden_file(self, raw, want):
        assert clean_post_text(raw, STOP) == want

    def test_empty(self):
        assert clean_post_text("", STOP) == ""


class TestReportStanceRule:
    def test_exact_match(self):
        assert report_stance_rule("Moon landing happened", "Moon landing happened", STOP)

    def test_url_and_emoji_ignored(self):
        assert report_stance_rule(
            "Moon landing happened http://nasa.gov \U0001F680",
            "Moon landing happened", STOP)

    def test_partial_overlap_is_not_report(self):
        title = "ten little known facts about deep sea creatures revealed"
        post = "ten little known facts about deep sea creatures"  # 90%-ish overlap
        assert not report_stance_rule(post, title, STOP)

    @given(st.lists(st.sampled_from(["alpha", "bravo", "charlie", "delta"]),
                    min_size=0, max_size=6))
    @settings(max_examples=50, deadline=None)
    def test_symmetric_and_url_invariant(self, words):
        post = " ".join(words)
        title = "alpha charlie"
        assert report_stance_rule(post, title, STOP) == report_stance_rule(title, post, STOP)
        assert (report_stance_rule(post + " http://x.co \U0001F600", title, STOP)
                == report_stance_rule(post, title, STOP))


class TestEngagementMeta:
    def test_report_at_zero_hours(self):
        meta = engagement_meta(Stance.REPORT, 0.0, time_scale=1.0)
        assert meta == pytest.approx([0.0, 0.0, 0.0, 0.0, 1.0])

    def test_deny_at_e_minus_one_hours(self):
        meta = engagement_meta(Stance.DENY, math.e - 1.0, time_scale=1.0)
        assert meta == pytest.approx([1.0, 0.0, 0.0, 1.0, 0.0])

    def test_time_ablation_zeroes_time(self):
        for hours in (0.0, 5.0, 500.0):
            meta = engagement_meta(Stance.DENY, hours, disable_time=True)
            assert meta[0] == 0.0
            assert meta[1:].sum() == 1.0

    def test_default_scale_hits_one_at_two_weeks(self):
        meta = engagement_meta(Stance.REPORT, 336.0)
        assert meta[0] == pytest.approx(1.0)

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError):
            engagement_meta(Stance.DENY, -1.0)

    @given(st.sampled_from(list(Stance)),
           st.floats(min_value=0, max_value=1e6, allow_nan=False))
    @settings(max_examples=100, deadline=None)
    def test_one_hot_block_sums_to_one(self, stance, hours):
        meta = engagement_meta(stance, hours)
        assert meta.shape == (META_DIM,)
        assert meta[1:].sum() == 1.0
        assert meta[0] >= 0.0
