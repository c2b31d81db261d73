import shutil

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spamstream.corpus import ngrams, tokenize
from spamstream.errors import InsufficientDataError, ResourceError
from spamstream.lexicon import RESOURCE_FILES, compute_spammy_words, default_resource_dir, load_lexicons, top_ngrams


def _docs(*texts):
    return [tokenize(t) for t in texts]


def test_word_only_in_spam_is_spammy():
    s = compute_spammy_words(_docs("free money now", "free followers"), _docs("good morning friends"))
    assert "free" in s
    assert s.spam_prob["free"] == 1.0
    assert s.ham_prob["free"] == 0.0


def test_word_only_in_ham_is_not_spammy():
    s = compute_spammy_words(_docs("free money now", "free followers"), _docs("good morning friends"))
    assert "morning" not in s


def test_short_words_never_spammy():
    s = compute_spammy_words(_docs("me me me", "me win"), _docs("hello there"))
    assert "me" not in s
    assert "win" in s


def test_hashtag_and_bare_word_are_one_word():
    s = compute_spammy_words(_docs("#free stuff"), _docs("hello"))
    assert "free" in s
    assert s.is_spammy("#free")
    assert s.contains_spammy(["@free"])


def test_document_frequency_not_term_frequency():
    # "cash" repeats inside one spam doc but appears in only half of them
    s = compute_spammy_words(_docs("cash cash cash", "hello"), _docs("cash", "hello"))
    assert s.spam_prob.get("cash") is None


@pytest.mark.parametrize("spam, ham", [([], [["a"]]), ([["a"]], [])])
def test_empty_corpus_rejected(spam, ham):
    with pytest.raises(InsufficientDataError):
        compute_spammy_words(spam, ham)


vocab = st.sampled_from(["free", "win", "cash", "hello", "me", "friend", "#deal", "@bob", "now", "good"])
corpus = st.lists(st.lists(vocab, max_size=8), min_size=1, max_size=15)


@settings(max_examples=150, deadline=None)
@given(corpus, corpus)
def test_membership_matches_recomputation(spam, ham):
    s = compute_spammy_words(spam, ham)
    strip = lambda t: t[1:] if t[:1] in "#@" else t  # noqa: E731
    words = {strip(t) for d in spam + ham for t in d}
    for w in words:
        ps = sum(w in {strip(t) for t in d} for d in spam) / len(spam)
        ph = sum(w in {strip(t) for t in d} for d in ham) / len(ham)
        assert (w in s) == (ps > ph and len(w) >= 3)


def test_top_bigram_from_repeated_phrase():
    v = top_ngrams(_docs("please follow back", "follow back now", "you follow back"))
    assert v.grams[2][0] == ("follow back", 3)


def test_k_one_keeps_unique_leader():
    v = top_ngrams(_docs("a b", "a c", "a d"), k=1)
    assert v.grams[1] == (("a", 3),)


def test_no_trigrams_from_short_tweets():
    v = top_ngrams(_docs("a b", "c"))
    assert v.grams[3] == ()


def test_ties_broken_lexicographically():
    v = top_ngrams(_docs("zeta alpha", "mid"))
    assert [g for g, _ in v.grams[1]] == ["alpha", "mid", "zeta"]


@settings(max_examples=80, deadline=None)
@given(corpus, st.integers(1, 20))
def test_top_ngrams_ordered_and_bounded(docs, k):
    v = top_ngrams(docs, k=k)
    assert v == top_ngrams(docs, k=k)
    for n in (1, 2, 3):
        grams = v.grams[n]
        assert len(grams) <= k
        keys = [(-c, g) for g, c in grams]
        assert keys == sorted(keys)
        for g, c in grams:
            assert c == sum(g in set(ngrams(d, n)) for d in docs)


@pytest.fixture
def resource_copy(tmp_path):
    d = tmp_path / "res"
    shutil.copytree(default_resource_dir(), d)
    return d


def test_categorical_file_read_as_set(resource_copy):
    (resource_copy / "categorical_words.txt").write_text("sports\ntechnology\n", encoding="utf-8")
    assert load_lexicons(resource_copy).categorical_words == {"sports", "technology"}


def test_missing_ranked_domains_named(resource_copy):
    (resource_copy / "ranked_domains.csv").unlink()
    with pytest.raises(ResourceError) as exc:
        load_lexicons(resource_copy)
    assert exc.value.name == "ranked_domains.csv"
    assert "ranked_domains.csv" in str(exc.value)


def test_duplicate_lines_deduplicated(resource_copy):
    (resource_copy / "positive_words.txt").write_text("good\nGood\ngood\nnice\n", encoding="utf-8")
    assert load_lexicons(resource_copy).positive_words == {"good", "nice"}


def test_ranks_must_increase(resource_copy):
    (resource_copy / "ranked_domains.csv").write_text("rank,domain\n2,a.com\n1,b.com\n", encoding="utf-8")
    with pytest.raises(ResourceError):
        load_lexicons(resource_copy)


def test_default_resources_complete(lexicons):
    assert all((default_resource_dir() / name).is_file() for name in RESOURCE_FILES)
    assert lexicons.categorical_words
    ranks = list(lexicons.ranked_domains.values())
    assert ranks == sorted(set(ranks))
