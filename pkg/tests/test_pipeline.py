from dataclasses import replace

import pytest

from spamstream.classifiers import EnsembleVerdict
from spamstream.errors import NotBootstrappedError
from spamstream.lexicon import SpammyWordSet
from spamstream.neardup import Cluster, ClusterStore, WindowBuffer, signature
from spamstream.pipeline import (
    BLACKLIST, CLASSIFIER, NEARDUP, RELIABLE_HAM, DetectProbe, LabeledTweet, detect, detect_many, reliable_ham_detect,
)

from conftest import make_tweet

SPAMMY = SpammyWordSet(frozenset({"followme"}), {"followme": 0.9}, {"followme": 0.0})


class Fixed:
    """Stand-in classifier with a constant spam score."""

    def __init__(self, score):
        self.score = score

    def predict_proba_one(self, fv):
        return self.score


def _state(base, votes=(0.1, 0.1, 0.1), **over):
    nb, lr, rf = (Fixed(s) for s in votes)
    fields = dict(blacklist={}, trusted_users=frozenset(), spammy_words=SPAMMY, cluster_store=ClusterStore(),
                  nb=nb, lr=lr, rf=rf)
    fields.update(over)
    return replace(base, **fields)


def test_blacklist_short_circuits_neardup(small_state):
    t = make_tweet("cheap pills here http://spamly.biz/x")
    store = ClusterStore()
    store.put(Cluster(signature(["cheap", "pills", "here"], small_state.seeds), ("old",), "ham", True))
    st = _state(small_state, blacklist={"spamly.biz": 1}, cluster_store=store)
    lt = detect(t, st)
    assert (lt.label, lt.detector, lt.confident) == ("spam", BLACKLIST, True)


def test_neardup_before_reliable_ham(small_state):
    t = make_tweet("same words again", user_id="good")
    store = ClusterStore()
    store.put(Cluster(signature(["same", "words", "again"], small_state.seeds), ("old",), "spam", True))
    st = _state(small_state, cluster_store=store, trusted_users=frozenset({"good"}))
    lt = detect(t, st)
    assert (lt.label, lt.detector, lt.confident) == ("spam", NEARDUP, True)


def test_trusted_clean_tweet_is_reliable_ham(small_state):
    st = _state(small_state, votes=(0.9, 0.9, 0.9), trusted_users=frozenset({"good"}))
    lt = detect(make_tweet("lovely weather today", user_id="good"), st)
    assert (lt.label, lt.detector, lt.confident) == ("ham", RELIABLE_HAM, True)


def test_spammy_word_skips_reliable_ham(small_state):
    st = _state(small_state, votes=(0.9, 0.9, 0.9), trusted_users=frozenset({"good"}))
    lt = detect(make_tweet("followme for more", user_id="good"), st)
    assert lt.detector == CLASSIFIER and lt.label == "spam"


@pytest.mark.parametrize("user, text, trusted, expected", [
    ("good", "lovely weather", {"good"}, "ham"),
    ("good", "#followme please", {"good"}, None),
    ("other", "lovely weather", {"good"}, None),
])
def test_reliable_ham_rule(user, text, trusted, expected):
    assert reliable_ham_detect(make_tweet(text, user_id=user), SPAMMY, frozenset(trusted)) == expected


@pytest.mark.parametrize("votes, label, confident", [
    ((0.9, 0.9, 0.9), "spam", True),
    ((0.9, 0.9, 0.1), "spam", False),
    ((0.1, 0.9, 0.1), "ham", False),
    ((0.1, 0.1, 0.1), "ham", True),
])
def test_ensemble_confidence(small_state, votes, label, confident):
    lt = detect(make_tweet("ordinary words here"), _state(small_state, votes=votes))
    assert (lt.detector, lt.label, lt.confident) == (CLASSIFIER, label, confident)
    assert lt.ensemble.scores == votes


def test_unanimous_ham_with_spammy_word_not_confident(small_state):
    lt = detect(make_tweet("please followme now"), _state(small_state))
    assert (lt.label, lt.confident, lt.has_spammy) == ("ham", False, True)


def test_unbootstrapped_state_rejected(small_state):
    with pytest.raises(NotBootstrappedError):
        detect(make_tweet("x"), replace(small_state, rf=None))
    with pytest.raises(NotBootstrappedError):
        detect(make_tweet("x"), None)


def test_unmatched_tweets_are_buffered(small_state):
    st = _state(small_state, blacklist={"spamly.biz": 1})
    buf = WindowBuffer(1)
    detect(make_tweet("x http://spamly.biz", tweet_id="b1"), st, buf)
    detect(make_tweet("plain words", tweet_id="b2"), st, buf)
    assert list(buf.tweets) == ["b2"]


def test_probe_counts_stages(small_state):
    st = _state(small_state, blacklist={"spamly.biz": 1}, trusted_users=frozenset({"good"}))
    probe = DetectProbe()
    detect_many([make_tweet("x http://spamly.biz"), make_tweet("hello", user_id="good"), make_tweet("hi there")],
                st, None, probe)
    assert probe.calls == [3, 2, 2, 1]
    assert probe.hits == [1, 0, 1, 1]
    assert probe.n == 3 and probe.total_ns > 0


def test_detection_is_deterministic(small_corpus, small_state):
    _, stream = small_corpus
    a = [(lt.label, lt.detector, lt.confident) for lt in detect_many(stream[:300], small_state)]
    b = [(lt.label, lt.detector, lt.confident) for lt in detect_many(stream[:300], small_state)]
    assert a == b
    assert {d for _, d, _ in a} <= {1, 2, 3, 4}


@pytest.mark.parametrize("mode", ["nb", "lr", "rf"])
def test_single_classifier_modes(small_corpus, small_state, mode):
    _, stream = small_corpus
    for t in stream[:50]:
        lt = detect(t, small_state, mode=mode)
        assert lt.detector == CLASSIFIER and not lt.confident
        score = getattr(small_state, mode).predict_proba_one(small_state.extractor.tweet_vector(t))
        assert lt.label == ("spam" if score > 0.5 else "ham")


def test_unknown_mode_rejected(small_state):
    with pytest.raises(ValueError):
        detect(make_tweet("x"), small_state, mode="svm")


@pytest.mark.parametrize("kwargs", [
    dict(label="ham", detector=BLACKLIST, confident=True),
    dict(label="spam", detector=RELIABLE_HAM, confident=True),
    dict(label="spam", detector=NEARDUP, confident=False),
    dict(label="maybe", detector=CLASSIFIER, confident=False),
    dict(label="spam", detector=5, confident=True),
])
def test_labeled_tweet_invariants(kwargs):
    with pytest.raises(ValueError):
        LabeledTweet(make_tweet("x"), **kwargs)


def test_labeled_tweet_serializes(small_state):
    lt = LabeledTweet(make_tweet("x", tweet_id="s1"), "spam", CLASSIFIER, True,
                      EnsembleVerdict("spam", "spam", "spam", "spam", True))
    d = lt.to_dict()
    assert (d["tweet_id"], d["label"], d["detector"], d["confident"]) == ("s1", "spam", 4, True)
