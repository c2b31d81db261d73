import numpy as np
import pytest

import spamstream.batch as batch
from spamstream.batch import (
    bootstrap_state, collect_confident, is_confident, label_new_clusters, majority_label,
    qualifies_for_blacklist, run_window_update, update_blacklist, update_trusted_users,
)
from spamstream.classifiers import EnsembleVerdict
from spamstream.errors import DegenerateDataError, DuplicateTweetError, StaleWindowError
from spamstream.neardup import Cluster, Signature, WindowBuffer
from spamstream.pipeline import BLACKLIST, CLASSIFIER, NEARDUP, RELIABLE_HAM, LabeledTweet, detect

from conftest import make_tweet


def _ens(*votes):
    n = sum(v == "spam" for v in votes)
    return EnsembleVerdict(*votes, "spam" if n >= 2 else "ham", n in (0, 3))


def _lt(label, detector=CLASSIFIER, votes=None, spammy=False, **tw):
    t = make_tweet(tw.pop("text", "some words"), **tw)
    ens = _ens(*votes) if votes else None
    conf = detector != CLASSIFIER or (ens is not None and ens.unanimous and (label == "spam" or not spammy))
    return LabeledTweet(t, label, detector, conf, ens, has_spammy=spammy)


# ---------------------------------------------------------------- confident harvest

def test_first_three_detectors_are_confident():
    assert is_confident(_lt("spam", BLACKLIST))
    assert is_confident(_lt("spam", NEARDUP))
    assert is_confident(_lt("ham", RELIABLE_HAM))


def test_split_vote_not_confident():
    assert not is_confident(_lt("spam", votes=("spam", "spam", "ham")))


def test_unanimous_ham_with_spammy_word_not_confident():
    assert not is_confident(_lt("ham", votes=("ham", "ham", "ham"), spammy=True))
    assert is_confident(_lt("ham", votes=("ham", "ham", "ham")))


def test_near_duplicate_ham_with_spammy_word_excluded():
    assert not is_confident(_lt("ham", NEARDUP, spammy=True))


def test_flag_is_not_trusted_over_votes():
    t = make_tweet("x")
    forged = LabeledTweet(t, "spam", CLASSIFIER, True, _ens("spam", "ham", "spam"))
    assert not is_confident(forged)


def test_collect_confident_partitions():
    out = [_lt("spam", BLACKLIST), _lt("ham", RELIABLE_HAM), _lt("spam", votes=("spam", "ham", "spam")),
           _lt("spam", votes=("spam",) * 3)]
    conf = collect_confident(out)
    assert len(conf.spam) == 2 and len(conf.ham) == 1
    assert not set(conf.spam_ids) & {lt.tweet.tweet_id for lt in conf.ham}


# ---------------------------------------------------------------- clusters

class FixedLR:
    def __init__(self, score):
        self.score = score

    def predict_proba_one(self, fv):
        return self.score


def _cluster(n_spam, n_ham):
    out = [_lt("spam", votes=("spam",) * 3, text="win big now") for _ in range(n_spam)]
    out += [_lt("ham", votes=("ham",) * 3, text="win big now") for _ in range(n_ham)]
    c = Cluster(Signature(1, 2, 3), tuple(lt.tweet.tweet_id for lt in out))
    labels = {lt.tweet.tweet_id: lt.label for lt in out}
    tweets = {lt.tweet.tweet_id: lt.tweet for lt in out}
    return c, labels, tweets


def test_cluster_vote_and_lr_agree(small_state):
    c, labels, tweets = _cluster(8, 4)
    (d,) = label_new_clusters([c], FixedLR(0.9), labels, tweets, small_state.extractor)
    assert (d.eligible, d.label, d.confident) == (True, "spam", True)


def test_cluster_lr_disagrees(small_state):
    c, labels, tweets = _cluster(8, 4)
    (d,) = label_new_clusters([c], FixedLR(0.1), labels, tweets, small_state.extractor)
    assert (d.eligible, d.label, d.confident, d.lr_label) == (True, "spam", False, "ham")


def test_small_cluster_ineligible(small_state):
    c, labels, tweets = _cluster(9, 0)
    (d,) = label_new_clusters([c], FixedLR(0.9), labels, tweets, small_state.extractor)
    assert not d.eligible and not d.confident and d.label is None


def test_no_cluster_model_means_no_confident_cluster(small_state):
    c, labels, tweets = _cluster(12, 0)
    (d,) = label_new_clusters([c], None, labels, tweets, small_state.extractor)
    assert d.eligible and not d.confident


@pytest.mark.parametrize("labels, expected", [
    (["spam"] * 5 + ["ham"] * 5, "ham"),
    (["spam"] * 6 + ["ham"] * 5, "spam"),
    (["ham"], "ham"),
])
def test_majority_label(labels, expected):
    assert majority_label(labels) == expected


# ---------------------------------------------------------------- blacklist

def _domain_output(domain, n, n_spam):
    out = [_lt("spam", BLACKLIST, text=f"go http://{domain}/x") for _ in range(n_spam)]
    out += [_lt("spam", votes=("spam", "spam", "ham"), text=f"go http://{domain}/y") for _ in range(n - n_spam)]
    return out


@pytest.mark.parametrize("n, n_spam, added", [(20, 18, True), (4, 4, False), (10, 8, False), (5, 5, True),
                                              (10, 9, True)])
def test_blacklist_thresholds(n, n_spam, added):
    out = _domain_output("spamly.biz", n, n_spam)
    bl = update_blacklist(collect_confident(out), out, {}, window_id=3)
    assert ("spamly.biz" in bl) == added
    assert qualifies_for_blacklist(n, n_spam) == added
    if added:
        assert bl["spamly.biz"] == 3


def test_allowlisted_domain_never_added():
    out = _domain_output("bit.ly", 20, 20)
    assert update_blacklist(collect_confident(out), out, {}, allowlist={"bit.ly"}) == {}


def test_blacklist_never_shrinks():
    out = _domain_output("other.com", 3, 0)
    assert update_blacklist(collect_confident(out), out, {"old.biz": 1}) == {"old.biz": 1}


# ---------------------------------------------------------------- trust

def _hams(user, k):
    return [_lt("ham", RELIABLE_HAM, user_id=user) for _ in range(k)]


def test_five_confident_hams_make_trusted():
    out = _hams("alice", 5)
    trusted, hist = update_trusted_users(collect_confident(out), {}, frozenset(), out)
    assert trusted == {"alice"} and hist["alice"] == (5, 0)


def test_four_confident_hams_not_enough():
    out = _hams("alice", 4)
    trusted, _ = update_trusted_users(collect_confident(out), {}, frozenset(), out)
    assert trusted == frozenset()


def test_history_accumulates_across_windows():
    out = _hams("alice", 3)
    _, hist = update_trusted_users(collect_confident(out), {}, frozenset(), out)
    out = _hams("alice", 2)
    trusted, _ = update_trusted_users(collect_confident(out), hist, frozenset(), out)
    assert trusted == {"alice"}


def test_spam_label_revokes_trust():
    out = [_lt("spam", votes=("spam", "ham", "spam"), user_id="alice")]
    trusted, hist = update_trusted_users(collect_confident(out), {"alice": (7, 0)}, frozenset({"alice"}), out)
    assert trusted == frozenset() and hist["alice"] == (7, 1)


# ---------------------------------------------------------------- window update

def _label_window(state, tweets):
    buf = WindowBuffer(state.window_id + 1)
    return [detect(t, state, buf) for t in tweets], buf


def test_zero_confident_window_keeps_models(small_state):
    tweets = [make_tweet(f"quiet note {i}", user_id=f"q{i}", followers=7 + i) for i in range(6)]
    buf = WindowBuffer(1)
    out = []
    for i, t in enumerate(tweets):
        buf.append(t, Signature(i, 0, 0))
        out.append(LabeledTweet(t, "spam", CLASSIFIER, False, _ens("spam", "ham", "spam")))
    new, rep = run_window_update(small_state, out, buf)
    assert new.window_id == small_state.window_id + 1
    assert (rep.confident_spam, rep.confident_ham, rep.retrained) == (0, 0, False)
    assert new.nb is small_state.nb and new.lr is small_state.lr and new.rf is small_state.rf
    assert new.spammy_words is small_state.spammy_words and new.vocab is small_state.vocab
    assert new.schema_version == small_state.schema_version
    assert new.blacklist == small_state.blacklist
    assert set(new.stats.users) == set(small_state.stats.users) | {f"q{i}" for i in range(6)}
    assert len(new.memory.spam) == len(small_state.memory.spam)


def test_new_domain_blacklisted_for_next_window(small_state):
    domain = "brandnewspam.biz"
    tweets = [make_tweet(f"claim prize {i} http://{domain}/{i}", user_id=f"z{i}") for i in range(6)]
    buf = WindowBuffer(1)
    out = [LabeledTweet(t, "spam", CLASSIFIER, True, _ens("spam", "spam", "spam")) for t in tweets]
    for t in tweets:
        buf.append(t, Signature(int(t.tweet_id[1:]), 1, 1))
    new, rep = run_window_update(small_state, out, buf)
    assert rep.new_domains == [domain]
    assert new.blacklist[domain] == 1
    lt = detect(make_tweet(f"anything http://{domain}/later"), new)
    assert lt.detector == BLACKLIST and lt.label == "spam"
    assert rep.retrained and new.schema_version == small_state.schema_version + 1


def test_failed_update_leaves_state_serving(small_state, small_corpus, monkeypatch):
    _, stream = small_corpus
    before = small_state.summary()
    out, buf = _label_window(small_state, stream[:400])

    def boom(*a, **k):
        raise DegenerateDataError("forced failure")

    monkeypatch.setattr(batch, "train_tweet_models", boom)
    with pytest.raises(DegenerateDataError):
        run_window_update(small_state, out, buf)
    assert small_state.summary() == before
    again = [detect(lt.tweet, small_state) for lt in out]
    assert [(a.label, a.detector) for a in again] == [(b.label, b.detector) for b in out]


def test_stale_buffer_rejected(small_state):
    with pytest.raises(StaleWindowError):
        run_window_update(small_state, [], WindowBuffer(small_state.window_id + 2))


def test_real_window_update_is_consistent(small_state, small_corpus):
    _, stream = small_corpus
    out, buf = _label_window(small_state, stream[:1500])
    new, rep = run_window_update(small_state, out, buf)
    conf = collect_confident(out)
    assert (rep.confident_spam, rep.confident_ham) == (len(conf.spam), len(conf.ham))
    assert set(small_state.blacklist) <= set(new.blacklist)
    assert new.window_id == 1
    assert not any(lt.has_spammy for lt in conf.ham)
    assert all(lt.ensemble.spam_votes == 3 for lt in conf.spam if lt.detector == CLASSIFIER)
    for c in new.cluster_store.confident_clusters():
        assert c.label in ("spam", "ham")
    assert rep.train_spam == len(new.memory.spam) and rep.train_ham == len(new.memory.ham)


# ---------------------------------------------------------------- bootstrap

def _seed(n_spam=20, n_ham=20):
    rng = np.random.default_rng(0)
    spam_words = "win cash prize free click offer deal bonus".split()
    ham_words = "lunch meeting family weekend movie coffee garden book".split()
    out = []
    for i in range(n_spam):
        text = " ".join(rng.choice(spam_words, 5)) + f" http://promo{i % 3}.biz/{i}"
        out.append(make_tweet(text, user_id=f"s{i}", followers=3, followees=900, gold="spam"))
    for i in range(n_ham):
        out.append(make_tweet(" ".join(rng.choice(ham_words, 6)), user_id=f"h{i % 8}", followers=300,
                              followees=200, gold="ham"))
    return out


def test_bootstrap_fits_its_seed(lexicons, small_hyper):
    seed = _seed()
    state = bootstrap_state(seed, small_hyper, lexicons)
    assert state.bootstrapped and state.window_id == 0
    acc = np.mean([detect(t, state).label == t.gold_label for t in seed])
    assert acc >= 0.5
    assert set(state.blacklist) == {"promo0.biz", "promo1.biz", "promo2.biz"}


def test_seed_user_with_five_hams_is_trusted(lexicons, small_hyper):
    seed = _seed(10, 0) + [make_tweet(f"morning coffee {i}", user_id="regular", gold="ham") for i in range(5)]
    seed += [make_tweet("one evening walk", user_id="rare", gold="ham")]
    state = bootstrap_state(seed, small_hyper, lexicons)
    assert "regular" in state.trusted_users and "rare" not in state.trusted_users


@pytest.mark.parametrize("seed, err", [
    ([], DegenerateDataError),
    ([make_tweet("a", gold="spam"), make_tweet("b")], DegenerateDataError),
    ([make_tweet("a", gold="spam"), make_tweet("b", gold="spam")], DegenerateDataError),
    ([make_tweet("a", tweet_id="d", gold="spam"), make_tweet("b", tweet_id="d", gold="ham")], DuplicateTweetError),
])
def test_bootstrap_rejects_bad_seed(lexicons, small_hyper, seed, err):
    with pytest.raises(err):
        bootstrap_state(seed, small_hyper, lexicons)

