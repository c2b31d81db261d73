"""Window-end update: harvest confident output, grow lists, relearn lexicons, retrain."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from .classifiers import Dataset, LRModel, train_cluster_lr, train_lr, train_nb, train_rf
from .config import Hyperparams
from .corpus import HAM, SPAM, TweetRecord
from .errors import DegenerateDataError, DuplicateTweetError, StaleWindowError
from .features import AnalysisCache, FeatureExtractor, analyze, update_population_stats
from .lexicon import NgramVocabulary, SpammyWordSet, compute_spammy_words, top_ngrams
from .neardup import Cluster, ClusterStore, WindowBuffer, form_new_clusters, signature_from_grams
from .pipeline import CLASSIFIER, LabeledTweet, ModelState, TrainingMemory


@dataclass(frozen=True)
class ConfidentSet:
    spam: tuple[LabeledTweet, ...] = ()
    ham: tuple[LabeledTweet, ...] = ()

    def __len__(self) -> int:
        return len(self.spam) + len(self.ham)

    @property
    def spam_ids(self) -> frozenset[str]:
        return frozenset(lt.tweet.tweet_id for lt in self.spam)

    def sources(self) -> dict[str, Counter]:
        return {SPAM: Counter(lt.detector for lt in self.spam), HAM: Counter(lt.detector for lt in self.ham)}


@dataclass(frozen=True)
class ClusterDecision:
    cluster: Cluster
    eligible: bool
    label: str | None
    confident: bool
    lr_label: str | None = None


@dataclass
class WindowUpdateReport:
    window_id: int
    new_domains: list[str] = field(default_factory=list)
    new_trusted: int = 0
    revoked_trusted: int = 0
    new_clusters_spam: int = 0
    new_clusters_ham: int = 0
    eligible_clusters: int = 0
    confident_spam: int = 0
    confident_ham: int = 0
    train_spam: int = 0
    train_ham: int = 0
    train_clusters: int = 0
    retrained: bool = False

    @property
    def new_clusters(self) -> int:
        return self.new_clusters_spam + self.new_clusters_ham

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["new_clusters"] = self.new_clusters
        return d


# ---------------------------------------------------------------- confident harvest

def is_confident(lt: LabeledTweet) -> bool:
    """Replay the confidence rules from the recorded votes rather than trusting the flag."""
    if lt.label == HAM and lt.has_spammy:
        return False
    if lt.detector != CLASSIFIER:
        return lt.confident
    if lt.ensemble is None:
        return False
    votes = lt.ensemble.spam_votes
    return votes == 3 if lt.label == SPAM else votes == 0


def collect_confident(window_output: Iterable[LabeledTweet]) -> ConfidentSet:
    spam, ham = [], []
    for lt in window_output:
        if is_confident(lt):
            (spam if lt.label == SPAM else ham).append(lt)
    return ConfidentSet(tuple(spam), tuple(ham))


# ---------------------------------------------------------------- clusters

def majority_label(labels: Sequence[str]) -> str:
    """Spam only with strictly more spam than ham members."""
    n_spam = sum(1 for x in labels if x == SPAM)
    return SPAM if n_spam > len(labels) - n_spam else HAM


def label_new_clusters(clusters: Sequence[Cluster], cluster_lr: LRModel | None,
                       member_labels: Mapping[str, str], member_tweets: Mapping[str, TweetRecord],
                       extractor: FeatureExtractor, min_size: int = 10) -> list[ClusterDecision]:
    """Vote-label clusters with at least ``min_size`` members; confident when the cluster LR agrees."""
    out = []
    for c in clusters:
        if len(c) < min_size:
            out.append(ClusterDecision(c, False, None, False))
            continue
        labels = [member_labels[t] for t in c.tweet_ids]
        vote = majority_label(labels)
        lr_label = None
        if cluster_lr is not None:
            fv = extractor.cluster_vector([member_tweets[t] for t in c.tweet_ids], labels)
            lr_label = SPAM if cluster_lr.predict_proba_one(fv) > 0.5 else HAM
        out.append(ClusterDecision(c, True, vote, lr_label == vote, lr_label))
    return out


# ---------------------------------------------------------------- blacklist & trust

def domain_counts(tweets: Iterable[TweetRecord], spam_ids: frozenset[str]) -> dict[str, tuple[int, int]]:
    """domain -> (tweets carrying it, of which confidently spam); each tweet counts once per domain."""
    out: dict[str, list[int]] = {}
    for t in tweets:
        for d in set(t.domains):
            c = out.setdefault(d, [0, 0])
            c[0] += 1
            c[1] += t.tweet_id in spam_ids
    return {d: (n, s) for d, (n, s) in out.items()}


def qualifies_for_blacklist(n_tweets: int, n_spam: int, min_tweets: int = 5, min_fraction: float = 0.9) -> bool:
    # integer-safe comparison of n_spam / n_tweets >= min_fraction
    return n_tweets >= min_tweets and n_spam >= min_fraction * n_tweets - 1e-9


def update_blacklist(confident: ConfidentSet, window_output: Iterable[LabeledTweet], blacklist: Mapping[str, int],
                     allowlist: Iterable[str] = (), window_id: int = 0, min_tweets: int = 5,
                     min_fraction: float = 0.9) -> dict[str, int]:
    """Add domains seen in at least ``min_tweets`` window tweets, ``min_fraction`` of them confident spam."""
    allow = frozenset(allowlist)
    counts = domain_counts((lt.tweet for lt in window_output), confident.spam_ids)
    out = dict(blacklist)
    for d in sorted(counts):
        n, s = counts[d]
        if d not in out and d not in allow and qualifies_for_blacklist(n, s, min_tweets, min_fraction):
            out[d] = window_id
    return out


def update_user_history(history: Mapping[str, tuple[int, int]], confident: ConfidentSet,
                        window_output: Iterable[LabeledTweet]) -> dict[str, tuple[int, int]]:
    """Add confident hams and every spam label (confident or not) to the per-user counts."""
    out = dict(history)
    for lt in confident.ham:
        h, s = out.get(lt.tweet.user.user_id, (0, 0))
        out[lt.tweet.user.user_id] = (h + 1, s)
    for lt in window_output:
        if lt.label == SPAM:
            h, s = out.get(lt.tweet.user.user_id, (0, 0))
            out[lt.tweet.user.user_id] = (h, s + 1)
    return out


def trusted_from_history(history: Mapping[str, tuple[int, int]], min_ham: int = 5) -> frozenset[str]:
    return frozenset(u for u, (h, s) in history.items() if h >= min_ham and s == 0)


def update_trusted_users(confident: ConfidentSet, user_history: Mapping[str, tuple[int, int]],
                         trusted: Iterable[str], window_output: Iterable[LabeledTweet] = (),
                         min_ham: int = 5) -> tuple[frozenset[str], dict[str, tuple[int, int]]]:
    """New trusted set and history. Users with any spam label are dropped, even if previously trusted."""
    history = update_user_history(user_history, confident, window_output)
    return trusted_from_history(history, min_ham), history


# ---------------------------------------------------------------- retraining

def _capped(items: Sequence, cap: int) -> tuple:
    return tuple(items[-cap:]) if len(items) > cap else tuple(items)


def train_tweet_models(extractor: FeatureExtractor, spam: Sequence[TweetRecord], ham: Sequence[TweetRecord],
                       hyper: Hyperparams):
    tweets = list(spam) + list(ham)
    dense, sparse = extractor.tweet_matrix(tweets)
    y = np.r_[np.ones(len(spam), dtype=np.int8), np.zeros(len(ham), dtype=np.int8)]
    ds = Dataset(dense, sparse, y, extractor.schema_version)
    nb = train_nb(ds, alpha=hyper.nb_alpha)
    lr = train_lr(ds, lam=hyper.lr_lambda, epochs=hyper.lr_epochs, lr=hyper.lr_rate, decay=hyper.lr_decay,
                  solver=hyper.lr_solver)
    rf = train_rf(ds, n_trees=hyper.rf_trees, max_depth=hyper.rf_depth, seed=hyper.seed,
                  max_features=hyper.rf_max_features, bootstrap=hyper.rf_bootstrap,
                  min_samples_split=hyper.rf_min_samples_split)
    return nb, lr, rf


def train_cluster_model(extractor: FeatureExtractor, examples, hyper: Hyperparams) -> LRModel | None:
    """Cluster LR over stored confident clusters; None unless both classes are present."""
    labels = [lab for _, _, lab in examples]
    if SPAM not in labels or HAM not in labels:
        return None
    dense, sparse = extractor.cluster_matrix([(tw, labs) for tw, labs, _ in examples])
    y = np.array([lab == SPAM for lab in labels], dtype=np.int8)
    ds = Dataset(dense, sparse, y, extractor.schema_version)
    return train_cluster_lr(ds, lam=hyper.lr_lambda, epochs=hyper.lr_epochs, solver=hyper.lr_solver)


def relearn_lexicons(cache: AnalysisCache, spam: Sequence[TweetRecord], ham: Sequence[TweetRecord],
                     vocab_tweets: Sequence[TweetRecord], k: int, window_id: int) -> tuple[SpammyWordSet, NgramVocabulary]:
    spammy = compute_spammy_words([cache.get(t).tokens for t in spam], [cache.get(t).tokens for t in ham])
    vocab = top_ngrams((), k=k, window_id=window_id, doc_grams=[cache.get(t).grams for t in vocab_tweets])
    return spammy, vocab


def _seed_cache(cache: AnalysisCache, output: Iterable[LabeledTweet]) -> None:
    for lt in output:
        if lt.analysis is not None and lt.analysis.tweet is lt.tweet:
            cache._d.setdefault(lt.tweet.tweet_id, lt.analysis)


def _expire_pending(store: ClusterStore, window_id: int, ttl: int) -> None:
    for c in store.pending_clusters():
        if window_id - c.last_window > ttl:
            store.discard(c.signature)


def run_window_update(state: ModelState, window_output: Sequence[LabeledTweet],
                      window_buffer: WindowBuffer) -> tuple[ModelState, WindowUpdateReport]:
    """Build the next state from one closed window. Nothing in ``state`` is modified.

    Order: confident harvest, cluster formation and labeling, blacklist, trusted
    users, spammy words, vocabulary, population statistics, retraining. Any
    exception leaves the caller holding the previous state.
    """
    hyper = state.hyper
    wid = state.window_id + 1
    if window_buffer.window_id != wid:
        raise StaleWindowError(f"buffer belongs to window {window_buffer.window_id}, expected {wid}")
    window_buffer.close()
    report = WindowUpdateReport(window_id=wid)
    cache = state.cache
    _seed_cache(cache, window_output)

    conf = collect_confident(window_output)
    report.confident_spam, report.confident_ham = len(conf.spam), len(conf.ham)

    # near-duplicate clusters
    store = state.cluster_store.copy()
    labels_now = {lt.tweet.tweet_id: lt.label for lt in window_output}
    tweets_now = {lt.tweet.tweet_id: lt.tweet for lt in window_output}
    member_labels = {tid: lab for tid, (_, lab) in store.members.items()}
    member_labels.update(labels_now)
    member_tweets = {tid: tw for tid, (tw, _) in store.members.items()}
    member_tweets.update(tweets_now)
    clusters = form_new_clusters(window_buffer, store, wid)
    decisions = label_new_clusters(clusters, state.cluster_lr, member_labels, member_tweets, state.extractor,
                                   hyper.cluster_min_size)
    new_cluster_examples = []
    for dec in decisions:
        c = dec.cluster
        report.eligible_clusters += dec.eligible
        if dec.confident:
            store.put(replace(c, label=dec.label, confident=True))
            new_cluster_examples.append((tuple(member_tweets[t] for t in c.tweet_ids),
                                         tuple(member_labels[t] for t in c.tweet_ids), dec.label))
            if dec.label == SPAM:
                report.new_clusters_spam += 1
            else:
                report.new_clusters_ham += 1
        else:
            store.put(c, {t: (member_tweets[t], member_labels[t]) for t in c.tweet_ids})
    _expire_pending(store, wid, hyper.pending_cluster_ttl)

    # lists
    blacklist = update_blacklist(conf, window_output, state.blacklist, state.allowlist, wid,
                                 hyper.blacklist_min_tweets, hyper.blacklist_min_fraction)
    report.new_domains = sorted(d for d in blacklist if d not in state.blacklist)
    trusted, history = update_trusted_users(conf, state.memory.user_history, state.trusted_users, window_output,
                                            hyper.trust_min_ham)
    report.new_trusted = len(trusted - state.trusted_users)
    report.revoked_trusted = len(state.trusted_users - trusted)

    # population statistics describe every tweet seen, labeled or not
    window_tweets = [lt.tweet for lt in window_output]
    stats = update_population_stats((), state.stats, tweets=window_tweets,
                                    word_counts=[len(cache.get(t).tokens) for t in window_tweets])

    memory = TrainingMemory(
        spam=_capped(state.memory.spam + tuple(lt.tweet for lt in conf.spam), hyper.memory_cap),
        ham=_capped(state.memory.ham + tuple(lt.tweet for lt in conf.ham), hyper.memory_cap),
        clusters=_capped(state.memory.clusters + tuple(new_cluster_examples), hyper.memory_cap),
        user_history=history,
    )

    if len(conf) == 0 and not new_cluster_examples:
        # nothing new to learn from: keep lexicons, vocabulary and models
        new_state = replace(state, window_id=wid, blacklist=blacklist, trusted_users=trusted, stats=stats,
                            cluster_store=store, memory=memory, cache=cache)
        _retain(cache, new_state)
        report.train_spam, report.train_ham = len(memory.spam), len(memory.ham)
        report.train_clusters = len(memory.clusters)
        return new_state, report

    spammy, vocab = relearn_lexicons(cache, memory.spam, memory.ham, window_tweets, hyper.vocab_size, wid)
    schema_version = state.schema_version + 1
    fx = FeatureExtractor(state.lexicons, spammy, vocab, stats, schema_version, cache=cache,
                          char_divisor=hyper.char_divisor)
    nb, lr, rf = train_tweet_models(fx, memory.spam, memory.ham, hyper)
    cluster_lr = train_cluster_model(fx, memory.clusters, hyper)
    report.train_spam, report.train_ham, report.train_clusters = len(memory.spam), len(memory.ham), len(memory.clusters)
    report.retrained = True

    new_state = ModelState(
        lexicons=state.lexicons, hyper=hyper, seeds=state.seeds, window_id=wid, schema_version=schema_version,
        blacklist=blacklist, trusted_users=trusted, spammy_words=spammy, vocab=vocab, stats=stats,
        cluster_store=store, nb=nb, lr=lr, rf=rf, cluster_lr=cluster_lr, allowlist=state.allowlist,
        memory=memory, cache=cache,
    )
    _retain(cache, new_state)
    return new_state, report


def _retain(cache: AnalysisCache, state: ModelState) -> None:
    """Drop cached analyses no longer needed for future retraining."""
    m = state.memory
    keep = {t.tweet_id for t in m.spam}
    keep.update(t.tweet_id for t in m.ham)
    for tweets, _, _ in m.clusters:
        keep.update(t.tweet_id for t in tweets)
    keep.update(state.cluster_store.members)
    cache.retain(keep)


# ---------------------------------------------------------------- bootstrap

def derive_seeds(seed: int) -> tuple[int, int, int]:
    """Three 64-bit MinHash seeds, one per n-gram order."""
    rng = np.random.default_rng(seed)
    return tuple(int(x) for x in rng.integers(0, 2**63 - 1, size=3, dtype=np.int64))  # type: ignore[return-value]


def bootstrap_state(seed_tweets: Sequence[TweetRecord], hyper: Hyperparams, lexicons,
                    allowlist: Iterable[str] = ()) -> ModelState:
    """Window-0 state from a gold-labeled seed corpus.

    Every seed tweet counts as confidently labeled by its gold label; lists,
    clusters, lexicons and models are then derived with the same rules a
    window update uses.
    """
    if not seed_tweets:
        raise DegenerateDataError("seed corpus is empty")
    missing = [t.tweet_id for t in seed_tweets if t.gold_label not in (SPAM, HAM)]
    if missing:
        raise DegenerateDataError(f"{len(missing)} seed tweets lack a spam/ham gold label (first: {missing[0]})")
    spam = [t for t in seed_tweets if t.gold_label == SPAM]
    ham = [t for t in seed_tweets if t.gold_label == HAM]
    if not spam or not ham:
        raise DegenerateDataError("seed corpus must contain both spam and ham tweets")
    ids = [t.tweet_id for t in seed_tweets]
    if len(set(ids)) != len(ids):
        raise DuplicateTweetError("seed corpus repeats a tweet_id")

    cache = AnalysisCache(lexicons, hyper.char_divisor)
    for t in seed_tweets:
        cache._d[t.tweet_id] = analyze(t, lexicons, hyper.char_divisor)
    seeds = derive_seeds(hyper.seed)
    gold = {t.tweet_id: t.gold_label for t in seed_tweets}
    by_id = {t.tweet_id: t for t in seed_tweets}
    spam_ids = frozenset(t.tweet_id for t in spam)

    blacklist: dict[str, int] = {}
    allow = frozenset(allowlist)
    for d, (n, s) in sorted(domain_counts(seed_tweets, spam_ids).items()):
        if d not in allow and qualifies_for_blacklist(n, s, hyper.blacklist_min_tweets, hyper.blacklist_min_fraction):
            blacklist[d] = 0

    history: dict[str, tuple[int, int]] = {}
    for t in seed_tweets:
        h, s = history.get(t.user.user_id, (0, 0))
        history[t.user.user_id] = (h + (t.gold_label == HAM), s + (t.gold_label == SPAM))
    trusted = trusted_from_history(history, hyper.trust_min_ham)

    stats = update_population_stats((), None, tweets=seed_tweets,
                                    word_counts=[len(cache.get(t).tokens) for t in seed_tweets])
    spammy, vocab = relearn_lexicons(cache, spam, ham, seed_tweets, hyper.vocab_size, 0)
    fx = FeatureExtractor(lexicons, spammy, vocab, stats, 1, cache=cache, char_divisor=hyper.char_divisor)

    # seed clusters: gold majority gives the label; the cluster LR is fit on them and must agree
    groups: dict = {}
    for t in seed_tweets:
        groups.setdefault(signature_from_grams(cache.get(t).grams, seeds), []).append(t.tweet_id)
    eligible = [(sig, tids) for sig, tids in groups.items() if len(tids) >= hyper.cluster_min_size]
    examples = [(tuple(by_id[t] for t in tids), tuple(gold[t] for t in tids),
                 majority_label([gold[t] for t in tids])) for _, tids in eligible]
    cluster_lr = train_cluster_model(fx, examples, hyper)
    store = ClusterStore()
    kept = []
    for (sig, tids), ex in zip(eligible, examples):
        if cluster_lr is None:
            break
        pred = SPAM if cluster_lr.predict_proba_one(fx.cluster_vector(list(ex[0]), list(ex[1]))) > 0.5 else HAM
        if pred == ex[2]:
            store.put(Cluster(sig, tuple(tids), ex[2], True, 0, 0))
            kept.append(ex)

    nb, lr, rf = train_tweet_models(fx, spam, ham, hyper)
    memory = TrainingMemory(spam=_capped(spam, hyper.memory_cap), ham=_capped(ham, hyper.memory_cap),
                            clusters=tuple(kept), user_history=history)
    state = ModelState(
        lexicons=lexicons, hyper=hyper, seeds=seeds, window_id=0, schema_version=1, blacklist=blacklist,
        trusted_users=trusted, spammy_words=spammy, vocab=vocab, stats=stats, cluster_store=store,
        nb=nb, lr=lr, rf=rf, cluster_lr=cluster_lr, allowlist=allow, memory=memory, cache=cache,
    )
    _retain(cache, state)
    return state
