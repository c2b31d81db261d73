"""Real-time labeling: four detectors applied in order, first answer wins."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .classifiers import LRModel, NBModel, RFModel
from .classifiers.ensemble import EnsembleVerdict, ensemble_vote
from .config import Hyperparams
from .corpus import HAM, SPAM, TweetRecord, record_to_dict, strip_prefix, tokenize
from .errors import NotBootstrappedError
from .features import AnalysisCache, FeatureExtractor, PopulationStats, TweetAnalysis, analyze
from .lexicon import NgramVocabulary, ResourceLexicons, SpammyWordSet
from .neardup import ClusterStore, Signature, WindowBuffer, lookup, signature_from_grams

BLACKLIST, NEARDUP, RELIABLE_HAM, CLASSIFIER = 1, 2, 3, 4
DETECTOR_NAMES = {BLACKLIST: "blacklist", NEARDUP: "near_duplicate", RELIABLE_HAM: "reliable_ham",
                  CLASSIFIER: "classifier"}
STAGES = ("blacklist", "analysis", "neardup", "reliable_ham", "features", "classify")
MODES = ("full", "nb", "lr", "rf")


@dataclass(frozen=True)
class TrainingMemory:
    """Accumulated confident examples and per-user label history.

    Never mutated in place; window updates build a new instance.
    """

    spam: tuple[TweetRecord, ...] = ()
    ham: tuple[TweetRecord, ...] = ()
    # (member tweets, member labels, cluster label) of every confident cluster
    clusters: tuple[tuple[tuple[TweetRecord, ...], tuple[str, ...], str], ...] = ()
    # user_id -> (confident ham count, spam-labeled count)
    user_history: Mapping[str, tuple[int, int]] = field(default_factory=dict)


@dataclass(frozen=True)
class ModelState:
    """Everything detection reads. Treated as immutable once published."""

    lexicons: ResourceLexicons
    hyper: Hyperparams
    seeds: tuple[int, int, int]
    window_id: int
    schema_version: int
    blacklist: Mapping[str, int]  # domain -> window whose update added it
    trusted_users: frozenset[str]
    spammy_words: SpammyWordSet
    vocab: NgramVocabulary
    stats: PopulationStats
    cluster_store: ClusterStore
    nb: NBModel | None
    lr: LRModel | None
    rf: RFModel | None
    cluster_lr: LRModel | None = None
    allowlist: frozenset[str] = frozenset()
    memory: TrainingMemory = field(default_factory=TrainingMemory)
    cache: AnalysisCache | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        cache = self.cache if self.cache is not None else AnalysisCache(self.lexicons, self.hyper.char_divisor)
        object.__setattr__(self, "cache", cache)
        fx = FeatureExtractor(self.lexicons, self.spammy_words, self.vocab, self.stats, self.schema_version,
                              cache=cache, char_divisor=self.hyper.char_divisor)
        object.__setattr__(self, "extractor", fx)

    @property
    def bootstrapped(self) -> bool:
        return not self.stats.empty and None not in (self.nb, self.lr, self.rf)

    def summary(self) -> dict:
        return {
            "window_id": self.window_id,
            "schema_version": self.schema_version,
            "blacklisted_domains": len(self.blacklist),
            "trusted_users": len(self.trusted_users),
            "confident_clusters": self.cluster_store.labeled_count,
            "pending_clusters": len(self.cluster_store) - self.cluster_store.labeled_count,
            "spammy_words": len(self.spammy_words),
            "vocabulary_size": len(self.vocab),
            "population_size": len(self.stats.users),
            "memory_spam": len(self.memory.spam),
            "memory_ham": len(self.memory.ham),
            "has_cluster_classifier": self.cluster_lr is not None,
        }


@dataclass(frozen=True)
class LabeledTweet:
    tweet: TweetRecord
    label: str
    detector: int
    confident: bool
    ensemble: EnsembleVerdict | None = None
    has_spammy: bool = False
    signature: Signature | None = None
    analysis: TweetAnalysis | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.label not in (SPAM, HAM):
            raise ValueError(f"label must be spam or ham, got {self.label!r}")
        if self.detector not in DETECTOR_NAMES:
            raise ValueError(f"detector must be 1..4, got {self.detector}")
        if self.detector in (BLACKLIST, NEARDUP, RELIABLE_HAM) and not self.confident:
            raise ValueError("detectors 1-3 always produce confident labels")
        if self.detector == BLACKLIST and self.label != SPAM:
            raise ValueError("the blacklist detector only labels spam")
        if self.detector == RELIABLE_HAM and self.label != HAM:
            raise ValueError("the reliable-ham detector only labels ham")

    def to_dict(self) -> dict:
        d = record_to_dict(self.tweet)
        d["label"] = self.label
        d["detector"] = self.detector
        d["confident"] = self.confident
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True)


@dataclass
class DetectProbe:
    """Call counters and cumulative per-stage wall time (ns) across detect calls."""

    calls: list[int] = field(default_factory=lambda: [0, 0, 0, 0])
    hits: list[int] = field(default_factory=lambda: [0, 0, 0, 0])
    stage_ns: dict[str, int] = field(default_factory=lambda: dict.fromkeys(STAGES, 0))
    total_ns: int = 0
    n: int = 0

    def reset(self) -> None:
        self.calls = [0, 0, 0, 0]
        self.hits = [0, 0, 0, 0]
        self.stage_ns = dict.fromkeys(STAGES, 0)
        self.total_ns = 0
        self.n = 0


# ---------------------------------------------------------------- detectors

def blacklist_detect(tweet: TweetRecord, blacklist: Mapping[str, int] | frozenset[str]) -> str | None:
    for d in tweet.domains:
        if d in blacklist:
            return SPAM
    return None


def tweet_signature(analysis: TweetAnalysis, seeds) -> Signature:
    return signature_from_grams(analysis.grams, seeds)


def neardup_detect(tweet: TweetRecord, state: ModelState, buffer: WindowBuffer | None = None,
                   analysis: TweetAnalysis | None = None) -> tuple[str | None, Signature]:
    """Label from a confident cluster sharing the tweet's signature, else buffer the tweet."""
    a = analysis or state.extractor.analyze(tweet)
    sig = tweet_signature(a, state.seeds)
    hit = lookup(sig, state.cluster_store)
    if hit is not None:
        return hit[0], sig
    if buffer is not None:
        buffer.append(tweet, sig)
    return None, sig


def reliable_ham_detect(tweet: TweetRecord, spammy_words: SpammyWordSet, trusted_users: frozenset[str],
                        words: Iterable[str] | None = None) -> str | None:
    """Ham iff the author is trusted and no (prefix-stripped) word is spammy."""
    if tweet.user.user_id not in trusted_users:
        return None
    if words is None:
        words = (strip_prefix(t) for t in tokenize(tweet.text))
    if spammy_words.count_spammy(words):
        return None
    return HAM


def classifier_verdict(state: ModelState, fv) -> EnsembleVerdict:
    s_nb = state.nb.predict_proba_one(fv)
    s_lr = state.lr.predict_proba_one(fv)
    s_rf = state.rf.predict_proba_one(fv)
    lab = [SPAM if s > 0.5 else HAM for s in (s_nb, s_lr, s_rf)]
    return ensemble_vote(lab[0], lab[1], lab[2], (s_nb, s_lr, s_rf))


def _require_bootstrapped(state: ModelState) -> None:
    if state is None or not state.bootstrapped:
        raise NotBootstrappedError("model state is not bootstrapped")


def detect(tweet: TweetRecord, state: ModelState, buffer: WindowBuffer | None = None,
           probe: DetectProbe | None = None, mode: str = "full") -> LabeledTweet:
    """Label one tweet.

    ``mode="full"`` runs blacklist, near-duplicate, reliable-ham and ensemble
    detectors in that order. ``"nb"``, ``"lr"`` and ``"rf"`` label every tweet
    with that single classifier (no confident labels).
    """
    _require_bootstrapped(state)
    if mode != "full":
        return _detect_single(tweet, state, mode, probe)
    clock = time.perf_counter_ns
    t0 = clock()

    if probe is not None:
        probe.calls[0] += 1
    if blacklist_detect(tweet, state.blacklist) is not None:
        out = LabeledTweet(tweet, SPAM, BLACKLIST, True)
        if probe is not None:
            t1 = clock()
            probe.stage_ns["blacklist"] += t1 - t0
            _finish(probe, BLACKLIST, t1 - t0)
        return out
    t1 = clock()

    a = _analyze(state, tweet)
    t2 = clock()
    if probe is not None:
        probe.calls[1] += 1
    label, sig = neardup_detect(tweet, state, buffer, a)
    t3 = clock()
    spammy = state.spammy_words.count_spammy(a.words) > 0
    if label is not None:
        out = LabeledTweet(tweet, label, NEARDUP, True, has_spammy=spammy, signature=sig, analysis=a)
        if probe is not None:
            _stages(probe, blacklist=t1 - t0, analysis=t2 - t1, neardup=t3 - t2)
            _finish(probe, NEARDUP, t3 - t0)
        return out

    if probe is not None:
        probe.calls[2] += 1
    if tweet.user.user_id in state.trusted_users and not spammy:
        t4 = clock()
        out = LabeledTweet(tweet, HAM, RELIABLE_HAM, True, has_spammy=False, signature=sig, analysis=a)
        if probe is not None:
            _stages(probe, blacklist=t1 - t0, analysis=t2 - t1, neardup=t3 - t2, reliable_ham=t4 - t3)
            _finish(probe, RELIABLE_HAM, t4 - t0)
        return out
    t4 = clock()

    if probe is not None:
        probe.calls[3] += 1
    fv = state.extractor.tweet_vector(tweet, a)
    t5 = clock()
    verdict = classifier_verdict(state, fv)
    confident = verdict.unanimous and (verdict.label == SPAM or not spammy)
    out = LabeledTweet(tweet, verdict.label, CLASSIFIER, confident, ensemble=verdict, has_spammy=spammy,
                       signature=sig, analysis=a)
    if probe is not None:
        t6 = clock()
        _stages(probe, blacklist=t1 - t0, analysis=t2 - t1, neardup=t3 - t2, reliable_ham=t4 - t3,
                features=t5 - t4, classify=t6 - t5)
        _finish(probe, CLASSIFIER, t6 - t0)
    return out


def _analyze(state: ModelState, tweet: TweetRecord) -> TweetAnalysis:
    # the hot path does not grow the shared cache; window updates seed it from LabeledTweet.analysis
    return analyze(tweet, state.lexicons, state.hyper.char_divisor)


def _stages(probe: DetectProbe, **ns) -> None:
    for k, v in ns.items():
        probe.stage_ns[k] += v


def _finish(probe: DetectProbe, detector: int, total: int) -> None:
    probe.hits[detector - 1] += 1
    probe.total_ns += total
    probe.n += 1


def _detect_single(tweet: TweetRecord, state: ModelState, mode: str, probe: DetectProbe | None) -> LabeledTweet:
    if mode not in MODES:
        raise ValueError(f"unknown detection mode {mode!r}")
    t0 = time.perf_counter_ns()
    a = _analyze(state, tweet)
    t1 = time.perf_counter_ns()
    fv = state.extractor.tweet_vector(tweet, a)
    t2 = time.perf_counter_ns()
    score = getattr(state, mode).predict_proba_one(fv)
    out = LabeledTweet(tweet, SPAM if score > 0.5 else HAM, CLASSIFIER, False,
                       has_spammy=state.spammy_words.count_spammy(a.words) > 0, analysis=a)
    if probe is not None:
        t3 = time.perf_counter_ns()
        probe.calls[3] += 1
        _stages(probe, analysis=t1 - t0, features=t2 - t1, classify=t3 - t2)
        _finish(probe, CLASSIFIER, t3 - t0)
    return out


def detect_many(tweets: Iterable[TweetRecord], state: ModelState, buffer: WindowBuffer | None = None,
                probe: DetectProbe | None = None, mode: str = "full") -> list[LabeledTweet]:
    return [detect(t, state, buffer, probe, mode) for t in tweets]
