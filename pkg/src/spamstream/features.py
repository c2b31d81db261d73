"""Tweet- and cluster-level feature vectors with percentile-normalized user stats."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .corpus import HASHTAG_RE, SPAM, URL_RE, TweetRecord, UserSnapshot, ngrams, strip_prefix, tokenize
from .errors import DomainError, NotBootstrappedError
from .lexicon import NgramVocabulary, ResourceLexicons, SpammyWordSet

DEFAULT_CHAR_DIVISOR = 140
CAPITALIZED_FRACTION = 0.5
LOW_PERCENTILE = 0.05
HIGH_PERCENTILE = 0.5
MONEY_CHARS = frozenset("$€£¥₹")
DAYS = ("mon", "tue", "wed", "thu", "fri", "sat", "sun")

TWEET_DENSE = (
    ("has_hashtag", "hashtag"),
    ("more_than_2_hashtags", "hashtag"),
    ("has_spammy_hashtag", "hashtag"),
    ("has_categorical_hashtag", "hashtag"),
    ("has_capitalized_hashtag", "hashtag"),
    ("frac_spammy_words", "content"),
    ("has_question_mark", "content"),
    ("has_money_sign", "content"),
    ("has_exclamation", "content"),
    ("has_positive_emoticon", "content"),
    ("has_negative_emoticon", "content"),
    ("has_positive_word", "content"),
    ("has_negative_word", "content"),
    ("frac_uppercase", "content"),
    ("has_url", "content"),
    ("is_retweet", "content"),
    ("has_mention", "content"),
    ("has_first_person", "content"),
    ("has_second_person", "content"),
    ("has_third_person", "content"),
    ("norm_len_words", "content"),
    ("norm_len_chars", "content"),
    *((f"dow_{d}", "content") for d in DAYS),
    ("followers_below_p5", "user"),
    ("followees_below_p5", "user"),
    ("total_tweets_above_p50", "user"),
    ("pct_followers", "user"),
    ("pct_followees", "user"),
    ("pct_total_tweets", "user"),
    ("has_description", "user"),
    ("description_has_spammy", "user"),
    ("has_profile_url", "user"),
    ("has_location", "user"),
    ("has_timezone", "user"),
    ("followers_gt_followees", "user"),
    ("followers_ratio", "user"),
    ("normalized_age", "user"),
    ("url_top100", "domain"),
    ("url_top1000", "domain"),
    ("url_top10000", "domain"),
)

CLUSTER_DENSE = (
    ("fot_hashtag", "hashtag"),
    ("fot_more_than_2_hashtags", "hashtag"),
    ("hashtags_per_tweet", "hashtag"),
    ("fot_spammy_hashtag", "hashtag"),
    ("fot_categorical_hashtag", "hashtag"),
    ("fot_capitalized_hashtag", "hashtag"),
    ("fot_spammy_words", "content"),
    ("fot_question_mark", "content"),
    ("fot_exclamation", "content"),
    ("fot_money_sign", "content"),
    ("fot_positive_emoticon", "content"),
    ("fot_negative_emoticon", "content"),
    ("fot_positive_words", "content"),
    ("fot_negative_words", "content"),
    ("frac_capitalized_tweets", "content"),
    ("fot_retweet", "content"),
    ("fot_url", "content"),
    ("mentions_per_tweet", "content"),
    ("fot_first_person", "content"),
    ("fot_second_person", "content"),
    ("fot_third_person", "content"),
    ("median_len_words", "content"),
    ("median_len_chars", "content"),
    ("spam_ratio", "content"),
    ("fou_followers_below_p5", "user"),
    ("fou_followees_below_p5", "user"),
    ("fou_total_tweets_above_p50", "user"),
    ("median_pct_followers", "user"),
    ("median_pct_followees", "user"),
    ("median_pct_total_tweets", "user"),
    ("fou_description", "user"),
    ("fou_description_spammy", "user"),
    ("fou_profile_url", "user"),
    ("fou_location", "user"),
    ("fou_timezone", "user"),
    ("fou_followers_gt_followees", "user"),
    ("median_normalized_age", "user"),
    ("frac_by_dominating_user", "user"),
    ("dominating_pct_followers", "user"),
    ("dominating_pct_followees", "user"),
    ("dominating_pct_total_tweets", "user"),
    ("tweets_per_user", "user"),
    ("std_normalized_age", "user"),
    ("most_followed_pct_followers", "user"),
    ("most_followed_pct_followees", "user"),
    ("most_followed_pct_total_tweets", "user"),
    ("fot_top100", "domain"),
    ("fot_top1000", "domain"),
    ("fot_top10000", "domain"),
)

TWEET_NAMES = tuple(n for n, _ in TWEET_DENSE)
CLUSTER_NAMES = tuple(n for n, _ in CLUSTER_DENSE)
T = {n: i for i, n in enumerate(TWEET_NAMES)}
C = {n: i for i, n in enumerate(CLUSTER_NAMES)}
N_TWEET_DENSE = len(TWEET_NAMES)
N_CLUSTER_DENSE = len(CLUSTER_NAMES)


# ---------------------------------------------------------------- population stats

@dataclass(frozen=True)
class PopulationStats:
    """Observed user population; percentiles are empirical CDF values."""

    users: dict[str, tuple[int, int, int]] = field(default_factory=dict)
    max_age_days: float = 0.0
    max_words: int = 0

    def __post_init__(self):
        vals = np.array(list(self.users.values()), dtype=np.float64).reshape(-1, 3)
        cols = tuple(np.sort(vals[:, i]) for i in range(3))
        object.__setattr__(self, "_sorted", cols)

    @property
    def empty(self) -> bool:
        return not self.users

    @property
    def followers(self) -> np.ndarray:
        return self._sorted[0]  # type: ignore[attr-defined]

    @property
    def followees(self) -> np.ndarray:
        return self._sorted[1]  # type: ignore[attr-defined]

    @property
    def total_tweets(self) -> np.ndarray:
        return self._sorted[2]  # type: ignore[attr-defined]

    def percentile(self, kind: str, x):
        """Fraction of the population with value <= x."""
        arr = {"followers": self.followers, "followees": self.followees, "total_tweets": self.total_tweets}[kind]
        if arr.size == 0:
            raise NotBootstrappedError("population statistics are empty")
        r = np.searchsorted(arr, x, side="right") / arr.size
        return float(r) if np.ndim(r) == 0 else r


def account_age_days(tweet: TweetRecord) -> float:
    return max(0.0, (tweet.created_at - tweet.user.account_created_at).total_seconds() / 86400.0)


def update_population_stats(users: Iterable[UserSnapshot], stats: PopulationStats | None = None,
                            tweets: Iterable[TweetRecord] = (), word_counts: Iterable[int] | None = None) -> PopulationStats:
    stats = stats or PopulationStats()
    users = list(users)
    tweets = list(tweets)
    if not users and not tweets:
        return stats
    pop = dict(stats.users)
    for u in users:
        pop[u.user_id] = (u.followers, u.followees, u.total_tweets)
    for t in tweets:
        pop[t.user.user_id] = (t.user.followers, t.user.followees, t.user.total_tweets)
    max_age = stats.max_age_days
    if tweets:
        max_age = max(max_age, max(account_age_days(t) for t in tweets))
    if word_counts is None:
        word_counts = (len(tokenize(t.text)) for t in tweets)
    max_words = max([stats.max_words, *word_counts])
    return PopulationStats(pop, max_age, max_words)


# ---------------------------------------------------------------- per-tweet analysis

def _intern_all(items) -> tuple[str, ...]:
    return tuple(sys.intern(s) for s in dict.fromkeys(items))


def upper_fraction(text: str) -> float:
    letters = [c for c in text if c.isalpha()]
    if not letters:
        return 0.0
    return sum(1 for c in letters if c.isupper()) / len(letters)


@dataclass(slots=True)
class TweetAnalysis:
    """Window-independent facts about a tweet, computed once and cached."""

    tweet: TweetRecord
    tokens: tuple[str, ...]
    words: tuple[str, ...]
    grams: tuple[tuple[str, ...], tuple[str, ...], tuple[str, ...]]
    static: np.ndarray
    desc_words: tuple[str, ...]
    age_days: float
    capitalized: bool


def analyze(tweet: TweetRecord, lexicons: ResourceLexicons, char_divisor: float = DEFAULT_CHAR_DIVISOR) -> TweetAnalysis:
    tokens = tuple(tokenize(tweet.text))
    words = tuple(strip_prefix(t) for t in tokens)
    grams = (_intern_all(tokens), _intern_all(ngrams(tokens, 2)), _intern_all(ngrams(tokens, 3)))
    bare = URL_RE.sub(" ", tweet.text)
    lowered = bare.lower()
    word_set = set(words)
    user = tweet.user

    v = np.zeros(N_TWEET_DENSE)
    tags = tweet.hashtags
    v[T["has_hashtag"]] = bool(tags)
    v[T["more_than_2_hashtags"]] = len(tags) > 2
    v[T["has_categorical_hashtag"]] = any(h in lexicons.categorical_words for h in tags)
    v[T["has_capitalized_hashtag"]] = any(
        any(c.isalpha() for c in h) and upper_fraction(h) >= CAPITALIZED_FRACTION for h in HASHTAG_RE.findall(bare))
    v[T["has_question_mark"]] = "?" in bare
    v[T["has_money_sign"]] = any(c in MONEY_CHARS for c in bare)
    v[T["has_exclamation"]] = "!" in bare
    v[T["has_positive_emoticon"]] = lexicons.has_positive_emoticon(lowered)
    v[T["has_negative_emoticon"]] = lexicons.has_negative_emoticon(lowered)
    v[T["has_positive_word"]] = not word_set.isdisjoint(lexicons.positive_words)
    v[T["has_negative_word"]] = not word_set.isdisjoint(lexicons.negative_words)
    up = upper_fraction(bare)
    v[T["frac_uppercase"]] = up
    v[T["has_url"]] = bool(tweet.urls or tweet.domains)
    v[T["is_retweet"]] = tweet.is_retweet
    v[T["has_mention"]] = bool(tweet.mentions)
    v[T["has_first_person"]] = not word_set.isdisjoint(lexicons.first_person)
    v[T["has_second_person"]] = not word_set.isdisjoint(lexicons.second_person)
    v[T["has_third_person"]] = not word_set.isdisjoint(lexicons.third_person)
    v[T["norm_len_chars"]] = min(1.0, len(tweet.text) / char_divisor)
    v[T["dow_mon"] + tweet.created_at.weekday()] = 1.0
    v[T["has_description"]] = user.has_description
    v[T["has_profile_url"]] = user.has_profile_url
    v[T["has_location"]] = user.has_location
    v[T["has_timezone"]] = user.has_timezone
    v[T["followers_gt_followees"]] = user.followers > user.followees
    tot = user.followers + user.followees
    v[T["followers_ratio"]] = user.followers / tot if tot else 0.5
    ranks = [r for r in (lexicons.domain_rank(d) for d in tweet.domains) if r is not None]
    best = min(ranks) if ranks else None
    v[T["url_top100"]] = best is not None and best <= 100
    v[T["url_top1000"]] = best is not None and best <= 1000
    v[T["url_top10000"]] = best is not None and best <= 10000

    desc = tuple(strip_prefix(t) for t in tokenize(user.description_text)) if user.description_text else ()
    return TweetAnalysis(
        tweet=tweet,
        tokens=tokens,
        words=words,
        grams=grams,
        static=v,
        desc_words=desc,
        age_days=account_age_days(tweet),
        capitalized=up >= CAPITALIZED_FRACTION and any(c.isalpha() for c in bare),
    )


class AnalysisCache:
    """tweet_id -> TweetAnalysis, tied to one lexicon set."""

    def __init__(self, lexicons: ResourceLexicons, char_divisor: float = DEFAULT_CHAR_DIVISOR):
        self.lexicons = lexicons
        self.char_divisor = char_divisor
        self._d: dict[str, TweetAnalysis] = {}

    def __len__(self) -> int:
        return len(self._d)

    def get(self, tweet: TweetRecord) -> TweetAnalysis:
        a = self._d.get(tweet.tweet_id)
        if a is not None and (a.tweet is tweet or a.tweet == tweet):
            return a
        a = analyze(tweet, self.lexicons, self.char_divisor)
        self._d[tweet.tweet_id] = a
        return a

    def retain(self, tweet_ids: Iterable[str]) -> None:
        keep = set(tweet_ids)
        self._d = {k: v for k, v in self._d.items() if k in keep}


# ---------------------------------------------------------------- schema & vectors

@dataclass(frozen=True)
class FeatureSchema:
    kind: str  # "tweet" | "cluster"
    vocab: NgramVocabulary
    version: int

    @property
    def dense_names(self) -> tuple[str, ...]:
        return TWEET_NAMES if self.kind == "tweet" else CLUSTER_NAMES

    @property
    def n_dense(self) -> int:
        return len(self.dense_names)

    @property
    def dimension(self) -> int:
        return self.n_dense + len(self.vocab)

    def names(self) -> list[str]:
        return list(self.dense_names) + [f"ngram:{g}" for g in self.vocab.names()]

    def rows(self) -> list[tuple[int, str, str]]:
        blocks = dict(TWEET_DENSE if self.kind == "tweet" else CLUSTER_DENSE)
        out = [(i, n, blocks[n]) for i, n in enumerate(self.dense_names)]
        for j, g in enumerate(self.vocab.names()):
            out.append((self.n_dense + j, f"ngram:{g}", f"vocab{self.vocab.order_of(j)}"))
        return out


@dataclass(frozen=True)
class FeatureVector:
    dense: np.ndarray
    sparse: np.ndarray  # sorted vocabulary indices with value 1
    schema_version: int
    kind: str = "tweet"

    @property
    def n_dense(self) -> int:
        return self.dense.shape[0]

    def to_dense(self, vocab_size: int) -> np.ndarray:
        out = np.zeros(self.n_dense + vocab_size)
        out[: self.n_dense] = self.dense
        out[self.n_dense + self.sparse] = 1.0
        return out


def vocab_indices(grams, vocab: NgramVocabulary) -> np.ndarray:
    index = vocab.index
    idx = {index[g] for order in grams for g in order if g in index}
    return np.array(sorted(idx), dtype=np.int64)


def _fill_dynamic(v: np.ndarray, a: TweetAnalysis, spammy: SpammyWordSet, stats: PopulationStats,
                  pct: tuple[float, float, float]) -> None:
    ws = spammy.words
    v[T["has_spammy_hashtag"]] = any(h in ws for h in a.tweet.hashtags)
    n = len(a.words)
    v[T["frac_spammy_words"]] = sum(1 for w in a.words if w in ws) / n if n else 0.0
    v[T["norm_len_words"]] = min(1.0, n / stats.max_words) if stats.max_words else 0.0
    pf, pe, pt = pct
    v[T["followers_below_p5"]] = pf < LOW_PERCENTILE
    v[T["followees_below_p5"]] = pe < LOW_PERCENTILE
    v[T["total_tweets_above_p50"]] = pt > HIGH_PERCENTILE
    v[T["pct_followers"]] = pf
    v[T["pct_followees"]] = pe
    v[T["pct_total_tweets"]] = pt
    v[T["description_has_spammy"]] = any(w in ws for w in a.desc_words)
    v[T["normalized_age"]] = min(1.0, a.age_days / stats.max_age_days) if stats.max_age_days > 0 else 0.0


class FeatureExtractor:
    """Bundles one window's lexicons, vocabulary and population statistics."""

    def __init__(self, lexicons: ResourceLexicons, spammy_words: SpammyWordSet, vocab: NgramVocabulary,
                 stats: PopulationStats, schema_version: int, cache: AnalysisCache | None = None,
                 char_divisor: float = DEFAULT_CHAR_DIVISOR):
        self.lexicons = lexicons
        self.spammy_words = spammy_words
        self.vocab = vocab
        self.stats = stats
        self.schema_version = schema_version
        self.char_divisor = char_divisor
        self.cache = cache if cache is not None else AnalysisCache(lexicons, char_divisor)

    def analyze(self, tweet: TweetRecord) -> TweetAnalysis:
        return self.cache.get(tweet)

    def _check(self):
        if self.stats.empty:
            raise NotBootstrappedError("population statistics are empty; bootstrap first")

    def _percentiles(self, u: UserSnapshot) -> tuple[float, float, float]:
        s = self.stats
        return (s.percentile("followers", u.followers), s.percentile("followees", u.followees),
                s.percentile("total_tweets", u.total_tweets))

    def tweet_dense(self, a: TweetAnalysis) -> np.ndarray:
        v = a.static.copy()
        _fill_dynamic(v, a, self.spammy_words, self.stats, self._percentiles(a.tweet.user))
        return v

    def tweet_vector(self, tweet: TweetRecord, analysis: TweetAnalysis | None = None) -> FeatureVector:
        self._check()
        a = analysis or self.analyze(tweet)
        return FeatureVector(self.tweet_dense(a), vocab_indices(a.grams, self.vocab), self.schema_version, "tweet")

    def tweet_matrix(self, tweets: Sequence[TweetRecord]) -> tuple[np.ndarray, sp.csr_matrix]:
        self._check()
        analyses = [self.analyze(t) for t in tweets]
        n = len(analyses)
        dense = np.empty((n, N_TWEET_DENSE))
        if n:
            dense[:] = np.stack([a.static for a in analyses])
            s = self.stats
            pf = s.percentile("followers", np.array([a.tweet.user.followers for a in analyses], dtype=np.float64))
            pe = s.percentile("followees", np.array([a.tweet.user.followees for a in analyses], dtype=np.float64))
            pt = s.percentile("total_tweets", np.array([a.tweet.user.total_tweets for a in analyses], dtype=np.float64))
            for i, a in enumerate(analyses):
                _fill_dynamic(dense[i], a, self.spammy_words, s, (pf[i], pe[i], pt[i]))
        return dense, self._csr([a.grams for a in analyses])

    def _csr(self, gram_lists) -> sp.csr_matrix:
        index = self.vocab.index
        indptr = [0]
        indices: list[int] = []
        for grams in gram_lists:
            row = sorted({index[g] for order in grams for g in order if g in index})
            indices.extend(row)
            indptr.append(len(indices))
        n = len(indptr) - 1
        return sp.csr_matrix(
            (np.ones(len(indices)), np.array(indices, dtype=np.int64), np.array(indptr, dtype=np.int64)),
            shape=(n, len(self.vocab)),
        )

    # ------------------------------------------------------------ clusters

    def cluster_dense(self, tweets: Sequence[TweetRecord], labels: Sequence[str]) -> tuple[np.ndarray, set[int]]:
        if not tweets:
            raise DomainError("cluster features need at least one member tweet")
        if len(labels) != len(tweets):
            raise ValueError("one label per member tweet is required")
        self._check()
        analyses = [self.analyze(t) for t in tweets]
        rows = np.stack([self.tweet_dense(a) for a in analyses])
        n = len(analyses)
        ws = self.spammy_words.words
        v = np.zeros(N_CLUSTER_DENSE)

        def fot(name):
            return float(rows[:, T[name]].mean())

        v[C["fot_hashtag"]] = fot("has_hashtag")
        v[C["fot_more_than_2_hashtags"]] = fot("more_than_2_hashtags")
        r = sum(len(a.tweet.hashtags) for a in analyses) / n
        v[C["hashtags_per_tweet"]] = r / (1.0 + r)
        v[C["fot_spammy_hashtag"]] = fot("has_spammy_hashtag")
        v[C["fot_categorical_hashtag"]] = fot("has_categorical_hashtag")
        v[C["fot_capitalized_hashtag"]] = fot("has_capitalized_hashtag")
        v[C["fot_spammy_words"]] = sum(1 for a in analyses if any(w in ws for w in a.words)) / n
        v[C["fot_question_mark"]] = fot("has_question_mark")
        v[C["fot_exclamation"]] = fot("has_exclamation")
        v[C["fot_money_sign"]] = fot("has_money_sign")
        v[C["fot_positive_emoticon"]] = fot("has_positive_emoticon")
        v[C["fot_negative_emoticon"]] = fot("has_negative_emoticon")
        v[C["fot_positive_words"]] = fot("has_positive_word")
        v[C["fot_negative_words"]] = fot("has_negative_word")
        v[C["frac_capitalized_tweets"]] = sum(1 for a in analyses if a.capitalized) / n
        v[C["fot_retweet"]] = fot("is_retweet")
        v[C["fot_url"]] = fot("has_url")
        r = sum(len(a.tweet.mentions) for a in analyses) / n
        v[C["mentions_per_tweet"]] = r / (1.0 + r)
        v[C["fot_first_person"]] = fot("has_first_person")
        v[C["fot_second_person"]] = fot("has_second_person")
        v[C["fot_third_person"]] = fot("has_third_person")
        v[C["median_len_words"]] = float(np.median(rows[:, T["norm_len_words"]]))
        v[C["median_len_chars"]] = float(np.median(rows[:, T["norm_len_chars"]]))
        v[C["spam_ratio"]] = sum(1 for lab in labels if lab == SPAM) / n

        # users: first appearance in the cluster represents the user
        first: dict[str, int] = {}
        counts: dict[str, int] = {}
        for i, a in enumerate(analyses):
            uid = a.tweet.user.user_id
            first.setdefault(uid, i)
            counts[uid] = counts.get(uid, 0) + 1
        urows = rows[list(first.values())]
        m = len(first)

        def fou(name):
            return float(urows[:, T[name]].mean())

        v[C["fou_followers_below_p5"]] = fou("followers_below_p5")
        v[C["fou_followees_below_p5"]] = fou("followees_below_p5")
        v[C["fou_total_tweets_above_p50"]] = fou("total_tweets_above_p50")
        v[C["median_pct_followers"]] = float(np.median(urows[:, T["pct_followers"]]))
        v[C["median_pct_followees"]] = float(np.median(urows[:, T["pct_followees"]]))
        v[C["median_pct_total_tweets"]] = float(np.median(urows[:, T["pct_total_tweets"]]))
        v[C["fou_description"]] = fou("has_description")
        v[C["fou_description_spammy"]] = fou("description_has_spammy")
        v[C["fou_profile_url"]] = fou("has_profile_url")
        v[C["fou_location"]] = fou("has_location")
        v[C["fou_timezone"]] = fou("has_timezone")
        v[C["fou_followers_gt_followees"]] = fou("followers_gt_followees")
        ages = urows[:, T["normalized_age"]]
        v[C["median_normalized_age"]] = float(np.median(ages))
        v[C["std_normalized_age"]] = float(np.std(ages))
        dom = min(counts, key=lambda u: (-counts[u], u))
        v[C["frac_by_dominating_user"]] = counts[dom] / n
        drow = rows[first[dom]]
        v[C["dominating_pct_followers"]] = drow[T["pct_followers"]]
        v[C["dominating_pct_followees"]] = drow[T["pct_followees"]]
        v[C["dominating_pct_total_tweets"]] = drow[T["pct_total_tweets"]]
        v[C["tweets_per_user"]] = 1.0 - m / n
        top = min(first, key=lambda u: (-analyses[first[u]].tweet.user.followers, u))
        trow = rows[first[top]]
        v[C["most_followed_pct_followers"]] = trow[T["pct_followers"]]
        v[C["most_followed_pct_followees"]] = trow[T["pct_followees"]]
        v[C["most_followed_pct_total_tweets"]] = trow[T["pct_total_tweets"]]
        v[C["fot_top100"]] = fot("url_top100")
        v[C["fot_top1000"]] = fot("url_top1000")
        v[C["fot_top10000"]] = fot("url_top10000")

        index = self.vocab.index
        present = {index[g] for a in analyses for order in a.grams for g in order if g in index}
        return v, present

    def cluster_vector(self, tweets: Sequence[TweetRecord], labels: Sequence[str]) -> FeatureVector:
        v, present = self.cluster_dense(tweets, labels)
        return FeatureVector(v, np.array(sorted(present), dtype=np.int64), self.schema_version, "cluster")

    def cluster_matrix(self, members: Sequence[tuple[Sequence[TweetRecord], Sequence[str]]]) -> tuple[np.ndarray, sp.csr_matrix]:
        dense = np.zeros((len(members), N_CLUSTER_DENSE))
        indptr = [0]
        indices: list[int] = []
        for i, (tweets, labels) in enumerate(members):
            dense[i], present = self.cluster_dense(tweets, labels)
            indices.extend(sorted(present))
            indptr.append(len(indices))
        csr = sp.csr_matrix(
            (np.ones(len(indices)), np.array(indices, dtype=np.int64), np.array(indptr, dtype=np.int64)),
            shape=(len(members), len(self.vocab)),
        )
        return dense, csr


def tweet_features(tweet: TweetRecord, lexicons: ResourceLexicons, spammy_words: SpammyWordSet,
                   vocab: NgramVocabulary, stats: PopulationStats, schema_version: int = 0,
                   char_divisor: float = DEFAULT_CHAR_DIVISOR) -> FeatureVector:
    fx = FeatureExtractor(lexicons, spammy_words, vocab, stats, schema_version, char_divisor=char_divisor)
    return fx.tweet_vector(tweet)


def cluster_features(cluster, member_tweets: Sequence[TweetRecord], member_labels: Sequence[str],
                     lexicons: ResourceLexicons, spammy_words: SpammyWordSet, vocab: NgramVocabulary,
                     stats: PopulationStats, schema_version: int = 0,
                     char_divisor: float = DEFAULT_CHAR_DIVISOR) -> FeatureVector:
    if cluster is not None and len(cluster) == 0:
        raise DomainError("empty cluster")
    fx = FeatureExtractor(lexicons, spammy_words, vocab, stats, schema_version, char_divisor=char_divisor)
    return fx.cluster_vector(member_tweets, member_labels)
