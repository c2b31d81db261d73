"""Learned lexicons (spammy words, n-gram vocabulary) and static resource lists."""

from __future__ import annotations

import csv
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import ngrams, strip_prefix
from .errors import InsufficientDataError, ResourceError

MIN_SPAMMY_LEN = 3
DEFAULT_VOCAB_SIZE = 10_000

RESOURCE_FILES = (
    "categorical_words.txt",
    "positive_words.txt",
    "negative_words.txt",
    "positive_emoticons.txt",
    "negative_emoticons.txt",
    "pronouns_first.txt",
    "pronouns_second.txt",
    "pronouns_third.txt",
    "ranked_domains.csv",
)


@dataclass(frozen=True)
class SpammyWordSet:
    words: frozenset[str] = frozenset()
    spam_prob: dict[str, float] = field(default_factory=dict)
    ham_prob: dict[str, float] = field(default_factory=dict)

    def __contains__(self, word: str) -> bool:
        return word in self.words

    def __len__(self) -> int:
        return len(self.words)

    def is_spammy(self, token: str) -> bool:
        return strip_prefix(token) in self.words

    def count_spammy(self, words: Iterable[str]) -> int:
        """Number of (prefix-stripped) words that are spammy."""
        ws = self.words
        return sum(1 for w in words if w in ws)

    def contains_spammy(self, tokens: Iterable[str]) -> bool:
        ws = self.words
        return any(strip_prefix(t) in ws for t in tokens)


def _doc_words(doc: Sequence[str]) -> set[str]:
    return {strip_prefix(t) for t in doc}


def compute_spammy_words(spam_docs: Sequence[Sequence[str]], ham_docs: Sequence[Sequence[str]]) -> SpammyWordSet:
    """Words whose document frequency in spam exceeds that in ham.

    Each document is a token sequence; '#'/'@' prefixes are stripped so a hashtag
    and the bare word count as the same word. Words shorter than three characters
    never qualify.
    """
    if not spam_docs or not ham_docs:
        raise InsufficientDataError("spammy-word estimation needs non-empty spam and ham corpora")
    spam_df: Counter[str] = Counter()
    for doc in spam_docs:
        spam_df.update(_doc_words(doc))
    ham_df: Counter[str] = Counter()
    for doc in ham_docs:
        ham_df.update(_doc_words(doc))
    n_s, n_h = len(spam_docs), len(ham_docs)
    words = set()
    ps: dict[str, float] = {}
    ph: dict[str, float] = {}
    for w, c in spam_df.items():
        if len(w) < MIN_SPAMMY_LEN:
            continue
        p_s = c / n_s
        p_h = ham_df.get(w, 0) / n_h
        if p_s > p_h:
            words.add(w)
            ps[w] = p_s
            ph[w] = p_h
    return SpammyWordSet(frozenset(words), ps, ph)


@dataclass(frozen=True)
class NgramVocabulary:
    """Top-k n-grams per order, ordered by document frequency then lexicographically."""

    grams: dict[int, tuple[tuple[str, int], ...]] = field(default_factory=lambda: {1: (), 2: (), 3: ()})
    window_id: int = 0

    def __post_init__(self):
        index: dict[str, int] = {}
        for n in (1, 2, 3):
            for g, _ in self.grams.get(n, ()):
                # the same string cannot be a gram of two different orders
                index[g] = len(index)
        object.__setattr__(self, "_index", index)

    @property
    def index(self) -> dict[str, int]:
        return self._index  # type: ignore[attr-defined]

    def __len__(self) -> int:
        return len(self._index)  # type: ignore[attr-defined]

    def names(self) -> list[str]:
        return [g for n in (1, 2, 3) for g, _ in self.grams.get(n, ())]

    def order_of(self, i: int) -> int:
        for n in (1, 2, 3):
            k = len(self.grams.get(n, ()))
            if i < k:
                return n
            i -= k
        raise IndexError(i)


def top_ngrams(docs: Sequence[Sequence[str]], k: int = DEFAULT_VOCAB_SIZE, window_id: int = 0,
               doc_grams: Sequence[Sequence[Iterable[str]]] | None = None) -> NgramVocabulary:
    """Most frequent uni/bi/tri-grams by document frequency.

    ``doc_grams`` may carry precomputed (uni, bi, tri) gram collections per
    document to skip re-deriving them from ``docs``.
    """
    counters = {1: Counter(), 2: Counter(), 3: Counter()}
    if doc_grams is not None:
        for per_order in doc_grams:
            for n in (1, 2, 3):
                counters[n].update(set(per_order[n - 1]))
    else:
        for doc in docs:
            for n in (1, 2, 3):
                counters[n].update(set(ngrams(doc, n)))
    grams = {}
    for n, c in counters.items():
        ranked = sorted(c.items(), key=lambda kv: (-kv[1], kv[0]))
        grams[n] = tuple(ranked[:k])
    return NgramVocabulary(grams, window_id)


@dataclass(frozen=True)
class ResourceLexicons:
    categorical_words: frozenset[str]
    positive_words: frozenset[str]
    negative_words: frozenset[str]
    positive_emoticons: frozenset[str]
    negative_emoticons: frozenset[str]
    ranked_domains: dict[str, int]
    first_person: frozenset[str] = frozenset()
    second_person: frozenset[str] = frozenset()
    third_person: frozenset[str] = frozenset()
    source_dir: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "_pos_emo_re", _alternation(self.positive_emoticons))
        object.__setattr__(self, "_neg_emo_re", _alternation(self.negative_emoticons))

    def has_positive_emoticon(self, lowered_text: str) -> bool:
        r = self._pos_emo_re  # type: ignore[attr-defined]
        return bool(r and r.search(lowered_text))

    def has_negative_emoticon(self, lowered_text: str) -> bool:
        r = self._neg_emo_re  # type: ignore[attr-defined]
        return bool(r and r.search(lowered_text))

    def domain_rank(self, domain: str) -> int | None:
        return self.ranked_domains.get(domain)


def _alternation(items: Iterable[str]):
    items = sorted(items, key=lambda s: (-len(s), s))
    if not items:
        return None
    return re.compile("|".join(re.escape(s) for s in items))


def _read_list(path: Path) -> frozenset[str]:
    with open(path, encoding="utf-8") as fh:
        return frozenset(line.strip().lower() for line in fh if line.strip())


def _read_ranked(path: Path) -> dict[str, int]:
    out: dict[str, int] = {}
    last = None
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header] != ["rank", "domain"]:
            raise ResourceError(path.name, "expected header 'rank,domain'")
        for row in reader:
            if not row or not "".join(row).strip():
                continue
            try:
                rank = int(row[0])
                dom = row[1].strip().lower()
            except (ValueError, IndexError):
                raise ResourceError(path.name, f"bad row {row!r}") from None
            if last is not None and rank <= last:
                raise ResourceError(path.name, "ranks must be strictly increasing")
            last = rank
            out.setdefault(dom, rank)
    return out


def default_resource_dir() -> Path:
    return Path(str(resources.files("spamstream") / "resources"))


def load_lexicons(resource_dir: str | Path | None = None) -> ResourceLexicons:
    d = Path(resource_dir) if resource_dir is not None else default_resource_dir()
    for name in RESOURCE_FILES:
        if not (d / name).is_file():
            raise ResourceError(name)
    cat = _read_list(d / "categorical_words.txt")
    if not cat:
        raise ResourceError("categorical_words.txt", "empty")
    return ResourceLexicons(
        categorical_words=cat,
        positive_words=_read_list(d / "positive_words.txt"),
        negative_words=_read_list(d / "negative_words.txt"),
        positive_emoticons=_read_list(d / "positive_emoticons.txt"),
        negative_emoticons=_read_list(d / "negative_emoticons.txt"),
        ranked_domains=_read_ranked(d / "ranked_domains.csv"),
        first_person=_read_list(d / "pronouns_first.txt"),
        second_person=_read_list(d / "pronouns_second.txt"),
        third_person=_read_list(d / "pronouns_third.txt"),
        source_dir=str(d),
    )
