"""MinHash signatures and the store of labeled near-duplicate clusters."""

from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass, replace
from typing import Iterable, NamedTuple, Sequence

from .corpus import HAM, SPAM, TweetRecord, ngrams
from .errors import DuplicateTweetError, StaleWindowError

MAX_HASH = (1 << 64) - 1
UNLABELED = "unlabeled"


class Signature(NamedTuple):
    uni_min: int
    bi_min: int
    tri_min: int

    def hex(self) -> str:
        return f"{self.uni_min:016x}{self.bi_min:016x}{self.tri_min:016x}"

    @classmethod
    def from_hex(cls, s: str) -> "Signature":
        if len(s) != 48:
            raise ValueError(f"signature hex must be 48 chars, got {len(s)}")
        return cls(int(s[:16], 16), int(s[16:32], 16), int(s[32:], 16))


_hashers: dict[int, "hashlib._Hash"] = {}


def _keyed(seed: int):
    h = _hashers.get(seed)
    if h is None:
        h = hashlib.blake2b(digest_size=8, key=(seed & MAX_HASH).to_bytes(8, "little"))
        _hashers[seed] = h
    return h


def gram_hash(gram: str, seed: int) -> int:
    """Seeded 64-bit hash of a gram's UTF-8 bytes (keyed BLAKE2b)."""
    h = _keyed(seed).copy()
    h.update(gram.encode("utf-8"))
    return int.from_bytes(h.digest(), "little")


def min_hash(grams: Iterable[str], seed: int) -> int:
    base = _keyed(seed)
    best = MAX_HASH
    for g in grams:
        h = base.copy()
        h.update(g.encode("utf-8"))
        v = int.from_bytes(h.digest(), "little")
        if v < best:
            best = v
    return best


def signature_from_grams(grams: Sequence[Iterable[str]], seeds: Sequence[int]) -> Signature:
    return Signature(min_hash(grams[0], seeds[0]), min_hash(grams[1], seeds[1]), min_hash(grams[2], seeds[2]))


def signature(tokens: Sequence[str], seeds: Sequence[int]) -> Signature:
    if len(seeds) != 3:
        raise ValueError("exactly three seeds are required")
    return signature_from_grams([ngrams(tokens, n) for n in (1, 2, 3)], seeds)


@dataclass(frozen=True)
class Cluster:
    signature: Signature
    tweet_ids: tuple[str, ...]
    label: str = UNLABELED
    confident: bool = False
    created_window: int = 0
    last_window: int = 0

    def __post_init__(self):
        if self.confident and self.label not in (SPAM, HAM):
            raise ValueError("a confident cluster must carry a spam/ham label")

    def __len__(self) -> int:
        return len(self.tweet_ids)


class ClusterStore:
    """Signature-keyed cluster index.

    Confident clusters answer lookups. Unlabeled clusters are kept for a limited
    number of windows together with their member tweets so that later
    near-duplicates can be merged into them.
    """

    def __init__(self, clusters: dict[Signature, Cluster] | None = None,
                 members: dict[str, tuple[TweetRecord, str]] | None = None):
        self._clusters: dict[Signature, Cluster] = dict(clusters or {})
        self.members: dict[str, tuple[TweetRecord, str]] = dict(members or {})

    def __len__(self) -> int:
        return len(self._clusters)

    def __contains__(self, sig) -> bool:
        return sig in self._clusters

    def __iter__(self):
        return iter(self._clusters.values())

    def get(self, sig: Signature) -> Cluster | None:
        return self._clusters.get(sig)

    @property
    def labeled_count(self) -> int:
        return sum(1 for c in self._clusters.values() if c.confident)

    def confident_clusters(self) -> list[Cluster]:
        return [c for c in self._clusters.values() if c.confident]

    def pending_clusters(self) -> list[Cluster]:
        return [c for c in self._clusters.values() if not c.confident]

    def put(self, cluster: Cluster, members: dict[str, tuple[TweetRecord, str]] | None = None) -> None:
        old = self._clusters.get(cluster.signature)
        if old is not None and old.confident:
            raise ValueError("confident clusters are immutable")
        self._clusters[cluster.signature] = cluster
        if cluster.confident:
            for tid in cluster.tweet_ids:
                self.members.pop(tid, None)
        elif members:
            self.members.update(members)

    def discard(self, sig: Signature) -> None:
        c = self._clusters.pop(sig, None)
        if c is not None and not c.confident:
            for tid in c.tweet_ids:
                self.members.pop(tid, None)

    def copy(self) -> "ClusterStore":
        return ClusterStore(self._clusters, self.members)


def lookup(sig: Signature, store: ClusterStore) -> tuple[str, Cluster] | None:
    c = store.get(sig)
    if c is None or not c.confident:
        return None
    return c.label, c


class WindowBuffer:
    """Append-only list of tweets that matched no confident cluster in a window."""

    def __init__(self, window_id: int = 0):
        self.window_id = window_id
        self.closed = False
        self.signatures: dict[str, Signature] = {}
        self.tweets: dict[str, TweetRecord] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self.signatures)

    def append(self, tweet: TweetRecord, sig: Signature) -> None:
        with self._lock:
            if self.closed:
                raise StaleWindowError(f"window {self.window_id} is closed")
            if tweet.tweet_id in self.signatures:
                raise DuplicateTweetError(f"tweet {tweet.tweet_id} already buffered")
            self.signatures[tweet.tweet_id] = sig
            self.tweets[tweet.tweet_id] = tweet

    def close(self) -> None:
        with self._lock:
            self.closed = True


def buffer_unmatched(tweet: TweetRecord, sig: Signature, window_buffer: WindowBuffer) -> WindowBuffer:
    window_buffer.append(tweet, sig)
    return window_buffer


def form_new_clusters(window_buffer: WindowBuffer, store: ClusterStore | None = None,
                      window_id: int | None = None) -> list[Cluster]:
    """Group buffered tweets by signature, merging into pending store clusters.

    Tweets whose signature already belongs to a confident cluster are dropped
    (confident clusters never grow). The store itself is not modified.
    """
    if not window_buffer.closed:
        raise StaleWindowError("window must be closed before clustering")
    wid = window_buffer.window_id if window_id is None else window_id
    groups: dict[Signature, list[str]] = {}
    for tid, sig in window_buffer.signatures.items():
        groups.setdefault(sig, []).append(tid)
    out = []
    for sig, tids in groups.items():
        old = store.get(sig) if store is not None else None
        if old is None:
            out.append(Cluster(sig, tuple(tids), created_window=wid, last_window=wid))
        elif old.confident:
            continue
        else:
            seen = set(old.tweet_ids)
            merged = old.tweet_ids + tuple(t for t in tids if t not in seen)
            out.append(replace(old, tweet_ids=merged, last_window=wid))
    return out
