"""Tweet data model, JSONL reader/writer and tokenization."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from datetime import datetime, timezone
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Iterator

from .errors import DomainError, ParseError, SchemaError

SPAM = "spam"
HAM = "ham"
LABELS = (SPAM, HAM)
MAX_TEXT_CHARS = 280

URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
HASHTAG_RE = re.compile(r"(?<![\w#])#(\w+)")
MENTION_RE = re.compile(r"(?<![\w@])@(\w+)")
_TOKEN_RE = re.compile(r"[#@]?\w+")
_URL_TRAILING = ".,;:!?)]}'\""


@dataclass(frozen=True)
class UserSnapshot:
    user_id: str
    followers: int
    followees: int
    total_tweets: int
    account_created_at: datetime
    description_text: str = ""
    has_profile_url: bool = False
    has_location: bool = False
    has_timezone: bool = False

    @property
    def has_description(self) -> bool:
        return bool(self.description_text.strip())


@dataclass(frozen=True)
class TweetRecord:
    tweet_id: str
    text: str
    created_at: datetime
    user: UserSnapshot
    is_retweet: bool = False
    hashtags: tuple[str, ...] = ()
    urls: tuple[str, ...] = ()
    domains: tuple[str, ...] = ()
    mentions: tuple[str, ...] = ()
    gold_label: str | None = None


def tokenize(text: str) -> list[str]:
    """Lowercase tokens with URLs removed; '#' and '@' prefixes are kept."""
    return _TOKEN_RE.findall(URL_RE.sub(" ", text).lower())


def strip_prefix(token: str) -> str:
    return token[1:] if token[:1] in ("#", "@") else token


def ngrams(tokens, n: int) -> list[str]:
    if n not in (1, 2, 3):
        raise DomainError(f"n-gram order must be 1, 2 or 3, got {n}")
    toks = list(tokens)
    if n == 1:
        return toks
    return [" ".join(toks[i:i + n]) for i in range(len(toks) - n + 1)]


@lru_cache(maxsize=1)
def _extractor():
    import tldextract

    # bundled public-suffix snapshot only; never hits the network
    return tldextract.TLDExtract(suffix_list_urls=(), cache_dir=None)


_HOST_RE = re.compile(r"^(?:[a-z][a-z0-9+.-]*://)?(?:[^@/?#]*@)?([^/?#:]+)", re.IGNORECASE)


def registered_domain(url: str) -> str | None:
    url = url.strip().rstrip(_URL_TRAILING)
    m = _HOST_RE.match(url)
    if not m:
        return None
    return _host_domain(m.group(1).lower())


@lru_cache(maxsize=65536)
def _host_domain(host: str) -> str | None:
    res = _extractor()(host)
    dom = getattr(res, "top_domain_under_public_suffix", None) or res.registered_domain
    if not dom:
        dom = res.domain or None
    return dom.lower() if dom else None


def extract_urls(text: str) -> list[str]:
    return [m.group(0).rstrip(_URL_TRAILING) for m in URL_RE.finditer(text)]


def extract_hashtags(text: str) -> list[str]:
    return [h.lower() for h in HASHTAG_RE.findall(URL_RE.sub(" ", text))]


def extract_mentions(text: str) -> list[str]:
    return [m.lower() for m in MENTION_RE.findall(URL_RE.sub(" ", text))]


def domains_from_urls(urls: Iterable[str]) -> list[str]:
    out: list[str] = []
    for u in urls:
        d = registered_domain(u)
        if d and d not in out:
            out.append(d)
    return out


def parse_timestamp(value, name: str) -> datetime:
    if isinstance(value, datetime):
        ts = value
    elif isinstance(value, str):
        s = value.strip()
        if s.endswith(("Z", "z")):
            s = s[:-1] + "+00:00"
        try:
            ts = datetime.fromisoformat(s)
        except ValueError:
            raise SchemaError(name, f"not an ISO-8601 timestamp: {value!r}") from None
    else:
        raise SchemaError(name, "expected ISO-8601 string")
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def _require(obj: dict, key: str, prefix: str = ""):
    if key not in obj or obj[key] is None:
        raise SchemaError(prefix + key)
    return obj[key]


def _count(obj: dict, key: str, prefix: str) -> int:
    v = _require(obj, key, prefix)
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise SchemaError(prefix + key, "expected non-negative integer")
    return v


def _flag(obj: dict, key: str, prefix: str = "") -> bool:
    v = _require(obj, key, prefix)
    if not isinstance(v, bool):
        raise SchemaError(prefix + key, "expected boolean")
    return v


def _str_list(obj: dict, key: str) -> list[str] | None:
    if key not in obj or obj[key] is None:
        return None
    v = obj[key]
    if not isinstance(v, list) or not all(isinstance(x, str) for x in v):
        raise SchemaError(key, "expected array of strings")
    return v


def _identifier(v, name: str) -> str:
    if isinstance(v, bool) or not isinstance(v, (str, int)):
        raise SchemaError(name, "expected string identifier")
    s = str(v)
    if not s:
        raise SchemaError(name, "empty identifier")
    return s


def record_from_dict(obj: dict) -> TweetRecord:
    if not isinstance(obj, dict):
        raise SchemaError("<record>", "expected JSON object")
    tweet_id = _identifier(_require(obj, "tweet_id"), "tweet_id")
    text = _require(obj, "text")
    if not isinstance(text, str):
        raise SchemaError("text", "expected string")
    if len(text) > MAX_TEXT_CHARS:
        raise SchemaError("text", f"longer than {MAX_TEXT_CHARS} characters")
    created_at = parse_timestamp(_require(obj, "created_at"), "created_at")
    is_retweet = _flag(obj, "is_retweet")

    u = _require(obj, "user")
    if not isinstance(u, dict):
        raise SchemaError("user", "expected object")
    p = "user."
    description = _require(u, "description", p)
    if not isinstance(description, str):
        raise SchemaError("user.description", "expected string")
    user = UserSnapshot(
        user_id=_identifier(_require(u, "user_id", p), "user.user_id"),
        followers=_count(u, "followers", p),
        followees=_count(u, "followees", p),
        total_tweets=_count(u, "total_tweets", p),
        account_created_at=parse_timestamp(_require(u, "created_at", p), "user.created_at"),
        description_text=description,
        has_profile_url=_flag(u, "has_url", p),
        has_location=_flag(u, "has_location", p),
        has_timezone=_flag(u, "has_timezone", p),
    )

    hashtags = _str_list(obj, "hashtags")
    hashtags = [h.lower().lstrip("#") for h in hashtags] if hashtags is not None else extract_hashtags(text)
    urls = _str_list(obj, "urls")
    if urls is None:
        urls = extract_urls(text)
    mentions = _str_list(obj, "mentions")
    mentions = [m.lstrip("@") for m in mentions] if mentions is not None else extract_mentions(text)

    gold = obj.get("gold_label")
    if gold is not None and gold not in LABELS:
        raise SchemaError("gold_label", "expected 'spam' or 'ham'")

    return TweetRecord(
        tweet_id=tweet_id,
        text=text,
        created_at=created_at,
        user=user,
        is_retweet=is_retweet,
        hashtags=tuple(hashtags),
        urls=tuple(urls),
        domains=tuple(domains_from_urls(urls)),
        mentions=tuple(mentions),
        gold_label=gold,
    )


def parse_tweet_line(line: str, line_no: int | None = None) -> TweetRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON ({exc.msg})", line_no) from None
    try:
        return record_from_dict(obj)
    except SchemaError as exc:
        if line_no is None:
            raise
        raise SchemaError(exc.field, exc.message, line_no) from None


def _iso(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).isoformat()


def record_to_dict(t: TweetRecord) -> dict:
    u = t.user
    d = {
        "tweet_id": t.tweet_id,
        "text": t.text,
        "created_at": _iso(t.created_at),
        "is_retweet": t.is_retweet,
        "hashtags": list(t.hashtags),
        "urls": list(t.urls),
        "mentions": list(t.mentions),
        "user": {
            "user_id": u.user_id,
            "followers": u.followers,
            "followees": u.followees,
            "total_tweets": u.total_tweets,
            "created_at": _iso(u.account_created_at),
            "description": u.description_text,
            "has_url": u.has_profile_url,
            "has_location": u.has_location,
            "has_timezone": u.has_timezone,
        },
    }
    if t.gold_label is not None:
        d["gold_label"] = t.gold_label
    return d


def serialize_tweet(t: TweetRecord) -> str:
    return json.dumps(record_to_dict(t), ensure_ascii=False, separators=(",", ":"))


def iter_corpus(path: str | Path) -> Iterator[TweetRecord]:
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh, start=1):
            if line.strip():
                yield parse_tweet_line(line, i)


def read_corpus(path: str | Path) -> list[TweetRecord]:
    return list(iter_corpus(path))


def write_corpus(tweets: Iterable[TweetRecord], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for t in tweets:
            fh.write(serialize_tweet(t))
            fh.write("\n")
    return path
