"""Deterministic synthetic tweet streams with spam campaigns and vocabulary drift."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path

import bisect
import itertools
import math
import random

from ..corpus import (HAM, SPAM, TweetRecord, UserSnapshot, domains_from_urls, extract_hashtags, extract_mentions,
                      extract_urls, write_corpus)

EPOCH = datetime(2024, 1, 1, tzinfo=timezone.utc)

COMMON = ("the a to and i my you is this today just so really with for on at we our it what how "
          "was are have been that there all can will not out about more time good new day").split()

HAM_TOPICS = {
    "sports": "match goal team season coach league score fans stadium win player final league keeper pitch derby".split(),
    "food": "dinner recipe pasta coffee brunch bakery tacos soup spicy kitchen chef pizza salad dessert flavor".split(),
    "music": "album concert guitar song band lyrics playlist vinyl festival drummer chorus melody tour stage".split(),
    "tech": "laptop update code release bug python server cloud phone battery keyboard startup app browser".split(),
    "weather": "rain sunny storm forecast cloudy snow windy humid chilly umbrella breeze thunder drizzle".split(),
    "travel": "flight airport hotel beach museum passport train roadtrip island mountains luggage tourist".split(),
    "movies": "film trailer actor director sequel cinema popcorn screenplay premiere thriller comedy scene".split(),
    "books": "novel chapter author library poetry reading paperback bookstore fiction memoir plot sequel".split(),
    "fitness": "running workout gym yoga marathon stretch cardio squats cycling hiking swim training".split(),
    "family": "kids parents birthday weekend grandma sister brother wedding picnic family holiday cousins".split(),
    "work": "meeting deadline office project manager report email colleagues commute presentation".split(),
    "gaming": "console level quest boss multiplayer controller stream speedrun patch loot arcade".split(),
}
HAM_TAGS = ("sports", "foodie", "music", "tech", "weather", "travel", "movies", "books", "fitness",
            "family", "mondaymotivation", "tbt", "news", "photography", "gaming")
POPULAR_DOMAINS = ("youtube.com", "wikipedia.org", "nytimes.com", "bbc.co.uk", "github.com", "instagram.com",
                   "spotify.com", "imdb.com", "reddit.com", "medium.com", "espn.com", "cnn.com")
POSITIVE = ("great", "love", "happy", "awesome", "amazing", "nice", "excited", "beautiful")
NEGATIVE = ("sad", "tired", "angry", "awful", "bad", "hate", "boring", "worst")
EMOTICONS = (":)", ":-)", ":D", ":(", ";)")

SPAM_FILLER = "now get your here only check link follow see dont miss hurry tap join".split()
SPAM1_WORDS = ("free followers win cash prize click offer deal cheap discount bonus winner money earn "
               "instant guaranteed limited exclusive gift voucher claim viagra loans casino jackpot "
               "followback subscribe retweet promo bargain lottery rich profit income").split()
SPAM1_TAGS = ("free", "win", "followback", "teamfollowback", "giveaway", "cash", "promo")
SPAM1_DOMAINS = ("spamly.biz", "freecashnow.info", "clickprize.net", "winbig4u.com", "promo-deals.xyz")

_SYLLABLES = ("zor ka vel mi tru nex qua lo rin sha dex vo pra lum tek bri os an ex fyn "
              "gal hux ior jen kra mox nul pex quo rav sib tul ux vim wex yor zu").split()


@dataclass
class CampaignSpec:
    name: str
    start_window: int = 1
    end_window: int | None = None
    share: float = 0.35               # fraction of each window's tweets
    vocabulary: list[str] | None = None
    hashtags: list[str] | None = None
    domains: list[str] | None = None
    url_rate: float = 0.9
    duplication_rate: float = 0.3     # fraction of tweets copied verbatim from a template
    n_templates: int = 20
    author_pool: int = 1500
    author_style: str = "throwaway"   # throwaway | established
    cue_rate: float = 0.0             # fraction linking to a domain of an older campaign
    cue_domains: list[str] | None = None
    vocab_rate: float = 0.5           # remaining words come from the spam filler list
    shout_rate: float = 0.3
    exclaim_rate: float = 0.6


@dataclass
class HamSpec:
    users: int = 4000
    prolific_users: int = 250
    prolific_share: float = 0.15
    viral_share: float = 0.06
    viral_texts_per_window: int = 8
    url_rate: float = 0.25
    unranked_url_rate: float = 0.35
    hashtag_rate: float = 0.3


@dataclass
class SyntheticGeneratorConfig:
    windows: int = 15
    tweets_per_window: int = 5000
    seed_tweets: int = 5000
    window_hours: float = 24.0
    seed: int = 42
    ham: HamSpec = field(default_factory=HamSpec)
    campaigns: list[CampaignSpec] = field(default_factory=list)

    def __post_init__(self):
        if isinstance(self.ham, dict):
            self.ham = HamSpec(**self.ham)
        self.campaigns = [CampaignSpec(**c) if isinstance(c, dict) else c for c in self.campaigns]
        if self.windows < 1 or self.tweets_per_window < 1 or self.window_hours <= 0:
            raise ValueError("windows, tweets_per_window and window_hours must be positive")
        total = sum(c.share for c in self.campaigns)
        if total >= 1.0:
            raise ValueError("campaign shares must leave room for ham")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict | None) -> "SyntheticGeneratorConfig":
        return cls(**(d or {}))


def pseudo_words(rng: random.Random, n: int, taken: set[str]) -> list[str]:
    """Fresh vocabulary absent from every built-in list."""
    out: list[str] = []
    while len(out) < n:
        w = "".join(rng.choices(_SYLLABLES, k=rng.randrange(2, 4)))
        if len(w) >= 4 and w not in taken:
            taken.add(w)
            out.append(w)
    return out


def default_config(seed: int = 42, windows: int = 15, tweets_per_window: int = 5000, drift_window: int = 8,
                   seed_tweets: int = 5000) -> SyntheticGeneratorConfig:
    """Campaign 1 throughout; campaign 2 with fresh words and domain from ``drift_window``."""
    rng = random.Random(seed + 7919)
    taken = set(COMMON) | set(SPAM1_WORDS) | set(SPAM_FILLER) | {w for ws in HAM_TOPICS.values() for w in ws}
    c2_words = pseudo_words(rng, 30, taken)
    c2_tags = pseudo_words(rng, 5, taken)
    campaigns = [
        CampaignSpec(name="campaign1", start_window=0, share=0.35),
        CampaignSpec(name="campaign2", start_window=drift_window, share=0.2, vocabulary=c2_words,
                     hashtags=c2_tags, domains=[f"{c2_words[0]}{c2_words[1]}.io"], url_rate=0.85,
                     duplication_rate=0.2, n_templates=60, author_pool=800, author_style="established",
                     cue_rate=0.4, vocab_rate=0.8, shout_rate=0.0, exclaim_rate=0.1),
    ]
    return SyntheticGeneratorConfig(windows=windows, tweets_per_window=tweets_per_window, seed_tweets=seed_tweets,
                                    seed=seed, campaigns=campaigns)


class _Users:
    def __init__(self, rng: random.Random, prefix: str, n: int, style: str):
        self.ids = [f"{prefix}{i:05d}" for i in range(n)]
        self.snap: dict[str, UserSnapshot] = {}
        for uid in self.ids:
            if style == "throwaway":
                followers = rng.randrange(0, 40)
                followees = rng.randrange(300, 2500)
                total = rng.randrange(5, 400)
                age = rng.uniform(1, 40)
                desc = "" if rng.random() < 0.8 else "dm for promo"
                flags = (rng.random() < 0.1, rng.random() < 0.1, rng.random() < 0.2)
            else:
                followers = int(math.exp(rng.gauss(5.8, 1.2)))
                followees = int(math.exp(rng.gauss(5.5, 0.9)))
                total = int(math.exp(rng.gauss(7.5, 1.3)))
                age = rng.uniform(150, 3500)
                desc = "" if rng.random() < 0.25 else "living life one day at a time"
                flags = (rng.random() < 0.6, rng.random() < 0.7, rng.random() < 0.7)
            self.snap[uid] = UserSnapshot(
                user_id=uid, followers=followers, followees=followees, total_tweets=total,
                account_created_at=EPOCH - timedelta(days=age), description_text=desc,
                has_profile_url=bool(flags[0]), has_location=bool(flags[1]), has_timezone=bool(flags[2]))

    def pick(self, rng: random.Random) -> UserSnapshot:
        return self.snap[rng.choice(self.ids)]


class _Generator:
    def __init__(self, cfg: SyntheticGeneratorConfig):
        self.cfg = cfg
        self.rng = random.Random(cfg.seed)
        rng = self.rng
        self.ham_users = _Users(rng, "h", cfg.ham.users, "established")
        self.prolific = _Users(rng, "p", cfg.ham.prolific_users, "established")
        self.blogs = [f"{''.join(rng.choices(_SYLLABLES, k=2))}blog{i}.net" for i in range(300)]
        self.campaign_users = {c.name: _Users(rng, f"{c.name[:1]}{i}x", c.author_pool, c.author_style)
                               for i, c in enumerate(cfg.campaigns)}
        self.templates: dict[str, list[str]] = {}
        for c in cfg.campaigns:
            self.templates[c.name] = [self._spam_text(c) for _ in range(max(1, c.n_templates))]
        self.counter = 0

    # ------------------------------------------------------------ text
    def _words(self, pool, k) -> list[str]:
        return self.rng.choices(pool, k=k)

    def _ham_text(self) -> tuple[str, bool]:
        rng, hs = self.rng, self.cfg.ham
        topic = rng.choice(list(HAM_TOPICS))
        n = rng.randrange(6, 16)
        words = [rng.choice(HAM_TOPICS[topic]) if rng.random() < 0.55 else rng.choice(COMMON)
                 for _ in range(n)]
        if rng.random() < 0.3:
            words.insert(rng.randrange(len(words) + 1), rng.choice(POSITIVE + NEGATIVE))
        text = " ".join(words)
        if rng.random() < 0.5:
            text = text[0].upper() + text[1:]
        if rng.random() < 0.15:
            text += "?"
        elif rng.random() < 0.1:
            text += "!"
        if rng.random() < 0.1:
            text += " " + rng.choice(EMOTICONS)
        if rng.random() < hs.hashtag_rate:
            text += " #" + rng.choice(HAM_TAGS)
        if rng.random() < 0.25:
            text = f"@friend{rng.randrange(500)} " + text
        has_url = rng.random() < hs.url_rate
        if has_url:
            dom = rng.choice(self.blogs) if rng.random() < hs.unranked_url_rate else rng.choice(POPULAR_DOMAINS)
            text += f" https://{dom}/{rng.randrange(10**6):x}"
        return text, False

    def _spam_text(self, c: CampaignSpec) -> str:
        rng = self.rng
        vocab = c.vocabulary or SPAM1_WORDS
        tags = c.hashtags or list(SPAM1_TAGS)
        n = rng.randrange(6, 14)
        words = [rng.choice(vocab) if rng.random() < c.vocab_rate else rng.choice(SPAM_FILLER) for _ in range(n)]
        words = [w.upper() if rng.random() < c.shout_rate else w for w in words]
        text = " ".join(words)
        if rng.random() < c.exclaim_rate:
            text += "!" * rng.randrange(1, 4)
        if c.author_style == "throwaway" and rng.random() < 0.2:
            text = "$" + str(rng.randrange(50, 5000)) + " " + text
        if rng.random() < 0.5:
            text += " #" + rng.choice(tags)
        if rng.random() < 0.3:
            text = f"@user{rng.randrange(5000)} " + text
        return text

    def _spam(self, c: CampaignSpec) -> str:
        rng = self.rng
        if rng.random() < c.duplication_rate:
            tpl = self.templates[c.name]
            text = rng.choice(tpl)
        else:
            text = self._spam_text(c)
        if c.cue_rate and rng.random() < c.cue_rate:
            text += f" http://{rng.choice(c.cue_domains or SPAM1_DOMAINS)}/{rng.randrange(10**6):x}"
        elif rng.random() < c.url_rate:
            doms = c.domains or list(SPAM1_DOMAINS)
            text += f" http://{rng.choice(doms)}/{rng.randrange(10**6):x}"
        return text

    # ------------------------------------------------------------ records
    def _record(self, text: str, when: datetime, user: UserSnapshot, label: str, retweet: bool) -> TweetRecord:
        self.counter += 1
        text = text[:280]
        urls = tuple(extract_urls(text))
        return TweetRecord(
            tweet_id=f"t{self.counter:07d}", text=text, created_at=when, user=user, is_retweet=retweet,
            hashtags=tuple(extract_hashtags(text)), urls=urls, domains=tuple(domains_from_urls(urls)),
            mentions=tuple(extract_mentions(text)), gold_label=label)

    def window(self, w: int, n: int) -> list[TweetRecord]:
        rng, cfg = self.rng, self.cfg
        start = EPOCH + timedelta(hours=cfg.window_hours * w)
        span = cfg.window_hours * 3600.0
        offsets = sorted(rng.uniform(0, span) for _ in range(n))
        active = [c for c in cfg.campaigns if c.start_window <= w and (c.end_window is None or w <= c.end_window)]
        cum = list(itertools.accumulate(c.share for c in active))
        topics = list(HAM_TOPICS.values())
        viral = [" ".join(self._words(rng.choice(topics), 8)) for _ in range(cfg.ham.viral_texts_per_window)]
        out = []
        for off in offsets:
            when = start + timedelta(seconds=float(off))
            u = rng.random()
            k = bisect.bisect_right(cum, u)
            if k < len(active):
                c = active[k]
                out.append(self._record(self._spam(c), when, self.campaign_users[c.name].pick(rng), SPAM, False))
                continue
            r = rng.random()
            if r < cfg.ham.viral_share:
                text = f"RT @celeb{w}: {rng.choice(viral)}"
                out.append(self._record(text, when, self.ham_users.pick(rng), HAM, True))
            elif r < cfg.ham.viral_share + cfg.ham.prolific_share:
                out.append(self._record(self._ham_text()[0], when, self.prolific.pick(rng), HAM, False))
            else:
                out.append(self._record(self._ham_text()[0], when, self.ham_users.pick(rng), HAM, False))
        return out


def generate_tweets(cfg: SyntheticGeneratorConfig) -> tuple[list[TweetRecord], list[TweetRecord]]:
    """(seed tweets of window 0, stream tweets of windows 1..windows)."""
    g = _Generator(cfg)
    seed = g.window(0, cfg.seed_tweets)
    stream: list[TweetRecord] = []
    for w in range(1, cfg.windows + 1):
        stream.extend(g.window(w, cfg.tweets_per_window))
    return seed, stream


def seed_path_for(out: str | Path) -> Path:
    p = Path(out)
    return p.with_name(p.name[: -len(p.suffix)] + ".seed" + p.suffix) if p.suffix else p.with_name(p.name + ".seed")


def generate_synthetic(cfg: SyntheticGeneratorConfig, out: str | Path) -> Path:
    """Write the stream to ``out`` and the labeled seed next to it as ``<stem>.seed.jsonl``."""
    seed, stream = generate_tweets(cfg)
    write_corpus(seed, seed_path_for(out))
    return write_corpus(stream, out)
