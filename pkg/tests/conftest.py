from __future__ import annotations

import itertools
from datetime import datetime, timedelta, timezone

import pytest

from spamstream.batch import bootstrap_state
from spamstream.config import Hyperparams
from spamstream.corpus import record_from_dict
from spamstream.harness.synth import default_config, generate_tweets
from spamstream.lexicon import load_lexicons

T0 = datetime(2024, 3, 4, 12, 0, tzinfo=timezone.utc)  # a Monday
_ids = itertools.count()


def make_tweet(text: str, tweet_id: str | None = None, user_id: str = "u1", when: datetime | None = None,
               followers: int = 100, followees: int = 100, total_tweets: int = 500, age_days: float = 365.0,
               description: str = "", gold: str | None = None, is_retweet: bool = False, **user_flags):
    when = when or T0
    obj = {
        "tweet_id": tweet_id or f"x{next(_ids)}",
        "text": text,
        "created_at": when.isoformat(),
        "is_retweet": is_retweet,
        "user": {
            "user_id": user_id,
            "followers": followers,
            "followees": followees,
            "total_tweets": total_tweets,
            "created_at": (when - timedelta(days=age_days)).isoformat(),
            "description": description,
            "has_url": user_flags.get("has_url", False),
            "has_location": user_flags.get("has_location", False),
            "has_timezone": user_flags.get("has_timezone", False),
        },
    }
    if gold is not None:
        obj["gold_label"] = gold
    return record_from_dict(obj)


@pytest.fixture(scope="session")
def lexicons():
    return load_lexicons()


@pytest.fixture(scope="session")
def small_hyper():
    return Hyperparams(rf_trees=10, rf_depth=12, lr_epochs=100)


@pytest.fixture(scope="session")
def small_corpus():
    """(seed, stream): 1500 seed tweets and 3 windows x 1500, campaign 2 from window 2."""
    cfg = default_config(seed=5, windows=3, tweets_per_window=1500, seed_tweets=1500, drift_window=2)
    return generate_tweets(cfg)


@pytest.fixture(scope="session")
def small_state(small_corpus, small_hyper, lexicons):
    seed, _ = small_corpus
    return bootstrap_state(seed, small_hyper, lexicons)


# criterion number -> "PASS ..." / "FAIL ..." line, filled by test_acceptance.py
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
