"""Self-updating spam filter for short-text streams."""

from .config import Hyperparams
from .corpus import HAM, SPAM, TweetRecord, UserSnapshot, parse_tweet_line, read_corpus, tokenize
from .pipeline import LabeledTweet, ModelState, detect

__version__ = "0.1.0"

__all__ = [
    "HAM", "SPAM", "Hyperparams", "LabeledTweet", "ModelState", "TweetRecord", "UserSnapshot",
    "detect", "parse_tweet_line", "read_corpus", "tokenize",
]
