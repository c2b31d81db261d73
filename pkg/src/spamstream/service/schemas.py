"""Request and response models for the HTTP service."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field

Label = Literal["spam", "ham"]


class UserIn(BaseModel):
    user_id: str | int
    followers: int = Field(ge=0)
    followees: int = Field(ge=0)
    total_tweets: int = Field(ge=0)
    created_at: str
    description: str = ""
    has_url: bool = False
    has_location: bool = False
    has_timezone: bool = False


class TweetIn(BaseModel):
    """Same shape as one line of a JSONL corpus."""

    tweet_id: str | int
    text: str
    created_at: str
    user: UserIn
    is_retweet: bool = False
    hashtags: list[str] | None = None
    urls: list[str] | None = None
    mentions: list[str] | None = None
    gold_label: Label | None = None


class DetectRequest(BaseModel):
    tweets: list[TweetIn] = Field(min_length=1)
    mode: Literal["full", "nb", "lr", "rf"] = "full"


class Detection(BaseModel):
    tweet_id: str
    label: Label
    detector: int = Field(ge=1, le=4)
    detector_name: str
    confident: bool
    votes: list[Label] | None = None
    scores: list[float] | None = None


class DetectResponse(BaseModel):
    window_id: int
    results: list[Detection]


class StateResponse(BaseModel):
    window_id: int
    schema_version: int
    blacklisted_domains: int
    trusted_users: int
    confident_clusters: int
    pending_clusters: int
    spammy_words: int
    vocabulary_size: int
    population_size: int
    memory_spam: int
    memory_ham: int
    has_cluster_classifier: bool
    buffered_tweets: int
    window_output: int


class WindowCloseResponse(BaseModel):
    window_id: int
    new_domains: list[str]
    new_trusted: int
    revoked_trusted: int
    new_clusters_spam: int
    new_clusters_ham: int
    new_clusters: int
    eligible_clusters: int
    confident_spam: int
    confident_ham: int
    train_spam: int
    train_ham: int
    train_clusters: int
    retrained: bool
    saved: bool = False


class EvaluateRequest(BaseModel):
    predictions: dict[str, Label]
    gold: dict[str, Label]


class EvaluateResponse(BaseModel):
    tp: int
    fp: int
    fn: int
    tn: int
    n: int
    precision: float
    recall: float
    f1: float
    precision_undefined: bool
    recall_undefined: bool


class HealthResponse(BaseModel):
    status: Literal["ok", "not_bootstrapped"]
    version: str
    window_id: int | None = None
