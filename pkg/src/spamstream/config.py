"""Tunable constants for detection, window updates and training."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import yaml


@dataclass(frozen=True)
class Hyperparams:
    # learned lexicons
    vocab_size: int = 10_000
    char_divisor: float = 140.0
    # window-update thresholds (all inclusive)
    blacklist_min_tweets: int = 5
    blacklist_min_fraction: float = 0.9
    trust_min_ham: int = 5
    cluster_min_size: int = 10
    pending_cluster_ttl: int = 1
    memory_cap: int = 500_000
    # classifiers
    nb_alpha: float = 1.0
    lr_lambda: float = 1e-4
    lr_epochs: int = 200
    lr_rate: float = 0.1
    lr_decay: float = 1.0
    lr_solver: str = "lbfgs"
    rf_trees: int = 100
    rf_depth: int = 20
    rf_max_features: str = "sqrt"
    rf_bootstrap: bool = True
    rf_min_samples_split: int = 2
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.blacklist_min_fraction <= 1.0:
            raise ValueError("blacklist_min_fraction must be in (0, 1]")
        if self.lr_solver not in ("lbfgs", "gd"):
            raise ValueError(f"unknown lr_solver {self.lr_solver!r}")
        for name in ("vocab_size", "blacklist_min_tweets", "trust_min_ham", "cluster_min_size",
                     "memory_cap", "lr_epochs", "rf_trees", "rf_depth"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.pending_cluster_ttl < 0:
            raise ValueError("pending_cluster_ttl must be >= 0")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict | None) -> "Hyperparams":
        d = dict(d or {})
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown hyperparameters: {sorted(unknown)}")
        return cls(**d)

    def with_(self, **kw) -> "Hyperparams":
        return replace(self, **kw)


def load_config_file(path: str | Path | None) -> dict:
    """Read a YAML or JSON mapping; ``None`` gives an empty mapping."""
    if path is None:
        return {}
    p = Path(path)
    text = p.read_text(encoding="utf-8")
    data = json.loads(text) if p.suffix == ".json" else yaml.safe_load(text)
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ValueError(f"{p}: config must be a mapping")
    return data
