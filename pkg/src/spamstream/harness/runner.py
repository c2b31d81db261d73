"""File-level drivers: bootstrap a state directory and replay a corpus against it."""

from __future__ import annotations

import dataclasses
import json
import logging
from pathlib import Path

from ..batch import bootstrap_state
from ..config import Hyperparams, load_config_file
from ..corpus import iter_corpus, read_corpus
from ..errors import NotBootstrappedError
from ..lexicon import load_lexicons
from ..pipeline import ModelState
from .snapshot import MANIFEST, load_snapshot, save_snapshot
from .stream import StreamConfig, WindowResult, simulate, write_windows_csv

log = logging.getLogger(__name__)

ALLOWLIST_FILE = "allowlist_domains.txt"


@dataclasses.dataclass(frozen=True)
class BootstrapConfig:
    """Contents of a bootstrap config file.

    Either a flat mapping of hyperparameters or a mapping with optional
    ``hyperparams``, ``allowlist_file`` and ``resource_dir`` keys. Relative
    paths resolve against the config file's directory.
    """

    hyper: Hyperparams = Hyperparams()
    allowlist_file: Path | None = None
    resource_dir: Path | None = None

    @classmethod
    def from_file(cls, path: str | Path | None) -> "BootstrapConfig":
        raw = load_config_file(path)
        if not raw:
            return cls()
        base = Path(path).parent
        extra = {"hyperparams", "allowlist_file", "resource_dir"}
        if raw.keys() & extra:
            unknown = set(raw) - extra
            if unknown:
                raise ValueError(f"unknown config keys: {sorted(unknown)}")
            hyper = Hyperparams.from_dict(raw.get("hyperparams"))
        else:
            hyper = Hyperparams.from_dict(raw)

        def rel(key):
            v = raw.get(key)
            return None if v is None else (base / v if not Path(v).is_absolute() else Path(v))

        return cls(hyper, rel("allowlist_file"), rel("resource_dir"))


def read_allowlist(path: str | Path | None) -> frozenset[str]:
    """One domain per line; blank lines and ``#`` comments are ignored."""
    if path is None or not Path(path).is_file():
        return frozenset()
    out = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip().lower()
        if line:
            out.add(line)
    return frozenset(out)


def bootstrap(seed_corpus: str | Path, state_dir: str | Path, config: str | Path | None = None,
              allowlist: str | Path | None = None) -> ModelState:
    """Build the window-0 state from a labeled seed corpus and save it to ``state_dir``.

    The allowlist comes from ``allowlist`` if given, else the config file, else
    ``allowlist_domains.txt`` next to the seed corpus when present.
    """
    cfg = BootstrapConfig.from_file(config)
    allow_path = allowlist or cfg.allowlist_file or Path(seed_corpus).parent / ALLOWLIST_FILE
    lexicons = load_lexicons(cfg.resource_dir)
    state = bootstrap_state(read_corpus(seed_corpus), cfg.hyper, lexicons, read_allowlist(allow_path))
    save_snapshot(state, state_dir)
    return state


def load_state(state_dir: str | Path) -> ModelState:
    d = Path(state_dir)
    if not (d / MANIFEST).is_file():
        raise NotBootstrappedError(f"{d} holds no bootstrapped state; run bootstrap first")
    return load_snapshot(d)


def run_stream(cfg: StreamConfig) -> tuple[list[WindowResult], ModelState]:
    """Replay ``cfg.corpus`` against the saved state and write ``windows.csv``.

    Predictions go to ``cfg.predictions_out`` as JSONL when set; the final state
    is saved to ``cfg.save_state_dir`` when set. The state directory itself is
    never modified.
    """
    state = load_state(cfg.state_dir)
    hyper = cfg.hyper or state.hyper
    if cfg.seed is not None:
        hyper = hyper.with_(seed=cfg.seed)
    if hyper != state.hyper:
        state = dataclasses.replace(state, hyper=hyper, cache=None)
    reports = Path(cfg.reports_dir) if cfg.reports_dir is not None else Path(cfg.state_dir) / "reports"

    fh = None
    if cfg.predictions_out is not None:
        Path(cfg.predictions_out).parent.mkdir(parents=True, exist_ok=True)
        fh = open(cfg.predictions_out, "w", encoding="utf-8", newline="\n")

    def write_prediction(lt):
        fh.write(json.dumps({"tweet_id": lt.tweet.tweet_id, "label": lt.label, "detector": lt.detector,
                             "confident": lt.confident}, sort_keys=True))
        fh.write("\n")

    try:
        results, final = simulate(state, iter_corpus(cfg.corpus), cfg.variant, cfg.window_hours,
                                  on_output=write_prediction if fh else None)
    finally:
        if fh is not None:
            fh.close()
    write_windows_csv(results, reports / "windows.csv")
    if cfg.save_state_dir is not None:
        save_snapshot(final, cfg.save_state_dir)
    return results, final


__all__ = ["ALLOWLIST_FILE", "BootstrapConfig", "bootstrap", "load_state", "read_allowlist", "run_stream"]
