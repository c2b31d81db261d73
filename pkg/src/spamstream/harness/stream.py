"""Timestamp-driven stream simulation with per-window evaluation and updates."""

from __future__ import annotations

import csv
import io
import logging
import math
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable

from ..batch import WindowUpdateReport, run_window_update
from ..config import Hyperparams
from ..corpus import TweetRecord
from ..errors import OrderingError, SpamStreamError, UndefinedMetricsError
from ..neardup import WindowBuffer
from ..pipeline import DetectProbe, LabeledTweet, ModelState, detect
from .evaluate import EvaluationReport, evaluate

log = logging.getLogger(__name__)

VARIANTS = ("full", "no-update", "nb", "lr", "rf")
WINDOWS_CSV_COLUMNS = ("window_id", "precision", "recall", "f1", "cov_d1", "cov_d2", "cov_d3", "cov_d4",
                       "new_domains", "new_trusted", "new_clusters")


@dataclass(frozen=True)
class StreamConfig:
    corpus: Path
    state_dir: Path
    variant: str = "full"
    window_hours: float = 24.0
    seed: int | None = None
    reports_dir: Path | None = None
    predictions_out: Path | None = None
    save_state_dir: Path | None = None
    hyper: Hyperparams | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if not (self.window_hours > 0 and math.isfinite(self.window_hours)):
            raise ValueError("window duration must be positive")

    @property
    def window_seconds(self) -> float:
        return self.window_hours * 3600.0


@dataclass
class WindowResult:
    window_id: int
    n: int
    detector_counts: tuple[int, int, int, int]
    metrics: EvaluationReport | None
    update: WindowUpdateReport | None
    detect_seconds: float
    update_error: str | None = None
    confident: int = 0

    @property
    def coverage(self) -> tuple[float, float, float, float]:
        return tuple(c / self.n for c in self.detector_counts)  # type: ignore[return-value]

    @property
    def mean_latency_ms(self) -> float:
        return 1000.0 * self.detect_seconds / self.n

    def csv_row(self) -> list[str]:
        m = self.metrics
        u = self.update
        f = "{:.6f}".format
        return [
            str(self.window_id),
            f(m.precision) if m else "", f(m.recall) if m else "", f(m.f1) if m else "",
            *(f(c) for c in self.coverage),
            str(len(u.new_domains) if u else 0), str(u.new_trusted if u else 0), str(u.new_clusters if u else 0),
        ]


def window_key(ts, window_seconds: float) -> int:
    """Windows are aligned to the UTC epoch."""
    return math.floor(ts.timestamp() / window_seconds)


def iter_windows(tweets: Iterable[TweetRecord], window_seconds: float):
    """Yield lists of consecutive tweets sharing a window; raises on decreasing timestamps."""
    batch: list[TweetRecord] = []
    key = None
    last = None
    for i, t in enumerate(tweets):
        if last is not None and t.created_at < last:
            raise OrderingError(f"tweet {t.tweet_id} (position {i}) is older than its predecessor")
        last = t.created_at
        k = window_key(t.created_at, window_seconds)
        if key is not None and k != key:
            yield batch
            batch = []
        key = k
        batch.append(t)
    if batch:
        yield batch


def simulate(state: ModelState, tweets: Iterable[TweetRecord], variant: str = "full", window_hours: float = 24.0,
             probe: DetectProbe | None = None,
             on_output: Callable[[LabeledTweet], None] | None = None,
             on_window: Callable[[WindowResult, ModelState], None] | None = None) -> tuple[list[WindowResult], ModelState]:
    """Label the stream window by window; the full variant republishes state after each window."""
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    mode = variant if variant in ("nb", "lr", "rf") else "full"
    results: list[WindowResult] = []
    for ordinal, batch in enumerate(iter_windows(tweets, window_hours * 3600.0), start=1):
        buffer = WindowBuffer(state.window_id + 1) if variant == "full" else None
        counts = [0, 0, 0, 0]
        output: list[LabeledTweet] = []
        t0 = time.perf_counter()
        for t in batch:
            lt = detect(t, state, buffer, probe, mode)
            counts[lt.detector - 1] += 1
            output.append(lt)
        elapsed = time.perf_counter() - t0
        if on_output is not None:
            for lt in output:
                on_output(lt)
        gold = {lt.tweet.tweet_id: lt.tweet.gold_label for lt in output if lt.tweet.gold_label is not None}
        try:
            metrics = evaluate({lt.tweet.tweet_id: lt.label for lt in output}, gold) if gold else None
        except UndefinedMetricsError:
            metrics = None
        res = WindowResult(ordinal, len(batch), tuple(counts), metrics, None, elapsed,
                           confident=sum(lt.confident for lt in output))
        if variant == "full":
            try:
                state, res.update = run_window_update(state, output, buffer)
            except SpamStreamError as exc:
                # the previous state stays live
                res.update_error = f"{type(exc).__name__}: {exc}"
                log.warning("window %d update failed: %s", ordinal, res.update_error)
        results.append(res)
        if on_window is not None:
            on_window(res, state)
    return results, state


def windows_csv(results: Iterable[WindowResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(WINDOWS_CSV_COLUMNS)
    for r in results:
        w.writerow(r.csv_row())
    return buf.getvalue()


def write_windows_csv(results: Iterable[WindowResult], path: str | Path) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(windows_csv(results), encoding="utf-8")
    return p


def mean_f1(results: Iterable[WindowResult], first: int, last: int) -> float:
    vals = [r.metrics.f1 for r in results if first <= r.window_id <= last and r.metrics is not None]
    if not vals:
        raise UndefinedMetricsError(f"no evaluated windows in {first}..{last}")
    return sum(vals) / len(vals)


def blacklisted_at(results: Iterable[WindowResult], domain: str) -> int | None:
    """Window whose update blacklisted ``domain``, if any."""
    for r in results:
        if r.update is not None and domain in r.update.new_domains:
            return r.window_id
    return None
