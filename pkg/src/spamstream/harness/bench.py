"""Per-tweet detection latency over a corpus replayed to a fixed number of calls."""

from __future__ import annotations

import itertools
import time
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from ..corpus import TweetRecord
from ..errors import InsufficientDataError
from ..pipeline import STAGES, DetectProbe, ModelState, detect

DEFAULT_CALLS = 100_000


@dataclass(frozen=True)
class LatencyReport:
    n: int
    mean_ms: float
    p50_ms: float
    p99_ms: float
    max_ms: float
    stage_mean_ms: dict[str, float]
    stage_share: dict[str, float]
    feature_extraction_share: float
    detector_hits: tuple[int, int, int, int]
    stage_calls: tuple[int, int, int, int]

    def to_dict(self) -> dict:
        return asdict(self)

    def lines(self) -> list[str]:
        out = [f"calls {self.n}",
               f"mean {self.mean_ms:.4f} ms  p50 {self.p50_ms:.4f} ms  p99 {self.p99_ms:.4f} ms  max {self.max_ms:.4f} ms"]
        for s in STAGES:
            out.append(f"  {s:<13} {self.stage_mean_ms[s]:.4f} ms/tweet  {100 * self.stage_share[s]:5.1f}%")
        out.append(f"feature extraction share {100 * self.feature_extraction_share:.1f}%")
        out.append("detector hits " + " ".join(str(h) for h in self.detector_hits))
        return out


def bench_latency(tweets: Sequence[TweetRecord], state: ModelState, n: int = DEFAULT_CALLS,
                  mode: str = "full", warmup: int = 200) -> LatencyReport:
    """Time ``n`` detect calls, cycling through ``tweets``.

    Nothing is buffered for clustering, so replaying the same tweet is allowed.
    Feature extraction share is (analysis + feature vector) time over total.
    """
    if not tweets:
        raise InsufficientDataError("latency benchmark needs a non-empty corpus")
    if n < 1:
        raise ValueError("n must be positive")
    for t in itertools.islice(itertools.cycle(tweets), min(warmup, n)):
        detect(t, state, None, None, mode)
    probe = DetectProbe()
    lat = np.empty(n, dtype=np.int64)
    clock = time.perf_counter_ns
    for i, t in enumerate(itertools.islice(itertools.cycle(tweets), n)):
        t0 = clock()
        detect(t, state, None, probe, mode)
        lat[i] = clock() - t0
    ms = lat / 1e6
    total = max(probe.total_ns, 1)
    return LatencyReport(
        n=n,
        mean_ms=float(ms.mean()),
        p50_ms=float(np.percentile(ms, 50)),
        p99_ms=float(np.percentile(ms, 99)),
        max_ms=float(ms.max()),
        stage_mean_ms={s: probe.stage_ns[s] / 1e6 / n for s in STAGES},
        stage_share={s: probe.stage_ns[s] / total for s in STAGES},
        feature_extraction_share=(probe.stage_ns["analysis"] + probe.stage_ns["features"]) / total,
        detector_hits=tuple(probe.hits),
        stage_calls=tuple(probe.calls),
    )


__all__ = ["DEFAULT_CALLS", "LatencyReport", "bench_latency"]
