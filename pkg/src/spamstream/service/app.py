"""HTTP front end: label tweets against the live state and close windows on request."""

from __future__ import annotations

import logging
import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..batch import run_window_update
from ..corpus import record_from_dict
from ..errors import DuplicateTweetError, NotBootstrappedError, SchemaError, SpamStreamError, UndefinedMetricsError
from ..harness.evaluate import evaluate
from ..harness.runner import load_state
from ..harness.snapshot import save_snapshot
from ..neardup import WindowBuffer
from ..pipeline import DETECTOR_NAMES, LabeledTweet, ModelState, detect
from .schemas import (Detection, DetectRequest, DetectResponse, EvaluateRequest, EvaluateResponse, HealthResponse,
                      StateResponse, WindowCloseResponse)

log = logging.getLogger(__name__)


class LiveState:
    """The published ModelState plus the open window's buffer and output.

    Readers take a reference to the current state and never see a partial
    update: window close builds the new state off to the side and swaps it in
    under the lock.
    """

    def __init__(self, state: ModelState | None = None, state_dir: str | Path | None = None, persist: bool = False):
        self.state_dir = Path(state_dir) if state_dir is not None else None
        self.persist = persist and self.state_dir is not None
        self._lock = threading.Lock()
        self._update_lock = threading.Lock()
        self.state = state
        if self.state is None and self.state_dir is not None:
            try:
                self.state = load_state(self.state_dir)
            except NotBootstrappedError:
                log.warning("no bootstrapped state in %s", self.state_dir)
        self._open_window()

    def _open_window(self, window_id: int | None = None) -> None:
        if window_id is None:
            window_id = self.state.window_id + 1 if self.state is not None else 1
        self.buffer = WindowBuffer(window_id)
        self.output: list[LabeledTweet] = []

    def current(self) -> tuple[ModelState, WindowBuffer, list[LabeledTweet]]:
        with self._lock:
            if self.state is None:
                raise NotBootstrappedError("service has no bootstrapped state")
            return self.state, self.buffer, self.output

    def label(self, tweets, mode: str = "full") -> tuple[int, list[LabeledTweet]]:
        """Label a batch; buffering and the window output change under one lock."""
        with self._lock:
            if self.state is None:
                raise NotBootstrappedError("service has no bootstrapped state")
            st = self.state
            if mode != "full":
                return st.window_id + 1, [detect(t, st, None, None, mode) for t in tweets]
            ids = [t.tweet_id for t in tweets]
            if len(set(ids)) != len(ids) or any(i in self.buffer.tweets for i in ids):
                raise DuplicateTweetError("batch repeats a tweet already seen in this window")
            labeled = [detect(t, st, self.buffer, None, mode) for t in tweets]
            self.output.extend(labeled)
            return self.buffer.window_id, labeled

    def close_window(self):
        """Run the window update and publish its state.

        Tweets arriving while the update runs are labeled by the previous
        state and counted in the next window.
        """
        with self._update_lock:
            with self._lock:
                if self.state is None:
                    raise NotBootstrappedError("service has no bootstrapped state")
                state, buffer, output = self.state, self.buffer, self.output
                buffer.close()
                self._open_window(buffer.window_id + 1)
            try:
                new_state, report = run_window_update(state, output, buffer)
            except SpamStreamError:
                with self._lock:
                    # the closed window's tweets are dropped; the old state stays live
                    self._open_window()
                raise
            with self._lock:
                self.state = new_state
            saved = False
            if self.persist:
                save_snapshot(new_state, self.state_dir)
                saved = True
            return report, saved


def _detection(lt: LabeledTweet) -> Detection:
    e = lt.ensemble
    return Detection(tweet_id=lt.tweet.tweet_id, label=lt.label, detector=lt.detector,
                     detector_name=DETECTOR_NAMES[lt.detector], confident=lt.confident,
                     votes=list(e.votes) if e is not None else None,
                     scores=list(e.scores) if e is not None and e.scores is not None else None)


def create_app(state: ModelState | None = None, state_dir: str | Path | None = None,
               persist: bool = False) -> FastAPI:
    """Build the service around an in-memory state or one loaded from ``state_dir``.

    With ``persist`` each closed window is saved back to ``state_dir``.
    """
    live = LiveState(state, state_dir, persist)
    app = FastAPI(title="spamstream", version=__version__)
    app.state.live = live

    @app.get("/health", response_model=HealthResponse)
    def health():
        st = live.state
        if st is None:
            return HealthResponse(status="not_bootstrapped", version=__version__)
        return HealthResponse(status="ok", version=__version__, window_id=st.window_id)

    @app.get("/state", response_model=StateResponse)
    def state_summary():
        try:
            st, buffer, output = live.current()
        except NotBootstrappedError as exc:
            raise HTTPException(503, str(exc)) from None
        return StateResponse(**st.summary(), buffered_tweets=len(buffer), window_output=len(output))

    @app.post("/detect", response_model=DetectResponse)
    def detect_tweets(req: DetectRequest):
        try:
            tweets = [record_from_dict(t.model_dump(exclude_none=True)) for t in req.tweets]
        except SchemaError as exc:
            raise HTTPException(422, str(exc)) from None
        try:
            wid, labeled = live.label(tweets, req.mode)
        except NotBootstrappedError as exc:
            raise HTTPException(503, str(exc)) from None
        except DuplicateTweetError as exc:
            raise HTTPException(409, str(exc)) from None
        return DetectResponse(window_id=wid, results=[_detection(lt) for lt in labeled])

    @app.post("/window/close", response_model=WindowCloseResponse)
    def close_window():
        try:
            report, saved = live.close_window()
        except NotBootstrappedError as exc:
            raise HTTPException(503, str(exc)) from None
        except SpamStreamError as exc:
            raise HTTPException(409, f"{type(exc).__name__}: {exc}") from None
        return WindowCloseResponse(**report.to_dict(), saved=saved)

    @app.post("/evaluate", response_model=EvaluateResponse)
    def evaluate_labels(req: EvaluateRequest):
        try:
            rep = evaluate(req.predictions, req.gold)
        except UndefinedMetricsError as exc:
            raise HTTPException(422, str(exc)) from None
        return EvaluateResponse(**rep.to_dict())

    return app
