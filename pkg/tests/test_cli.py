import json

import httpx
import pytest
from fastapi.testclient import TestClient

from spamstream import cli
from spamstream.harness.runner import load_state
from spamstream.service import create_app


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    (d / "synth.yaml").write_text("windows: 2\ntweets_per_window: 400\nseed_tweets: 600\ndrift_window: 2\n")
    (d / "hyper.yaml").write_text("rf_trees: 8\nrf_depth: 10\nlr_epochs: 80\n")
    assert cli.main(["gen-synth", "--config", str(d / "synth.yaml"), "--out", str(d / "stream.jsonl"),
                     "--seed", "7"]) == 0
    assert cli.main(["bootstrap", "--seed-corpus", str(d / "stream.seed.jsonl"), "--state-dir", str(d / "state"),
                     "--config", str(d / "hyper.yaml")]) == 0
    return d


def test_gen_synth_writes_seed_and_stream(workspace):
    assert len((workspace / "stream.jsonl").read_text().splitlines()) == 800
    assert len((workspace / "stream.seed.jsonl").read_text().splitlines()) == 600


def test_bootstrap_saves_window_zero(workspace):
    state = load_state(workspace / "state")
    assert state.window_id == 0 and state.hyper.rf_trees == 8


def test_run_and_evaluate(workspace, capsys):
    d = workspace
    assert cli.main(["run", "--corpus", str(d / "stream.jsonl"), "--state-dir", str(d / "state"),
                     "--reports-dir", str(d / "reports"), "--predictions", str(d / "pred.jsonl"),
                     "--save-state", str(d / "after")]) == 0
    out = capsys.readouterr().out
    assert "mean F1" in out
    header = (d / "reports" / "windows.csv").read_text().splitlines()[0]
    assert header == "window_id,precision,recall,f1,cov_d1,cov_d2,cov_d3,cov_d4,new_domains,new_trusted,new_clusters"
    assert load_state(d / "after").window_id == 2
    assert cli.main(["evaluate", "--pred", str(d / "pred.jsonl"), "--gold", str(d / "stream.jsonl"), "--json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["n"] == 800 and 0.0 <= rep["f1"] <= 1.0


@pytest.mark.parametrize("variant", ["no-update", "nb"])
def test_run_baselines(workspace, variant):
    d = workspace
    assert cli.main(["run", "--corpus", str(d / "stream.jsonl"), "--state-dir", str(d / "state"),
                     "--variant", variant, "--reports-dir", str(d / variant)]) == 0
    assert (d / variant / "windows.csv").is_file()


def test_bench_and_inspect(workspace, capsys):
    d = workspace
    assert cli.main(["bench", "--corpus", str(d / "stream.jsonl"), "--state-dir", str(d / "state"), "--n", "500",
                     "--json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["n"] == 500 and sum(rep["detector_hits"]) == 500
    assert cli.main(["inspect", "--state-dir", str(d / "state"), "--verbose"]) == 0
    out = capsys.readouterr().out
    assert "blacklisted domains:" in out and "trusted users:" in out and "confident clusters:" in out


def test_errors_exit_with_code_two(tmp_path, capsys):
    assert cli.main(["inspect", "--state-dir", str(tmp_path / "none")]) == 2
    assert "NotBootstrappedError" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        cli.main(["run", "--corpus", "x"])


def test_serve_starts_uvicorn(workspace, monkeypatch):
    seen = {}
    monkeypatch.setattr("uvicorn.run", lambda app, host, port, log_level: seen.update(app=app, port=port))
    assert cli.main(["serve", "--state-dir", str(workspace / "state"), "--port", "9999"]) == 0
    assert seen["port"] == 9999 and seen["app"].state.live.state.window_id == 0


def test_submit_replays_through_service(workspace, monkeypatch, capsys):
    app = create_app(state_dir=workspace / "state")
    monkeypatch.setattr(httpx, "Client", lambda base_url, timeout: TestClient(app, base_url=base_url))
    out = workspace / "submitted.jsonl"
    assert cli.main(["submit", "--corpus", str(workspace / "stream.jsonl"), "--batch-size", "150",
                     "--window-hours", "24", "--close-last", "--out", str(out)]) == 0
    rows = [json.loads(line) for line in out.read_text().splitlines()]
    assert len(rows) == 800
    assert app.state.live.state.window_id == 2
    assert capsys.readouterr().err.count("closed window") == 2
