"""Command-line entry point.

Local subcommands drive the library directly; ``serve`` starts the HTTP
service and ``submit`` replays a corpus against a running one.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import load_config_file
from .errors import SpamStreamError


def _synth_config(path: str | None, seed: int | None):
    from .harness.synth import SyntheticGeneratorConfig, default_config

    raw = load_config_file(path)
    if "campaigns" in raw:
        cfg = SyntheticGeneratorConfig.from_dict(raw)
        if seed is not None:
            cfg.seed = seed
        return cfg
    if seed is not None:
        raw["seed"] = seed
    return default_config(**raw)


def cmd_bootstrap(args) -> int:
    from .harness.runner import bootstrap

    state = bootstrap(args.seed_corpus, args.state_dir, args.config, args.allowlist)
    for k, v in state.summary().items():
        print(f"{k}: {v}")
    return 0


def cmd_run(args) -> int:
    from .harness.runner import run_stream
    from .harness.stream import StreamConfig, mean_f1

    hyper = None
    if args.config:
        from .harness.runner import BootstrapConfig
        hyper = BootstrapConfig.from_file(args.config).hyper
    cfg = StreamConfig(corpus=Path(args.corpus), state_dir=Path(args.state_dir), variant=args.variant,
                       window_hours=args.window_hours, seed=args.seed,
                       reports_dir=Path(args.reports_dir) if args.reports_dir else None,
                       predictions_out=Path(args.predictions) if args.predictions else None,
                       save_state_dir=Path(args.save_state) if args.save_state else None, hyper=hyper)
    results, final = run_stream(cfg)
    print("window    P      R      F1   d1     d2     d3     d4   domains trusted clusters")
    for r in results:
        m = r.metrics
        u = r.update
        cov = " ".join(f"{c:.3f}" for c in r.coverage)
        scores = f"{m.precision:.3f} {m.recall:.3f} {m.f1:.3f}" if m else "  -     -     -  "
        upd = f"{len(u.new_domains):7d} {u.new_trusted:7d} {u.new_clusters:8d}" if u else "      -       -        -"
        print(f"{r.window_id:6d} {scores} {cov} {upd}" + (f"  update failed: {r.update_error}" if r.update_error else ""))
    evaluated = [r for r in results if r.metrics is not None]
    if evaluated:
        print(f"mean F1 {mean_f1(evaluated, evaluated[0].window_id, evaluated[-1].window_id):.4f}")
    reports = cfg.reports_dir or cfg.state_dir / "reports"
    print(f"wrote {reports / 'windows.csv'}")
    return 0


def _undefined_note(undefined: bool) -> str:
    return " (undefined, reported as 0)" if undefined else ""


def cmd_evaluate(args) -> int:
    from .harness.evaluate import evaluate_files

    rep = evaluate_files(args.pred, args.gold)
    if args.json:
        print(json.dumps(rep.to_dict(), sort_keys=True))
        return 0
    print(f"n={rep.n} tp={rep.tp} fp={rep.fp} fn={rep.fn} tn={rep.tn}")
    print(f"precision {rep.precision:.4f}{_undefined_note(rep.precision_undefined)}")
    print(f"recall    {rep.recall:.4f}{_undefined_note(rep.recall_undefined)}")
    print(f"f1        {rep.f1:.4f}")
    return 0


def cmd_gen_synth(args) -> int:
    from .harness.synth import generate_synthetic, seed_path_for

    cfg = _synth_config(args.config, args.seed)
    out = generate_synthetic(cfg, args.out)
    print(f"wrote {out} ({cfg.windows} windows x {cfg.tweets_per_window} tweets)")
    print(f"wrote {seed_path_for(out)} ({cfg.seed_tweets} labeled seed tweets)")
    return 0


def cmd_bench(args) -> int:
    from .corpus import read_corpus
    from .harness.bench import bench_latency
    from .harness.runner import load_state

    state = load_state(args.state_dir)
    rep = bench_latency(read_corpus(args.corpus), state, n=args.n, mode=args.mode)
    if args.json:
        print(json.dumps(rep.to_dict(), sort_keys=True))
    else:
        print("\n".join(rep.lines()))
    return 0


def cmd_inspect(args) -> int:
    from .harness.runner import load_state

    state = load_state(args.state_dir)
    s = state.summary()
    print(f"window_id: {s['window_id']}")
    print(f"blacklisted domains: {s['blacklisted_domains']}")
    print(f"trusted users: {s['trusted_users']}")
    print(f"confident clusters: {s['confident_clusters']} (pending {s['pending_clusters']})")
    print(f"spammy words: {s['spammy_words']}  vocabulary: {s['vocabulary_size']}")
    print(f"training memory: {s['memory_spam']} spam / {s['memory_ham']} ham")
    if args.verbose:
        for d, w in sorted(state.blacklist.items(), key=lambda kv: (kv[1], kv[0])):
            print(f"  blacklist {d} (window {w})")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app

    app = create_app(state_dir=args.state_dir, persist=args.persist)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def cmd_submit(args) -> int:
    import httpx

    from .corpus import iter_corpus, record_to_dict
    from .harness.stream import window_key

    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    seconds = args.window_hours * 3600.0 if args.window_hours else None
    with httpx.Client(base_url=args.url, timeout=args.timeout) as client:
        def post(batch):
            r = client.post("/detect", json={"tweets": batch})
            r.raise_for_status()
            for d in r.json()["results"]:
                out.write(json.dumps({"tweet_id": d["tweet_id"], "label": d["label"], "detector": d["detector"],
                                      "confident": d["confident"]}, sort_keys=True) + "\n")

        def close():
            r = client.post("/window/close")
            r.raise_for_status()
            rep = r.json()
            print(f"closed window {rep['window_id']}: {len(rep['new_domains'])} new domains, "
                  f"{rep['new_trusted']} new trusted, {rep['new_clusters']} new clusters", file=sys.stderr)

        batch: list[dict] = []
        key = None
        for t in iter_corpus(args.corpus):
            k = window_key(t.created_at, seconds) if seconds else None
            if key is not None and k != key:
                if batch:
                    post(batch)
                    batch = []
                close()
            key = k
            batch.append(record_to_dict(t))
            if len(batch) >= args.batch_size:
                post(batch)
                batch = []
        if batch:
            post(batch)
        if seconds and args.close_last:
            close()
    if out is not sys.stdout:
        out.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spamstream", description="Self-updating spam filter for tweet streams")
    p.add_argument("-v", "--verbose-log", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("bootstrap", help="build the window-0 state from a labeled seed corpus")
    s.add_argument("--seed-corpus", required=True)
    s.add_argument("--state-dir", required=True)
    s.add_argument("--config", help="YAML/JSON hyperparameters")
    s.add_argument("--allowlist", help="domains that are never blacklisted (one per line)")
    s.set_defaults(func=cmd_bootstrap)

    s = sub.add_parser("run", help="replay a corpus window by window and write reports/windows.csv")
    s.add_argument("--corpus", required=True)
    s.add_argument("--state-dir", required=True)
    s.add_argument("--variant", choices=("full", "no-update", "nb", "lr", "rf"), default="full")
    s.add_argument("--window-hours", type=float, default=24.0)
    s.add_argument("--seed", type=int, help="training seed for window updates")
    s.add_argument("--config", help="YAML/JSON hyperparameters overriding the saved ones")
    s.add_argument("--reports-dir", help="default: <state-dir>/reports")
    s.add_argument("--predictions", help="write per-tweet labels as JSONL")
    s.add_argument("--save-state", help="save the final state to this directory")
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("evaluate", help="precision/recall/F1 of a prediction file against gold labels")
    s.add_argument("--pred", required=True)
    s.add_argument("--gold", required=True)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("gen-synth", help="write a synthetic stream and its labeled seed")
    s.add_argument("--config", help="YAML/JSON generator config (default: built-in drift scenario)")
    s.add_argument("--out", required=True)
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_gen_synth)

    s = sub.add_parser("bench", help="per-tweet detection latency")
    s.add_argument("--corpus", required=True)
    s.add_argument("--state-dir", required=True)
    s.add_argument("--n", type=int, default=100_000, help="number of detect calls (corpus is cycled)")
    s.add_argument("--mode", choices=("full", "nb", "lr", "rf"), default="full")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("inspect", help="print blacklist, trusted-user and cluster counts")
    s.add_argument("--state-dir", required=True)
    s.add_argument("--verbose", action="store_true", help="list blacklisted domains")
    s.set_defaults(func=cmd_inspect)

    s = sub.add_parser("serve", help="run the HTTP service")
    s.add_argument("--state-dir", required=True)
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8000)
    s.add_argument("--persist", action="store_true", help="save the state after every closed window")
    s.set_defaults(func=cmd_serve)

    s = sub.add_parser("submit", help="send a corpus to a running service")
    s.add_argument("--url", default="http://127.0.0.1:8000")
    s.add_argument("--corpus", required=True)
    s.add_argument("--batch-size", type=int, default=500)
    s.add_argument("--window-hours", type=float, help="close a window whenever tweets cross a boundary")
    s.add_argument("--close-last", action="store_true", help="also close the final window")
    s.add_argument("--out", help="predictions JSONL (default: stdout)")
    s.add_argument("--timeout", type=float, default=600.0)
    s.set_defaults(func=cmd_submit)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose_log else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (SpamStreamError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

