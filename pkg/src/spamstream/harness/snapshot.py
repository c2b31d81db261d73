"""Directory snapshots of a ModelState: a manifest plus one file per component."""

from __future__ import annotations

import csv
import hashlib
import json
import os
import shutil
import tempfile
from pathlib import Path

import numpy as np

from .. import __version__
from ..classifiers import LRModel, NBModel, RFModel
from ..config import Hyperparams
from ..corpus import TweetRecord, record_from_dict, record_to_dict
from ..errors import NotBootstrappedError, SnapshotVersionError
from ..features import FeatureSchema, PopulationStats
from ..lexicon import RESOURCE_FILES, NgramVocabulary, SpammyWordSet, load_lexicons
from ..neardup import Cluster, ClusterStore, Signature
from ..pipeline import ModelState, TrainingMemory

FORMAT_VERSION = 1
MANIFEST = "manifest.json"


def _dump_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, ensure_ascii=False, sort_keys=True, indent=1) + "\n", encoding="utf-8")


def _dump_lines(path: Path, lines) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line)
            fh.write("\n")


def _tweet_line(t: TweetRecord, **extra) -> str:
    d = record_to_dict(t)
    d.update(extra)
    return json.dumps(d, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def _read_jsonl(path: Path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


# ---------------------------------------------------------------- models

def _model_arrays(state: ModelState) -> dict[str, np.ndarray]:
    out: dict[str, np.ndarray] = {}
    if state.nb is not None:
        m = state.nb
        out.update({"nb.log_prior": m.log_prior, "nb.log_theta": m.log_theta, "nb.log_1m_theta": m.log_1m_theta,
                    "nb.dense_threshold": m.dense_threshold, "nb.dense_inclusive": m.dense_inclusive})
    for name in ("lr", "cluster_lr"):
        m = getattr(state, name)
        if m is not None:
            out[f"{name}.weights"] = m.weights
    if state.rf is not None:
        m = state.rf
        for f in ("feature", "threshold", "left", "right", "value", "n_samples", "impurity", "roots"):
            out[f"rf.{f}"] = getattr(m, f)
    return out


def _model_meta(state: ModelState) -> dict:
    meta: dict = {}
    if state.nb is not None:
        meta["nb"] = {"n_dense": state.nb.n_dense, "alpha": state.nb.alpha, "schema_version": state.nb.schema_version}
    for name in ("lr", "cluster_lr"):
        m = getattr(state, name)
        if m is not None:
            meta[name] = {"bias": m.bias, "lam": m.lam, "n_dense": m.n_dense, "schema_version": m.schema_version}
    if state.rf is not None:
        m = state.rf
        meta["rf"] = {"n_dense": m.n_dense, "n_sparse": m.n_sparse, "schema_version": m.schema_version,
                      "seed": m.seed, "params": m.params}
    return meta


def _load_models(arrays, meta: dict):
    nb = lr = rf = cluster_lr = None
    if "nb" in meta:
        m = meta["nb"]
        nb = NBModel(log_prior=arrays["nb.log_prior"], log_theta=arrays["nb.log_theta"],
                     log_1m_theta=arrays["nb.log_1m_theta"], dense_threshold=arrays["nb.dense_threshold"],
                     dense_inclusive=arrays["nb.dense_inclusive"], n_dense=m["n_dense"], alpha=m["alpha"],
                     schema_version=m["schema_version"])
    loaded = {}
    for name in ("lr", "cluster_lr"):
        if name in meta:
            m = meta[name]
            loaded[name] = LRModel(weights=arrays[f"{name}.weights"], bias=m["bias"], lam=m["lam"],
                                   n_dense=m["n_dense"], schema_version=m["schema_version"])
    lr, cluster_lr = loaded.get("lr"), loaded.get("cluster_lr")
    if "rf" in meta:
        m = meta["rf"]
        rf = RFModel(**{f: arrays[f"rf.{f}"] for f in ("feature", "threshold", "left", "right", "value",
                                                        "n_samples", "impurity", "roots")},
                     n_dense=m["n_dense"], n_sparse=m["n_sparse"], schema_version=m["schema_version"],
                     seed=m["seed"], params=m["params"])
    return nb, lr, rf, cluster_lr


# ---------------------------------------------------------------- save

def _write_schema(path: Path, schema: FeatureSchema) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("index", "name", "block"))
        w.writerows(schema.rows())


def _write_components(state: ModelState, d: Path) -> None:
    _dump_json(d / "blacklist.json", dict(sorted(state.blacklist.items())))
    _dump_lines(d / "allowlist.txt", sorted(state.allowlist))
    _dump_lines(d / "trusted_users.txt", sorted(state.trusted_users))
    sw = state.spammy_words
    _dump_json(d / "spammy_words.json",
               {w: [sw.spam_prob.get(w), sw.ham_prob.get(w)] for w in sorted(sw.words)})
    _dump_json(d / "vocab.json", {"window_id": state.vocab.window_id,
                                  "grams": {str(n): [list(x) for x in g] for n, g in state.vocab.grams.items()}})
    _dump_json(d / "stats.json", {"max_age_days": state.stats.max_age_days, "max_words": state.stats.max_words,
                                  "users": {u: list(v) for u, v in state.stats.users.items()}})

    store = state.cluster_store
    _dump_lines(d / "clusters.jsonl", (json.dumps(
        {"signature": c.signature.hex(), "tweet_ids": list(c.tweet_ids), "label": c.label,
         "confident": c.confident, "created_window": c.created_window, "last_window": c.last_window},
        sort_keys=True) for c in store))
    _dump_lines(d / "pending_members.jsonl",
                (_tweet_line(t, member_label=lab) for t, lab in store.members.values()))

    np.savez(d / "models.npz", **_model_arrays(state))
    _dump_json(d / "models.json", _model_meta(state))

    mem = state.memory
    _dump_lines(d / "memory_spam.jsonl", (_tweet_line(t) for t in mem.spam))
    _dump_lines(d / "memory_ham.jsonl", (_tweet_line(t) for t in mem.ham))
    _dump_lines(d / "memory_clusters.jsonl", (json.dumps(
        {"label": label, "members": [record_to_dict(t) for t in tweets], "member_labels": list(labels)},
        ensure_ascii=False, sort_keys=True) for tweets, labels, label in mem.clusters))
    _dump_json(d / "user_history.json", {u: list(v) for u, v in mem.user_history.items()})

    _write_schema(d / "schema.csv", FeatureSchema("tweet", state.vocab, state.schema_version))
    _write_schema(d / "cluster_schema.csv", FeatureSchema("cluster", state.vocab, state.schema_version))

    res = d / "resources"
    res.mkdir()
    src = Path(state.lexicons.source_dir) if state.lexicons.source_dir else None
    if src is None:
        raise SnapshotVersionError("lexicons without a source directory cannot be snapshotted")
    for name in RESOURCE_FILES:
        shutil.copyfile(src / name, res / name)


def save_snapshot(state: ModelState, directory: str | Path) -> Path:
    """Write ``state`` to ``directory``, replacing any previous snapshot there."""
    target = Path(directory)
    target.parent.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=".snapshot-", dir=target.parent))
    try:
        _write_components(state, tmp)
        files = sorted(str(p.relative_to(tmp)) for p in tmp.rglob("*") if p.is_file())
        manifest = {
            "format_version": FORMAT_VERSION,
            "package_version": __version__,
            "window_id": state.window_id,
            "schema_version": state.schema_version,
            "seeds": list(state.seeds),
            "hyperparams": state.hyper.to_dict(),
            "checksums": {f: _sha256(tmp / f) for f in files},
        }
        _dump_json(tmp / MANIFEST, manifest)
        if target.exists():
            old = target.with_name(target.name + ".old")
            if old.exists():
                shutil.rmtree(old)
            os.replace(target, old)
            os.replace(tmp, target)
            shutil.rmtree(old)
        else:
            os.replace(tmp, target)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    return target


# ---------------------------------------------------------------- load

def read_manifest(directory: str | Path) -> dict:
    d = Path(directory)
    if not d.is_dir() or not (d / MANIFEST).is_file():
        raise NotBootstrappedError(f"no snapshot found in {d}")
    try:
        manifest = json.loads((d / MANIFEST).read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise SnapshotVersionError(f"unreadable manifest: {exc}") from None
    if not isinstance(manifest, dict):
        raise SnapshotVersionError("manifest must be a JSON object")
    if manifest.get("format_version") != FORMAT_VERSION:
        raise SnapshotVersionError(
            f"snapshot format {manifest.get('format_version')!r} is not supported (expected {FORMAT_VERSION})")
    for key in ("window_id", "schema_version", "seeds", "hyperparams", "checksums"):
        if key not in manifest:
            raise SnapshotVersionError(f"manifest lacks {key!r}")
    return manifest


def _verify(d: Path, checksums: dict) -> None:
    for name, digest in checksums.items():
        p = d / name
        if not p.is_file():
            raise SnapshotVersionError(f"snapshot file {name} is missing")
        if _sha256(p) != digest:
            raise SnapshotVersionError(f"snapshot file {name} does not match its manifest checksum")


def _read_lines(path: Path) -> list[str]:
    return [ln for ln in path.read_text(encoding="utf-8").splitlines() if ln]


def load_snapshot(directory: str | Path, verify: bool = True) -> ModelState:
    d = Path(directory)
    manifest = read_manifest(d)
    if verify:
        _verify(d, manifest["checksums"])
    try:
        hyper = Hyperparams.from_dict(manifest["hyperparams"])
    except (TypeError, ValueError) as exc:
        raise SnapshotVersionError(f"bad hyperparameters in manifest: {exc}") from None
    lexicons = load_lexicons(d / "resources")

    sw_raw = json.loads((d / "spammy_words.json").read_text(encoding="utf-8"))
    spammy = SpammyWordSet(frozenset(sw_raw), {w: v[0] for w, v in sw_raw.items()},
                           {w: v[1] for w, v in sw_raw.items()})
    vraw = json.loads((d / "vocab.json").read_text(encoding="utf-8"))
    vocab = NgramVocabulary({int(n): tuple((g, c) for g, c in grams) for n, grams in vraw["grams"].items()},
                            vraw["window_id"])
    sraw = json.loads((d / "stats.json").read_text(encoding="utf-8"))
    stats = PopulationStats({u: tuple(v) for u, v in sraw["users"].items()}, sraw["max_age_days"], sraw["max_words"])

    members = {}
    for obj in _read_jsonl(d / "pending_members.jsonl"):
        lab = obj.pop("member_label")
        t = record_from_dict(obj)
        members[t.tweet_id] = (t, lab)
    clusters = {}
    for obj in _read_jsonl(d / "clusters.jsonl"):
        sig = Signature.from_hex(obj["signature"])
        clusters[sig] = Cluster(sig, tuple(obj["tweet_ids"]), obj["label"], obj["confident"],
                                obj["created_window"], obj["last_window"])
    store = ClusterStore(clusters, members)

    meta = json.loads((d / "models.json").read_text(encoding="utf-8"))
    with np.load(d / "models.npz") as npz:
        arrays = {k: npz[k] for k in npz.files}
    nb, lr, rf, cluster_lr = _load_models(arrays, meta)

    memory = TrainingMemory(
        spam=tuple(record_from_dict(o) for o in _read_jsonl(d / "memory_spam.jsonl")),
        ham=tuple(record_from_dict(o) for o in _read_jsonl(d / "memory_ham.jsonl")),
        clusters=tuple((tuple(record_from_dict(m) for m in o["members"]), tuple(o["member_labels"]), o["label"])
                       for o in _read_jsonl(d / "memory_clusters.jsonl")),
        user_history={u: tuple(v) for u, v in
                      json.loads((d / "user_history.json").read_text(encoding="utf-8")).items()},
    )
    return ModelState(
        lexicons=lexicons, hyper=hyper, seeds=tuple(manifest["seeds"]), window_id=manifest["window_id"],
        schema_version=manifest["schema_version"],
        blacklist=json.loads((d / "blacklist.json").read_text(encoding="utf-8")),
        trusted_users=frozenset(_read_lines(d / "trusted_users.txt")),
        spammy_words=spammy, vocab=vocab, stats=stats, cluster_store=store,
        nb=nb, lr=lr, rf=rf, cluster_lr=cluster_lr,
        allowlist=frozenset(_read_lines(d / "allowlist.txt")),
        memory=memory,
    )


__all__ = ["FORMAT_VERSION", "load_snapshot", "read_manifest", "save_snapshot"]
