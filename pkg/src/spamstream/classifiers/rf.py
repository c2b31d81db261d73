"""Random forest of Gini CART trees with per-node feature subsampling."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _trees
from .base import Dataset, check_trainable, check_version

MAX_DENSE_BINS = 32


@dataclass
class RFModel:
    feature: np.ndarray    # global node arrays, trees concatenated
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray      # spam fraction of training rows at the node
    n_samples: np.ndarray
    impurity: np.ndarray
    roots: np.ndarray      # root node id of each tree
    n_dense: int
    n_sparse: int
    schema_version: int
    seed: int
    params: dict = field(default_factory=dict)

    @property
    def n_trees(self) -> int:
        return int(self.roots.shape[0])

    @property
    def n_features(self) -> int:
        return self.n_dense + self.n_sparse

    def predict_proba_one(self, fv) -> float:
        check_version(self, fv)
        return float(_trees.predict_one(np.ascontiguousarray(fv.dense, dtype=np.float64),
                                        np.ascontiguousarray(fv.sparse, dtype=np.int64),
                                        self.feature, self.threshold, self.left, self.right,
                                        self.value, self.roots, self.n_dense))

    def predict_proba(self, ds: Dataset) -> np.ndarray:
        return _trees.predict_many(np.ascontiguousarray(ds.dense), ds.sparse.indptr.astype(np.int64),
                                   ds.sparse.indices.astype(np.int64), self.feature, self.threshold,
                                   self.left, self.right, self.value, self.roots, self.n_dense)

    def tree_slices(self) -> list[slice]:
        ends = list(self.roots[1:]) + [self.feature.shape[0]]
        return [slice(int(a), int(b)) for a, b in zip(self.roots, ends)]


def dense_bin_edges(col: np.ndarray, max_bins: int = MAX_DENSE_BINS) -> np.ndarray:
    """Candidate thresholds for one dense column; value x falls in bin #(edges < x)."""
    u = np.unique(col)
    if u.size <= 1:
        return np.zeros(0)
    if u.size <= max_bins:
        return (u[:-1] + u[1:]) / 2.0
    q = np.quantile(col, np.linspace(0.0, 1.0, max_bins + 1)[1:-1])
    q = np.unique(q)
    return q[q < u[-1]]


def bin_dense(dense: np.ndarray, edges: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    xb = np.zeros(dense.shape, dtype=np.uint8)
    n_bins = np.ones(dense.shape[1], dtype=np.int64)
    for j, e in enumerate(edges):
        if e.size:
            xb[:, j] = np.searchsorted(e, dense[:, j], side="left")
            n_bins[j] = e.size + 1
    return xb, n_bins


def resolve_mtry(max_features, d: int) -> int:
    if max_features in (None, "all"):
        return d
    if max_features == "sqrt":
        return max(1, int(math.sqrt(d)))
    return max(1, min(d, int(max_features)))


def train_rf(ds: Dataset, n_trees: int = 100, max_depth: int = 20, seed: int = 0,
             max_features="sqrt", bootstrap: bool = True, min_samples_split: int = 2) -> RFModel:
    check_trainable(ds)
    edges = [dense_bin_edges(ds.dense[:, j]) for j in range(ds.n_dense)]
    xb, n_bins = bin_dense(ds.dense, edges)
    indptr = ds.sparse.indptr.astype(np.int64)
    indices = ds.sparse.indices.astype(np.int64)
    csc = ds.sparse.tocsc()
    csc.sort_indices()
    col_ptr = csc.indptr.astype(np.int64)
    col_rows = csc.indices.astype(np.int64)
    y = ds.y.astype(np.int64)
    mtry = resolve_mtry(max_features, ds.n_features)
    rng = np.random.default_rng(seed)

    parts = []
    offset = 0
    roots = []
    for _ in range(n_trees):
        if bootstrap:
            rows = rng.integers(0, ds.n, size=ds.n).astype(np.int64)
        else:
            rows = np.arange(ds.n, dtype=np.int64)
        tree_seed = int(rng.integers(0, 2**31 - 1))
        feat, sbin, lft, rgt, val, nn, imp = _trees.build_tree(
            xb, n_bins, indptr, indices, col_ptr, col_rows, ds.n_sparse, y, rows, max_depth, min_samples_split, mtry, tree_seed)
        thr = np.full(feat.shape[0], np.inf)
        for node in np.nonzero(feat >= 0)[0]:
            f = feat[node]
            thr[node] = edges[f][sbin[node]] if f < ds.n_dense else 0.5
        lft = np.where(lft >= 0, lft + offset, -1)
        rgt = np.where(rgt >= 0, rgt + offset, -1)
        parts.append((feat, thr, lft, rgt, val, nn, imp))
        roots.append(offset)
        offset += feat.shape[0]

    cat = [np.concatenate([p[i] for p in parts]) for i in range(7)]
    return RFModel(
        feature=cat[0].astype(np.int64), threshold=cat[1].astype(np.float64),
        left=cat[2].astype(np.int64), right=cat[3].astype(np.int64),
        value=cat[4].astype(np.float64), n_samples=cat[5].astype(np.int64), impurity=cat[6].astype(np.float64),
        roots=np.array(roots, dtype=np.int64), n_dense=ds.n_dense, n_sparse=ds.n_sparse,
        schema_version=ds.schema_version, seed=seed,
        params={"n_trees": n_trees, "max_depth": max_depth, "max_features": max_features,
                "bootstrap": bootstrap, "min_samples_split": min_samples_split},
    )


def impurity_decrease(model: RFModel) -> np.ndarray:
    """Mean over trees of the sample-weighted impurity decrease per feature (unnormalized)."""
    total = np.zeros(model.n_features)
    for sl in model.tree_slices():
        n_root = model.n_samples[sl.start]
        for node in range(sl.start, sl.stop):
            f = model.feature[node]
            if f < 0:
                continue
            l, r = model.left[node], model.right[node]
            dec = (model.n_samples[node] * model.impurity[node]
                   - model.n_samples[l] * model.impurity[l]
                   - model.n_samples[r] * model.impurity[r])
            total[f] += dec / n_root
    return total / max(1, model.n_trees)


def gini_importance(model: RFModel, feature_names=None) -> list[tuple[str | int, float]]:
    imp = impurity_decrease(model)
    s = imp.sum()
    if s > 0:
        imp = imp / s
    names = list(feature_names) if feature_names is not None else list(range(model.n_features))
    order = sorted(range(len(imp)), key=lambda i: (-imp[i], i))
    return [(names[i], float(imp[i])) for i in order]
