"""Bernoulli naive Bayes over binarized features."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import Dataset, check_trainable, check_version, sigmoid, sigmoid1


@dataclass
class NBModel:
    log_prior: np.ndarray        # (2,) index 0 = ham, 1 = spam
    log_theta: np.ndarray        # (2, d) log P(x_j = 1 | c)
    log_1m_theta: np.ndarray     # (2, d) log P(x_j = 0 | c)
    dense_threshold: np.ndarray  # (n_dense,)
    dense_inclusive: np.ndarray  # (n_dense,) bool: binarize with >= instead of >
    n_dense: int
    alpha: float
    schema_version: int

    def __post_init__(self):
        self._w = (self.log_theta[1] - self.log_1m_theta[1]) - (self.log_theta[0] - self.log_1m_theta[0])
        self._base = float(self.log_prior[1] - self.log_prior[0]
                           + self.log_1m_theta[1].sum() - self.log_1m_theta[0].sum())

    def binarize_dense(self, dense: np.ndarray) -> np.ndarray:
        return np.where(self.dense_inclusive, dense >= self.dense_threshold, dense > self.dense_threshold)

    def log_odds(self, dense: np.ndarray, sparse_idx: np.ndarray) -> float:
        b = self.binarize_dense(dense)
        w = self._w
        return self._base + float(w[: self.n_dense][b].sum()) + float(w[self.n_dense + sparse_idx].sum())

    def predict_proba_one(self, fv) -> float:
        check_version(self, fv)
        return sigmoid1(self.log_odds(fv.dense, fv.sparse))

    def predict_proba(self, ds: Dataset) -> np.ndarray:
        b = self.binarize_dense(ds.dense).astype(np.float64)
        z = self._base + b @ self._w[: self.n_dense] + ds.sparse @ self._w[self.n_dense:]
        return sigmoid(np.asarray(z).ravel())


def median_thresholds(dense: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-column training median; columns whose median equals their max use >=."""
    if dense.shape[0] == 0:
        return np.zeros(dense.shape[1]), np.zeros(dense.shape[1], dtype=bool)
    med = np.median(dense, axis=0)
    mx = dense.max(axis=0)
    return med, med >= mx


def train_nb(ds: Dataset, alpha: float = 1.0) -> NBModel:
    check_trainable(ds)
    thr, incl = median_thresholds(ds.dense)
    bd = np.where(incl, ds.dense >= thr, ds.dense > thr).astype(np.float64)
    y = ds.y.astype(bool)
    n_c = np.array([(~y).sum(), y.sum()], dtype=np.float64)
    ones = np.zeros((2, ds.n_features))
    for c, mask in ((0, ~y), (1, y)):
        ones[c, : ds.n_dense] = bd[mask].sum(axis=0)
        if ds.n_sparse:
            ones[c, ds.n_dense:] = np.asarray(ds.sparse[mask].sum(axis=0)).ravel()
    theta = (ones + alpha) / (n_c[:, None] + 2.0 * alpha)
    return NBModel(
        log_prior=np.log(n_c / n_c.sum()),
        log_theta=np.log(theta),
        log_1m_theta=np.log1p(-theta),
        dense_threshold=thr,
        dense_inclusive=incl,
        n_dense=ds.n_dense,
        alpha=alpha,
        schema_version=ds.schema_version,
    )
