from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from ..corpus import HAM, SPAM
from ..errors import DegenerateDataError, SchemaVersionError


@dataclass
class Dataset:
    """Training matrix split into a dense meta-feature block and a binary vocabulary block.

    ``y`` is 1 for spam and 0 for ham.
    """

    dense: np.ndarray
    sparse: sp.csr_matrix
    y: np.ndarray
    schema_version: int

    def __post_init__(self):
        self.dense = np.asarray(self.dense, dtype=np.float64)
        if self.dense.ndim != 2:
            raise ValueError("dense block must be 2-D")
        if self.sparse is None:
            self.sparse = sp.csr_matrix((self.dense.shape[0], 0))
        self.sparse = sp.csr_matrix(self.sparse, dtype=np.float64)
        self.sparse.sort_indices()
        self.y = np.asarray(self.y, dtype=np.int8)
        if not (self.dense.shape[0] == self.sparse.shape[0] == self.y.shape[0]):
            raise ValueError("dense, sparse and y must have the same number of rows")

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def n_dense(self) -> int:
        return self.dense.shape[1]

    @property
    def n_sparse(self) -> int:
        return self.sparse.shape[1]

    @property
    def n_features(self) -> int:
        return self.n_dense + self.n_sparse

    def full(self) -> sp.csr_matrix:
        return sp.hstack([sp.csr_matrix(self.dense), self.sparse], format="csr")

    @classmethod
    def from_vectors(cls, vectors: Sequence, labels: Sequence, vocab_size: int) -> "Dataset":
        if not vectors:
            raise DegenerateDataError("empty dataset")
        versions = {v.schema_version for v in vectors}
        if len(versions) != 1:
            raise SchemaVersionError(f"mixed schema versions {sorted(versions)}")
        dense = np.stack([v.dense for v in vectors])
        indptr = np.cumsum([0] + [len(v.sparse) for v in vectors])
        indices = np.concatenate([v.sparse for v in vectors]).astype(np.int64)
        csr = sp.csr_matrix((np.ones(len(indices)), indices, indptr), shape=(len(vectors), vocab_size))
        return cls(dense, csr, encode_labels(labels), versions.pop())


def encode_labels(labels) -> np.ndarray:
    out = []
    for lab in labels:
        if lab in (SPAM, 1, True):
            out.append(1)
        elif lab in (HAM, 0, False):
            out.append(0)
        else:
            raise ValueError(f"unknown label {lab!r}")
    return np.array(out, dtype=np.int8)


def check_trainable(ds: Dataset) -> None:
    if ds.n == 0:
        raise DegenerateDataError("empty dataset")
    pos = int(ds.y.sum())
    if pos == 0 or pos == ds.n:
        raise DegenerateDataError("training data must contain both spam and ham examples")


def check_version(model, fv) -> None:
    if fv.schema_version != model.schema_version:
        raise SchemaVersionError(
            f"feature vector schema {fv.schema_version} != model schema {model.schema_version}")
    if fv.dense.shape[0] != model.n_dense:
        raise SchemaVersionError(f"dense block has {fv.dense.shape[0]} features, model expects {model.n_dense}")


def sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out if out.ndim else float(out)


def sigmoid1(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + np.exp(-z))
    ez = np.exp(z)
    return ez / (1.0 + ez)
