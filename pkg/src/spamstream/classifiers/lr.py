"""L2-regularized logistic regression (full-batch L-BFGS or gradient descent)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .base import Dataset, check_trainable, check_version, sigmoid, sigmoid1


@dataclass
class LRModel:
    weights: np.ndarray  # (n_dense + n_sparse,)
    bias: float
    lam: float
    n_dense: int
    schema_version: int

    def decision(self, dense: np.ndarray, sparse_idx: np.ndarray) -> float:
        w = self.weights
        return float(dense @ w[: self.n_dense]) + float(w[self.n_dense + sparse_idx].sum()) + self.bias

    def predict_proba_one(self, fv) -> float:
        check_version(self, fv)
        return sigmoid1(self.decision(fv.dense, fv.sparse))

    def predict_proba(self, ds: Dataset) -> np.ndarray:
        z = ds.dense @ self.weights[: self.n_dense] + ds.sparse @ self.weights[self.n_dense:] + self.bias
        return sigmoid(np.asarray(z).ravel())


def objective(w: np.ndarray, b: float, X, y: np.ndarray, lam: float) -> tuple[float, np.ndarray, float]:
    """Mean log-loss plus (lam/2)*||w||^2, with its gradient in (w, b). The bias is not penalized."""
    y = np.asarray(y, dtype=np.float64)
    z = np.asarray(X @ w).ravel() + b
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z)) + 0.5 * lam * float(w @ w)
    r = sigmoid(z) - y
    n = y.shape[0]
    gw = np.asarray(X.T @ r).ravel() / n + lam * w
    gb = float(r.sum() / n)
    return loss, gw, gb


def train_lr(ds: Dataset, lam: float = 1e-4, epochs: int = 200, lr: float = 0.1, decay: float = 1.0,
             solver: str = "lbfgs") -> LRModel:
    """Fit from zero initialization.

    ``solver="lbfgs"`` runs at most ``epochs`` quasi-Newton iterations on the
    full-batch objective. ``solver="gd"`` takes ``epochs`` plain gradient steps
    of size ``lr / (1 + decay * epoch)``.
    """
    check_trainable(ds)
    X = ds.full()
    y = ds.y.astype(np.float64)
    d = X.shape[1]
    if solver == "gd":
        w = np.zeros(d)
        b = 0.0
        for t in range(epochs):
            _, gw, gb = objective(w, b, X, y, lam)
            eta = lr / (1.0 + decay * t)
            w -= eta * gw
            b -= eta * gb
    elif solver == "lbfgs":
        def fun(theta):
            loss, gw, gb = objective(theta[:d], theta[d], X, y, lam)
            return loss, np.append(gw, gb)
        res = minimize(fun, np.zeros(d + 1), jac=True, method="L-BFGS-B",
                       options={"maxiter": epochs, "gtol": 1e-8})
        w, b = res.x[:d].copy(), float(res.x[d])
    else:
        raise ValueError(f"unknown solver {solver!r}")
    return LRModel(weights=w, bias=float(b), lam=lam, n_dense=ds.n_dense, schema_version=ds.schema_version)


def train_cluster_lr(ds: Dataset, lam: float = 1e-4, epochs: int = 200, solver: str = "lbfgs") -> LRModel:
    return train_lr(ds, lam=lam, epochs=epochs, solver=solver)
