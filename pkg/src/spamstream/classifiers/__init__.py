"""From-scratch tweet and cluster classifiers."""

from ..corpus import HAM, SPAM
from .base import Dataset, check_version
from .ensemble import EnsembleVerdict, ensemble_vote
from .lr import LRModel, train_cluster_lr, train_lr
from .nb import NBModel, train_nb
from .rf import RFModel, gini_importance, train_rf


def predict(model, fv) -> tuple[str, float]:
    """(label, P(spam)); spam iff the score exceeds 0.5."""
    score = model.predict_proba_one(fv)
    return (SPAM if score > 0.5 else HAM), score


__all__ = [
    "Dataset", "EnsembleVerdict", "LRModel", "NBModel", "RFModel", "check_version", "ensemble_vote",
    "gini_importance", "predict", "train_cluster_lr", "train_lr", "train_nb", "train_rf",
]
