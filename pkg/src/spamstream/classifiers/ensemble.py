"""Two-of-three majority vote over the tweet classifiers."""

from __future__ import annotations

from dataclasses import dataclass

from ..corpus import HAM, SPAM


@dataclass(frozen=True)
class EnsembleVerdict:
    nb: str
    lr: str
    rf: str
    label: str
    unanimous: bool
    scores: tuple[float, float, float] | None = None

    @property
    def votes(self) -> tuple[str, str, str]:
        return (self.nb, self.lr, self.rf)

    @property
    def spam_votes(self) -> int:
        return sum(v == SPAM for v in self.votes)


def ensemble_vote(nb: str, lr: str, rf: str, scores: tuple[float, float, float] | None = None) -> EnsembleVerdict:
    for v in (nb, lr, rf):
        if v not in (SPAM, HAM):
            raise ValueError(f"member label must be spam or ham, got {v!r}")
    n_spam = (nb == SPAM) + (lr == SPAM) + (rf == SPAM)
    return EnsembleVerdict(nb, lr, rf, SPAM if n_spam >= 2 else HAM, n_spam in (0, 3), scores)
