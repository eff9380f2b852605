"""Preference data: winner/loser pairs and the stacked design matrix.

The latent comparison variable for duel i is
v_i = f(loser_i) + eps_l - f(winner_i) + eps_w's negation, i.e. observing
the duel means observing v_i < 0.  Everything downstream indexes rows of
the stacked design (test points, then all winners, then all losers).
"""

import json
from dataclasses import dataclass, field

import numpy as np

__all__ = ["Duel", "DuelDataset", "stack_inputs"]


@dataclass(frozen=True)
class Duel:
    winner: np.ndarray
    loser: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.winner, float)
        l = np.asarray(self.loser, float)
        if w.ndim != 1 or w.shape != l.shape:
            raise ValueError("winner and loser must be 1-d vectors of equal length")
        if not (np.isfinite(w).all() and np.isfinite(l).all()):
            raise ValueError("duel points must be finite")
        object.__setattr__(self, "winner", w)
        object.__setattr__(self, "loser", l)


@dataclass(frozen=True)
class DuelDataset:
    dimension: int
    duels: tuple = field(default=())

    def __post_init__(self):
        duels = tuple(self.duels)
        for d in duels:
            if d.winner.shape != (self.dimension,):
                raise ValueError("all duels must match the dataset dimension")
        object.__setattr__(self, "duels", duels)

    def __len__(self):
        return len(self.duels)

    def append(self, duel):
        """New dataset with one more duel (datasets are immutable)."""
        return DuelDataset(self.dimension, self.duels + (duel,))

    @property
    def winners(self):
        if not self.duels:
            return np.empty((0, self.dimension))
        return np.stack([d.winner for d in self.duels])

    @property
    def losers(self):
        if not self.duels:
            return np.empty((0, self.dimension))
        return np.stack([d.loser for d in self.duels])

    def to_json(self):
        return json.dumps({
            "dimension": self.dimension,
            "duels": [{"winner": d.winner.tolist(), "loser": d.loser.tolist()}
                      for d in self.duels],
        })

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        return cls(int(doc["dimension"]),
                   tuple(Duel(np.asarray(d["winner"], float),
                              np.asarray(d["loser"], float))
                         for d in doc["duels"]))


def stack_inputs(tes, data):
    """Design matrix with rows: m test points, then t winners, then t losers."""
    tes = np.asarray(tes, float).reshape(-1, data.dimension) if len(tes) \
        else np.empty((0, data.dimension))
    return np.vstack([tes, data.winners, data.losers])
