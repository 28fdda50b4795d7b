"""Walker's alias method for O(1) draws from a fixed discrete distribution."""

from __future__ import annotations

import math

import numpy as np

from ..errors import DegenerateProposal


class AliasTable:
    """Alias table built with Vose's stable variant of Walker's construction.

    Column ``i`` keeps itself with probability ``cutoff[i]`` and otherwise
    defers to ``alias[i]``.
    """

    def __init__(self, weights):
        w = np.asarray(weights, dtype=float).reshape(-1)
        if w.size == 0:
            raise DegenerateProposal("no weights")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise DegenerateProposal("weights must be finite and nonnegative")
        total = math.fsum(w.tolist())
        if not total > 0:
            raise DegenerateProposal("all weights are zero")
        n = w.size
        scaled = (w / total * n).tolist()
        cutoff = [1.0] * n
        alias = list(range(n))
        small = [i for i, p in enumerate(scaled) if p < 1.0]
        large = [i for i, p in enumerate(scaled) if p >= 1.0]
        while small and large:
            s = small.pop()
            g = large.pop()
            cutoff[s] = scaled[s]
            alias[s] = g
            scaled[g] = (scaled[g] + scaled[s]) - 1.0
            if scaled[g] < 1.0:
                small.append(g)
            else:
                large.append(g)
        # Leftovers are 1 up to rounding.
        for i in small + large:
            cutoff[i] = 1.0
            alias[i] = i
        self.weights = w
        self.total = total
        self.cutoff = np.array(cutoff)
        self.alias = np.array(alias, dtype=np.int64)

    def __len__(self):
        return self.cutoff.size

    def probabilities(self) -> np.ndarray:
        """Distribution implied by the table (for inspection and tests)."""
        n = len(self)
        p = self.cutoff.copy()
        np.add.at(p, self.alias, 1.0 - self.cutoff)
        return p / n

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        n = len(self)
        col = np.minimum((rng.random(size) * n).astype(np.int64), n - 1)
        keep = rng.random(size) < self.cutoff[col]
        return np.where(keep, col, self.alias[col])

    def __repr__(self):
        return f"AliasTable(n={len(self)}, total={self.total!r})"


def build_alias(weights) -> AliasTable:
    return AliasTable(weights)
