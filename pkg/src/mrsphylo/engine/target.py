"""Unnormalized target densities over one or more labelled box domains."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol, Sequence

import numpy as np

from .. import interval as ia
from ..interval import Box


class Evaluable(Protocol):
    """What the engine needs from a shape: point values and box enclosures."""

    dim: int

    def real_batch(self, points) -> np.ndarray: ...

    def interval_batch(self, lo, hi, outward: bool = True) -> tuple[np.ndarray, np.ndarray]: ...


@dataclass(frozen=True)
class ShapePiece:
    label: str
    domain: Box
    shape: Evaluable
    weight: float = 1.0

    def __post_init__(self):
        if not (self.weight >= 0 and np.isfinite(self.weight)):
            raise ValueError("piece weight must be finite and nonnegative")
        if self.shape.dim > self.domain.dim:
            raise ValueError(
                f"shape needs {self.shape.dim} coordinates, domain {self.label!r} has {self.domain.dim}"
            )


@dataclass
class TargetShape:
    """A target shape ``p*`` spread over labelled pieces of a common dimension.

    Each piece's values are multiplied by its ``weight``; equal weights
    realize a uniform prior over the labels.
    """

    pieces: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.pieces:
            raise ValueError("a target needs at least one piece")
        dims = {p.domain.dim for p in self.pieces}
        if len(dims) != 1:
            raise ValueError("all pieces must share one dimension")
        labels = [p.label for p in self.pieces]
        if len(set(labels)) != len(labels):
            raise ValueError("piece labels must be distinct")

    @classmethod
    def single(cls, shape: Evaluable, domain, label: str = "0", **meta) -> "TargetShape":
        if not isinstance(domain, Box):
            domain = Box(tuple(domain))
        return cls([ShapePiece(label, domain, shape)], dict(meta))

    @property
    def dim(self) -> int:
        return self.pieces[0].domain.dim

    @property
    def labels(self) -> list[str]:
        return [p.label for p in self.pieces]

    def enclose(self, piece: int, lo, hi, outward=True):
        """Weighted enclosure of piece ``piece`` over a batch of boxes."""
        p = self.pieces[piece]
        el, eh = p.shape.interval_batch(lo, hi, outward)
        if p.weight != 1.0:
            el, eh = ia.scale(el, eh, p.weight, outward)
        return el, eh

    def values(self, piece: int, points) -> np.ndarray:
        p = self.pieces[piece]
        return p.shape.real_batch(points) * p.weight

    def value_at(self, label: str, theta: Sequence[float]) -> float:
        i = self.labels.index(label)
        return float(self.values(i, np.asarray(theta, dtype=float)[None, :])[0])
