"""Adaptive box partitions carrying range enclosures of a target shape.

A partition is refined by repeatedly bisecting the box with the largest
``volume * width(enclosure)`` along its widest side.  The masses
``volume * max(0, enclosure)`` of the pieces define the simple-function
envelope and proposal used by the sampler.
"""

from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .. import interval as ia
from ..errors import DegenerateProposal, EnclosureFailure, OutOfDomain
from ..expr import uniform_subboxes
from ..interval import Box, Interval, RigorPolicy
from .alias import AliasTable
from .target import TargetShape

log = logging.getLogger(__name__)

_INF = math.inf
# Child priority never exceeds half the parent's, up to rounding in the volume.
_BATCH_SLACK = 1e-9


@dataclass(frozen=True)
class PartitionPiece:
    index: int
    label: str
    box: Box
    enclosure: Interval | None
    priority: float
    upper_mass: float
    lower_mass: float


class Partition:
    """Priority-queue partition of every labelled domain of a target."""

    def __init__(self, target: TargetShape, policy=RigorPolicy.OUTWARD, max_retries: int | None = None):
        self.target = target
        self.policy = RigorPolicy.coerce(policy)
        self.dim = target.dim
        self.max_retries = 48 * self.dim if max_retries is None else int(max_retries)
        self._n = 0
        self._cap = 0
        self._alloc(64)
        self._heap: list = []
        self._alive_count = 0
        self._undefined = 0
        self._upper_fin = 0.0
        self._lower_sum = 0.0
        self._alias: AliasTable | None = None
        self.steps = 0

    # -- storage ----------------------------------------------------------
    def _alloc(self, cap):
        d = self.dim
        old = self._n
        def grow(name, shape, dtype=float, fill=0.0):
            arr = np.full(shape, fill, dtype=dtype)
            if old:
                arr[:old] = getattr(self, name)[:old]
            setattr(self, name, arr)
        grow("lo", (cap, d))
        grow("hi", (cap, d))
        grow("enc_lo", cap)
        grow("enc_hi", cap)
        grow("upper", cap)
        grow("lower", cap)
        grow("priority", cap)
        grow("label", cap, np.int64, 0)
        grow("retry", cap, np.int64, 0)
        grow("alive", cap, bool, False)
        self._cap = cap

    def _enclose(self, labels, lo, hi):
        el = np.empty(lo.shape[0])
        eh = np.empty_like(el)
        for piece in np.unique(labels):
            sel = labels == piece
            el[sel], eh[sel] = self.target.enclose(int(piece), lo[sel], hi[sel], self.policy.outward)
        return el, eh

    def _register(self, labels, lo, hi, retry, el=None, eh=None):
        """Append new boxes (evaluating enclosures unless given); returns their indices."""
        m = lo.shape[0]
        if m == 0:
            return np.zeros(0, dtype=np.int64)
        outward = self.policy.outward
        if el is None:
            el, eh = self._enclose(labels, lo, hi)
        dl = ia.diameter_down(lo, hi, outward)
        dh = ia.diameter_up(lo, hi, outward)
        vl, vh = ia.product_bounds(dl, dh, outward)
        with np.errstate(invalid="ignore", over="ignore"):
            ml, mh = ia.mul_nonneg(vl, vh, np.maximum(el, 0.0), np.maximum(eh, 0.0), outward)
            prio = vh * ia.diameter_up(el, eh, outward)
        undefined = ~(np.isfinite(el) & np.isfinite(eh) & np.isfinite(mh) & np.isfinite(prio))
        new_retry = np.where(undefined, retry + 1, 0)
        if np.any(new_retry > self.max_retries):
            j = int(np.flatnonzero(new_retry > self.max_retries)[0])
            box = Box.from_bounds(lo[j], hi[j])
            label = self.target.pieces[int(labels[j])].label
            raise EnclosureFailure(
                f"interval extension still undefined after {self.max_retries} splits on {box!r}",
                box=box,
                label=label,
            )
        ml = np.where(undefined, 0.0, ml)
        mh = np.where(undefined, _INF, mh)
        prio = np.where(undefined, _INF, prio)
        el = np.where(undefined, np.nan, el)
        eh = np.where(undefined, np.nan, eh)

        if self._n + m > self._cap:
            self._alloc(max(2 * self._cap, self._n + m))
        idx = np.arange(self._n, self._n + m)
        self.lo[idx], self.hi[idx] = lo, hi
        self.enc_lo[idx], self.enc_hi[idx] = el, eh
        self.upper[idx], self.lower[idx] = mh, ml
        self.priority[idx] = prio
        self.label[idx] = labels
        self.retry[idx] = new_retry
        self.alive[idx] = True
        self._n += m
        self._alive_count += m
        self._undefined += int(undefined.sum())
        self._upper_fin += float(mh[~undefined].sum())
        self._lower_sum += float(ml.sum())
        for i, p in zip(idx.tolist(), prio.tolist()):
            heapq.heappush(self._heap, (-p, i))
        self._alias = None
        return idx

    def _retire(self, i):
        self.alive[i] = False
        self._alive_count -= 1
        if math.isinf(self.upper[i]):
            self._undefined -= 1
        else:
            self._upper_fin -= float(self.upper[i])
        self._lower_sum -= float(self.lower[i])

    # -- construction -------------------------------------------------------
    @classmethod
    def initial(cls, target: TargetShape, **kw) -> "Partition":
        part = cls(target, **kw)
        lo = np.array([p.domain.lo for p in target.pieces])
        hi = np.array([p.domain.hi for p in target.pieces])
        part._register(np.arange(len(target.pieces)), lo, hi, np.zeros(len(target.pieces), dtype=np.int64))
        return part

    @classmethod
    def uniform(cls, target: TargetShape, k: int, **kw) -> "Partition":
        """Split every side of every domain into ``k`` equal parts (``k**dim`` boxes each)."""
        part = cls(target, **kw)
        for j, p in enumerate(target.pieces):
            lo, hi = uniform_subboxes(p.domain, k)
            part._register(np.full(lo.shape[0], j), lo, hi, np.zeros(lo.shape[0], dtype=np.int64))
        if part._undefined:
            raise EnclosureFailure("interval extension undefined on a uniform piece")
        return part

    def refine(
        self,
        steps: int | None = None,
        max_pieces: int | None = None,
        target_accept: float | None = None,
        on_split: Callable[[int, int, int], None] | None = None,
    ) -> int:
        """Bisect highest-priority boxes until a stop rule fires.

        Boxes whose enclosure is undefined or overflowed are split regardless
        of the stop rules.  The result is identical to popping one box at a
        time; boxes are only grouped so their children can be evaluated in
        one vectorized call.
        """
        done = 0

        def satisfied() -> bool:
            if self._undefined:
                return False
            if steps is None and max_pieces is None and target_accept is None:
                return True
            if steps is not None and done >= steps:
                return True
            if max_pieces is not None and self._alive_count >= max_pieces:
                return True
            if target_accept is not None and self._running_bound() >= target_accept:
                return True
            return False

        while self._heap and not satisfied():
            limit = math.inf
            if steps is not None:
                limit = min(limit, steps - done)
            if max_pieces is not None:
                limit = min(limit, max_pieces - self._alive_count)
            p1 = -self._heap[0][0]
            batch = [heapq.heappop(self._heap)[1]]
            if math.isinf(p1) or p1 == 0:
                while self._heap and -self._heap[0][0] == p1 and (math.isinf(p1) or len(batch) < limit):
                    batch.append(heapq.heappop(self._heap)[1])
            else:
                thr = 0.5 * p1 * (1 + _BATCH_SLACK)
                while self._heap and -self._heap[0][0] > thr and len(batch) < limit:
                    batch.append(heapq.heappop(self._heap)[1])
            done += self._split_batch(np.array(batch, dtype=np.int64), steps, done, max_pieces, target_accept, on_split)
        self.steps += done
        return done

    def _split_batch(self, parents, steps, done, max_pieces, target_accept, on_split):
        lo = self.lo[parents]
        hi = self.hi[parents]
        side = np.argmax(ia.diameter_up(lo, hi), axis=1)
        rows = np.arange(parents.size)
        a, b = lo[rows, side], hi[rows, side]
        mid = np.clip(0.5 * a + 0.5 * b, a, b)
        lo2 = lo.copy()
        hi1 = hi.copy()
        hi1[rows, side] = mid
        lo2[rows, side] = mid
        # Interleave so children of parent j are 2j and 2j+1, matching sequential creation order.
        c_lo = np.empty((2 * parents.size, self.dim))
        c_hi = np.empty_like(c_lo)
        c_lo[0::2], c_hi[0::2] = lo, hi1
        c_lo[1::2], c_hi[1::2] = lo2, hi
        labels = np.repeat(self.label[parents], 2)
        retry = np.repeat(self.retry[parents], 2)

        el, eh = self._enclose(labels, c_lo, c_hi)
        # Decide how many of the popped boxes a one-at-a-time loop would split.
        take = parents.size
        if target_accept is not None:
            take = self._replay_cut(parents, c_lo, c_hi, el, eh, target_accept)
        for j in range(take, parents.size):
            i = int(parents[j])
            heapq.heappush(self._heap, (-float(self.priority[i]), i))
        if take == 0:
            return 0
        for i in parents[:take].tolist():
            self._retire(i)
        k = 2 * take
        new = self._register(labels[:k], c_lo[:k], c_hi[:k], retry[:k], el[:k], eh[:k])
        if on_split is not None:
            for j, i in enumerate(parents[:take].tolist()):
                on_split(i, int(new[2 * j]), int(new[2 * j + 1]))
        return take

    def _replay_cut(self, parents, c_lo, c_hi, el, eh, target_accept):
        outward = self.policy.outward
        dl = ia.diameter_down(c_lo, c_hi, outward)
        dh = ia.diameter_up(c_lo, c_hi, outward)
        vl, vh = ia.product_bounds(dl, dh, outward)
        with np.errstate(invalid="ignore", over="ignore"):
            ml, mh = ia.mul_nonneg(vl, vh, np.maximum(el, 0.0), np.maximum(eh, 0.0), outward)
        bad = ~(np.isfinite(el) & np.isfinite(eh) & np.isfinite(mh))
        upper, lower, undef = self._upper_fin, self._lower_sum, self._undefined
        for j, i in enumerate(parents.tolist()):
            if undef == 0 and upper > 0 and lower / upper >= target_accept:
                return j
            if math.isinf(self.upper[i]):
                undef -= 1
            else:
                upper -= float(self.upper[i])
            lower -= float(self.lower[i])
            for c in (2 * j, 2 * j + 1):
                if bad[c]:
                    undef += 1
                else:
                    upper += float(mh[c])
                    lower += float(ml[c])
        return parents.size

    def _running_bound(self) -> float:
        if self._undefined or not self._upper_fin > 0:
            return 0.0
        return self._lower_sum / self._upper_fin

    # -- queries ----------------------------------------------------------
    @property
    def n_pieces(self) -> int:
        return self._alive_count

    def __len__(self):
        return self._alive_count

    @property
    def has_undefined(self) -> bool:
        return self._undefined > 0

    def active(self) -> np.ndarray:
        """Indices of live pieces in creation order."""
        return np.flatnonzero(self.alive[: self._n])

    def _require_defined(self):
        if self._undefined:
            raise EnclosureFailure(f"{self._undefined} piece(s) still lack a finite enclosure")

    def upper_total(self) -> float:
        self._require_defined()
        return math.fsum(self.upper[self.active()].tolist())

    def lower_total(self) -> float:
        self._require_defined()
        return math.fsum(self.lower[self.active()].tolist())

    def np_enclosure(self) -> Interval:
        """Enclosure of the integral of the (weighted) target over all domains."""
        lo = self.lower_total()
        hi = self.upper_total()
        if self.policy.outward:
            lo = max(0.0, math.nextafter(lo, -math.inf)) if lo > 0 else 0.0
            hi = math.nextafter(hi, math.inf)
        return Interval(lo, hi)

    def envelope_integral(self) -> float:
        return self.upper_total()

    def acceptance_lower_bound(self) -> float:
        enc = self.np_enclosure()
        if not enc.hi > 0:
            raise DegenerateProposal("envelope has zero mass")
        q = enc.lo / enc.hi
        return math.nextafter(q, -math.inf) if (self.policy.outward and q > 0) else q

    def pieces(self) -> list[PartitionPiece]:
        out = []
        for i in self.active().tolist():
            defined = np.isfinite(self.enc_lo[i])
            out.append(
                PartitionPiece(
                    index=i,
                    label=self.target.pieces[int(self.label[i])].label,
                    box=Box.from_bounds(self.lo[i], self.hi[i]),
                    enclosure=Interval(self.enc_lo[i], self.enc_hi[i]) if defined else None,
                    priority=float(self.priority[i]),
                    upper_mass=float(self.upper[i]),
                    lower_mass=float(self.lower[i]),
                )
            )
        return out

    def envelope_at(self, label: str, theta) -> float:
        """Envelope height at ``theta``; shared faces belong to the older piece."""
        theta = np.asarray(theta, dtype=float).reshape(-1)
        j = self.target.labels.index(label)
        act = self.active()
        act = act[self.label[act] == j]
        inside = np.all((self.lo[act] <= theta) & (theta <= self.hi[act]), axis=1)
        if not inside.any():
            raise OutOfDomain(f"{theta.tolist()} lies outside every piece labelled {label!r}")
        i = int(act[np.flatnonzero(inside)[0]])
        if not np.isfinite(self.enc_hi[i]):
            return math.inf
        return max(0.0, float(self.enc_hi[i]))

    def alias_table(self) -> AliasTable:
        self._require_defined()
        if self._alias is None:
            self._alias = AliasTable(self.upper[self.active()])
        return self._alias


def build_partition(
    target: TargetShape,
    budget: int | None = None,
    target_accept: float | None = None,
    max_pieces: int | None = None,
    policy=RigorPolicy.OUTWARD,
    max_retries: int | None = None,
) -> Partition:
    """Initial domains refined to ``budget`` pieces or to an acceptance bound.

    With ``target_accept``, ``max_pieces`` (default 2**20) caps the work.
    """
    part = Partition.initial(target, policy=policy, max_retries=max_retries)
    if budget is not None:
        part.refine(max_pieces=budget)
    elif target_accept is not None:
        cap = max_pieces if max_pieces is not None else 2**20
        part.refine(max_pieces=cap, target_accept=target_accept)
        if part.n_pieces >= cap and part.acceptance_lower_bound() < target_accept:
            log.warning(
                "piece cap %d reached with acceptance bound %.4g < %.4g",
                cap,
                part.acceptance_lower_bound(),
                target_accept,
            )
    else:
        part.refine()
    return part
