"""The von Neumann accept/reject loop driven by an interval envelope.

Proposals are drawn and tested in vectorized batches, but accepted points are
assigned to samples strictly in proposal order, so the output depends only on
the seed and the configuration.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ..errors import DegenerateProposal, TrialsExhausted
from ..interval import Interval
from .partition import Partition
from .target import TargetShape

log = logging.getLogger(__name__)

TRIALS_MAX_DEFAULT = 10**6
RNG_NAME = "numpy.random.Generator(PCG64)"


@dataclass(frozen=True)
class SampleRecord:
    label: str
    theta: tuple
    trials: int
    indeterminate: int = 0


@dataclass
class RunReport:
    np_enclosure: Interval
    envelope_integral: float
    pieces: int
    accept_rate: float
    accept_lower_bound: float
    seed: int | None
    rng_draws: int
    samples: int = 0
    trials: int = 0
    indeterminate: int = 0
    envelope_violations: int = 0
    rng: str = RNG_NAME
    exhausted: bool = False

    def to_dict(self) -> dict:
        d = asdict(self)
        d["np_enclosure"] = [self.np_enclosure.lo, self.np_enclosure.hi]
        return d


def make_rng(seed) -> tuple[np.random.Generator, int | None]:
    if isinstance(seed, np.random.Generator):
        return seed, None
    return np.random.Generator(np.random.PCG64(seed)), (None if seed is None else int(seed))


def proposal_sample(partition: Partition, rng, size: int = 1):
    """Draw ``size`` proposals: a piece by upper mass, then a uniform point in it.

    Returns ``(piece_rows, theta)``; ``piece_rows`` index the partition arrays.
    """
    table = partition.alias_table()
    if not table.total > 0:
        raise DegenerateProposal("zero total envelope mass")
    act = partition.active()
    rows = act[table.draw(rng, size)]
    lo, hi = partition.lo[rows], partition.hi[rows]
    u = rng.random((size, partition.dim))
    theta = np.minimum(np.maximum(lo + (hi - lo) * u, lo), hi)
    return rows, theta


def rejection_sample(
    target: TargetShape,
    partition: Partition,
    n: int,
    rng=None,
    trials_max: int = TRIALS_MAX_DEFAULT,
    batch_max: int = 1 << 18,
):
    """Draw ``n`` exact samples from ``target`` using the partition's envelope.

    A proposal is accepted when its height ``H`` is at or below the lower
    bound of the thin-interval enclosure of the target at the point, rejected
    when above the upper bound, and counted as indeterminate (and rejected)
    in between.  Returns ``(samples, report)``; raises
    :class:`TrialsExhausted` with the partial results if one sample needs more
    than ``trials_max`` proposals.
    """
    if n < 0:
        raise ValueError("sample count must be nonnegative")
    rng, seed = make_rng(rng)
    outward = partition.policy.outward
    table = partition.alias_table()
    act = partition.active()
    env = np.maximum(partition.enc_hi[act], 0.0)
    labels = partition.label[act]
    names = target.labels
    bound = partition.acceptance_lower_bound()
    dim = partition.dim

    samples: list[SampleRecord] = []
    trials_total = 0
    indet_total = 0
    violations = 0
    draws = 0
    carry_trials = 0
    carry_indet = 0
    exhausted = False

    while len(samples) < n:
        remaining = n - len(samples)
        guess = remaining / max(bound, 1e-3) * 1.25 + 64
        size = int(min(batch_max, max(256, guess)))
        col = table.draw(rng, size)
        u = rng.random((size, dim))
        hgt = rng.random(size)
        draws += size * (dim + 3)

        lo, hi = partition.lo[act[col]], partition.hi[act[col]]
        theta = np.minimum(np.maximum(lo + (hi - lo) * u, lo), hi)
        e = env[col]
        h = e * (1.0 - hgt)  # uniform on (0, e]
        tl = np.empty(size)
        tu = np.empty(size)
        lab = labels[col]
        for j in np.unique(lab):
            sel = lab == j
            tl[sel], tu[sel] = target.enclose(int(j), theta[sel], theta[sel], outward)
        undefined = ~(np.isfinite(tl) & np.isfinite(tu))
        tl = np.where(undefined, -np.inf, tl)
        tu = np.where(undefined, np.inf, tu)
        violations += int(np.count_nonzero(tu > e))
        accept = h <= tl
        indet = ~accept & (h <= tu)

        pos = np.flatnonzero(accept)[:remaining]
        cind = np.concatenate([[0], np.cumsum(indet)])
        prev = -1
        for p in pos.tolist():
            t = carry_trials + (p - prev)
            k = carry_indet + int(cind[p + 1] - cind[prev + 1])
            if t > trials_max:
                # The sample ran out at proposal prev + trials_max - carry.
                trials_total += trials_max
                indet_total += k
                exhausted = True
                break
            samples.append(
                SampleRecord(names[int(lab[p])], tuple(theta[p].tolist()), int(t), int(k))
            )
            trials_total += t
            indet_total += k
            carry_trials = 0
            carry_indet = 0
            prev = p
        if exhausted:
            break
        if len(samples) < n:
            carry_trials += size - 1 - prev
            carry_indet += int(cind[size] - cind[prev + 1])
            if carry_trials >= trials_max:
                trials_total += carry_trials
                indet_total += carry_indet
                exhausted = True
                break

    enc = partition.np_enclosure()
    report = RunReport(
        np_enclosure=enc,
        envelope_integral=partition.upper_total(),
        pieces=partition.n_pieces,
        accept_rate=(len(samples) / trials_total) if trials_total else math.nan,
        accept_lower_bound=bound,
        seed=seed,
        rng_draws=draws,
        samples=len(samples),
        trials=trials_total,
        indeterminate=indet_total,
        envelope_violations=violations,
        exhausted=exhausted,
    )
    if violations:
        log.error("envelope fell below the target enclosure at %d proposals", violations)
    if exhausted:
        raise TrialsExhausted(
            f"a sample needed more than {trials_max} proposals ({len(samples)} of {n} drawn)",
            samples=samples,
            report=report,
        )
    return samples, report


def acceptance_lower_bound(partition: Partition) -> float:
    return partition.acceptance_lower_bound()


def np_enclosure(partition: Partition) -> Interval:
    return partition.np_enclosure()


def envelope_at(partition: Partition, label: str, theta) -> float:
    return partition.envelope_at(label, theta)
