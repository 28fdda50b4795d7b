"""Branch-length bookkeeping for clocked triplets and divergence-ratio summaries."""

from __future__ import annotations

import logging

import numpy as np

from ..errors import DomainError

log = logging.getLogger(__name__)


def clocked_triplet_branches(tau1: float, tau0: float, gamma: float | None = None):
    """Edge lengths ``(tip1, tip2, internal, outgroup)`` of a clocked rooted triplet.

    Taxa 1 and 2 split at ``tau1`` and join taxon 3 at the root ``tau0``.
    With ``gamma`` the first tip is shortened to ``gamma * tau1`` (a sampled
    fossil lineage).
    """
    if not (0 <= tau1 <= tau0):
        raise DomainError(f"need 0 <= tau1 <= tau0, got tau1={tau1}, tau0={tau0}")
    tip1 = tau1
    if gamma is not None:
        if not (0 <= gamma <= 1):
            raise DomainError(f"gamma must lie in [0, 1], got {gamma}")
        tip1 = gamma * tau1
    return tip1, tau1, tau0 - tau1, tau0


def unrooted_equivalent(tau1: float, tau0: float, gamma: float | None = None):
    """Unrooted triplet branches with the same likelihood under a reversible model.

    The root can slide along the path joining the internal node and the
    outgroup, so the outgroup branch absorbs the internal edge.
    """
    tip1, tip2, internal, out = clocked_triplet_branches(tau1, tau0, gamma)
    return tip1, tip2, internal + out


def midpoint_ratio(t1: float, t2: float, t3: float) -> float:
    """Split age over root age for a midpoint-rooted star triplet.

    The root goes at the middle of the longest leaf-to-leaf path, of length
    ``D``, so the root age is ``D/2``.  A midpoint-rooted tree need not be
    ultrametric; the age of the split of taxa 1 and 2 is taken as the mean of
    its two tip distances, ``(t1 + t2) / 2``.  If the root lands on an
    ingroup edge instead of the third (outgroup) edge, taxa 1 and 2 only meet
    at the root and the ratio is 1.  Ties between equally long paths go to the
    path through the outgroup edge.
    """
    d12, d13, d23 = t1 + t2, t1 + t3, t2 + t3
    longest = max(d12, d13, d23)
    if longest <= 0:
        return float("nan")
    if max(d13, d23) >= d12 and t3 >= longest / 2:
        return min(d12 / longest, 1.0)
    return 1.0


def divergence_ratio_transform(samples, tree: str) -> dict:
    """Per-sample divergence summaries.

    ``samples`` is an array of parameter vectors.  Returns ``{"ratio": ...}``
    and, for the fossil variant, also ``"fossil_date"``.  Rows with root time
    zero are dropped with a warning.
    """
    theta = np.atleast_2d(np.asarray(samples, dtype=float))
    if tree in ("clocked-triplet", "clocked-triplet-fossil"):
        keep = theta[:, 1] > 0
        if not keep.all():
            log.warning("skipping %d samples with zero root time", int((~keep).sum()))
        theta = theta[keep]
        out = {"ratio": theta[:, 0] / theta[:, 1]}
        if tree == "clocked-triplet-fossil":
            out["fossil_date"] = (1.0 - theta[:, 2]) * theta[:, 0] / theta[:, 1]
        return out
    if tree == "unrooted-triplet":
        vals = np.array([midpoint_ratio(*row[:3]) for row in theta])
        keep = np.isfinite(vals)
        if not keep.all():
            log.warning("skipping %d samples with zero tree length", int((~keep).sum()))
        return {"ratio": vals[keep]}
    raise DomainError(f"divergence ratios are defined for triplets, not {tree!r}")
