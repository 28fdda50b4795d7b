"""Checks shared by the unit tests and the acceptance suite."""

from __future__ import annotations

import numpy as np

from mrsphylo.engine import Partition

# Outward-rounded child volumes may each round up by one ulp, so the summed
# child mass can exceed the parent's by a few ulps of the parent mass.
ROUNDING_SLACK = 2.0**-50


def monotone_refinement(target, steps: int, checkpoint: int = 500):
    """Refine one split at a time and count envelope-monotonicity violations.

    Returns ``(violations, strict_violations, n_checks)``; ``strict``
    counts increases of any size, ``violations`` only those beyond the
    rounding slack.
    """
    part = Partition.initial(target)
    bad = 0
    strict = 0
    checks = 0

    def on_split(i, a, b):
        nonlocal bad, strict, checks
        checks += 1
        pl, ph = part.enc_lo[i], part.enc_hi[i]
        for c in (a, b):
            if not (part.enc_lo[c] >= pl and part.enc_hi[c] <= ph):
                bad += 1
        up = part.upper[a] + part.upper[b]
        lo = part.lower[a] + part.lower[b]
        if up > part.upper[i] or lo < part.lower[i]:
            strict += 1
        if up > part.upper[i] * (1 + ROUNDING_SLACK) or lo < part.lower[i] * (1 - ROUNDING_SLACK):
            bad += 1

    done = 0
    prev = None
    while done < steps:
        n = min(checkpoint, steps - done)
        done += part.refine(steps=n, on_split=on_split)
        enc = part.np_enclosure()
        if prev is not None:
            tol = ROUNDING_SLACK * prev.hi * part.n_pieces
            if enc.lo < prev.lo - tol or enc.hi > prev.hi + tol:
                bad += 1
        prev = enc
        checks += 1
    return bad, strict, checks


def ks_1d(samples, cdf):
    from scipy import stats

    return stats.kstest(np.asarray(samples, float), cdf).pvalue


def likelihood_enclosure_violations(tree, model, n_points, rng, topology=None, width=0.05):
    """Count (box, point, pattern) triples where the real site likelihood
    escapes its box enclosure.  Boxes are random with sides up to ``width``;
    one random point per box is checked against every pattern.
    """
    from mrsphylo.phylo import PARAM_NAMES, SitePatternData, TreeLikelihoodShape
    from mrsphylo.phylo.likelihood import n_taxa

    data = SitePatternData.all_patterns(n_taxa(tree))
    shape = TreeLikelihoodShape(data, tree, model, topology)
    k = len(PARAM_NAMES[tree])
    lo = rng.uniform(0.0, 2.0, (n_points, k))
    hi = lo + rng.uniform(0.0, width, (n_points, k))
    if tree.startswith("clocked"):
        # keep tau1 <= tau0 inside the box
        lo[:, 1] = np.maximum(lo[:, 1], hi[:, 0])
        hi[:, 1] = lo[:, 1] + rng.uniform(0.0, width, n_points)
    if tree == "clocked-triplet-fossil":
        lo[:, 2] = rng.uniform(0.0, 1.0 - width, n_points)
        hi[:, 2] = lo[:, 2] + rng.uniform(0.0, width, n_points)
    theta = lo + (hi - lo) * rng.random((n_points, k))
    bl, bh = shape.site_likelihood_bounds(lo, hi)
    val = shape.site_likelihoods(theta)
    return int(np.count_nonzero((val < bl) | (val > bh))), val.size


def containment_fuzz(n_trials: int, seed: int = 0):
    """Exact containment check of the outward array operations.

    ``n_trials`` random ``(op, X, Y, x in X, y in Y)`` draws, split evenly
    over add, sub, mul and div.  Every result is compared against the exact
    rational value.  Returns ``(violations, trials)``.
    """
    import oracles
    from gmpy2 import mpq

    from mrsphylo import interval as ia

    rng = np.random.default_rng(seed)
    ops = ("add", "sub", "mul", "div")
    exact = {
        "add": lambda a, b: a + b,
        "sub": lambda a, b: a - b,
        "mul": lambda a, b: a * b,
        "div": lambda a, b: a / b,
    }
    bad = 0
    done = 0
    per_op = n_trials // len(ops)
    for k, op in enumerate(ops):
        m = per_op + (1 if k < n_trials % len(ops) else 0)
        xl, xh = oracles.random_intervals(rng, m)
        yl, yh = oracles.random_intervals(rng, m, "zero_free" if op == "div" else "any")
        x, y = oracles.points_in(rng, xl, xh), oracles.points_in(rng, yl, yh)
        with np.errstate(all="ignore"):
            zl, zh = getattr(ia, op)(xl, xh, yl, yh)
        f = exact[op]
        for xi, yi, lo, hi in zip(x.tolist(), y.tolist(), zl.tolist(), zh.tolist()):
            if not oracles.contains(f(mpq(xi), mpq(yi)), lo, hi):
                bad += 1
        done += m
    return bad, done
