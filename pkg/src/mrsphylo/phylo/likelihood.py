"""Site-pattern likelihoods for small trees and the dataset shapes built on them.

Every likelihood here is a sum of products of nonnegative numbers (base
frequencies and transition probabilities), so it is nondecreasing in each
matrix entry.  The interval version therefore evaluates the same float
expression at the lower and at the upper entry bounds and widens each result
by the standard relative bound for nonnegative sums of products.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .. import interval as ia
from ..engine.target import ShapePiece, TargetShape
from ..errors import DomainError
from ..interval import Box
from .data import SitePatternData, encode_patterns
from .models import SubstModel

log = logging.getLogger(__name__)

TREE_CLASSES = ("unrooted-triplet", "clocked-triplet", "clocked-triplet-fossil", "unrooted-quartet")
QUARTET_TOPOLOGIES = {"12|34": (0, 1, 2, 3), "13|24": (0, 2, 1, 3), "14|23": (0, 3, 1, 2)}
PARAM_NAMES = {
    "unrooted-triplet": ("t1", "t2", "t3"),
    "clocked-triplet": ("tau1", "tau0"),
    "clocked-triplet-fossil": ("tau1", "tau0", "gamma"),
    "unrooted-quartet": ("t1", "t2", "t3", "t4", "t0"),
}
DOMAIN_LO = 1e-10
DOMAIN_HI = 10.0

_U = 2.0**-53
_OPS = 32  # generous count of roundings along any product-and-sum path
_GAMMA = _OPS * _U / (1 - _OPS * _U)
_TINY = 1e-300  # absorbs gradual-underflow error
_CHUNK = 4096


def n_taxa(tree: str) -> int:
    _check_tree(tree)
    return 4 if tree == "unrooted-quartet" else 3


def _check_tree(tree: str):
    if tree not in TREE_CLASSES:
        raise DomainError(f"unknown tree class {tree!r}; expected one of {', '.join(TREE_CLASSES)}")


# -- likelihood kernels on float matrices -----------------------------------
# Each kernel takes (N, 4, 4) matrices and pattern columns (K,) and returns (N, K).


def _star(pi, mats, cols):
    acc = mats[0][:, :, cols[0]]
    for m, c in zip(mats[1:], cols[1:]):
        acc = acc * m[:, :, c]
    return np.einsum("r,nrk->nk", pi, acc)


def _two_node(pi, left, inner, right):
    """Sum over root u and inner node v: pi_u left[u] inner[u, v] right[v]."""
    down = np.einsum("nuv,nvk->nuk", inner, right)
    return np.einsum("u,nuk,nuk->nk", pi, left, down)


def _triplet_kernel(pi, mats, cols):
    return _star(pi, mats, cols)


def _quartet_kernel(pi, mats, cols, topology):
    a, b, c, d = QUARTET_TOPOLOGIES[topology]
    left = mats[a][:, :, cols[a]] * mats[b][:, :, cols[b]]
    right = mats[c][:, :, cols[c]] * mats[d][:, :, cols[d]]
    return _two_node(pi, left, mats[4], right)


def _clocked_kernel(pi, mats, cols):
    # mats: tip 1, tip 2, outgroup, internal edge.  The root sits above the
    # outgroup edge and the internal edge; the internal node joins tips 1, 2.
    left = mats[2][:, :, cols[2]]
    right = mats[0][:, :, cols[0]] * mats[1][:, :, cols[1]]
    return _two_node(pi, left, mats[3], right)


@dataclass(frozen=True)
class _Layout:
    """Maps a parameter vector to per-edge branch lengths and the kernel."""

    tree: str
    topology: str | None = None

    def edges_real(self, theta):
        if self.tree == "unrooted-triplet" or self.tree == "unrooted-quartet":
            return [theta[:, i] for i in range(theta.shape[1])]
        tau1, tau0 = theta[:, 0], theta[:, 1]
        b1 = tau1 * theta[:, 2] if self.tree == "clocked-triplet-fossil" else tau1
        return [b1, tau1, tau0, np.maximum(tau0 - tau1, 0.0)]

    def edges_interval(self, lo, hi, outward):
        if self.tree == "unrooted-triplet" or self.tree == "unrooted-quartet":
            return [(lo[:, i], hi[:, i]) for i in range(lo.shape[1])]
        t1 = (lo[:, 0], hi[:, 0])
        t0 = (lo[:, 1], hi[:, 1])
        if self.tree == "clocked-triplet-fossil":
            b1 = ia.mul_nonneg(lo[:, 2], hi[:, 2], *t1, outward)
        else:
            b1 = t1
        il, ih = ia.sub(*t0, *t1, outward)
        return [b1, t1, t0, (np.maximum(il, 0.0), np.maximum(ih, 0.0))]

    def kernel(self, pi, mats, cols):
        if self.tree == "unrooted-triplet":
            return _triplet_kernel(pi, mats, cols)
        if self.tree == "unrooted-quartet":
            return _quartet_kernel(pi, mats, cols, self.topology)
        return _clocked_kernel(pi, mats, cols)

    @property
    def clocked(self) -> bool:
        return self.tree.startswith("clocked")


class TreeLikelihoodShape:
    """``exp(sum_k count_k log L(pattern_k | theta) - log_offset)`` for one tree.

    Satisfies the engine's evaluable protocol.  ``log_offset`` is a fixed
    rescaling; it keeps the shape near 1 at the mode instead of underflowing.
    For clocked trees the shape is zero where ``tau1 > tau0``.
    """

    def __init__(self, data: SitePatternData, tree: str, model: SubstModel,
                 topology: str | None = None, log_offset: float = 0.0):
        _check_tree(tree)
        if len(data.taxa) != n_taxa(tree):
            raise DomainError(f"{tree} needs {n_taxa(tree)} taxa, data has {len(data.taxa)}")
        if tree == "unrooted-quartet" and topology not in QUARTET_TOPOLOGIES:
            raise DomainError(f"unknown quartet topology {topology!r}")
        self.data = data
        self.tree = tree
        self.model = model
        self.topology = topology
        self.log_offset = float(log_offset)
        self.dim = len(PARAM_NAMES[tree])
        self._layout = _Layout(tree, topology)
        self._cols = list(encode_patterns(data).T)
        self._counts = np.array(data.counts, dtype=float)
        self._pi = model.pi

    # -- point evaluation -----------------------------------------------------
    def site_likelihoods(self, points) -> np.ndarray:
        theta = np.atleast_2d(np.asarray(points, dtype=float))
        mats = [self.model.transition(np.maximum(e, 0.0)) for e in self._layout.edges_real(theta)]
        return self._layout.kernel(self._pi, mats, self._cols)

    def loglik(self, points) -> np.ndarray:
        theta = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.empty(len(theta))
        for s in range(0, len(theta), _CHUNK):
            part = theta[s:s + _CHUNK]
            with np.errstate(divide="ignore"):
                out[s:s + _CHUNK] = np.log(self.site_likelihoods(part)) @ self._counts
            if self._layout.clocked:
                out[s:s + _CHUNK][part[:, 0] > part[:, 1]] = -np.inf
        return out

    def real_batch(self, points) -> np.ndarray:
        return np.exp(self.loglik(points) - self.log_offset)

    # -- box evaluation -------------------------------------------------------
    def site_likelihood_bounds(self, lo, hi, outward=True):
        lo = np.atleast_2d(np.asarray(lo, dtype=float))
        hi = np.atleast_2d(np.asarray(hi, dtype=float))
        mats_lo, mats_hi = [], []
        for el, eh in self._layout.edges_interval(lo, hi, outward):
            pl, ph = self.model.transition_interval(el, eh, outward)
            mats_lo.append(pl)
            mats_hi.append(ph)
        llo = self._layout.kernel(self._pi, mats_lo, self._cols)
        lhi = self._layout.kernel(self._pi, mats_hi, self._cols)
        if outward:
            llo = np.maximum(np.nextafter(llo * (1 - _GAMMA), -np.inf) - _TINY, 0.0)
            lhi = np.nextafter(lhi * (1 + _GAMMA), np.inf) + _TINY
        return llo, np.minimum(lhi, 1.0)

    def loglik_bounds(self, lo, hi, outward=True):
        lo = np.atleast_2d(np.asarray(lo, dtype=float))
        hi = np.atleast_2d(np.asarray(hi, dtype=float))
        n = len(lo)
        out_lo = np.empty(n)
        out_hi = np.empty(n)
        for s in range(0, n, _CHUNK):
            sl = slice(s, s + _CHUNK)
            out_lo[sl], out_hi[sl] = self._loglik_bounds_chunk(lo[sl], hi[sl], outward)
        return out_lo, out_hi

    def _loglik_bounds_chunk(self, lo, hi, outward):
        llo, lhi = self.site_likelihood_bounds(lo, hi, outward)
        pos = llo > 0
        with np.errstate(divide="ignore", invalid="ignore"):
            gl, gh = ia.log(np.where(pos, llo, lhi), lhi, outward)
        gl = np.where(pos, gl, -np.inf)
        c = self._counts
        with np.errstate(invalid="ignore"):
            s_lo = gl @ c
            s_hi = gh @ c
            if outward and c.size:
                # Products count*log and the dot-product sum each round;
                # bound both by a relative error on the sum of magnitudes.
                g = (c.size + 2) * _U / (1 - (c.size + 2) * _U)
                s_lo = np.nextafter(s_lo - g * (np.abs(gl) @ c), -np.inf)
                s_hi = np.nextafter(s_hi + g * (np.abs(gh) @ c), np.inf)
        if self._layout.clocked:
            tau1_lo, tau1_hi = lo[:, 0], hi[:, 0]
            tau0_lo, tau0_hi = lo[:, 1], hi[:, 1]
            s_lo = np.where(tau1_hi <= tau0_lo, s_lo, -np.inf)
            s_hi = np.where(tau1_lo > tau0_hi, -np.inf, s_hi)
        return s_lo, s_hi

    def interval_batch(self, lo, hi, outward=True):
        s_lo, s_hi = self.loglik_bounds(lo, hi, outward)
        off = self.log_offset
        with np.errstate(invalid="ignore"):
            d_lo, d_hi = ia.sub(s_lo, s_hi, off, off, outward)
        d_lo = np.where(s_lo == -np.inf, -np.inf, d_lo)
        d_hi = np.where(s_hi == -np.inf, -np.inf, d_hi)
        el, eh = ia.exp(d_lo, d_hi, outward)
        eh = np.where(d_hi == -np.inf, 0.0, eh)  # exp(-inf) is exactly 0
        return np.maximum(el, 0.0), eh


# -- single-site helpers ------------------------------------------------------


def _one_site(tree, pattern, branches, model, topology=None):
    data = SitePatternData.single(pattern, n=n_taxa(tree))
    shape = TreeLikelihoodShape(data, tree, model, topology)
    return float(shape.site_likelihoods(np.asarray(branches, dtype=float)[None, :])[0, 0])


def triplet_site_likelihood(pattern: str, branches, model: SubstModel) -> float:
    _nonneg(branches)
    return _one_site("unrooted-triplet", pattern, branches, model)


def quartet_site_likelihood(pattern: str, topology: str, branches, model: SubstModel) -> float:
    """Branches are ``(t1, t2, t3, t4, t0)``: one per leaf, then the internal edge."""
    _nonneg(branches)
    return _one_site("unrooted-quartet", pattern, branches, model, topology)


def clocked_triplet_site_likelihood(pattern: str, times, model: SubstModel) -> float:
    """Rooted likelihood at ``(tau1, tau0)`` or ``(tau1, tau0, gamma)``."""
    tree = "clocked-triplet-fossil" if len(times) == 3 else "clocked-triplet"
    from .transforms import clocked_triplet_branches

    clocked_triplet_branches(*times)  # validates
    return _one_site(tree, pattern, times, model)


def site_likelihood_bounds(tree, pattern, lo, hi, model, topology=None, outward=True):
    """Enclosure of one site likelihood over the box ``[lo, hi]``."""
    data = SitePatternData.single(pattern, n=n_taxa(tree))
    shape = TreeLikelihoodShape(data, tree, model, topology)
    l, h = shape.site_likelihood_bounds(np.asarray(lo, float)[None, :], np.asarray(hi, float)[None, :], outward)
    return float(l[0, 0]), float(h[0, 0])


def _nonneg(branches):
    if any(not (b >= 0) for b in branches):
        raise DomainError("branch lengths must be nonnegative")


def pattern_likelihood_normalization(branches, model: SubstModel, n_taxa: int = 3,
                                     topology: str = "12|34") -> float:
    """Sum of site likelihoods over all ``4**n_taxa`` patterns (should be 1)."""
    if n_taxa not in (3, 4):
        raise DomainError("only 3 or 4 taxa are supported")
    tree = "unrooted-triplet" if n_taxa == 3 else "unrooted-quartet"
    data = SitePatternData.all_patterns(n_taxa)
    shape = TreeLikelihoodShape(data, tree, model, topology if n_taxa == 4 else None)
    return math.fsum(shape.site_likelihoods(np.asarray(branches, dtype=float)[None, :])[0])


# -- dataset shapes -----------------------------------------------------------


def default_domain(tree: str, lo: float = DOMAIN_LO, hi: float = DOMAIN_HI) -> Box:
    if not lo < hi:
        raise DomainError("domain needs lo < hi")
    k = len(PARAM_NAMES[tree])
    bounds = [(lo, hi)] * k
    if tree == "clocked-triplet-fossil":
        bounds[2] = (0.0, 1.0)
    return Box.from_bounds([b[0] for b in bounds], [b[1] for b in bounds])


def max_loglik(shape: TreeLikelihoodShape, domain: Box, points_per_axis: int | None = None) -> float:
    """Largest log-likelihood on a coarse grid, zoomed in a few times around the best point."""
    k = domain.dim
    m = points_per_axis or {2: 64, 3: 24, 5: 7}.get(k, 8)
    lo = np.array(domain.lo, dtype=float)
    hi = np.array(domain.hi, dtype=float)
    logscale = lo > 0
    best_val, best = -np.inf, None
    for _ in range(6):
        axes = []
        for i in range(k):
            if logscale[i]:
                axes.append(np.geomspace(lo[i], hi[i], m))
            else:
                axes.append(np.linspace(lo[i], hi[i], m))
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, k)
        vals = shape.loglik(grid)
        j = int(np.argmax(vals))
        if vals[j] > best_val:
            best_val, best = float(vals[j]), grid[j]
        if best is None:
            break
        # zoom: two grid steps either side of the incumbent
        for i in range(k):
            ax = axes[i]
            pos = int(np.searchsorted(ax, best[i]))
            a = ax[max(pos - 2, 0)]
            b = ax[min(pos + 2, m - 1)]
            lo[i], hi[i] = min(a, best[i]), max(b, best[i])
    return best_val


def dataset_log_shape(data: SitePatternData, tree: str, model: SubstModel,
                      domain: Box | None = None, log_offset: float | str = "auto") -> TargetShape:
    """Target shape proportional to ``prod_k L(pattern_k | theta) ** count_k``.

    ``log_offset="auto"`` rescales by the approximate maximum log-likelihood;
    a number fixes it (0 gives the raw product).  Quartets yield one piece per
    topology with equal weights.
    """
    _check_tree(tree)
    if len(data.taxa) != n_taxa(tree):
        raise DomainError(f"{tree} needs {n_taxa(tree)} taxa, data has {len(data.taxa)}")
    domain = domain or default_domain(tree)
    if domain.dim != len(PARAM_NAMES[tree]):
        raise DomainError(f"{tree} needs a {len(PARAM_NAMES[tree])}-dimensional domain")
    tops = list(QUARTET_TOPOLOGIES) if tree == "unrooted-quartet" else [None]
    shapes = [TreeLikelihoodShape(data, tree, model, t) for t in tops]
    if log_offset == "auto":
        off = max(max_loglik(s, domain) for s in shapes) if data.patterns else 0.0
    else:
        off = float(log_offset)
    pieces = []
    for t, s in zip(tops, shapes):
        s.log_offset = off
        pieces.append(ShapePiece(t or tree, domain, s, 1.0))
    meta = {"tree": tree, "model": model.kind, "log_offset": off, "params": PARAM_NAMES[tree]}
    return TargetShape(pieces, meta)
