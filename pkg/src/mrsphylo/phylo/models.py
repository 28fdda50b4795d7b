"""Jukes-Cantor and HKY substitution models with real and interval transition matrices.

Nucleotides are indexed in the order ``t c a g``.  Branch lengths are in
expected substitutions per site for both models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .. import interval as ia
from ..errors import DomainError
from ..interval import Interval

NUCLEOTIDES = "tcag"
NUC_INDEX = {c: i for i, c in enumerate(NUCLEOTIDES)}
PYRIMIDINES = (0, 1)
PURINES = (2, 3)
_GROUP = np.array([0, 0, 1, 1])  # 0 = pyrimidine, 1 = purine


def kappa_from_tstv(ratio: float, freqs) -> float:
    """Convert an expected transition/transversion ratio into HKY's kappa."""
    t, c, a, g = freqs
    return ratio * (a + g) * (c + t) / (a * g + c * t)


@dataclass(frozen=True)
class SubstModel:
    kind: str
    freqs: tuple = (0.25, 0.25, 0.25, 0.25)
    kappa: float = 1.0

    def __post_init__(self):
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        if kind not in ("JC", "HKY"):
            raise DomainError(f"unknown substitution model {self.kind!r}")
        freqs = tuple(float(f) for f in self.freqs)
        if len(freqs) != 4 or any(not (f > 0) for f in freqs):
            raise DomainError("need four positive base frequencies")
        if abs(math.fsum(freqs) - 1.0) > 1e-6:
            raise DomainError(f"base frequencies sum to {math.fsum(freqs)}, not 1")
        if kind == "JC" and (freqs != (0.25,) * 4 or self.kappa != 1.0):
            raise DomainError("Jukes-Cantor has uniform frequencies and no kappa")
        if not (self.kappa > 0 and math.isfinite(self.kappa)):
            raise DomainError("kappa must be positive")
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "kappa", float(self.kappa))

    @classmethod
    def jc(cls) -> "SubstModel":
        return cls("JC")

    @classmethod
    def hky(cls, freqs, kappa: float | None = None, tstv: float | None = None) -> "SubstModel":
        if (kappa is None) == (tstv is None):
            raise DomainError("give exactly one of kappa or tstv")
        if tstv is not None:
            kappa = kappa_from_tstv(tstv, freqs)
        return cls("HKY", tuple(freqs), kappa)

    @property
    def pi(self) -> np.ndarray:
        return np.array(self.freqs)

    def rate_matrix(self) -> np.ndarray:
        """Instantaneous rates scaled to one expected substitution per unit time."""
        pi = self.pi
        q = np.tile(pi, (4, 1))
        for i in range(4):
            for j in range(4):
                if i != j and _GROUP[i] == _GROUP[j]:
                    q[i, j] *= self.kappa
        np.fill_diagonal(q, 0.0)
        np.fill_diagonal(q, -q.sum(axis=1))
        return q / -(pi @ np.diag(q))

    # -- closed-form constants ------------------------------------------------
    @cached_property
    def _real_consts(self):
        t, c, a, g = self.freqs
        py, pr = t + c, a + g
        k = self.kappa
        beta = 1.0 / (2.0 * (pr * py + k * (a * g + c * t)))
        big = np.array([py, py, pr, pr])
        lam = beta * (1.0 + (k - 1.0) * big)
        return beta, big, lam

    @cached_property
    def _iv_consts(self):
        """Interval enclosures of every coefficient of the closed form."""
        if self.kind == "JC":
            rate = Interval(4.0, 4.0) / Interval(3.0, 3.0)
            return {"rate": rate}
        t, c, a, g = (Interval.point(x) for x in self.freqs)
        py, pr = t + c, a + g
        k = Interval.point(self.kappa)
        beta = Interval.point(1.0) / (Interval.point(2.0) * (pr * py + k * (a * g + c * t)))
        pis = (t, c, a, g)
        big = (py, py, pr, pr)
        one = Interval.point(1.0)
        lam = tuple(beta * (one + (k - one) * b) for b in big)
        # entry_ij = pi_j + b_j E1 + c_ij E2_j
        b = tuple(p * (one / B - one) for p, B in zip(pis, big))
        c_diag = tuple((B - p) / B for p, B in zip(pis, big))
        c_off = tuple(-(p / B) for p, B in zip(pis, big))
        return {"beta": beta, "lam": lam, "b": b, "c_diag": c_diag, "c_off": c_off}

    # -- real transition matrices -------------------------------------------
    def transition(self, t) -> np.ndarray:
        """P(t) for scalar or array ``t``; result has shape ``t.shape + (4, 4)``."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise DomainError("branch length must be nonnegative")
        if self.kind == "JC":
            e = np.exp(-4.0 * t / 3.0)
            same = 0.25 + 0.75 * e
            diff = 0.25 - 0.25 * e
            out = np.empty(t.shape + (4, 4))
            out[...] = diff[..., None, None]
            idx = np.arange(4)
            out[..., idx, idx] = same[..., None]
            return out
        beta, big, lam = self._real_consts
        pi = self.pi
        e1 = np.exp(-beta * t)[..., None]
        e2 = np.exp(-lam * t[..., None])  # (..., 4) indexed by column j
        base = pi + pi * (1.0 / big - 1.0) * e1
        out = np.empty(t.shape + (4, 4))
        for i in range(4):
            for j in range(4):
                if i == j:
                    out[..., i, j] = base[..., j] + (big[j] - pi[j]) / big[j] * e2[..., j]
                elif _GROUP[i] == _GROUP[j]:
                    out[..., i, j] = base[..., j] - pi[j] / big[j] * e2[..., j]
                else:
                    out[..., i, j] = pi[j] * (1.0 - e1[..., 0])
        # cancellation near t = 0 can leave entries a few ulps below zero
        return np.clip(out, 0.0, 1.0)

    # -- interval transition matrices ---------------------------------------
    def transition_interval(self, tl, th, outward=True):
        """Entrywise enclosures ``(P_lo, P_hi)`` of P(t) for ``t`` in ``[tl, th]``.

        Returns arrays of shape ``(N, 4, 4)``, clipped to ``[0, 1]``.
        """
        tl = np.asarray(tl, dtype=float).reshape(-1)
        th = np.asarray(th, dtype=float).reshape(-1)
        n = tl.size
        if self.kind == "JC":
            r = self._iv_consts["rate"]
            xl, xh = ia.mul_nonneg(r.lo, r.hi, np.maximum(tl, 0.0), th, outward)
            el, eh = ia.exp(-xh, -xl, outward)
            sl, sh = ia.add(0.25, 0.25, *ia.scale(el, eh, 0.75, outward), outward)
            dl, dh = ia.sub(0.25, 0.25, *ia.scale(el, eh, 0.25, outward), outward)
            lo = np.empty((n, 4, 4))
            hi = np.empty((n, 4, 4))
            lo[...] = dl[:, None, None]
            hi[...] = dh[:, None, None]
            idx = np.arange(4)
            lo[:, idx, idx] = sl[:, None]
            hi[:, idx, idx] = sh[:, None]
            return np.clip(lo, 0.0, 1.0), np.clip(hi, 0.0, 1.0)

        k = self._iv_consts
        beta = k["beta"]
        xl, xh = ia.mul_nonneg(beta.lo, beta.hi, np.maximum(tl, 0.0), th, outward)
        e1 = ia.exp(-xh, -xl, outward)
        e2 = []
        for lam in k["lam"]:
            yl, yh = ia.mul_nonneg(lam.lo, lam.hi, np.maximum(tl, 0.0), th, outward)
            e2.append(ia.exp(-yh, -yl, outward))
        lo = np.empty((n, 4, 4))
        hi = np.empty((n, 4, 4))
        for j in range(4):
            p = self.freqs[j]
            b = k["b"][j]
            base = ia.add(p, p, *ia.mul_const_nonneg(b.lo, b.hi, *e1, outward), outward)
            transversion = ia.sub(p, p, *ia.scale(*e1, p, outward), outward)
            same = {}
            for key in ("c_diag", "c_off"):
                c = k[key][j]
                same[key] = ia.add(*base, *ia.mul_const_nonneg(c.lo, c.hi, *e2[j], outward), outward)
            for i in range(4):
                if _GROUP[i] != _GROUP[j]:
                    v = transversion
                else:
                    v = same["c_diag" if i == j else "c_off"]
                lo[:, i, j], hi[:, i, j] = v
        return np.clip(lo, 0.0, 1.0), np.clip(hi, 0.0, 1.0)


def jc_transition(t) -> np.ndarray:
    return SubstModel.jc().transition(t)


def hky_transition(t, model: SubstModel) -> np.ndarray:
    return model.transition(t)
