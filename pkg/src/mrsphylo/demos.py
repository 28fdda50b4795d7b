"""Built-in one- and two-dimensional targets used by the demo command and the tests."""

from __future__ import annotations

import numpy as np

from .engine import TargetShape, build_partition
from .errors import DomainError
from .expr import parse_expr
from .interval import Box, RigorPolicy

# Multimodal test function on [-10, 6]; its minimum is about -55.6, so the
# constant 56 makes it a nonnegative shape.
MULTIMODAL_SUM = " + ".join(f"{k}*x0*sin({k}*(x0-3)/3)" for k in range(1, 6))
MULTIMODAL_RAW = f"-({MULTIMODAL_SUM})"
MULTIMODAL_SHIFT = 56.0
MULTIMODAL_EXPR = f"{MULTIMODAL_SHIFT:g} - ({MULTIMODAL_SUM})"
MULTIMODAL_DOMAIN = ((-10.0,), (6.0,))

DEMOS = {
    "fig2": (MULTIMODAL_EXPR, MULTIMODAL_DOMAIN),
    "gauss": ("exp(-x0^2/2)", ((-5.0,), (5.0,))),
    "product2d": ("exp(-x0^2/2) * exp(-abs(x1))", ((-4.0, -5.0), (4.0, 5.0))),
}


def demo_target(name: str) -> TargetShape:
    try:
        text, (lo, hi) = DEMOS[name]
    except KeyError:
        raise DomainError(f"unknown demo target {name!r}; have {', '.join(DEMOS)}") from None
    dag = parse_expr(text, arity=len(lo))
    return TargetShape.single(dag, Box.from_bounds(lo, hi), label=name, expr=text)


def acceptance_table(target: TargetShape, budgets, policy=RigorPolicy.OUTWARD):
    """Rows ``(W, accept_lower_bound, np_lo, np_hi)`` for partitions of ``W`` pieces."""
    rows = []
    for w in budgets:
        part = build_partition(target, budget=int(w), policy=policy)
        enc = part.np_enclosure()
        rows.append((part.n_pieces, part.acceptance_lower_bound(), enc.lo, enc.hi))
    return rows


def loglog_slope(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    return float(np.polyfit(lx, ly, 1)[0])


def parse_budgets(text: str) -> list[int]:
    """``"8..4096"`` means powers of two from 8 to 4096; otherwise a comma list."""
    text = text.strip()
    if ".." in text:
        a, b = (int(v) for v in text.split(".."))
        if a < 1 or b < a:
            raise DomainError(f"bad budget range {text!r}")
        out, w = [], 1
        while w <= b:
            if w >= a:
                out.append(w)
            w *= 2
        return out
    out = [int(v) for v in text.split(",") if v.strip()]
    if not out or min(out) < 1:
        raise DomainError(f"bad budget list {text!r}")
    return out
