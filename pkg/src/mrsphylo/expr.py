"""Elementary functions as flat DAGs, evaluated over points and over boxes.

Grammar accepted by :func:`parse_expr` (lowest to highest precedence)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom (('^' | '**') ['+' | '-'] INTEGER)?
    atom   := NUMBER | VAR | FUNC '(' expr ')' | '(' expr ')'

``VAR`` is ``x0, x1, ...`` (``x`` is accepted as ``x0``); ``FUNC`` is one of
``exp log sqrt sin cos tan atan abs``.  So ``-x^2`` is ``-(x^2)`` and ``^``
takes only an integer literal exponent.  Decimal literals that are not
exactly representable get a two-float enclosure as their interval value.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import interval as ia
from .errors import DomainError, ParseError
from .interval import Box, Interval, RigorPolicy, StdFn

__all__ = [
    "BinOp",
    "ExprNode",
    "ExprDag",
    "DagBuilder",
    "parse_expr",
    "eval_real",
    "eval_interval",
    "mesh_refine_enclosure",
]


class BinOp(enum.Enum):
    ADD = "+"
    SUB = "-"
    MUL = "*"
    DIV = "/"


NEG = "neg"


@dataclass(frozen=True, slots=True)
class ExprNode:
    kind: str  # const | var | binary | unary | intpow
    op: object = None
    children: tuple = ()
    value: float = 0.0
    enclosure: tuple = ()


class DagBuilder:
    """Hash-consing constructor; structurally equal subexpressions share one node."""

    def __init__(self):
        self.nodes: list[ExprNode] = []
        self._index: dict = {}
        self.arity = 0

    def _add(self, key, node: ExprNode) -> int:
        idx = self._index.get(key)
        if idx is None:
            idx = len(self.nodes)
            self.nodes.append(node)
            self._index[key] = idx
        return idx

    def const(self, value, text: str | None = None) -> int:
        exact = Fraction(text) if text is not None else Fraction(value)
        v = float(exact)
        if Fraction(v) == exact:
            lo = hi = v
        elif Fraction(v) < exact:
            lo, hi = v, float(np.nextafter(v, np.inf))
        else:
            lo, hi = float(np.nextafter(v, -np.inf)), v
        return self._add(("const", lo, hi), ExprNode("const", value=v, enclosure=(lo, hi)))

    def var(self, index: int) -> int:
        self.arity = max(self.arity, index + 1)
        return self._add(("var", index), ExprNode("var", value=index))

    def binary(self, op: BinOp, a: int, b: int) -> int:
        if op in (BinOp.ADD, BinOp.MUL) and b < a:
            a, b = b, a
        return self._add(("binary", op, a, b), ExprNode("binary", op, (a, b)))

    def unary(self, fn, a: int) -> int:
        if fn != NEG and not isinstance(fn, StdFn):
            fn = StdFn(fn)
        return self._add(("unary", fn, a), ExprNode("unary", fn, (a,)))

    def intpow(self, a: int, n: int) -> int:
        return self._add(("intpow", a, int(n)), ExprNode("intpow", StdFn.POW, (a,), value=int(n)))

    def build(self, root: int | None = None, arity: int | None = None) -> "ExprDag":
        root = len(self.nodes) - 1 if root is None else root
        return ExprDag(tuple(self.nodes), root, max(self.arity, arity or 0))


@dataclass(frozen=True)
class ExprDag:
    """A topologically ordered node list; children always precede parents."""

    nodes: tuple
    root: int
    arity: int

    def __post_init__(self):
        for i, node in enumerate(self.nodes):
            for c in node.children:
                if not 0 <= c < i:
                    raise ValueError(f"node {i} references non-earlier node {c}")
            if node.kind == "var" and int(node.value) >= self.arity:
                raise ValueError(f"variable index {int(node.value)} exceeds arity {self.arity}")
        if not 0 <= self.root < len(self.nodes):
            raise ValueError("root index out of range")

    @property
    def dim(self) -> int:
        return self.arity

    def __len__(self):
        return len(self.nodes)

    def __str__(self):
        parts: list[str] = []
        for node in self.nodes:
            ch = [parts[c] for c in node.children]
            if node.kind == "const":
                parts.append(repr(node.value))
            elif node.kind == "var":
                parts.append(f"x{int(node.value)}")
            elif node.kind == "binary":
                parts.append(f"({ch[0]} {node.op.value} {ch[1]})")
            elif node.kind == "unary":
                parts.append(f"-{ch[0]}" if node.op == NEG else f"{node.op.value}({ch[0]})")
            else:
                parts.append(f"{ch[0]}^{int(node.value)}")
        return parts[self.root]

    # -- real evaluation -------------------------------------------------
    def real_batch(self, points) -> np.ndarray:
        """Evaluate at each row of ``points``; undefined results are NaN."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        n = pts.shape[0]
        vals: list = [None] * len(self.nodes)
        with np.errstate(all="ignore"):
            for i, node in enumerate(self.nodes[: self.root + 1]):
                k = node.kind
                if k == "const":
                    v = np.full(n, node.value)
                elif k == "var":
                    v = pts[:, int(node.value)]
                elif k == "binary":
                    a, b = vals[node.children[0]], vals[node.children[1]]
                    op = node.op
                    if op is BinOp.ADD:
                        v = a + b
                    elif op is BinOp.SUB:
                        v = a - b
                    elif op is BinOp.MUL:
                        v = a * b
                    else:
                        v = np.where(b == 0, np.nan, a / np.where(b == 0, 1.0, b))
                elif k == "unary":
                    v = _real_unary(node.op, vals[node.children[0]])
                else:
                    v = _real_pow(vals[node.children[0]], int(node.value))
                vals[i] = v
        out = vals[self.root]
        return np.where(np.isfinite(out), out, np.nan)

    # -- interval evaluation ---------------------------------------------
    def interval_batch(self, lo, hi, outward=True):
        """Natural interval extension over a batch of boxes.

        ``lo`` and ``hi`` have shape ``(N, arity)``.  Returns ``(lo, hi)`` of
        shape ``(N,)``; rows where the extension is not well defined are NaN.
        """
        lo = np.atleast_2d(np.asarray(lo, dtype=float))
        hi = np.atleast_2d(np.asarray(hi, dtype=float))
        n = lo.shape[0]
        vals: list = [None] * len(self.nodes)
        with np.errstate(all="ignore"):
            for i, node in enumerate(self.nodes[: self.root + 1]):
                k = node.kind
                if k == "const":
                    v = (np.full(n, node.enclosure[0]), np.full(n, node.enclosure[1]))
                elif k == "var":
                    j = int(node.value)
                    v = (lo[:, j], hi[:, j])
                elif k == "binary":
                    a, b = vals[node.children[0]], vals[node.children[1]]
                    fn = _BIN_IV[node.op]
                    v = fn(a[0], a[1], b[0], b[1], outward)
                elif k == "unary":
                    a = vals[node.children[0]]
                    if node.op == NEG:
                        v = ia.neg(a[0], a[1])
                    else:
                        v = ia.apply_std(node.op, a[0], a[1], outward)
                else:
                    a = vals[node.children[0]]
                    v = ia.ipow(a[0], a[1], int(node.value), outward)
                vals[i] = v
        rl, rh = vals[self.root]
        bad = ~(np.isfinite(rl) & np.isfinite(rh))
        return np.where(bad, np.nan, rl), np.where(bad, np.nan, rh)

    def eval_real(self, x: Sequence[float]) -> float:
        return eval_real(self, x)

    def eval_interval(self, box, policy=RigorPolicy.OUTWARD) -> Interval:
        return eval_interval(self, box, policy)


_BIN_IV = {
    BinOp.ADD: ia.add,
    BinOp.SUB: ia.sub,
    BinOp.MUL: ia.mul,
    BinOp.DIV: ia.div,
}

_REAL_FN = {
    StdFn.EXP: np.exp,
    StdFn.SIN: np.sin,
    StdFn.COS: np.cos,
    StdFn.TAN: np.tan,
    StdFn.ATAN: np.arctan,
    StdFn.ABS: np.abs,
}


def _real_unary(op, a):
    if op == NEG:
        return -a
    if op is StdFn.LOG:
        return np.where(a > 0, np.log(np.where(a > 0, a, 1.0)), np.nan)
    if op is StdFn.SQRT:
        return np.where(a >= 0, np.sqrt(np.where(a >= 0, a, 0.0)), np.nan)
    return _REAL_FN[op](a)


def _real_pow(a, n):
    if n < 0:
        return np.where(a == 0, np.nan, np.power(np.where(a == 0, 1.0, a), float(n)))
    return np.power(a, n)


def _check_point(f: ExprDag, x) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size < f.arity:
        raise DomainError(f"point has {x.size} coordinates, expression needs {f.arity}")
    return x


def eval_real(f: ExprDag, x: Sequence[float]) -> float:
    """One forward sweep at a real point; raises DomainError if undefined."""
    x = _check_point(f, x)
    v = float(f.real_batch(x[None, :])[0])
    if np.isnan(v):
        raise DomainError(f"expression undefined at {x.tolist()}")
    return v


def _as_box(f: ExprDag, X) -> Box:
    if isinstance(X, Interval):
        X = Box((X,))
    elif not isinstance(X, Box):
        X = Box(tuple(Interval.of(s) for s in X))
    if X.dim < f.arity:
        raise DomainError(f"box has dimension {X.dim}, expression needs {f.arity}")
    return X


def eval_interval(f: ExprDag, X, policy=RigorPolicy.OUTWARD) -> Interval:
    """Natural interval extension of ``f`` over the box ``X``.

    Raises :class:`DivisorContainsZero` or :class:`DomainError` when the
    extension is not well defined on ``X``.
    """
    X = _as_box(f, X)
    policy = RigorPolicy.coerce(policy)
    vals: list[Interval] = []
    for node in f.nodes[: f.root + 1]:
        k = node.kind
        if k == "const":
            v = Interval(*node.enclosure)
        elif k == "var":
            v = X[int(node.value)]
        elif k == "binary":
            a, b = vals[node.children[0]], vals[node.children[1]]
            v = _BIN_SCALAR[node.op](a, b, policy)
        elif k == "unary":
            a = vals[node.children[0]]
            v = -a if node.op == NEG else ia.iv_std(node.op, a, policy=policy)
        else:
            v = ia.iv_pow(vals[node.children[0]], int(node.value), policy)
        vals.append(v)
    return vals[f.root]


_BIN_SCALAR = {
    BinOp.ADD: ia.iv_add,
    BinOp.SUB: ia.iv_sub,
    BinOp.MUL: ia.iv_mul,
    BinOp.DIV: ia.iv_div,
}


def uniform_subboxes(X: Box, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Bounds of the ``k**n`` boxes of a uniform k-way split of every side."""
    grids = []
    for s in X:
        edges = np.linspace(s.lo, s.hi, k + 1)
        edges[0], edges[-1] = s.lo, s.hi
        grids.append(edges)
    idx = np.stack(np.meshgrid(*[np.arange(k)] * X.dim, indexing="ij"), axis=-1).reshape(-1, X.dim)
    lo = np.column_stack([grids[j][idx[:, j]] for j in range(X.dim)])
    hi = np.column_stack([grids[j][idx[:, j] + 1] for j in range(X.dim)])
    return lo, hi


def mesh_refine_enclosure(f: ExprDag, X, k: int, policy=RigorPolicy.OUTWARD) -> Interval:
    """Hull of the natural extension over a uniform ``k``-way mesh of ``X``."""
    X = _as_box(f, X)
    if k < 1:
        raise ValueError("subdivision count must be >= 1")
    if k == 1:
        return eval_interval(f, X, policy)
    lo, hi = uniform_subboxes(X, k)
    rl, rh = f.interval_batch(lo, hi, RigorPolicy.coerce(policy).outward)
    if np.any(np.isnan(rl)):
        bad = int(np.flatnonzero(np.isnan(rl))[0])
        # Re-run the failing piece through the scalar path to raise the precise error.
        eval_interval(f, Box.from_bounds(lo[bad], hi[bad]), policy)
        raise DomainError("interval extension undefined on a mesh piece")
    return Interval(float(rl.min()), float(rh.max()))


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<id>[A-Za-z_]\w*)|(?P<op>\*\*|[-+*/^(),]))"
)
_FUNCS = {
    "exp": StdFn.EXP,
    "log": StdFn.LOG,
    "ln": StdFn.LOG,
    "sqrt": StdFn.SQRT,
    "sin": StdFn.SIN,
    "cos": StdFn.COS,
    "tan": StdFn.TAN,
    "atan": StdFn.ATAN,
    "arctan": StdFn.ATAN,
    "abs": StdFn.ABS,
}
_VAR = re.compile(r"x(\d+)?$")


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            bad = len(text) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", bad)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.b = DagBuilder()

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value):
        t = self.take()
        if t[1] != value:
            raise ParseError(f"expected {value!r}, found {t[1] or 'end of input'!r}", t[2])
        return t

    def expr(self) -> int:
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = BinOp(self.take()[1])
            node = self.b.binary(op, node, self.term())
        return node

    def term(self) -> int:
        node = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = BinOp(self.take()[1])
            node = self.b.binary(op, node, self.unary())
        return node

    def unary(self) -> int:
        t = self.peek()
        if t[1] == "+":
            self.take()
            return self.unary()
        if t[1] == "-":
            self.take()
            nxt = self.peek()
            # Fold a negated literal that is not raised to a power.
            if nxt[0] == "num" and self.toks[self.i + 1][1] not in ("^", "**"):
                self.take()
                return self.b.const(-float(Fraction(nxt[1])), "-" + nxt[1])
            return self.b.unary(NEG, self.unary())
        return self.power()

    def power(self) -> int:
        base = self.atom()
        if self.peek()[1] in ("^", "**"):
            self.take()
            sign = 1
            t = self.take()
            if t[1] in ("+", "-"):
                sign = -1 if t[1] == "-" else 1
                t = self.take()
            if t[0] != "num" or not re.fullmatch(r"\d+", t[1]):
                raise ParseError("exponent must be an integer literal", t[2])
            base = self.b.intpow(base, sign * int(t[1]))
            if self.peek()[1] in ("^", "**"):
                raise ParseError("chained powers need parentheses", self.peek()[2])
        return base

    def atom(self) -> int:
        t = self.take()
        kind, text, pos = t
        if kind == "num":
            return self.b.const(float(Fraction(text)), text)
        if kind == "id":
            if text in _FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return self.b.unary(_FUNCS[text], arg)
            m = _VAR.match(text)
            if m:
                return self.b.var(int(m.group(1) or 0))
            raise ParseError(f"unknown identifier {text!r}", pos)
        if text == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ParseError(f"unexpected token {text or 'end of input'!r}", pos)


def parse_expr(text: str, arity: int | None = None) -> ExprDag:
    """Parse ``text`` into a DAG with common subexpressions shared."""
    p = _Parser(text)
    if p.peek()[0] == "end":
        raise ParseError("empty expression", 0)
    root = p.expr()
    t = p.peek()
    if t[0] != "end":
        raise ParseError(f"unexpected trailing {t[1]!r}", t[2])
    return p.b.build(root, arity)
