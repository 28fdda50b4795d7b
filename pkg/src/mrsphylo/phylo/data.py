"""Site-pattern summaries of small alignments, and their file formats.

Pattern files are tab separated::

    #taxa:human,chimp,gorilla
    aaa\t232
    aac\t4

Rows are written in lexicographic order of the pattern.  Only ``a c g t``
(either case) are accepted; ambiguity codes and gaps are rejected.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from ..errors import DomainError, ParseError
from .models import NUC_INDEX, NUCLEOTIDES

BUNDLED = {
    "primates": "primates_cgo.patterns",
    "neandertal": "neandertal_hnc.patterns",
    "toy-triplet": "toy_triplet.patterns",
    "toy-quartet": "toy_quartet.patterns",
}


@dataclass(frozen=True)
class SitePatternData:
    taxa: tuple
    patterns: tuple  # ((column, count), ...) sorted by column

    def __post_init__(self):
        taxa = tuple(str(t) for t in self.taxa)
        if len(taxa) not in (3, 4):
            raise DomainError(f"need 3 or 4 taxa, got {len(taxa)}")
        if len(set(taxa)) != len(taxa):
            raise DomainError("taxon names must be distinct")
        rows = []
        for col, count in self.patterns:
            col = _clean_column(col, len(taxa))
            if int(count) != count or count < 1:
                raise DomainError(f"pattern {col!r} has invalid count {count!r}")
            rows.append((col, int(count)))
        cols = [c for c, _ in rows]
        if len(set(cols)) != len(cols):
            raise DomainError("patterns must be distinct")
        object.__setattr__(self, "taxa", taxa)
        object.__setattr__(self, "patterns", tuple(sorted(rows)))

    @property
    def columns(self) -> tuple:
        return tuple(c for c, _ in self.patterns)

    @property
    def counts(self) -> tuple:
        return tuple(n for _, n in self.patterns)

    @property
    def total_sites(self) -> int:
        return sum(self.counts)

    def base_frequencies(self) -> tuple:
        """Pooled relative frequencies of t, c, a, g over every taxon and site."""
        tally = Counter()
        for col, n in self.patterns:
            for ch in col:
                tally[ch] += n
        total = sum(tally.values())
        return tuple(tally[c] / total for c in NUCLEOTIDES)

    @classmethod
    def from_alignment(cls, names, seqs) -> "SitePatternData":
        names = list(names)
        seqs = [s.strip().lower() for s in seqs]
        if len(names) != len(seqs):
            raise DomainError("one sequence per taxon")
        if len(seqs) not in (3, 4):
            raise DomainError(f"need 3 or 4 aligned sequences, got {len(seqs)}")
        lengths = {len(s) for s in seqs}
        if len(lengths) != 1:
            raise DomainError(f"sequences have unequal lengths {sorted(lengths)}")
        for name, s in zip(names, seqs):
            bad = set(s) - set(NUCLEOTIDES)
            if bad:
                raise DomainError(f"sequence {name!r} has invalid characters {''.join(sorted(bad))!r}")
        counts = Counter("".join(col) for col in zip(*seqs))
        return cls(tuple(names), tuple(counts.items()))

    @classmethod
    def single(cls, pattern: str, n: int | None = None) -> "SitePatternData":
        n = n or len(pattern)
        return cls(tuple(f"taxon{i + 1}" for i in range(n)), ((pattern, 1),))

    @classmethod
    def all_patterns(cls, n: int) -> "SitePatternData":
        cols = ("".join(p) for p in itertools.product(NUCLEOTIDES, repeat=n))
        return cls(tuple(f"taxon{i + 1}" for i in range(n)), tuple((c, 1) for c in cols))

    @classmethod
    def empty(cls, n: int = 3) -> "SitePatternData":
        return cls(tuple(f"taxon{i + 1}" for i in range(n)), ())


def _clean_column(col: str, n: int) -> str:
    col = str(col).strip().lower()
    if len(col) != n:
        raise DomainError(f"pattern {col!r} does not have one base per taxon ({n})")
    bad = set(col) - set(NUCLEOTIDES)
    if bad:
        raise DomainError(f"pattern {col!r} has invalid characters {''.join(sorted(bad))!r}")
    return col


def encode_patterns(data: SitePatternData) -> np.ndarray:
    """Integer array of shape (patterns, taxa) in t, c, a, g order."""
    k = len(data.taxa)
    out = np.array([[NUC_INDEX[ch] for ch in col] for col in data.columns], dtype=np.intp)
    return out.reshape(-1, k)


# -- files ----------------------------------------------------------------------


def format_patterns(data: SitePatternData) -> str:
    lines = ["#taxa:" + ",".join(data.taxa)]
    lines += [f"{col}\t{n}" for col, n in data.patterns]
    return "\n".join(lines) + "\n"


def parse_patterns(text: str) -> SitePatternData:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("#taxa:"):
        raise ParseError("pattern file must start with a '#taxa:' header", 0)
    taxa = tuple(t.strip() for t in lines[0][len("#taxa:"):].split(","))
    rows = []
    for i, ln in enumerate(lines[1:], start=2):
        parts = ln.split("\t")
        if len(parts) != 2:
            raise ParseError(f"line {i}: expected '<pattern>\\t<count>'", i)
        try:
            count = int(parts[1])
        except ValueError:
            raise ParseError(f"line {i}: count {parts[1]!r} is not an integer", i) from None
        rows.append((parts[0], count))
    return SitePatternData(taxa, tuple(rows))


def read_patterns(path) -> SitePatternData:
    return parse_patterns(Path(path).read_text())


def write_patterns(data: SitePatternData, path) -> None:
    Path(path).write_text(format_patterns(data))


def parse_fasta(text: str) -> tuple[list, list]:
    names, seqs = [], []
    for i, ln in enumerate(text.splitlines(), start=1):
        ln = ln.strip()
        if not ln or ln.startswith(";"):
            continue
        if ln.startswith(">"):
            names.append(ln[1:].split()[0] if ln[1:].strip() else f"seq{len(names) + 1}")
            seqs.append([])
        elif not seqs:
            raise ParseError(f"line {i}: sequence data before the first '>' header", i)
        else:
            seqs[-1].append(ln)
    return names, ["".join(s) for s in seqs]


def read_fasta(path) -> SitePatternData:
    names, seqs = parse_fasta(Path(path).read_text())
    return SitePatternData.from_alignment(names, seqs)


def bundled_path(name: str):
    """Filesystem path of a shipped data file (by short name or file name)."""
    fname = BUNDLED.get(name, name)
    return resources.files("mrsphylo") / "data" / fname


def load_bundled(name: str) -> SitePatternData:
    if name not in BUNDLED:
        raise DomainError(f"unknown dataset {name!r}; have {', '.join(BUNDLED)}")
    return parse_patterns(bundled_path(name).read_text())
