"""Command-line front end: ``mrsphylo {patterns,sample,quantiles,demo}``.

Exit codes: 0 success, 1 bad input or other error, 2 usage error,
3 a sample ran out of proposals (partial output is still written),
4 the envelope could not be built.  The log level comes from the
``MRSPHYLO_LOG_LEVEL`` environment variable (default ``WARNING``).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .demos import DEMOS, acceptance_table, demo_target, loglog_slope, parse_budgets
from .engine import build_partition, rejection_sample
from .errors import EnclosureFailure, MRSError, TrialsExhausted
from .interval import RigorPolicy
from .phylo.data import (
    BUNDLED,
    SitePatternData,
    format_patterns,
    load_bundled,
    read_fasta,
    read_patterns,
    write_patterns,
)
from .phylo.likelihood import TREE_CLASSES, dataset_log_shape, default_domain
from .phylo.models import SubstModel
from .phylo.transforms import divergence_ratio_transform

log = logging.getLogger("mrsphylo")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_EXHAUSTED = 3
EXIT_ENCLOSURE = 4

DEFAULT_BOXES = 4096
# Five-dimensional quartet posteriors need far more pieces for a usable acceptance rate.
DEFAULT_BOXES_BY_TREE = {"unrooted-quartet": 100_000}
DEFAULT_KAPPA = 2.0


# -- helpers ----------------------------------------------------------------------


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def load_data(ref: str) -> SitePatternData:
    """A pattern file path, a FASTA path (``.fa``/``.fasta``), or a bundled dataset name."""
    p = Path(ref)
    if p.exists():
        if p.suffix.lower() in (".fa", ".fasta", ".fas"):
            return read_fasta(p)
        return read_patterns(p)
    if ref in BUNDLED:
        return load_bundled(ref)
    raise FileNotFoundError(f"no such data file or bundled dataset: {ref}")


def build_model(args, data: SitePatternData) -> SubstModel:
    if args.model == "jc":
        return SubstModel.jc()
    freqs = data.base_frequencies() if args.freqs in (None, "empirical") else _floats(args.freqs)
    if args.tstv is not None:
        return SubstModel.hky(freqs, tstv=args.tstv)
    return SubstModel.hky(freqs, kappa=args.kappa if args.kappa is not None else DEFAULT_KAPPA)


def _boxes(args) -> int:
    return args.boxes or DEFAULT_BOXES_BY_TREE.get(args.tree, DEFAULT_BOXES)


def samples_csv(records, dim: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["topology"] + [f"theta_{i + 1}" for i in range(dim)] + ["trials"])
    for r in records:
        w.writerow([r.label] + [repr(float(v)) for v in r.theta] + [r.trials])
    return buf.getvalue()


def read_samples_csv(path) -> tuple[list[str], np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path} is empty")
    head = rows[0]
    if not head or head[0] != "topology" or head[-1] != "trials":
        raise ValueError(f"{path} does not look like a samples file")
    body = [r for r in rows[1:] if r]
    if not body:
        raise ValueError(f"{path} has no samples")
    labels = [r[0] for r in body]
    theta = np.array([[float(v) for v in r[1:-1]] for r in body])
    return labels, theta


# -- commands ---------------------------------------------------------------------


def cmd_patterns(args) -> int:
    data = read_fasta(args.fasta)
    if args.out:
        write_patterns(data, args.out)
    else:
        sys.stdout.write(format_patterns(data))
    log.info("%d patterns over %d sites", len(data.patterns), data.total_sites)
    return EXIT_OK


def _config(args, data, model) -> dict:
    return {
        "model": model.kind,
        "freqs": list(model.freqs),
        "kappa": model.kappa,
        "tree": args.tree,
        "data": args.data,
        "taxa": list(data.taxa),
        "patterns": len(data.patterns),
        "sites": data.total_sites,
        "samples": args.samples,
        "seed": args.seed,
        "domain_lo": args.domain_lo,
        "domain_hi": args.domain_hi,
        "boxes": None if args.target_accept is not None else _boxes(args),
        "target_accept": args.target_accept,
        "trials_max": args.trials_max,
        "rigor": args.rigor,
        "version": __version__,
    }


def _write_outputs(args, records, dim, report_dict):
    text = samples_csv(records, dim)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.report:
        Path(args.report).write_text(json.dumps(report_dict, indent=2, sort_keys=True) + "\n")


def cmd_sample(args) -> int:
    if args.samples < 1:
        raise ValueError("--samples must be at least 1")
    start = time.perf_counter()
    data = load_data(args.data)
    model = build_model(args, data)
    policy = RigorPolicy.OUTWARD if args.rigor == "outward" else RigorPolicy.FAST
    domain = default_domain(args.tree, args.domain_lo, args.domain_hi)
    target = dataset_log_shape(data, args.tree, model, domain)
    if args.target_accept is not None:
        part = build_partition(target, target_accept=args.target_accept, policy=policy)
    else:
        part = build_partition(target, budget=_boxes(args), policy=policy)
    log.info("partition: %d pieces, acceptance bound %.4g", part.n_pieces, part.acceptance_lower_bound())

    code = EXIT_OK
    try:
        records, report = rejection_sample(target, part, args.samples, rng=args.seed,
                                           trials_max=args.trials_max)
    except TrialsExhausted as exc:
        log.error("%s", exc)
        records, report = exc.samples, exc.report
        code = EXIT_EXHAUSTED
    out = {
        "report": report.to_dict(),
        "config": _config(args, data, model),
        "target": {"params": list(target.meta["params"]), "log_offset": target.meta["log_offset"],
                   "labels": target.labels},
        "wall_time_s": time.perf_counter() - start,
    }
    _write_outputs(args, records, target.dim, out)
    return code


def cmd_quantiles(args) -> int:
    labels, theta = read_samples_csv(args.input)
    qs = _floats(args.q)
    if any(not 0 <= q <= 1 for q in qs):
        raise ValueError("quantiles must lie in [0, 1]")
    rows = []
    if args.transform == "divergence-ratio":
        trees = set(labels)
        if len(trees) != 1 or next(iter(trees)) not in TREE_CLASSES:
            raise ValueError("divergence ratios need samples from a single triplet tree class")
        for name, vals in divergence_ratio_transform(theta, labels[0]).items():
            rows.append((name, vals))
    elif args.transform:
        raise ValueError(f"unknown transform {args.transform!r}")
    else:
        for j in range(theta.shape[1]):
            rows.append((f"theta_{j + 1}", theta[:, j]))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["quantity", "n"] + [f"{q:g}" for q in qs])
    for name, vals in rows:
        # numpy's default "linear" method is the type-7 rule
        w.writerow([name, len(vals)] + [f"{v:.6g}" for v in np.quantile(vals, qs)])
    if args.out:
        Path(args.out).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def cmd_demo(args) -> int:
    target = demo_target(args.target)
    budgets = parse_budgets(args.budgets)
    table = acceptance_table(target, budgets)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["W", "accept_lower_bound", "one_minus_bound", "np_lo", "np_hi"])
    for n, a, lo, hi in table:
        w.writerow([n, f"{a:.10g}", f"{1 - a:.10g}", f"{lo:.10g}", f"{hi:.10g}"])
    fit = [(n, 1 - a) for n, a, _, _ in table if 0 < a < 1]
    text = buf.getvalue()
    if len(fit) >= 2:
        slope = loglog_slope(*zip(*fit))
        text += f"# slope of log(1 - bound) against log W: {slope:.4f}\n"
    if args.table:
        Path(args.table).write_text(text)
    else:
        sys.stdout.write(text)
    if args.samples:
        part = build_partition(target, budget=budgets[-1])
        records, _ = rejection_sample(target, part, args.samples, rng=args.seed)
        sample_text = samples_csv(records, target.dim)
        if args.out:
            Path(args.out).write_text(sample_text)
        elif args.table:
            sys.stdout.write(sample_text)
    return EXIT_OK


# -- parser -------------------------------------------------------------------------


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mrsphylo", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("patterns", help="count distinct site patterns in an aligned FASTA file")
    p.add_argument("--fasta", required=True, help="aligned FASTA with 3 or 4 sequences")
    p.add_argument("--out", help="pattern file to write (default: stdout)")
    p.set_defaults(func=cmd_patterns)

    p = sub.add_parser("sample", help="draw exact posterior samples over small trees")
    p.add_argument("--model", choices=("jc", "hky"), default="jc")
    p.add_argument("--freqs", help="HKY base frequencies t,c,a,g (default: empirical from the data)")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--kappa", type=float, help=f"HKY transition/transversion rate ratio (default {DEFAULT_KAPPA})")
    g.add_argument("--tstv", type=float, help="HKY expected transition/transversion ratio, converted to kappa")
    p.add_argument("--tree", choices=TREE_CLASSES, default="unrooted-triplet")
    p.add_argument("--data", required=True, help=f"pattern file, FASTA, or one of: {', '.join(BUNDLED)}")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--domain-lo", type=float, default=1e-10)
    p.add_argument("--domain-hi", type=float, default=10.0)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--boxes", type=int, help=f"refine to this many pieces (default {DEFAULT_BOXES}; "
                   f"{DEFAULT_BOXES_BY_TREE['unrooted-quartet']} for quartets)")
    g.add_argument("--target-accept", type=float, help="refine until the acceptance bound reaches this")
    p.add_argument("--trials-max", type=int, default=10**6, help="proposals allowed per sample")
    p.add_argument("--rigor", choices=("outward", "fast"), default="outward")
    p.add_argument("--out", help="samples CSV (default: stdout)")
    p.add_argument("--report", help="JSON run report")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("quantiles", help="posterior quantiles from a samples CSV")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--transform", choices=("divergence-ratio",))
    p.add_argument("--q", default="0.05,0.5,0.95")
    p.add_argument("--out", help="CSV to write (default: stdout)")
    p.set_defaults(func=cmd_quantiles)

    p = sub.add_parser("demo", help="acceptance bound against partition size on a built-in target")
    p.add_argument("--target", choices=tuple(DEMOS), default="fig2")
    p.add_argument("--budgets", default="8..4096", help="'a..b' for every power of two in [a, b], or a comma list")
    p.add_argument("--samples", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--table", help="CSV for the acceptance table (default: stdout)")
    p.add_argument("--out", help="CSV for the samples")
    p.set_defaults(func=cmd_demo)
    return ap


def main(argv=None) -> int:
    level = os.environ.get("MRSPHYLO_LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except EnclosureFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENCLOSURE
    except (MRSError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
