"""Command-line front end.

Subcommands::

    run          one selection (approximate or exact), JSON on stdout
    tradeoff     cost/error sweep over a (k_b, ratio) grid, CSV
    recall       analytic vs Monte-Carlo recall comparison, CSV
    correlation  bucket-assignment experiment on AR(1) inputs, CSV
    bench        timing + bandwidth measurements, CSV

All CSV output shares one fixed header (see COLUMNS); columns a command
does not produce stay empty.  Auxiliary per-row facts that have no
dedicated column (z-scores, rho, warmup/iters, stability) are packed
into the ``flags`` column as ``;``-separated tokens.  The seed is
echoed as a ``# seed=N`` comment line above the header.

Exit codes: 0 success, 2 validation or usage error, 1 internal error.
The BUCKETED_TOPK_WORKERS environment variable overrides the worker
count when no --workers flag is given.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, TextIO

import numpy as np

from . import bench as bench_mod
from . import simdata
from .approx import ChunkedMerge, ExecutionMode, PerBucket, approx_topk, select_mode
from .core import (
    Assignment,
    BucketScheme,
    ConfigError,
    NonFiniteInputError,
    ProblemShape,
    validate,
)
from .cost import CostModelKind, approx_cost, exact_cost, tradeoff_curve
from .exact import exact_topk_oracle, priority_queue_topk
from .recall import (
    empirical_recall_rows,
    expected_recall_error,
    monte_carlo_recall,
)

log = logging.getLogger(__name__)

WORKERS_ENV = "BUCKETED_TOPK_WORKERS"

# Canonical CSV schema; every command emits exactly these columns.
COLUMNS = [
    "model", "n", "k", "m", "b", "k_b", "ratio", "assignment", "mode",
    "analytic_error", "mc_error", "mc_stderr", "cost", "relative_cost",
    "mean_ns", "stderr_ns", "bytes_moved", "gbytes_per_s", "flags",
]


@dataclass
class SweepSpec:
    """A parsed sweep: shape grid x scheme grid x models.

    Expanded points that fail validation are skipped with a logged
    reason rather than aborting the sweep.
    """

    n_list: List[int]
    k_list: List[int]
    m_list: List[int]
    k_b_list: List[int]
    ratio_list: List[float]
    assignments: List[Assignment]
    models: List[CostModelKind] = field(default_factory=list)
    trials: int = 0
    seed: int = 0
    out: Optional[str] = None

    def schemes(self, n: int, k: int) -> Iterable[BucketScheme]:
        for assignment in self.assignments:
            for k_b in self.k_b_list:
                for ratio in self.ratio_list:
                    b_real = ratio * k / k_b
                    b = int(round(b_real))
                    if b < 1 or abs(b_real - b) > 1e-9:
                        log.info(
                            "skipping k_b=%s ratio=%s: b=%s not a positive integer",
                            k_b, ratio, b_real,
                        )
                        continue
                    scheme = BucketScheme(b=b, k_b=k_b, assignment=assignment)
                    try:
                        validate(ProblemShape(m=1, n=n, k=k), scheme)
                    except ConfigError as err:
                        log.info("skipping k_b=%s ratio=%s: %s", k_b, ratio, err)
                        continue
                    yield scheme


# ----------------------------------------------------------------------
# CSV plumbing


def _fmt(value) -> str:
    if value is None or value == "":
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(stream: TextIO, rows: Sequence[dict], seed: Optional[int] = None) -> None:
    """Emit rows under the canonical header, with the seed echoed above it."""
    if seed is not None:
        stream.write(f"# seed={seed}\n")
    stream.write(",".join(COLUMNS) + "\n")
    for row in rows:
        unknown = set(row) - set(COLUMNS)
        if unknown:
            raise ValueError(f"row has non-canonical columns: {sorted(unknown)}")
        stream.write(",".join(_fmt(row.get(c)) for c in COLUMNS) + "\n")


def read_csv(text: str) -> tuple:
    """Parse a produced CSV into (comments, header, rows-of-strings)."""
    comments, header, rows = [], None, []
    for line in text.splitlines():
        if line.startswith("#"):
            comments.append(line)
        elif header is None:
            header = line.split(",")
        elif line:
            rows.append(line.split(","))
    return comments, header, rows


def render_csv(comments: List[str], header: List[str], rows: List[List[str]]) -> str:
    """Inverse of :func:`read_csv`; re-emitting parsed output is byte-identical."""
    lines = list(comments) + [",".join(header)] + [",".join(r) for r in rows]
    return "\n".join(lines) + "\n"


def _flags(*tokens) -> str:
    return ";".join(t for t in tokens if t)


def _open_out(path: Optional[str]):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", encoding="utf-8"), True


def _emit(rows: List[dict], seed: Optional[int], out: Optional[str]) -> None:
    stream, close = _open_out(out)
    try:
        write_csv(stream, rows, seed=seed)
    finally:
        if close:
            stream.close()


# ----------------------------------------------------------------------
# Argument helpers


def _int_list(text: str) -> List[int]:
    return [int(t) for t in text.split(",") if t]


def _float_list(text: str) -> List[float]:
    return [float(t) for t in text.split(",") if t]


def _parse_mode(text: str, shape: ProblemShape, scheme: BucketScheme) -> ExecutionMode:
    text = text.lower()
    if text in ("per-bucket", "perbucket"):
        return PerBucket()
    if text == "auto":
        return select_mode(shape, scheme, lanes=os.cpu_count() or 1)
    if text.startswith("chunked"):
        _, _, arg = text.partition(":")
        return ChunkedMerge(int(arg) if arg else 64)
    raise ConfigError(
        "mode", f"unknown mode {text!r} (expected per-bucket, chunked[:c], or auto)"
    )


def _mode_label(mode: ExecutionMode) -> str:
    if isinstance(mode, ChunkedMerge):
        return f"chunked:{mode.chunks_per_bucket}"
    return "per-bucket"


def _workers(args) -> int:
    if getattr(args, "workers", None):
        return args.workers
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring non-integer %s=%r", WORKERS_ENV, env)
    return 1


def _read_input_matrix(path: str) -> np.ndarray:
    """Input file: one row per line, comma-separated decimal values."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append([float(t) for t in line.split(",")])
    if not rows:
        raise ConfigError("empty_input", f"input file {path} holds no rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ConfigError("ragged_input", f"input rows differ in length: {sorted(widths)}")
    return np.asarray(rows, dtype=np.float64)


# ----------------------------------------------------------------------
# Subcommands


def cmd_run(args) -> int:
    if args.input:
        scores = _read_input_matrix(args.input)
    else:
        if not args.n:
            raise ConfigError("missing", "--n is required without --input")
        scores = simdata.iid_normal(args.m, args.n, seed=args.seed)
    m, n = scores.shape
    shape = ProblemShape(m=m, n=n, k=args.k)
    workers = _workers(args)

    if args.exact:
        result = (priority_queue_topk if args.priority_queue else exact_topk_oracle)(
            scores, args.k, workers=workers
        )
        params = {"exact": True, "priority_queue": bool(args.priority_queue)}
    else:
        if not args.b or not args.kb:
            raise ConfigError("missing", "--b and --kb are required unless --exact")
        scheme = BucketScheme(
            b=args.b, k_b=args.kb, assignment=Assignment.from_string(args.assignment)
        )
        validate(shape, scheme)
        mode = _parse_mode(args.mode, shape, scheme)
        result = approx_topk(scores, args.k, scheme, mode, workers=workers)
        params = {
            "b": args.b,
            "kb": args.kb,
            "assignment": scheme.assignment.value,
            "mode": _mode_label(mode),
        }

    payload = {
        "command": "run",
        "m": m,
        "n": n,
        "k": args.k,
        "seed": args.seed,
        "params": params,
        "rows": [
            {"values": [float(v) for v in result.values[r]],
             "indices": [int(i) for i in result.indices[r]]}
            for r in range(result.m)
        ],
    }
    print(json.dumps(payload, sort_keys=True))
    return 0


def cmd_tradeoff(args) -> int:
    spec = SweepSpec(
        n_list=args.n, k_list=args.k, m_list=args.m,
        k_b_list=args.kb_list, ratio_list=args.ratio_list,
        assignments=[Assignment.INTERLEAVED],
        models=[CostModelKind.from_string(t) for t in args.model],
        seed=args.seed, out=args.out,
    )
    rows = []
    for model in spec.models:
        for n in spec.n_list:
            for k in spec.k_list:
                for m in spec.m_list:
                    points = tradeoff_curve(
                        model, n, k, spec.k_b_list, spec.ratio_list, m=m
                    )
                    for p in points:
                        rows.append({
                            "model": model.value, "n": n, "k": k, "m": m,
                            "b": p.b, "k_b": p.k_b, "ratio": p.ratio,
                            "assignment": Assignment.INTERLEAVED.value,
                            "analytic_error": p.expected_error,
                            "cost": p.cost, "relative_cost": p.relative_cost,
                        })
    if not rows:
        raise ConfigError("empty_grid", "no valid (k_b, ratio) point in the sweep")
    _emit(rows, spec.seed, spec.out)
    return 0


def cmd_recall(args) -> int:
    if args.trials < 100:
        raise ConfigError("trials", f"--trials must be >= 100, got {args.trials}")
    spec = SweepSpec(
        n_list=args.n, k_list=args.k, m_list=[1],
        k_b_list=args.kb_list, ratio_list=args.ratio_list,
        assignments=[Assignment.from_string(args.assignment)],
        trials=args.trials, seed=args.seed, out=args.out,
    )
    rows = []
    for n in spec.n_list:
        for k in spec.k_list:
            shape = ProblemShape(m=1, n=n, k=k)
            for scheme in spec.schemes(n, k):
                analytic = expected_recall_error(k, scheme.b, scheme.k_b)
                mc = monte_carlo_recall(shape, scheme, spec.trials, seed=spec.seed)
                mc_error = 1.0 - mc.mean_recall
                if mc.stderr > 0:
                    z = (mc_error - analytic.expected_error) / mc.stderr
                else:
                    z = 0.0 if mc_error == analytic.expected_error else math.inf
                rows.append({
                    "model": "", "n": n, "k": k, "m": 1,
                    "b": scheme.b, "k_b": scheme.k_b,
                    "ratio": scheme.b * scheme.k_b / k,
                    "assignment": scheme.assignment.value,
                    "analytic_error": analytic.expected_error,
                    "mc_error": mc_error, "mc_stderr": mc.stderr,
                    "flags": _flags(f"z={z:+.3f}", "high_z" if abs(z) > 3 else ""),
                })
    if not rows:
        raise ConfigError("empty_grid", "no valid (k_b, ratio) point in the sweep")
    _emit(rows, spec.seed, spec.out)
    return 0


def _correlation_runs(args):
    shuffled = [False, True] if args.shuffle else [False]
    for assignment in (Assignment.INTERLEAVED, Assignment.CONTIGUOUS):
        for shuf in shuffled:
            if shuf and assignment is not Assignment.CONTIGUOUS:
                continue  # shuffling matters only where assignment is order-sensitive
            yield assignment, shuf


def cmd_correlation(args) -> int:
    rows = []
    k = args.k
    n = args.n
    for rho in args.rho_list:
        for k_b in args.kb_list:
            if k % k_b:
                log.info("skipping k_b=%s: does not divide k=%s", k_b, k)
                continue
            b = k // k_b
            data = simdata.ar1_batch(args.trials, n, rho, seed=args.seed)
            truth = exact_topk_oracle(data, k)
            for assignment, shuf in _correlation_runs(args):
                scheme = BucketScheme(b=b, k_b=k_b, assignment=assignment)
                validate(ProblemShape(m=args.trials, n=n, k=k), scheme)
                if shuf:
                    x = np.stack([
                        simdata.permute(data[t], seed=args.seed, row=t)
                        for t in range(args.trials)
                    ])
                    got = approx_topk(x, k, scheme)
                    want = exact_topk_oracle(x, k)
                    recalls = empirical_recall_rows(got, want)
                else:
                    got = approx_topk(data, k, scheme)
                    recalls = empirical_recall_rows(got, truth)
                mean = float(recalls.mean())
                stderr = float(recalls.std(ddof=1) / math.sqrt(args.trials))
                rows.append({
                    "model": "", "n": n, "k": k, "m": args.trials,
                    "b": b, "k_b": k_b, "ratio": b * k_b / k,
                    "assignment": assignment.value,
                    "mc_error": 1.0 - mean, "mc_stderr": stderr,
                    "flags": _flags(f"rho={rho}", "shuffled" if shuf else ""),
                })
    _emit(rows, args.seed, args.out)
    return 0


def cmd_bench(args) -> int:
    shape = ProblemShape(m=args.m, n=args.n, k=args.k)
    scheme = None
    if args.b and args.kb:
        scheme = BucketScheme(
            b=args.b, k_b=args.kb, assignment=Assignment.from_string(args.assignment)
        )
        validate(shape, scheme)
    workers = _workers(args)
    rows = []
    for op in args.ops:
        if op.startswith("approx") and scheme is None:
            raise ConfigError("missing", f"{op} requires --b and --kb")
        mode = None
        if op == "approx_chunked_merge":
            mode = ChunkedMerge(args.chunks)
        stats = bench_mod.time_selection(
            op, shape, scheme, mode,
            warmup=args.warmup, iters=args.iters, seed=args.seed, workers=workers,
        )
        bw = bench_mod.bandwidth(shape, args.value_bytes, args.index_bytes, stats)
        if op.startswith("approx"):
            cost = approx_cost(
                CostModelKind.SERIAL, args.n, args.k, args.m, scheme.b, scheme.k_b
            )
        else:
            cost = exact_cost(CostModelKind.SERIAL, args.n, args.k, args.m)
        rows.append({
            "model": CostModelKind.SERIAL.value,
            "n": args.n, "k": args.k, "m": args.m,
            "b": scheme.b if (scheme and op.startswith("approx")) else "",
            "k_b": scheme.k_b if (scheme and op.startswith("approx")) else "",
            "ratio": (scheme.b * scheme.k_b / args.k)
            if (scheme and op.startswith("approx")) else "",
            "assignment": scheme.assignment.value
            if (scheme and op.startswith("approx")) else "",
            "mode": op,
            "cost": cost,
            "relative_cost": cost / exact_cost(CostModelKind.SERIAL, args.n, args.k, args.m),
            "mean_ns": stats.mean_ns, "stderr_ns": stats.stderr_ns,
            "bytes_moved": bw.bytes_moved, "gbytes_per_s": bw.gbytes_per_s,
            "flags": _flags(
                f"warmup={stats.warmup}", f"iters={stats.iterations}",
                "stable" if stats.stable else "unstable",
                f"workers={workers}",
            ),
        })
    _emit(rows, args.seed, args.out)
    return 0


# ----------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bucketed-topk",
        description="Bucketed approximate top-k: selections, sweeps, and benchmarks.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log skipped points")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one selection, JSON on stdout")
    p.add_argument("--n", type=int, help="row length (ignored with --input)")
    p.add_argument("--m", type=int, default=1, help="batch rows to generate")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--b", type=int)
    p.add_argument("--kb", type=int)
    p.add_argument("--assignment", default="interleaved")
    p.add_argument("--mode", default="per-bucket", help="per-bucket | chunked[:c] | auto")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--input", help="CSV of score rows (no header)")
    p.add_argument("--exact", action="store_true", help="exact selection instead")
    p.add_argument("--priority-queue", action="store_true",
                   help="with --exact: use the scanning queue implementation")
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("tradeoff", help="cost/error sweep, CSV")
    p.add_argument("--model", type=lambda s: s.split(","), default=["serial"],
                   help="comma list: basic,serial,parallel")
    p.add_argument("--n", type=_int_list, required=True)
    p.add_argument("--k", type=_int_list, required=True)
    p.add_argument("--m", type=_int_list, default=[1])
    p.add_argument("--kb-list", type=_int_list, default=[1, 2, 4, 8])
    p.add_argument("--ratio-list", type=_float_list, default=[1, 2, 4, 8])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_tradeoff)

    p = sub.add_parser("recall", help="analytic vs Monte-Carlo recall, CSV")
    p.add_argument("--n", type=_int_list, required=True)
    p.add_argument("--k", type=_int_list, required=True)
    p.add_argument("--kb-list", type=_int_list, default=[1])
    p.add_argument("--ratio-list", type=_float_list, default=[1])
    p.add_argument("--assignment", default="interleaved")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_recall)

    p = sub.add_parser("correlation", help="assignment experiment on AR(1) data, CSV")
    p.add_argument("--n", type=int, default=2048)
    p.add_argument("--k", type=int, default=256)
    p.add_argument("--rho-list", type=_float_list, default=[0.0, 0.9, 0.99])
    p.add_argument("--kb-list", type=_int_list, default=[1, 2, 4])
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--shuffle", action="store_true",
                   help="also run contiguous assignment on shuffled rows")
    p.add_argument("--out")
    p.set_defaults(func=cmd_correlation)

    p = sub.add_parser("bench", help="timing and bandwidth, CSV")
    p.add_argument("--ops", type=lambda s: s.split(","),
                   default=list(bench_mod.SELECTION_OPS),
                   help=f"comma list from {bench_mod.SELECTION_OPS}")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--b", type=int)
    p.add_argument("--kb", type=int)
    p.add_argument("--assignment", default="interleaved")
    p.add_argument("--chunks", type=int, default=64)
    p.add_argument("--warmup", type=int, default=16)
    p.add_argument("--iters", type=int, default=512)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--value-bytes", type=int, default=8)
    p.add_argument("--index-bytes", type=int, default=8)
    p.add_argument("--workers", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    try:
        return args.func(args)
    except (ConfigError, NonFiniteInputError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        return 0
    except Exception as err:  # internal failure
        log.exception("internal error")
        print(f"internal error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
