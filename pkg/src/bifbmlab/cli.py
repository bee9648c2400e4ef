"""Command-line runner.

    bifbmlab run CONFIG.yaml [--only PREFIX] [--seed N] [--workers N]
                             [--out DIR] [--format records|csv|both]

Exit codes: 0 all verdicts PASS (or INCONCLUSIVE), 2 at least one FAIL,
3 configuration error, 4 numerical failure (factorization, PSD gate, or a
violated precondition).

Jobs are sharded per (check, H, K) sweep point, so --only with any check-id
prefix reproduces a single finding in isolation, e.g.

    bifbmlab run cfg.yaml --only 'sup_sandwich/H=0.5,K=0.75'

Worker threads only affect wall time: results are assembled in job order
and report files are byte-identical for any --workers value.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import List, Optional, Tuple

from .config import RunConfig, load_config
from .errors import (
    ConfigError,
    FactorizationFailed,
    NotPositiveSemidefinite,
    PreconditionViolated,
)
from .harness import (
    CHECKS,
    CheckResult,
    Verdict,
    _point_id,
    refinement_rows,
    tail_curve_rows,
)
from .report import emit_report, summary_lines
from .sampling import sample_paths, cholesky_factor
from .kernels import KernelParams, gram_matrix
from .grids import TimeGrid
from .streams import derive_stream, fold_label
from . import pathio

EXIT_OK = 0
EXIT_FAIL = 2
EXIT_CONFIG = 3
EXIT_NUMERICAL = 4

_NUMERICAL_ERRORS = (NotPositiveSemidefinite, FactorizationFailed, PreconditionViolated)


def _jobs(cfg: RunConfig, only: Optional[str]) -> List[Tuple[str, str, object]]:
    jobs = []
    for name in cfg.checks:
        for h, k in cfg.sweep.points():
            jid = _point_id(name, h, k)
            if only is not None and not (jid.startswith(only) or only.startswith(jid)):
                continue
            jobs.append((jid, name, replace(cfg.sweep, H=(h,), K=(k,))))
    return jobs


def run(cfg: RunConfig, only: Optional[str] = None):
    """Execute the configured checks; returns (results, timings-by-check)."""
    jobs = _jobs(cfg, only)
    if not jobs:
        raise ConfigError(f"--only {only!r} matches no (check, H, K) job")

    def exec_job(job):
        jid, name, sweep = job
        t0 = time.perf_counter()
        results = CHECKS[name](sweep)
        return results, time.perf_counter() - t0

    timings: dict = {}
    results: List[CheckResult] = []
    if cfg.workers == 1:
        outcomes = [exec_job(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            futures = [pool.submit(exec_job, j) for j in jobs]
            outcomes = [f.result() for f in futures]
    for (jid, name, _), (job_results, secs) in zip(jobs, outcomes):
        timings[name] = timings.get(name, 0.0) + secs
        if only is not None:
            job_results = [r for r in job_results if r.check_id.startswith(only)]
        results.extend(job_results)
    return results, timings


def _export_paths(cfg: RunConfig) -> List[str]:
    out = []
    directory = os.path.join(cfg.out_dir, "paths")
    os.makedirs(directory, exist_ok=True)
    for h, k in cfg.sweep.points():
        params = KernelParams.bifbm(h, k)
        grid = TimeGrid.uniform(cfg.sweep.n, cfg.sweep.T)
        master = fold_label(cfg.sweep.seed, _point_id("export", h, k))
        factor = cholesky_factor(gram_matrix(grid, params))
        batch = sample_paths(factor, cfg.export_count, derive_stream(master, 0))
        path = os.path.join(directory, f"bifbm_H{h!r}_K{k!r}.paths")
        pathio.write_paths(path, batch)
        out.append(path)
        del batch
    return out


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="bifbmlab",
        description="Monte Carlo verification lab for bifractional Brownian motion",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="execute checks from a YAML config")
    runp.add_argument("config", help="path to the YAML run configuration")
    runp.add_argument("--only", default=None, metavar="PREFIX",
                      help="run only check ids under this prefix")
    runp.add_argument("--seed", type=int, default=None, help="override the master seed")
    runp.add_argument("--workers", type=int, default=None, help="override worker count")
    runp.add_argument("--out", default=None, metavar="DIR", help="override out_dir")
    runp.add_argument("--format", default=None, choices=["records", "csv", "both"],
                      help="override artifact format")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.sweep = replace(cfg.sweep, seed=args.seed)
        if args.workers is not None:
            cfg.workers = args.workers
        if args.out is not None:
            cfg.out_dir = args.out
        if args.format is not None:
            cfg.format = args.format
        cfg.validate()
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        t0 = time.perf_counter()
        results, timings = run(cfg, args.only)
        tail_rows = None
        if cfg.format in ("csv", "both") and cfg.tail_curve_points > 0 and args.only is None:
            tail_rows = tail_curve_rows(cfg.sweep, cfg.tail_curve_points)
        refine_rows = refinement_rows(cfg.sweep) if cfg.refinement_study else None
        exported = _export_paths(cfg) if cfg.export_paths else []
        total = time.perf_counter() - t0
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except _NUMERICAL_ERRORS as err:
        print(f"numerical failure: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_NUMERICAL

    written = emit_report(results, cfg, tail_rows=tail_rows, refine_rows=refine_rows)
    for line in summary_lines(results, timings):
        print(line)
    print()
    for path in written + exported:
        print(f"wrote {path}")
    print(f"total {total:.1f}s")

    any_fail = any(r.verdict is Verdict.FAIL for r in results)
    return EXIT_FAIL if any_fail else EXIT_OK


def console_entry() -> None:
    raise SystemExit(main())
