"""Report emission: JSONL records, CSV tables, stdout summary.

Report files are byte-identical for identical (config, seed) regardless of
worker count: results arrive pre-sorted in job order, floats are serialized
with repr, keys are sorted, and wall-clock timings are never written to
files (they go to stdout only).
"""

from __future__ import annotations

import csv
import json
import math
import os
from typing import List

from .estimators import MCEstimate
from .harness import CheckResult, Verdict

RECORD_SCHEMA_VERSION = 1


def _clean(x):
    """JSON-safe values: non-finite floats become strings."""
    if isinstance(x, float) and not math.isfinite(x):
        if math.isnan(x):
            return "nan"
        return "inf" if x > 0 else "-inf"
    return x


def _estimate_record(est: MCEstimate) -> dict:
    return {
        "mean": _clean(est.mean),
        "stderr": _clean(est.stderr),
        "M": est.M,
        "functional": est.functional,
        "process": est.process,
        "unreliable": est.unreliable,
        "note": est.note,
    }


def record_for(result: CheckResult) -> dict:
    return {
        "schema_version": RECORD_SCHEMA_VERSION,
        "check_id": result.check_id,
        "kind": result.kind.value,
        "verdict": result.verdict.value,
        "margin": _clean(result.margin),
        "z": _clean(result.z),
        "z_crit": result.z_crit,
        "tol": result.tol,
        "lhs": _estimate_record(result.lhs),
        "rhs": _estimate_record(result.rhs),
        "config": {k: _clean(v) for k, v in result.config.items()},
        "note": result.note,
    }


def write_records(results: List[CheckResult], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in results:
            fh.write(json.dumps(record_for(r), sort_keys=True, separators=(",", ":")))
            fh.write("\n")


def _fmt(x) -> str:
    return repr(x) if isinstance(x, float) else str(x)


def write_results_csv(results: List[CheckResult], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(
            [
                "check_id", "kind", "verdict", "margin", "z", "z_crit", "tol",
                "lhs_mean", "lhs_stderr", "rhs_mean", "rhs_stderr", "note",
            ]
        )
        for r in results:
            w.writerow(
                [
                    r.check_id,
                    r.kind.value,
                    r.verdict.value,
                    _fmt(r.margin),
                    _fmt(r.z),
                    _fmt(r.z_crit),
                    _fmt(r.tol),
                    _fmt(r.lhs.mean),
                    _fmt(r.lhs.stderr),
                    _fmt(r.rhs.mean),
                    _fmt(r.rhs.stderr),
                    r.note,
                ]
            )


def write_tail_curves_csv(rows: List[dict], path) -> None:
    """rows: dicts with process, H, K, u, p_hat, stderr."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["process", "H", "K", "u", "p_hat", "stderr"])
        for r in rows:
            w.writerow(
                [r["process"], _fmt(r["H"]), _fmt(r["K"]),
                 _fmt(r["u"]), _fmt(r["p_hat"]), _fmt(r["stderr"])]
            )


def write_refinement_csv(rows: List[dict], path) -> None:
    """rows: dicts with H, K, n, mean, stderr (E sup W vs grid resolution)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["H", "K", "n", "mean", "stderr"])
        for r in rows:
            w.writerow(
                [_fmt(r["H"]), _fmt(r["K"]), r["n"], _fmt(r["mean"]), _fmt(r["stderr"])]
            )


def emit_report(results: List[CheckResult], run_cfg, tail_rows=None, refine_rows=None) -> List[str]:
    """Write the configured artifact files; returns their paths."""
    os.makedirs(run_cfg.out_dir, exist_ok=True)
    written = []
    if run_cfg.format in ("records", "both"):
        path = os.path.join(run_cfg.out_dir, "records.jsonl")
        write_records(results, path)
        written.append(path)
    if run_cfg.format in ("csv", "both"):
        path = os.path.join(run_cfg.out_dir, "results.csv")
        write_results_csv(results, path)
        written.append(path)
        if tail_rows:
            path = os.path.join(run_cfg.out_dir, "tail_curves.csv")
            write_tail_curves_csv(tail_rows, path)
            written.append(path)
    if refine_rows:
        path = os.path.join(run_cfg.out_dir, "refinement.csv")
        write_refinement_csv(refine_rows, path)
        written.append(path)
    return written


def summary_lines(results: List[CheckResult], timings: dict) -> List[str]:
    """Human-readable run summary (stdout only; never written to files)."""
    by_check: dict = {}
    for r in results:
        name = r.config.get("check", r.check_id.split("/", 1)[0])
        by_check.setdefault(name, []).append(r)
    lines = []
    header = f"{'check':28s} {'results':>7s} {'pass':>5s} {'fail':>5s} {'inconcl':>7s} {'min z':>9s} {'seconds':>8s}"
    lines.append(header)
    lines.append("-" * len(header))
    for name in sorted(by_check):
        rs = by_check[name]
        n_pass = sum(1 for r in rs if r.verdict is Verdict.PASS)
        n_fail = sum(1 for r in rs if r.verdict is Verdict.FAIL)
        n_inc = sum(1 for r in rs if r.verdict is Verdict.INCONCLUSIVE)
        finite_z = [r.z for r in rs if math.isfinite(r.z)]
        min_z = f"{min(finite_z):+.2f}" if finite_z else "n/a"
        secs = timings.get(name)
        secs_s = f"{secs:8.1f}" if secs is not None else "     n/a"
        lines.append(
            f"{name:28s} {len(rs):7d} {n_pass:5d} {n_fail:5d} {n_inc:7d} {min_z:>9s} {secs_s}"
        )
    fails = [r for r in results if r.verdict is Verdict.FAIL]
    if fails:
        lines.append("")
        lines.append("FAIL verdicts:")
        for r in fails:
            lines.append(f"  {r.check_id}  margin={r.margin:+.6g}  z={r.z:+.3g}")
    return lines
