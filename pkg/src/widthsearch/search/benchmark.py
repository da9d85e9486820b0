from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass

import numpy as np

from .algorithms import SearchResult

BENCH_COLUMNS = ("run_id", "truth", "best_size", "error", "comparisons", "evaluations")


@dataclass(frozen=True)
class BenchmarkStats:
    """Population mean / sd of search cost and of |best_size - truth| over runs."""

    runs: int
    mean_comparisons: float
    sd_comparisons: float
    mean_evaluations: float
    sd_evaluations: float
    mean_error: float
    sd_error: float

    def as_dict(self) -> dict:
        return asdict(self)


def summarize_benchmark(results: list[SearchResult], truths: list[int]) -> BenchmarkStats:
    if not results:
        raise ValueError("no results to summarise")
    if len(results) != len(truths):
        raise ValueError(f"{len(results)} results but {len(truths)} truths")
    comps = np.array([r.comparisons_used for r in results], dtype=float)
    evals = np.array([r.evaluations_used for r in results], dtype=float)
    errs = np.array([abs(r.best_size - t) for r, t in zip(results, truths)], dtype=float)
    return BenchmarkStats(
        runs=len(results),
        mean_comparisons=float(comps.mean()),
        sd_comparisons=float(comps.std()),
        mean_evaluations=float(evals.mean()),
        sd_evaluations=float(evals.std()),
        mean_error=float(errs.mean()),
        sd_error=float(errs.std()),
    )


def bench_rows(results: list[SearchResult], truths: list[int], prefix: str = "") -> list[dict]:
    rows = []
    for i, (r, t) in enumerate(zip(results, truths)):
        rows.append({
            "run_id": f"{prefix}{i:04d}",
            "truth": t,
            "best_size": r.best_size,
            "error": abs(r.best_size - t),
            "comparisons": r.comparisons_used,
            "evaluations": r.evaluations_used,
        })
    return rows


def bench_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
