"""Command-line entry point.

    widthsearch sweep        --dataset titanic --n 100 --out runs/sweep
    widthsearch search       --dataset titanic --n 1000 --strategy binary --out runs/bin
    widthsearch compare      --dataset synth:cusp:700:1000 --out runs/cmp
    widthsearch synth-bench  --trials 100 --n 1000 --delta 2 --out runs/bench
    widthsearch --config runs/bin/resolved-config.json --out runs/replay

Every run writes ``resolved-config.json`` (all defaults and seeds
materialised) next to its outputs; passing it back with ``--config``
reproduces ``curve.csv`` and ``trace.jsonl`` byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .mlp import ConfigError, MlpConfig, NumericDivergenceError, PipelineEvaluator
from .oracle import CurveSpecError, make_curve, parse_synth_uri, sensitivity_sweep, table1_benchmark
from .search import (
    BinarySearchConfig,
    SearchError,
    SearchSpace,
    bench_csv,
    binary_search,
    linear_search,
)
from .tabular import TabularError, dataset_digest, load_dataset

log = logging.getLogger("widthsearch")

COMMANDS = ("sweep", "search", "compare", "synth-bench")
STOP_MODES = {"early": "early_stop", "two-sigma": "two_sigma", "complete": "run_to_completion"}
PRIOR_MODES = {"bracket": "bracket", "full-range": "full_range"}
DEFAULT_N = 1000


@dataclass
class RunConfig:
    command: str
    dataset: str = "titanic"
    column_spec: str | None = None
    n: int | None = None
    strategy: str = "binary"
    delta: int = 2
    alpha: float = 0.004
    stop_mode: str = "complete"
    prior: str = "bracket"
    sigma0: float = 0.05
    dropout_rate: float = 0.2
    epochs: int = 15
    learning_rate: float = 0.05
    batch_size: int = 32
    split_ratio: float = 0.8
    seed: int = 0
    split_seed: int | None = None
    weight_seed: int | None = None
    shuffle_seed: int | None = None
    trials: int = 100
    kind: str = "cusp_abs"
    sensitivity: bool = False
    workers: int = 1
    out: str = "out"

    @property
    def synthetic(self) -> bool:
        return self.dataset.startswith("synth:")

    def resolved(self) -> "RunConfig":
        """Copy with every defaulted value made explicit."""
        values = asdict(self)
        for key in ("split_seed", "weight_seed", "shuffle_seed"):
            if values[key] is None:
                values[key] = self.seed
        if values["n"] is None:
            if self.command != "synth-bench" and self.synthetic:
                values["n"] = parse_synth_uri(self.dataset).n
            else:
                values["n"] = DEFAULT_N
        return RunConfig(**values)

    def search_config(self) -> BinarySearchConfig:
        return BinarySearchConfig(delta=self.delta, alpha=self.alpha,
                                  stop_mode=STOP_MODES[self.stop_mode],
                                  prior_mode=PRIOR_MODES[self.prior], sigma0=self.sigma0)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        data = json.loads(text)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown keys in config: {sorted(unknown)}")
        return cls(**data)


def build_evaluator(cfg: RunConfig):
    if cfg.synthetic:
        curve = parse_synth_uri(cfg.dataset)
        if cfg.n > curve.n:
            raise CurveSpecError(f"--n {cfg.n} exceeds the synthetic domain {curve.n}")
        return make_curve(curve)
    ds = load_dataset(cfg.dataset, cfg.column_spec, cfg.split_ratio, cfg.split_seed)
    log.info("%s", dataset_digest(ds))
    base = MlpConfig.for_dataset(
        ds, dropout_rate=cfg.dropout_rate, epochs=cfg.epochs, learning_rate=cfg.learning_rate,
        batch_size=cfg.batch_size, weight_seed=cfg.weight_seed, shuffle_seed=cfg.shuffle_seed)
    return PipelineEvaluator(ds, base, name=ds.name)


def curve_csv(evaluator, sizes) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["size", "train_accuracy", "test_accuracy"])
    for size in sizes:
        record = evaluator.records.get(size)
        train_acc = "" if record is None else repr(record.train_accuracy)
        w.writerow([size, train_acc, repr(evaluator.cached(size))])
    return buf.getvalue()


def _write(out: Path, name: str, text: str) -> None:
    (out / name).write_text(text, encoding="utf-8")


def cmd_sweep(cfg: RunConfig, out: Path) -> dict:
    evaluator = build_evaluator(cfg)
    start = time.perf_counter()
    result = linear_search(evaluator, cfg.n, workers=cfg.workers)
    _write(out, "curve.csv", curve_csv(evaluator, range(1, cfg.n + 1)))
    summary = {**result.summary(), "rows": cfg.n, "wall_time": time.perf_counter() - start}
    print(f"argmax over 1..{cfg.n}: size {result.best_size}, accuracy {result.best_accuracy:.4f}")
    return summary


def cmd_search(cfg: RunConfig, out: Path) -> dict:
    evaluator = build_evaluator(cfg)
    start = time.perf_counter()
    if cfg.strategy == "linear":
        result = linear_search(evaluator, cfg.n, workers=cfg.workers)
    else:
        result = binary_search(evaluator, SearchSpace.full(cfg.n), cfg.search_config())
    wall = time.perf_counter() - start
    result.trace.write(out / "trace.jsonl")
    _write(out, "curve.csv", curve_csv(evaluator, evaluator.cached_sizes()))
    print(f"{result.strategy} search over 1..{cfg.n}: best size {result.best_size}, "
          f"accuracy {result.best_accuracy:.4f}, {result.comparisons_used} steps, "
          f"{result.evaluations_used} evaluations, {wall:.1f}s")
    return {**result.summary(), "wall_time": wall}


def cmd_compare(cfg: RunConfig, out: Path) -> dict:
    evaluator = build_evaluator(cfg)
    t0 = time.perf_counter()
    lin = linear_search(evaluator, cfg.n, workers=cfg.workers)
    t1 = time.perf_counter()
    fresh_before = evaluator.compute_count
    binr = binary_search(evaluator, SearchSpace.full(cfg.n), cfg.search_config())
    t2 = time.perf_counter()

    binr.trace.write(out / "trace.jsonl")
    lin.trace.write(out / "trace-linear.jsonl")
    _write(out, "curve.csv", curve_csv(evaluator, range(1, cfg.n + 1)))

    eval_ratio = lin.evaluations_used / binr.evaluations_used
    step_ratio = lin.comparisons_used / max(1, binr.comparisons_used)
    header = f"{'strategy':<8} {'steps':>6} {'evaluations':>12} {'best size':>10} {'best acc':>9} {'time(s)':>8}"
    print(header)
    for r, wall in ((lin, t1 - t0), (binr, t2 - t1)):
        print(f"{r.strategy:<8} {r.comparisons_used:>6} {r.evaluations_used:>12} "
              f"{r.best_size:>10} {r.best_accuracy:>9.4f} {wall:>8.2f}")
    print(f"speedup in evaluations: {eval_ratio:.1f}x (binary spends 2 per step plus 1 final); "
          f"in steps: {step_ratio:.1f}x")
    if isinstance(evaluator, PipelineEvaluator):
        print("note: binary search reused the linear sweep's cache "
              f"({evaluator.compute_count - fresh_before} new trainings); wall times are not comparable")
    return {
        "linear": {**lin.summary(), "wall_time": t1 - t0},
        "binary": {**binr.summary(), "wall_time": t2 - t1},
        "evaluation_ratio": eval_ratio,
        "step_ratio": step_ratio,
        "same_best_size": lin.best_size == binr.best_size,
        "best_size_gap": abs(lin.best_size - binr.best_size),
    }


def cmd_synth_bench(cfg: RunConfig, out: Path) -> dict:
    report = table1_benchmark(cfg.trials, cfg.n, cfg.delta, cfg.alpha, cfg.seed,
                              STOP_MODES[cfg.stop_mode], cfg.kind, prior_mode=PRIOR_MODES[cfg.prior])
    _write(out, "bench.csv", bench_csv(report.rows()))
    table = report.render()
    _write(out, "table.txt", table + "\n")
    print(table)
    summary = {"linear": report.linear_stats.as_dict(), "binary": report.binary_stats.as_dict()}
    if cfg.sensitivity:
        rows = sensitivity_sweep(trials=cfg.trials, n=cfg.n, alpha=cfg.alpha, seed=cfg.seed)
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        _write(out, "sensitivity.csv", buf.getvalue())
        summary["sensitivity"] = rows
    return summary


HANDLERS = {"sweep": cmd_sweep, "search": cmd_search, "compare": cmd_compare,
            "synth-bench": cmd_synth_bench}


def run(cfg: RunConfig) -> dict:
    cfg = cfg.resolved()
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    _write(out, "resolved-config.json", cfg.to_json())
    summary = HANDLERS[cfg.command](cfg, out)
    _write(out, "result.json", json.dumps({"command": cfg.command, **summary}, indent=2) + "\n")
    return summary


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    d = RunConfig("sweep")
    common.add_argument("--dataset", default=d.dataset,
                        help="CSV path, bundled name (titanic) or synth:<kind>:<peak>:<n>[:noise_sd[:seed]]")
    common.add_argument("--column-spec", default=None, help="spec file or bundled spec name")
    common.add_argument("--n", type=int, default=None, help="largest width searched")
    common.add_argument("--delta", type=int, default=d.delta)
    common.add_argument("--alpha", type=float, default=d.alpha)
    common.add_argument("--stop-mode", choices=sorted(STOP_MODES), default=d.stop_mode)
    common.add_argument("--prior", choices=sorted(PRIOR_MODES), default=d.prior)
    common.add_argument("--sigma0", type=float, default=d.sigma0)
    common.add_argument("--dropout-rate", type=float, default=d.dropout_rate)
    common.add_argument("--epochs", type=int, default=d.epochs)
    common.add_argument("--lr", dest="learning_rate", type=float, default=d.learning_rate)
    common.add_argument("--batch-size", type=int, default=d.batch_size)
    common.add_argument("--split-ratio", type=float, default=d.split_ratio)
    common.add_argument("--seed", type=int, default=d.seed)
    common.add_argument("--split-seed", type=int, default=None)
    common.add_argument("--weight-seed", type=int, default=None)
    common.add_argument("--shuffle-seed", type=int, default=None)
    common.add_argument("--workers", type=int, default=d.workers)
    common.add_argument("--out", default=None)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="widthsearch", description=__doc__.split("\n\n")[0])
    parser.add_argument("--config", help="replay a resolved-config.json")
    parser.add_argument("--out", dest="replay_out", default=None, help="output dir for --config replays")
    sub = parser.add_subparsers(dest="command")
    sub.add_parser("sweep", parents=[common], help="train every width 1..n, write curve.csv")
    p = sub.add_parser("search", parents=[common], help="run one search strategy")
    p.add_argument("--strategy", choices=("binary", "linear"), default="binary")
    sub.add_parser("compare", parents=[common], help="linear vs binary on a shared evaluator")
    p = sub.add_parser("synth-bench", parents=[common], help="search statistics on random cusps")
    p.add_argument("--trials", type=int, default=d.trials)
    p.add_argument("--kind", default=d.kind)
    p.add_argument("--sensitivity", action="store_true", help="also sweep delta and stop mode")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    names = {f.name for f in fields(RunConfig)}
    values = {k: v for k, v in vars(args).items() if k in names and v is not None}
    values.setdefault("out", f"runs/{args.command}")
    return RunConfig(**values)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        cfg = RunConfig.from_json(Path(args.config).read_text(encoding="utf-8"))
        if args.replay_out:
            cfg.out = args.replay_out
    elif args.command is None:
        parser.print_help()
        return 2
    else:
        cfg = config_from_args(args)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(message)s")

    if cfg.command not in COMMANDS:
        parser.error(f"unknown command {cfg.command!r}")
    if cfg.command == "synth-bench" and cfg.trials < 1:
        parser.error("--trials must be >= 1")
    if cfg.n is not None and cfg.n < 1:
        parser.error("--n must be >= 1")
    if cfg.workers < 1:
        parser.error("--workers must be >= 1")
    try:
        run(cfg)
    except (TabularError, ConfigError, CurveSpecError, SearchError, NumericDivergenceError,
            FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
