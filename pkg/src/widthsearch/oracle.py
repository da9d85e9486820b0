"""Synthetic accuracy curves with known optima, and the benchmark built on them.

All curves sit on a chance-level floor of 0.5 and rise by ``scale`` at
their peak, then get clamped to [0, 1] like real accuracies::

    cusp_abs       0.5 + s * (1 - |x - p| / n)            piecewise-linear tent
    quadratic      0.5 + s * (1 - ((x - p) / n)^2)
    gaussian_bump  0.5 + s * exp(-((x - p) / (n / 4))^2 / 2)
    monotone       tent with its peak at 1 or n
    two_peak       max(tent(p), ratio * tent(q)), tents of half the width

Optional noise is frozen per width: the draw for width k comes from a
generator seeded with ``(noise_seed, k)``, so it is identical across calls
and across processes.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .search import (
    DEFAULT_ALPHA,
    RUN_TO_COMPLETION,
    BenchmarkStats,
    BinarySearchConfig,
    Evaluator,
    SearchResult,
    SearchSpace,
    bench_rows,
    binary_search,
    linear_search,
    summarize_benchmark,
)

KINDS = ("cusp_abs", "quadratic", "gaussian_bump", "two_peak", "monotone")
UNIMODAL_KINDS = ("cusp_abs", "quadratic", "gaussian_bump", "monotone")
ALIASES = {"cusp": "cusp_abs", "gaussian": "gaussian_bump", "bump": "gaussian_bump",
           "two-peak": "two_peak", "twopeak": "two_peak"}
FLOOR = 0.5


class CurveSpecError(ValueError):
    pass


@dataclass(frozen=True)
class SyntheticCurve:
    kind: str
    peak_location: int
    n: int
    scale: float = 0.3
    noise_sd: float = 0.0
    noise_seed: int = 0
    second_peak: int | None = None
    second_ratio: float = 0.7

    def __post_init__(self):
        kind = ALIASES.get(self.kind, self.kind)
        object.__setattr__(self, "kind", kind)
        if kind not in KINDS:
            raise CurveSpecError(f"unknown curve kind {self.kind!r}; choose from {KINDS}")
        if self.n < 1 or not 1 <= self.peak_location <= self.n:
            raise CurveSpecError(f"need 1 <= peak_location <= n, got {self.peak_location}, {self.n}")
        if not self.scale > 0:
            raise CurveSpecError("scale must be positive")
        if self.noise_sd < 0:
            raise CurveSpecError("noise_sd must be non-negative")
        if kind == "monotone" and self.peak_location not in (1, self.n):
            raise CurveSpecError("a monotone curve peaks at 1 or n")
        if kind == "two_peak":
            if self.second_peak is None:
                p, half = self.peak_location, self.n // 2
                object.__setattr__(self, "second_peak", p + half if p <= half else p - half)
            q = self.second_peak
            if not 1 <= q <= self.n:
                raise CurveSpecError(f"second peak {q} outside [1, {self.n}]")
            if not 0 < self.second_ratio < 1:
                raise CurveSpecError("second_ratio must lie in (0, 1)")
            # each tent must stay above the other at its own peak
            if 1 - 2 * abs(q - self.peak_location) / self.n >= self.second_ratio:
                raise CurveSpecError("peaks too close together to form two local maxima")

    def value(self, x: int) -> float:
        p, n, s = self.peak_location, self.n, self.scale
        if self.kind in ("cusp_abs", "monotone"):
            v = FLOOR + s * (1 - abs(x - p) / n)
        elif self.kind == "quadratic":
            v = FLOOR + s * (1 - ((x - p) / n) ** 2)
        elif self.kind == "gaussian_bump":
            v = FLOOR + s * np.exp(-0.5 * ((x - p) / (n / 4)) ** 2)
        else:
            q = self.second_peak
            v = FLOOR + max(s * (1 - 2 * abs(x - p) / n),
                            self.second_ratio * s * (1 - 2 * abs(x - q) / n))
        if self.noise_sd > 0:
            v += self.noise_sd * np.random.default_rng([self.noise_seed, x]).standard_normal()
        return float(min(1.0, max(0.0, v)))


class CurveEvaluator(Evaluator):
    def __init__(self, curve: SyntheticCurve):
        super().__init__(name=f"synth:{curve.kind}:{curve.peak_location}:{curve.n}")
        self.curve = curve

    @property
    def n(self) -> int:
        return self.curve.n

    def compute(self, size: int) -> float:
        if size > self.curve.n:
            raise IndexError(f"size {size} outside [1, {self.curve.n}]")
        return self.curve.value(size)


def make_curve(spec: SyntheticCurve) -> CurveEvaluator:
    return CurveEvaluator(spec)


def parse_synth_uri(uri: str) -> SyntheticCurve:
    """``synth:<kind>:<peak>:<n>[:noise_sd[:seed]]``"""
    parts = uri.split(":")
    if parts[0] != "synth" or not 4 <= len(parts) <= 6:
        raise CurveSpecError(f"expected synth:<kind>:<peak>:<n>[:noise_sd[:seed]], got {uri!r}")
    try:
        peak, n = int(parts[2]), int(parts[3])
        noise = float(parts[4]) if len(parts) > 4 else 0.0
        seed = int(parts[5]) if len(parts) > 5 else 0
    except ValueError as exc:
        raise CurveSpecError(f"bad synthetic dataset {uri!r}: {exc}") from None
    return SyntheticCurve(parts[1], peak, n, noise_sd=noise, noise_seed=seed)


def exhaustive_argmax(evaluator: Evaluator, n: int) -> tuple[int, float]:
    """Ground truth by full scan; reads through ``probe`` so search budgets are untouched."""
    if n < 1:
        raise ValueError("n must be >= 1")
    values = np.array([evaluator.probe(k) for k in range(1, n + 1)])
    i = int(np.argmax(values))
    return i + 1, float(values[i])


def curve_values(evaluator: Evaluator, n: int) -> np.ndarray:
    return np.array([evaluator.probe(k) for k in range(1, n + 1)])


def local_maxima(values) -> list[int]:
    """1-based positions strictly above every existing neighbour."""
    v = np.asarray(values, dtype=float)
    out = []
    for i in range(len(v)):
        left_ok = i == 0 or v[i] > v[i - 1]
        right_ok = i == len(v) - 1 or v[i] > v[i + 1]
        if left_ok and right_ok:
            out.append(i + 1)
    return out


def is_unimodal(evaluator: Evaluator, n: int) -> bool:
    return len(local_maxima(curve_values(evaluator, n))) == 1


def near_local_max(values, size: int, tolerance: int) -> bool:
    return any(abs(size - k) <= tolerance for k in local_maxima(values))


@dataclass
class BenchmarkReport:
    n: int
    delta: int
    alpha: float
    stop_mode: str
    seed: int
    truths: list[int]
    linear: list[SearchResult]
    binary: list[SearchResult]
    linear_stats: BenchmarkStats | None
    binary_stats: BenchmarkStats

    def rows(self) -> list[dict]:
        return (bench_rows(self.linear, self.truths, prefix="linear-")
                + bench_rows(self.binary, self.truths, prefix="binary-"))

    def render(self) -> str:
        return render_benchmark(self)


def table1_benchmark(trials: int = 100, n: int = 1000, delta: int = 2, alpha: float = DEFAULT_ALPHA,
                     seed: int = 0, stop_mode: str = RUN_TO_COMPLETION,
                     kind: str = "cusp_abs", include_linear: bool = True,
                     prior_mode: str = "bracket") -> BenchmarkReport:
    """Run both searches on ``trials`` noiseless curves with uniformly drawn peaks.

    With ``include_linear=False`` only binary search runs and the linear
    fields are left empty (``linear_stats`` is None).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    truths = [int(p) for p in rng.integers(1, n + 1, size=trials)]
    config = BinarySearchConfig(delta=delta, alpha=alpha, stop_mode=stop_mode, prior_mode=prior_mode)
    linear, binary = [], []
    for peak in truths:
        curve = SyntheticCurve(kind, peak, n)
        if curve.kind == "monotone":
            curve = replace(curve, peak_location=n if peak > n // 2 else 1)
        if include_linear:
            linear.append(linear_search(make_curve(curve), n))
        binary.append(binary_search(make_curve(curve), SearchSpace.full(n), config))
    return BenchmarkReport(
        n=n, delta=delta, alpha=alpha, stop_mode=stop_mode, seed=seed, truths=truths,
        linear=linear, binary=binary,
        linear_stats=summarize_benchmark(linear, truths) if include_linear else None,
        binary_stats=summarize_benchmark(binary, truths),
    )


def render_benchmark(report: BenchmarkReport) -> str:
    head = (f"{'Search':<8} | {'Comparisons':^17} | {'Evaluations':^17} | {'Evaluation error':^17}\n"
            f"{'':<8} | {'mean':>8} {'sd':>8} | {'mean':>8} {'sd':>8} | {'mean':>8} {'sd':>8}")
    lines = [f"{report.binary_stats.runs} trials, n={report.n}, delta={report.delta}, "
             f"alpha={report.alpha:g}, stop={report.stop_mode}, seed={report.seed}", head,
             "-" * len(head.splitlines()[0])]
    for label, st in (("Linear", report.linear_stats), ("Binary", report.binary_stats)):
        if st is None:
            continue
        lines.append(f"{label:<8} | {st.mean_comparisons:8.3f} {st.sd_comparisons:8.4f} | "
                     f"{st.mean_evaluations:8.3f} {st.sd_evaluations:8.4f} | "
                     f"{st.mean_error:8.3f} {st.sd_error:8.4f}")
    lines.append("comparisons = slope steps (linear: one per width); "
                 "evaluations = evaluator calls (binary: 2 per step + 1 final)")
    return "\n".join(lines)


def sensitivity_sweep(deltas=(2, 4, 8), stop_modes=("run_to_completion", "two_sigma", "early_stop"),
                      trials: int = 100, n: int = 1000, alpha: float = DEFAULT_ALPHA,
                      seed: int = 0) -> list[dict]:
    """Binary-search statistics across delta and stopping rule on the same random cusps."""
    rows = []
    for delta in deltas:
        for mode in stop_modes:
            rep = table1_benchmark(trials, n, delta, alpha, seed, mode, include_linear=False)
            st = rep.binary_stats
            rows.append({"delta": delta, "stop_mode": mode, **st.as_dict()})
    return rows
