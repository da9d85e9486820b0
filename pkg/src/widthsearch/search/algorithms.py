"""Exhaustive and slope-guided searches for the best hidden-layer width."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .evaluator import EvaluationError, Evaluator
from .posterior import (
    DEFAULT_SIGMA0,
    LOWER,
    TWO_SIGMA_LEVEL,
    UPPER,
    likelihood,
    prior,
)
from .trace import (
    Accepted,
    BoundMoved,
    Evaluated,
    Flagged,
    PosteriorComputed,
    SearchTrace,
    SlopeComputed,
)

EARLY_STOP = "early_stop"
TWO_SIGMA = "two_sigma"
RUN_TO_COMPLETION = "run_to_completion"
STOP_MODES = (EARLY_STOP, TWO_SIGMA, RUN_TO_COMPLETION)

#: prior over the current bracket, or over the whole space [1, n]
PRIOR_MODES = ("bracket", "full_range")

DEFAULT_ALPHA = 0.004


class SearchError(RuntimeError):
    """An evaluation failed mid-search; ``trace`` holds everything logged before it."""

    def __init__(self, message: str, trace: SearchTrace):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class SearchSpace:
    lower: int
    upper: int
    n: int

    def __post_init__(self):
        if not 1 <= self.lower <= self.upper <= self.n:
            raise ValueError(f"need 1 <= lower <= upper <= n, got {self}")

    @classmethod
    def full(cls, n: int) -> "SearchSpace":
        return cls(1, n, n)


@dataclass(frozen=True)
class BinarySearchConfig:
    delta: int = 2
    alpha: float = DEFAULT_ALPHA
    stop_mode: str = RUN_TO_COMPLETION
    prior_mode: str = "bracket"
    sigma0: float = DEFAULT_SIGMA0

    def __post_init__(self):
        if self.delta < 2 or self.delta % 2:
            raise ValueError(f"delta must be an even integer >= 2, got {self.delta}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.stop_mode not in STOP_MODES:
            raise ValueError(f"stop_mode must be one of {STOP_MODES}, got {self.stop_mode!r}")
        if self.prior_mode not in PRIOR_MODES:
            raise ValueError(f"prior_mode must be one of {PRIOR_MODES}, got {self.prior_mode!r}")
        if not self.sigma0 > 0:
            raise ValueError("sigma0 must be positive")


@dataclass
class SearchState:
    lower: int
    upper: int
    m_lower: list[float] = field(default_factory=list)
    m_upper: list[float] = field(default_factory=list)
    mid_lower: list[int] = field(default_factory=list)
    mid_upper: list[int] = field(default_factory=list)

    def history(self, side: str) -> tuple[list[float], list[int]]:
        if side == LOWER:
            return self.m_lower, self.mid_lower
        return self.m_upper, self.mid_upper


@dataclass
class SearchResult:
    strategy: str
    best_size: int
    best_accuracy: float
    evaluations_used: int
    comparisons_used: int
    trace: SearchTrace
    state: SearchState | None = None
    stop_reason: str = ""

    def summary(self) -> dict:
        return {
            "strategy": self.strategy,
            "best_size": self.best_size,
            "best_accuracy": self.best_accuracy,
            "comparisons_used": self.comparisons_used,
            "evaluations_used": self.evaluations_used,
            "stop_reason": self.stop_reason,
        }


def linear_search(evaluator: Evaluator, n: int, workers: int = 1) -> SearchResult:
    """Evaluate every width 1..n once; the first width reaching the maximum wins."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    trace = SearchTrace()
    start_calls = evaluator.call_count
    if workers > 1:
        evaluator.prefetch(range(1, n + 1), workers=workers)
    best_size, best_acc = 1, -math.inf
    for size in range(1, n + 1):
        try:
            acc = evaluator.evaluate(size)
        except EvaluationError as exc:
            raise SearchError(str(exc), trace) from exc
        trace.append(Evaluated(size, acc))
        if acc > best_acc:
            best_size, best_acc = size, acc
    trace.append(Accepted(best_size, None))
    return SearchResult(
        strategy="linear",
        best_size=best_size,
        best_accuracy=best_acc,
        evaluations_used=evaluator.call_count - start_calls,
        comparisons_used=n,
        trace=trace,
        stop_reason="exhausted",
    )


def secant_slope(evaluator: Evaluator, current_size: int, delta: int, n: int | None = None,
                 trace: SearchTrace | None = None) -> float:
    """Slope of the secant through ``current_size +/- delta/2``.

    Endpoints leaving ``[1, n]`` are clamped and the divisor becomes the
    actual separation.
    """
    half = delta // 2
    right = current_size + half if n is None else min(n, current_size + half)
    left = max(1, current_size - half)
    if right <= left:
        raise ValueError(f"secant at {current_size} with delta {delta} collapses inside [1, {n}]")
    acc_right = evaluator.evaluate(right)
    if trace is not None:
        trace.append(Evaluated(right, acc_right))
    acc_left = evaluator.evaluate(left)
    if trace is not None:
        trace.append(Evaluated(left, acc_left))
    slope = (acc_right - acc_left) / (right - left)
    if trace is not None:
        trace.append(SlopeComputed(current_size, right - left, left, right, slope))
    return slope


def binary_search(evaluator: Evaluator, space: SearchSpace,
                  config: BinarySearchConfig = BinarySearchConfig()) -> SearchResult:
    """Bisect on the sign of secant slopes, scoring each midpoint with the posterior.

    A positive slope means the maximum lies above the midpoint (lower bound
    moves up); zero or negative means at or below it (upper bound moves
    down).  ``early_stop`` accepts the first midpoint whose posterior exceeds
    ``alpha``; ``two_sigma`` accepts the first whose slope sits more than two
    standard deviations flatter than its side's trend.  Otherwise the
    bracket shrinks until it is no wider than delta and the midpoint with the
    largest posterior wins (latest on ties).  The winner is evaluated once
    more to report its accuracy.
    """
    n, delta = space.n, config.delta
    if delta >= n:
        raise ValueError(f"delta ({delta}) must be smaller than n ({n})")
    trace = SearchTrace()
    state = SearchState(space.lower, space.upper)
    start_calls = evaluator.call_count
    comparisons = 0
    candidates: list[tuple[float, int]] = []
    accepted: tuple[int, float] | None = None
    stop_reason = "bracket_converged"

    try:
        while state.upper - state.lower > delta:
            mid = (state.lower + state.upper) // 2
            if mid in (state.lower, state.upper):
                trace.append(Flagged(f"bracket [{state.lower}, {state.upper}] stopped shrinking"))
                stop_reason = "forced_termination"
                break
            slope = secant_slope(evaluator, mid, delta, n, trace)
            comparisons += 1
            side = LOWER if slope > 0 else UPPER
            m, mids = state.history(side)
            m.append(slope)
            mids.append(mid)

            lk = likelihood(m, mids, side, config.sigma0)
            if config.prior_mode == "bracket":
                pr = prior(delta, state.lower, state.upper)
            else:
                pr = prior(delta, 1, n)
            post = lk * pr
            trace.append(PosteriorComputed(side, mid, lk, pr, post))
            candidates.append((post, mid))

            if config.stop_mode == EARLY_STOP and post > config.alpha:
                accepted = (mid, post)
                stop_reason = "posterior_above_alpha"
                break
            if config.stop_mode == TWO_SIGMA and lk > TWO_SIGMA_LEVEL:
                accepted = (mid, post)
                stop_reason = "two_sigma"
                break

            if side == LOWER:
                trace.append(BoundMoved(LOWER, state.lower, mid))
                state.lower = mid
            else:
                trace.append(BoundMoved(UPPER, state.upper, mid))
                state.upper = mid

        if accepted is None:
            if candidates:
                best_post = max(p for p, _ in candidates)
                best_mid = [mid for p, mid in candidates if p == best_post][-1]
                accepted = (best_mid, best_post)
            else:
                trace.append(Flagged(f"bracket [{state.lower}, {state.upper}] no wider than delta"))
                accepted = ((state.lower + state.upper) // 2, None)

        best_size, best_post = accepted
        best_acc = evaluator.evaluate(best_size)
        trace.append(Evaluated(best_size, best_acc))
        trace.append(Accepted(best_size, best_post))
    except EvaluationError as exc:
        raise SearchError(str(exc), trace) from exc

    return SearchResult(
        strategy="binary",
        best_size=best_size,
        best_accuracy=best_acc,
        evaluations_used=evaluator.call_count - start_calls,
        comparisons_used=comparisons,
        trace=trace,
        state=state,
        stop_reason=stop_reason,
    )
