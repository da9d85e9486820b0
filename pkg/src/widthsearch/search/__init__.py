from .algorithms import (
    DEFAULT_ALPHA,
    EARLY_STOP,
    RUN_TO_COMPLETION,
    STOP_MODES,
    TWO_SIGMA,
    BinarySearchConfig,
    SearchError,
    SearchResult,
    SearchSpace,
    SearchState,
    binary_search,
    linear_search,
    secant_slope,
)
from .benchmark import BenchmarkStats, bench_csv, bench_rows, summarize_benchmark
from .evaluator import ArrayEvaluator, EvaluationError, Evaluator
from .posterior import (
    LOWER,
    UPPER,
    LineFit,
    SingularFitError,
    fit_line,
    likelihood,
    normal_cdf,
    posterior_probability,
    prior,
)
from .trace import SearchTrace

__all__ = [
    "DEFAULT_ALPHA", "EARLY_STOP", "RUN_TO_COMPLETION", "STOP_MODES", "TWO_SIGMA",
    "BinarySearchConfig", "SearchError", "SearchResult", "SearchSpace", "SearchState",
    "binary_search", "linear_search", "secant_slope",
    "BenchmarkStats", "bench_csv", "bench_rows", "summarize_benchmark",
    "ArrayEvaluator", "EvaluationError", "Evaluator",
    "LOWER", "UPPER", "LineFit", "SingularFitError", "fit_line", "likelihood",
    "normal_cdf", "posterior_probability", "prior",
    "SearchTrace",
]
