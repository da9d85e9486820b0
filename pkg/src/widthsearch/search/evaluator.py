"""Evaluators: deterministic, memoised maps from hidden-layer width to accuracy."""

from __future__ import annotations

import threading
from concurrent.futures import ProcessPoolExecutor


class EvaluationError(RuntimeError):
    pass


class Evaluator:
    """Width -> accuracy, memoised by width.

    ``call_count`` counts every :meth:`evaluate` call (cache hits included),
    which is the budget searches report.  ``compute_count`` counts actual
    computations (cache misses).  :meth:`probe` reads values for oracles
    without touching ``call_count``.

    Subclasses override :meth:`compute`; side information for a width (for
    example a training report) goes in ``self.records[size]``.
    """

    def __init__(self, fn=None, name: str = "evaluator"):
        self._fn = fn
        self.name = name
        self.call_count = 0
        self.probe_count = 0
        self.compute_count = 0
        self.records: dict[int, object] = {}
        self._cache: dict[int, float] = {}
        self._lock = threading.Lock()

    def compute(self, size: int) -> float:
        if self._fn is None:
            raise NotImplementedError("subclasses must implement compute()")
        return float(self._fn(size))

    def evaluate(self, size: int) -> float:
        with self._lock:
            self.call_count += 1
            return self._value(size)

    __call__ = evaluate

    def probe(self, size: int) -> float:
        with self._lock:
            self.probe_count += 1
            return self._value(size)

    def cached(self, size: int) -> float | None:
        return self._cache.get(size)

    def cached_sizes(self) -> list[int]:
        return sorted(self._cache)

    def _value(self, size: int) -> float:
        if isinstance(size, bool) or int(size) != size or size < 1:
            raise EvaluationError(f"size must be a positive integer, got {size!r}")
        size = int(size)
        if size not in self._cache:
            try:
                value = float(self.compute(size))
            except Exception as exc:
                raise EvaluationError(f"{self.name}: evaluation at size {size} failed: {exc}") from exc
            self._cache[size] = value
            self.compute_count += 1
        return self._cache[size]

    def prefetch(self, sizes, workers: int = 1) -> None:
        """Fill the cache for ``sizes`` without counting calls, optionally in worker processes."""
        missing = sorted({int(s) for s in sizes} - set(self._cache))
        if workers <= 1 or len(missing) < 2:
            for s in missing:
                with self._lock:
                    self._value(s)
            return
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(self._remote, missing, chunksize=max(1, len(missing) // (4 * workers))))
        with self._lock:
            for s, (value, record) in zip(missing, results):
                self._cache[s] = value
                self.compute_count += 1
                if record is not None:
                    self.records[s] = record

    def _remote(self, size: int):
        value = float(self.compute(size))
        return value, self.records.get(size)

    def __getstate__(self):
        state = self.__dict__.copy()
        state["_lock"] = None
        state["_cache"] = {}
        state["records"] = {}
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._lock = threading.Lock()


class ArrayEvaluator(Evaluator):
    """Evaluator over a precomputed curve: ``values[k - 1]`` is the accuracy at width k."""

    def __init__(self, values, name: str = "array"):
        super().__init__(name=name)
        self.values = [float(v) for v in values]

    @property
    def n(self) -> int:
        return len(self.values)

    def compute(self, size: int) -> float:
        if size > len(self.values):
            raise IndexError(f"size {size} beyond curve length {len(self.values)}")
        return self.values[size - 1]
