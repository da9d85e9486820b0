"""CSV ingestion and preprocessing for the tabular binary-classification datasets.

A dataset is described by a small declarative column-spec file (INI syntax)
that assigns every CSV column a role (drop / numeric / categorical / label)
and an imputation rule.  ``preprocess`` turns a :class:`RawTable` into a
:class:`SplitDataset`: rows are split first, then every statistic used for
imputation, one-hot vocabularies and standardization is computed on the
training partition only and applied unchanged to the test partition.

Example spec file::

    [dataset]
    missing = ?

    [columns]
    survived = label
    sex = categorical, mode
    age = numeric, mean
    cabin = drop

    [derived]
    deck = categorical, constant(U), from=cabin:first_char
"""

from __future__ import annotations

import configparser
import csv
import io
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

ROLES = ("drop", "numeric", "categorical", "label")
TRANSFORMS = ("first_char", "present")
DEFAULT_SPLIT_RATIO = 0.8
DEFAULT_SPLIT_SEED = 0


class TabularError(ValueError):
    """Base class for ingestion and preprocessing failures."""


class EmptyInputError(TabularError):
    pass


class CsvParseError(TabularError):
    def __init__(self, message: str, row_index: int):
        super().__init__(message)
        self.row_index = row_index


class SpecError(TabularError):
    pass


class LabelDomainError(TabularError):
    pass


@dataclass(frozen=True)
class RawTable:
    column_names: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        width = len(self.column_names)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise CsvParseError(
                    f"row {i} has {len(row)} cells, expected {width}", i)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return len(self.column_names)

    def column(self, name: str) -> list[str]:
        try:
            j = self.column_names.index(name)
        except ValueError:
            raise SpecError(f"column {name!r} not in table") from None
        return [row[j] for row in self.rows]


@dataclass(frozen=True)
class ColumnSpec:
    """How one column (or one derived column) enters the feature matrix.

    ``impute`` is ``"mean"``, ``"mode"`` or ``"constant(<value>)"``.
    Derived columns carry ``source`` and ``transform``.
    """

    name: str
    role: str
    impute: str = "mean"
    source: str | None = None
    transform: str | None = None
    positive: str | None = None

    def __post_init__(self):
        if self.role not in ROLES:
            raise SpecError(f"{self.name}: unknown role {self.role!r}")
        if not (self.impute in ("mean", "mode") or _constant_value(self.impute) is not None):
            raise SpecError(f"{self.name}: unknown imputation {self.impute!r}")
        if self.role == "numeric" and self.impute == "mode":
            raise SpecError(f"{self.name}: numeric columns impute by mean or constant")
        if self.role == "categorical" and self.impute == "mean":
            object.__setattr__(self, "impute", "mode")
        if (self.source is None) != (self.transform is None):
            raise SpecError(f"{self.name}: derived columns need both source and transform")
        if self.transform is not None and self.transform not in TRANSFORMS:
            raise SpecError(f"{self.name}: unknown transform {self.transform!r}")


@dataclass(frozen=True)
class DatasetSpec:
    """Parsed column-spec file."""

    name: str
    columns: tuple[ColumnSpec, ...]
    missing: tuple[str, ...] = ("",)
    notes: str = ""

    @property
    def label(self) -> ColumnSpec:
        return next(c for c in self.columns if c.role == "label")

    @property
    def source_columns(self) -> tuple[ColumnSpec, ...]:
        return tuple(c for c in self.columns if c.source is None)


@dataclass(frozen=True, eq=False)
class TabularDataset:
    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...]

    def __post_init__(self):
        self.features.setflags(write=False)
        self.labels.setflags(write=False)

    @property
    def M(self) -> int:
        return len(self.feature_names)

    @property
    def n_samples(self) -> int:
        return len(self.labels)


@dataclass(frozen=True, eq=False)
class SplitDataset:
    train: TabularDataset
    test: TabularDataset
    split_ratio: float
    split_seed: int
    name: str = "dataset"
    groups: dict[str, tuple[int, ...]] = field(default_factory=dict)

    @property
    def M(self) -> int:
        return self.train.M

    @property
    def feature_names(self) -> tuple[str, ...]:
        return self.train.feature_names

    @property
    def n_total(self) -> int:
        return self.train.n_samples + self.test.n_samples


def load_csv(path, has_header: bool = True) -> RawTable:
    """Read a comma-separated, double-quoted UTF-8 file with every cell kept as text."""
    text = Path(path).read_text(encoding="utf-8-sig")
    return parse_csv(text, has_header=has_header)


def parse_csv(text: str, has_header: bool = True) -> RawTable:
    records = [r for r in csv.reader(io.StringIO(text)) if r]
    if not records:
        raise EmptyInputError("CSV input is empty")
    if has_header:
        header, body = tuple(records[0]), records[1:]
    else:
        header = tuple(f"c{j}" for j in range(len(records[0])))
        body = records
    for i, row in enumerate(body):
        if len(row) != len(header):
            raise CsvParseError(
                f"row {i} has {len(row)} cells, expected {len(header)}", i)
    return RawTable(header, tuple(tuple(r) for r in body))


_LINE = re.compile(r"^\s*([a-z]+)\s*(?:,\s*(.*))?$")


def parse_column_spec(text: str, name: str = "dataset") -> DatasetSpec:
    """Parse the INI-style column-spec format (see module docstring)."""
    parser = configparser.ConfigParser(delimiters=("=",), interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise SpecError(f"malformed column spec: {exc}") from None

    meta = parser["dataset"] if parser.has_section("dataset") else {}
    name = meta.get("name", name)
    missing = ("",) + tuple(
        m.strip() for m in meta.get("missing", "").split() if m.strip())
    specs = []
    for section in ("columns", "derived"):
        if not parser.has_section(section):
            continue
        for col, value in parser[section].items():
            specs.append(_parse_entry(col, value, derived=section == "derived"))
    if not specs:
        raise SpecError("column spec declares no columns")
    labels = [c for c in specs if c.role == "label"]
    if len(labels) != 1:
        raise SpecError(f"exactly one label column required, found {len(labels)}")
    return DatasetSpec(name=name, columns=tuple(specs), missing=missing,
                       notes=meta.get("notes", ""))


def _parse_entry(col: str, value: str, derived: bool) -> ColumnSpec:
    parts = [p.strip() for p in value.split(",") if p.strip()]
    if not parts:
        raise SpecError(f"{col}: empty entry")
    role, options = parts[0], parts[1:]
    kwargs: dict = {"name": col, "role": role}
    for opt in options:
        if opt.startswith("from="):
            source, _, transform = opt[5:].partition(":")
            kwargs["source"], kwargs["transform"] = source, transform or None
        elif opt.startswith("positive="):
            kwargs["positive"] = opt[9:]
        else:
            kwargs["impute"] = opt
    if derived and "source" not in kwargs:
        raise SpecError(f"{col}: derived column needs from=<column>:<transform>")
    return ColumnSpec(**kwargs)


def load_column_spec(path_or_name) -> DatasetSpec:
    """Load a spec file by path, or a bundled one by name (``titanic``, ``churn``...)."""
    p = Path(path_or_name)
    if p.exists():
        return parse_column_spec(p.read_text(encoding="utf-8"), name=p.stem)
    bundled = resources.files("widthsearch.data") / f"{path_or_name}.spec"
    if bundled.is_file():
        return parse_column_spec(bundled.read_text(encoding="utf-8"), name=str(path_or_name))
    raise SpecError(f"no column spec at {path_or_name!r}")


def bundled_specs() -> dict[str, DatasetSpec]:
    out = {}
    for entry in sorted(resources.files("widthsearch.data").iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".spec"):
            stem = entry.name[: -len(".spec")]
            out[stem] = parse_column_spec(entry.read_text(encoding="utf-8"), name=stem)
    return out


def infer_column_spec(raw: RawTable) -> DatasetSpec:
    """Pick the bundled spec whose source columns match the table header exactly."""
    header = set(raw.column_names)
    for spec in bundled_specs().values():
        if {c.name for c in spec.source_columns} == header:
            return spec
    raise SpecError("no bundled column spec matches this header; pass one explicitly")


def bundled_dataset_path(name: str) -> Path:
    entry = resources.files("widthsearch.data") / f"{name}.csv"
    if not entry.is_file():
        raise SpecError(f"no bundled dataset named {name!r}")
    return Path(str(entry))


def split_indices(n: int, split_ratio: float, split_seed: int) -> tuple[np.ndarray, np.ndarray]:
    if not 0.0 < split_ratio < 1.0:
        raise SpecError(f"split_ratio must lie in (0, 1), got {split_ratio}")
    perm = np.random.default_rng(split_seed).permutation(n)
    n_train = int(round(split_ratio * n))
    return np.sort(perm[:n_train]), np.sort(perm[n_train:])


def preprocess(raw: RawTable, specs, split_ratio: float = DEFAULT_SPLIT_RATIO,
               split_seed: int = DEFAULT_SPLIT_SEED) -> SplitDataset:
    if isinstance(specs, DatasetSpec):
        spec = specs
    else:
        spec = DatasetSpec(name="dataset", columns=tuple(specs))
        if sum(c.role == "label" for c in spec.columns) != 1:
            raise SpecError("exactly one label column required")

    declared = {c.name for c in spec.source_columns}
    for c in spec.columns:
        if c.source is None and c.name not in raw.column_names:
            raise SpecError(f"spec names nonexistent column {c.name!r}")
        if c.source is not None and c.source not in raw.column_names:
            raise SpecError(f"{c.name}: source column {c.source!r} does not exist")
    uncovered = [name for name in raw.column_names if name not in declared]
    if uncovered:
        raise SpecError(f"columns without a spec: {uncovered}")

    missing = set(spec.missing)
    train_idx, test_idx = split_indices(raw.n_rows, split_ratio, split_seed)
    labels = _encode_labels(raw.column(spec.label.name), spec.label, missing)

    train_blocks, test_blocks, names = [], [], []
    groups: dict[str, tuple[int, ...]] = {}
    for c in spec.columns:
        if c.role in ("drop", "label"):
            continue
        cells = _column_cells(raw, c, missing)
        tr = [cells[i] for i in train_idx]
        te = [cells[i] for i in test_idx]
        if c.role == "numeric":
            a, b = _numeric_block(c, tr, te)
            names.append(c.name)
            train_blocks.append(a[:, None])
            test_blocks.append(b[:, None])
        else:
            a, b, vocab = _categorical_block(c, tr, te)
            start = len(names)
            names.extend(f"{c.name}={v}" for v in vocab)
            groups[c.name] = tuple(range(start, len(names)))
            train_blocks.append(a)
            test_blocks.append(b)

    def stack(blocks, n):
        return np.hstack(blocks) if blocks else np.zeros((n, 0))

    train = TabularDataset(stack(train_blocks, len(train_idx)), labels[train_idx], tuple(names))
    test = TabularDataset(stack(test_blocks, len(test_idx)), labels[test_idx], tuple(names))
    return SplitDataset(train=train, test=test, split_ratio=split_ratio,
                        split_seed=split_seed, name=spec.name, groups=groups)


def _constant_value(impute: str) -> str | None:
    m = re.fullmatch(r"constant\((.*)\)", impute)
    return m.group(1) if m else None


def _column_cells(raw: RawTable, c: ColumnSpec, missing: set) -> list[str | None]:
    values = raw.column(c.source or c.name)
    if c.transform == "present":
        return ["0" if v in missing else "1" for v in values]
    cells = [None if v in missing else v for v in values]
    if c.transform == "first_char":
        cells = [v.strip()[:1] or None if v is not None else None for v in cells]
    return cells


def _encode_labels(values: list[str], c: ColumnSpec, missing: set) -> np.ndarray:
    bad = [i for i, v in enumerate(values) if v in missing]
    if bad:
        raise LabelDomainError(f"label {c.name!r} missing in row {bad[0]}")
    domain = sorted(set(values))
    if len(domain) > 2:
        raise LabelDomainError(f"label {c.name!r} has {len(domain)} distinct values: {domain[:5]}")
    if c.positive is not None:
        positive = c.positive
    elif set(domain) <= {"0", "1"}:
        positive = "1"
    else:
        positive = domain[-1]
    return np.array([1.0 if v == positive else 0.0 for v in values])


def _numeric_block(c: ColumnSpec, tr, te):
    def parse(cells):
        try:
            return np.array([np.nan if v is None else float(v) for v in cells])
        except ValueError as exc:
            raise SpecError(f"{c.name}: non-numeric cell ({exc})") from None

    a, b = parse(tr), parse(te)
    const = _constant_value(c.impute)
    if const is not None:
        fill = float(const)
    else:
        observed = a[~np.isnan(a)]
        fill = float(observed.mean()) if observed.size else 0.0
    a = np.where(np.isnan(a), fill, a)
    b = np.where(np.isnan(b), fill, b)
    mean = a.mean() if a.size else 0.0
    sd = a.std() if a.size else 0.0
    if sd == 0.0:
        sd = 1.0
    return (a - mean) / sd, (b - mean) / sd


def _categorical_block(c: ColumnSpec, tr, te):
    const = _constant_value(c.impute)
    if const is not None:
        fill = const
    else:
        observed = sorted(v for v in tr if v is not None)
        # mode with ties broken by sort order, so it is deterministic
        fill = max(sorted(set(observed)), key=observed.count) if observed else "?"
    tr = [fill if v is None else v for v in tr]
    te = [fill if v is None else v for v in te]
    vocab = sorted(set(tr))
    index = {v: j for j, v in enumerate(vocab)}

    def onehot(cells):
        out = np.zeros((len(cells), len(vocab)))
        for i, v in enumerate(cells):
            j = index.get(v)
            if j is not None:
                out[i, j] = 1.0
        return out

    return onehot(tr), onehot(te), vocab


def dataset_digest(ds: SplitDataset) -> str:
    """Deterministic one-block summary for logs."""
    lines = [
        f"dataset: {ds.name}",
        f"rows: {ds.n_total} total, {ds.train.n_samples} train, {ds.test.n_samples} test"
        f" (split {ds.split_ratio:g}, seed {ds.split_seed})",
        f"input dimension M: {ds.M}",
        f"label balance: train {_balance(ds.train)}, test {_balance(ds.test)}",
    ]
    if ds.test.n_samples == 0:
        lines.append("WARNING: zero test rows")
    return "\n".join(lines)


def _balance(part: TabularDataset) -> str:
    if part.n_samples == 0:
        return "n/a (0 rows)"
    pos = int(part.labels.sum())
    return f"{pos}/{part.n_samples} positive ({pos / part.n_samples:.3f})"


def load_dataset(path, spec=None, split_ratio: float = DEFAULT_SPLIT_RATIO,
                 split_seed: int = DEFAULT_SPLIT_SEED) -> SplitDataset:
    """Convenience wrapper: CSV path (or bundled name) plus spec to a split dataset."""
    p = Path(path)
    if not p.exists():
        if p.suffix or len(p.parts) > 1:
            raise FileNotFoundError(f"dataset file not found: {path}")
        p = bundled_dataset_path(str(path))
    raw = load_csv(p)
    if spec is None:
        spec = infer_column_spec(raw)
    elif not isinstance(spec, DatasetSpec):
        spec = load_column_spec(spec)
    return preprocess(raw, spec, split_ratio, split_seed)
