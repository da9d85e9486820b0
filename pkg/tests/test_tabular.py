import csv

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import churn_like_csv
from widthsearch.tabular import (
    ColumnSpec,
    CsvParseError,
    EmptyInputError,
    LabelDomainError,
    SpecError,
    bundled_dataset_path,
    bundled_specs,
    dataset_digest,
    infer_column_spec,
    load_column_spec,
    load_csv,
    load_dataset,
    parse_column_spec,
    parse_csv,
    preprocess,
    split_indices,
)


def test_parse_small_csv():
    raw = parse_csv("a,b\n1,2\n3,4")
    assert list(raw.column_names) == ["a", "b"]
    assert (raw.n_rows, raw.n_cols) == (2, 2)
    assert raw.column("b") == ["2", "4"]


def test_ragged_row_names_the_row():
    with pytest.raises(CsvParseError) as exc:
        parse_csv("a,b\n1,2\n3\n")
    assert exc.value.row_index == 1  # 0-based over data rows
    assert "row 1" in str(exc.value)


def test_empty_input():
    with pytest.raises(EmptyInputError):
        parse_csv("")


def test_quoted_fields_with_commas():
    raw = parse_csv('name,x\n"Smith, John",1\n')
    assert raw.column("name") == ["Smith, John"]


def test_bundled_titanic_table():
    raw = load_csv(bundled_dataset_path("titanic"))
    assert raw.n_cols == 14
    assert raw.n_rows == 1309


def kaggle_shaped_csv(tmp_path):
    # Kaggle's train.csv layout, filled from the bundled passenger list
    raw = load_csv(bundled_dataset_path("titanic"))
    cols = ["PassengerId", "Survived", "Pclass", "Name", "Sex", "Age", "SibSp",
            "Parch", "Ticket", "Fare", "Cabin", "Embarked"]
    src = ["", "survived", "pclass", "name", "sex", "age", "sibsp", "parch",
           "ticket", "fare", "cabin", "embarked"]
    path = tmp_path / "train.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for i in range(891):
            row = [str(i + 1)] + [raw.column(s)[i] for s in src[1:]]
            w.writerow(["" if v == "?" else v for v in row])
    return path


def test_kaggle_layout(tmp_path):
    path = kaggle_shaped_csv(tmp_path)
    raw = load_csv(path)
    assert raw.n_cols == 12
    spec = infer_column_spec(raw)
    assert spec.name == "titanic-kaggle"
    ds = load_dataset(path)
    assert ds.n_total == 891
    assert "Sex=male" in ds.feature_names and "HasCabin" in ds.feature_names


def test_titanic_feature_count_matches_schema(titanic):
    # the header of the bundled spec documents M = 19
    assert titanic.M == 19
    assert "input columns" in bundled_spec_text("titanic") and "19" in bundled_spec_text("titanic")
    assert {"boat", "body", "name"}.isdisjoint(titanic.feature_names)


def bundled_spec_text(name):
    from importlib import resources
    return (resources.files("widthsearch.data") / f"{name}.spec").read_text()


def test_churn_spec_keeps_eleven_columns(tmp_path):
    spec = load_column_spec("churn")
    kept = [c for c in spec.columns if c.role != "drop"]
    assert len(kept) == 11
    assert {c.name for c in spec.columns if c.role == "drop"} == {"RowNumber", "CustomerId", "Surname"}
    assert spec.label.name == "Exited"
    ds = load_dataset(churn_like_csv(tmp_path / "churn.csv"))
    assert ds.name == "churn"
    assert ds.M == 13  # 8 numeric + 3 geography + 2 gender


def test_half_split_standardizes_train():
    text = "x,y,label\n" + "\n".join(f"{i},{i * i},{i % 2}" for i in range(10))
    raw = parse_csv(text)
    ds = preprocess(raw, [ColumnSpec("x", "numeric"), ColumnSpec("y", "numeric"),
                          ColumnSpec("label", "label")], split_ratio=0.5)
    assert ds.train.n_samples == ds.test.n_samples == 5
    np.testing.assert_allclose(ds.train.features.mean(axis=0), 0, atol=1e-12)
    np.testing.assert_allclose(ds.train.features.std(axis=0), 1, atol=1e-12)


def test_spec_errors():
    raw = parse_csv("a,b\n1,0\n2,1\n")
    with pytest.raises(SpecError):
        preprocess(raw, [ColumnSpec("a", "numeric"), ColumnSpec("zzz", "label")])
    with pytest.raises(SpecError):
        preprocess(raw, [ColumnSpec("b", "label")])  # a uncovered
    with pytest.raises(SpecError):
        preprocess(raw, [ColumnSpec("a", "numeric"), ColumnSpec("b", "numeric")])
    with pytest.raises(SpecError):
        parse_column_spec("[columns]\na = bogus\n")


def test_label_domain():
    raw = parse_csv("a,label\n1,0\n2,yes\n3,1\n")
    with pytest.raises(LabelDomainError):
        preprocess(raw, [ColumnSpec("a", "numeric"), ColumnSpec("label", "label")])


def test_missing_values_imputed_from_train():
    raw = parse_csv("a,c,label\n1,x,0\n?,?,1\n3,x,1\n5,y,0\n")
    spec = parse_column_spec("[dataset]\nmissing = ?\n[columns]\na = numeric, mean\n"
                             "c = categorical, mode\nlabel = label\n")
    ds = preprocess(raw, spec, split_ratio=0.5, split_seed=3)
    assert np.isfinite(ds.train.features).all() and np.isfinite(ds.test.features).all()


def test_unseen_test_category_is_all_zero():
    rows = ["c,label"] + [f"a,{i % 2}" for i in range(8)] + ["b,1", "b,0"]
    raw = parse_csv("\n".join(rows))
    # seed chosen so both "b" rows land in the test partition
    for seed in range(200):
        ds = preprocess(raw, [ColumnSpec("c", "categorical"), ColumnSpec("label", "label")],
                        split_ratio=0.8, split_seed=seed)
        if ds.feature_names == ("c=a",):
            break
    assert ds.feature_names == ("c=a",)
    assert (ds.test.features.sum(axis=1) == 0).sum() == 2


def test_digest_row_counts(titanic):
    text = dataset_digest(titanic)
    assert "1309 total" in text
    assert "M: 19" in text


def test_digest_flags_empty_test_partition():
    raw = parse_csv("a,label\n1,0\n2,1\n")
    ds = preprocess(raw, [ColumnSpec("a", "numeric"), ColumnSpec("label", "label")], split_ratio=0.8)
    assert ds.test.n_samples == 0
    assert "zero test rows" in dataset_digest(ds)


def test_bundled_specs_parse():
    specs = bundled_specs()
    assert {"titanic", "titanic-kaggle", "churn"} <= set(specs)


def test_arrays_are_read_only(titanic):
    with pytest.raises(ValueError):
        titanic.train.features[0, 0] = 1.0


# -- properties -------------------------------------------------------------

tables = st.integers(4, 40).flatmap(lambda n: st.tuples(
    st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=n, max_size=n),
    st.lists(st.sampled_from("pqrs"), min_size=n, max_size=n),
    st.lists(st.sampled_from("01"), min_size=n, max_size=n),
    st.integers(0, 2 ** 16),
))


def make_raw(xs, cats, labels):
    return parse_csv("x,c,label\n" + "\n".join(f"{x!r},{c},{l}" for x, c, l in zip(xs, cats, labels)))


SPECS = [ColumnSpec("x", "numeric"), ColumnSpec("c", "categorical"), ColumnSpec("label", "label")]


@settings(max_examples=60, deadline=None)
@given(tables)
def test_preprocess_is_deterministic(t):
    xs, cats, labels, seed = t
    raw = make_raw(xs, cats, labels)
    a = preprocess(raw, SPECS, 0.75, seed)
    b = preprocess(raw, SPECS, 0.75, seed)
    assert a.feature_names == b.feature_names
    assert np.array_equal(a.train.features, b.train.features)
    assert np.array_equal(a.test.features, b.test.features)
    assert np.array_equal(a.train.labels, b.train.labels)


@settings(max_examples=60, deadline=None)
@given(tables)
def test_train_standardization_and_onehot(t):
    xs, cats, labels, seed = t
    ds = preprocess(make_raw(xs, cats, labels), SPECS, 0.75, seed)
    x = ds.train.features[:, 0]
    assert abs(x.mean()) < 1e-6
    if np.ptp(x) > 0:
        assert abs(x.std() - 1) < 1e-6
    group = list(ds.groups["c"])
    np.testing.assert_array_equal(ds.train.features[:, group].sum(axis=1), 1.0)
    assert set(np.unique(ds.test.features[:, group].sum(axis=1))) <= {0.0, 1.0}


@settings(max_examples=40, deadline=None)
@given(tables, st.floats(1.0, 1e4))
def test_no_leakage_from_test_partition(t, shift):
    xs, cats, labels, seed = t
    base = make_raw(xs, cats, labels)
    a = preprocess(base, SPECS, 0.75, seed)
    # shift only the rows that land in the test partition
    _, test_idx = split_indices(len(xs), 0.75, seed)
    moved = list(xs)
    for i in test_idx:
        moved[i] = xs[i] + shift
    b = preprocess(make_raw(moved, cats, labels), SPECS, 0.75, seed)
    assert np.array_equal(a.train.features, b.train.features)
    assert a.feature_names == b.feature_names
