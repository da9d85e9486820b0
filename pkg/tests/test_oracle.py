import pickle
from concurrent.futures import ProcessPoolExecutor

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from widthsearch.oracle import (
    UNIMODAL_KINDS,
    CurveSpecError,
    SyntheticCurve,
    curve_values,
    exhaustive_argmax,
    is_unimodal,
    local_maxima,
    make_curve,
    parse_synth_uri,
    render_benchmark,
    sensitivity_sweep,
    table1_benchmark,
)
from widthsearch.search import ArrayEvaluator, EvaluationError, linear_search


def test_cusp_unique_max():
    ev = make_curve(SyntheticCurve("cusp_abs", 700, 1000))
    v = curve_values(ev, 1000)
    assert int(np.argmax(v)) + 1 == 700
    assert (v == v.max()).sum() == 1


def test_two_peak_has_two_local_maxima():
    ev = make_curve(SyntheticCurve("two_peak", 200, 1000, second_peak=800))
    assert local_maxima(curve_values(ev, 1000)) == [200, 800]


def test_frozen_noise_repeatable():
    spec = SyntheticCurve("gaussian_bump", 400, 1000, noise_sd=0.01, noise_seed=7)
    a = [make_curve(spec).evaluate(k) for k in (1, 400, 999)]
    b = [make_curve(spec).evaluate(k) for k in (1, 400, 999)]
    assert a == b
    assert make_curve(spec).evaluate(400) != make_curve(SyntheticCurve("gaussian_bump", 400, 1000)).evaluate(400)


def _value(args):
    spec, k = args
    return spec.value(k)


def test_frozen_noise_across_processes():
    spec = SyntheticCurve("cusp_abs", 300, 500, noise_sd=0.02, noise_seed=3)
    ks = list(range(1, 50))
    with ProcessPoolExecutor(max_workers=2) as pool:
        remote = list(pool.map(_value, [(spec, k) for k in ks]))
    assert remote == [spec.value(k) for k in ks]
    assert pickle.loads(pickle.dumps(spec)) == spec


def test_curve_validation():
    for args in [("nope", 5, 10), ("cusp_abs", 0, 10), ("cusp_abs", 11, 10), ("monotone", 5, 10)]:
        with pytest.raises(CurveSpecError):
            SyntheticCurve(*args)
    with pytest.raises(CurveSpecError):
        SyntheticCurve("two_peak", 500, 1000, second_peak=520)
    with pytest.raises(CurveSpecError):
        SyntheticCurve("cusp_abs", 5, 10, noise_sd=-1)


def test_out_of_range_size():
    with pytest.raises(EvaluationError):
        make_curve(SyntheticCurve("cusp_abs", 5, 10)).evaluate(11)


def test_parse_uri():
    c = parse_synth_uri("synth:cusp:700:1000")
    assert (c.kind, c.peak_location, c.n, c.noise_sd) == ("cusp_abs", 700, 1000, 0.0)
    c = parse_synth_uri("synth:gaussian:10:50:0.01:4")
    assert (c.kind, c.noise_sd, c.noise_seed) == ("gaussian_bump", 0.01, 4)
    for bad in ("synth:cusp:700", "cusp:700:1000", "synth:cusp:x:1000"):
        with pytest.raises(CurveSpecError):
            parse_synth_uri(bad)


def test_exhaustive_argmax_cusp():
    ev = make_curve(SyntheticCurve("cusp_abs", 700, 1000))
    size, value = exhaustive_argmax(ev, 1000)
    assert size == 700 and value == pytest.approx(0.8)
    assert ev.call_count == 0  # oracle reads do not spend the search budget


def test_exhaustive_argmax_constant_first_wins():
    assert exhaustive_argmax(ArrayEvaluator([0.6] * 9), 9) == (1, 0.6)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(["cusp_abs", "quadratic", "gaussian_bump", "two_peak"]), st.integers(1, 300),
       st.integers(0, 1000))
def test_exhaustive_equals_linear_on_noisy_curves(kind, peak, seed):
    n = 300
    if kind == "two_peak":
        peak = 1 + peak % 100  # leaves room for the second peak
    ev = make_curve(SyntheticCurve(kind, peak, n, noise_sd=0.02, noise_seed=seed))
    size, value = exhaustive_argmax(ev, n)
    r = linear_search(ev, n)
    assert (r.best_size, r.best_accuracy) == (size, value)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(UNIMODAL_KINDS), st.integers(2, 400), st.floats(0, 1))
def test_noiseless_unimodal_kinds_have_one_local_max(kind, n, frac):
    peak = 1 + int(frac * (n - 1))
    if kind == "monotone":
        peak = n if frac > 0.5 else 1
    assert is_unimodal(make_curve(SyntheticCurve(kind, peak, n)), n)


def test_benchmark_linear_column_and_csv_shape():
    rep = table1_benchmark(trials=20, n=1000)
    assert (rep.linear_stats.mean_evaluations, rep.linear_stats.sd_evaluations) == (1000, 0)
    assert rep.linear_stats.mean_error == 0
    rows = rep.rows()
    assert len(rows) == 40 and rows[0]["run_id"] == "linear-0000" and rows[20]["run_id"] == "binary-0000"
    text = render_benchmark(rep)
    assert "Linear" in text and "Binary" in text


def test_benchmark_singleton_sd_zero():
    rep = table1_benchmark(trials=1, n=200)
    st_ = rep.binary_stats
    assert (st_.sd_comparisons, st_.sd_evaluations, st_.sd_error) == (0, 0, 0)


def test_benchmark_deterministic():
    a = table1_benchmark(trials=10, n=500, seed=3).rows()
    b = table1_benchmark(trials=10, n=500, seed=3).rows()
    assert a == b


def test_benchmark_rejects_zero_trials():
    with pytest.raises(ValueError):
        table1_benchmark(trials=0)


def test_sensitivity_sweep_binary_only():
    rows = sensitivity_sweep(deltas=(2, 4), stop_modes=("run_to_completion",), trials=5, n=300)
    assert [(r["delta"], r["stop_mode"]) for r in rows] == [(2, "run_to_completion"), (4, "run_to_completion")]
    assert all(r["runs"] == 5 for r in rows)
