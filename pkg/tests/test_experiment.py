import math

import numpy as np
import pytest

from resetword import Dfa, RngSpec, cerny, random_dfa
from resetword.dfa import AutomatonError
from resetword.generators import constant_letter
from resetword.experiment import (
    ExperimentRecord,
    ExperimentStats,
    emit_report,
    fit_sqrt_model,
    hoeffding_bound,
    power_model,
    records_from_csv,
    rss,
    run_batch,
    sink_component_size,
    sink_components,
    stats_from_json,
    stats_to_json,
)
from resetword.oracle import brute_force_shortest

from conftest import all_automata


def test_sink_component_examples():
    assert sink_component_size(cerny(9)) == 9
    assert sink_component_size(constant_letter(6)) == 1
    with pytest.raises(AutomatonError):
        sink_component_size(Dfa(2, 2, ((0, 0), (1, 1))))


def test_sink_components_against_reachability():
    rng = RngSpec(3)
    for i in range(200):
        d = random_dfa(12, 2, rng.offset(i))
        for comp in sink_components(d):
            # closed under every letter and strongly connected
            members = set(comp)
            assert all(t in members for q in comp for t in d.delta[q])
            seen, todo = {comp[0]}, [comp[0]]
            while todo:
                q = todo.pop()
                for t in d.delta[q]:
                    if t not in seen:
                        seen.add(t)
                        todo.append(t)
            assert seen == members


def test_run_batch_deterministic_and_sorted():
    rs = RngSpec(1)
    recs, stats = run_batch(15, 2, 60, rs)
    recs2, _ = run_batch(15, 2, 60, rs, parallelism=3)
    assert [r.seed_index for r in recs] == list(range(60))
    assert emit_report(recs, None, "csv", timings=False) == emit_report(recs2, None, "csv", timings=False)
    assert stats.samples == 60
    assert sum(stats.histogram.values()) == sum(r.synchronizing for r in recs)


def test_run_batch_matches_oracle():
    recs, _ = run_batch(6, 2, 300, RngSpec(9))
    for r in recs:
        expected = brute_force_shortest(random_dfa(6, 2, RngSpec(9).offset(r.seed_index)))
        assert r.synchronizing == (expected is not None)
        assert r.length == (expected[0] if expected else None)


def test_run_batch_usage_errors():
    with pytest.raises(ValueError):
        run_batch(5, 2, 0, RngSpec(1))
    with pytest.raises(ValueError):
        run_batch(5, 2, 3, RngSpec(1), parallelism=0)


def test_mean_length_n4_matches_exhaustive_sweep():
    lengths = [r[0] for d in all_automata(4) if (r := brute_force_shortest(d)) is not None]
    exact = sum(lengths) / len(lengths)
    _, stats = run_batch(4, 2, 100_000, RngSpec(4))
    assert abs(stats.mean_length - exact) <= 0.1


def test_stats_aggregation():
    recs = [
        ExperimentRecord(10, 2, 0, True, 5, 8),
        ExperimentRecord(10, 2, 1, True, 7, 6),
        ExperimentRecord(10, 2, 2, False),
        ExperimentRecord(10, 2, 3, True, 7, 10),
    ]
    s = ExperimentStats.from_records(recs)
    assert s.sync_fraction == 0.75
    assert s.mean_length == pytest.approx(19 / 3)
    assert s.variance == pytest.approx(np.var([5, 7, 7], ddof=1))
    assert s.histogram == {5: 1, 7: 2}
    assert s.max_length == 7
    assert s.mean_sink_fraction == pytest.approx(0.8)
    with pytest.raises(ValueError):
        ExperimentStats.from_records([])
    with pytest.raises(ValueError):
        ExperimentRecord(10, 2, 0, True)


def test_fit_recovers_synthetic_parameters():
    ns = np.arange(20, 90, 10)
    a, b = fit_sqrt_model([(n, 2.5 * math.sqrt(n - 5)) for n in ns])
    assert a == pytest.approx(2.5, abs=1e-6) and b == pytest.approx(5, abs=1e-6)
    a, b = fit_sqrt_model([(n, 3.1 * math.sqrt(n + 7.5)) for n in ns])
    assert a == pytest.approx(3.1, abs=1e-6) and b == pytest.approx(-7.5, abs=1e-6)


def test_fit_rejects_degenerate_input():
    with pytest.raises(ValueError):
        fit_sqrt_model([(40, 10.0)] * 5)
    with pytest.raises(ValueError):
        fit_sqrt_model([(20, 5.0), (30, 6.0)])
    with pytest.raises(ValueError):
        fit_sqrt_model([(10, 5.0), (30, 6.0), (40, 7.0)])


def test_fit_beats_power_model_on_sqrt_data():
    ns = np.arange(20, 90, 10)
    ys = 2.5 * np.sqrt(ns - 5) + np.random.default_rng(0).normal(0, 0.05, len(ns))
    a, b = fit_sqrt_model(list(zip(ns, ys)))
    assert rss(ys, a * np.sqrt(ns - b)) <= rss(ys, power_model(ns))


def test_hoeffding_limits():
    c = math.sqrt(math.log(2 / 1e-4) / (2 * 1e6))
    assert hoeffding_bound(43, 1e15, 1e-4, 10**6, 100) == pytest.approx(43 * c, rel=1e-6)
    assert hoeffding_bound(43, 1000, 1e-4, 10**30, 100) == pytest.approx(100**3 / 6000, rel=1e-9)
    assert hoeffding_bound(43, 1000, 1e-4, 10**30, 100, True) == pytest.approx(99**2 / 1000, rel=1e-9)


@pytest.mark.parametrize("args", [(43, 0.5, 0.1, 10, 5), (43, 2, 0, 10, 5), (43, 2, 1, 10, 5), (43, 2, 0.1, 0, 5)])
def test_hoeffding_usage_errors(args):
    with pytest.raises(ValueError):
        hoeffding_bound(*args)


def test_report_round_trips():
    assert emit_report([], None, "csv").splitlines() == [
        "n,k,seed_index,synchronizing,length,sink_size,wall_ms,peak_sets"
    ]
    one = [ExperimentRecord(10, 2, 4, True, 5, 8, 1.25, 33)]
    assert records_from_csv(emit_report(one, None, "csv")) == one
    recs, stats = run_batch(10, 2, 1000, RngSpec(12))
    parsed = records_from_csv(emit_report(recs, stats, "csv"))
    assert sum(r.synchronizing for r in parsed) == sum(stats.histogram.values())
    back = stats_from_json(emit_report(recs, stats, "json"))
    assert back.histogram == stats.histogram
    assert back.mean_length == pytest.approx(stats.mean_length, rel=1e-5)
    assert stats_to_json(back) == stats_to_json(stats)
    with pytest.raises(ValueError):
        emit_report(recs, stats, "xml")


def test_timings_column_can_be_blanked():
    recs, _ = run_batch(8, 2, 5, RngSpec(2))
    rows = emit_report(recs, None, "csv", timings=False).splitlines()[1:]
    assert all(row.split(",")[6] == "" for row in rows)
