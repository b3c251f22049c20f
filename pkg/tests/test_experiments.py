import json
from fractions import Fraction

import pytest

from radolab import harness
from radolab.experiments import (
    PRESETS,
    ExperimentPlan,
    chebyshev_tail_table,
    default_census_grid,
    run,
    star_product_bound,
    star_regime_probe,
    star_threshold,
    witness_law_check,
)
from radolab.harness import BudgetExceeded, Tally
from radolab.sequence import AllOnesAfterZero, GeometricOnes, ZeroOnePattern


def test_tally_is_exact():
    t = Tally.of([1, 0, 1, 1])
    assert t.mean == Fraction(3, 4)
    assert t.variance == Fraction(1, 4)
    assert Tally.of([5, 5, 5]).se == 0


def test_equality_rule_uses_three_standard_errors():
    t = Tally.of([0, 1] * 50)
    se = t.se
    assert harness.stat_equal("x", t, Fraction(1, 2) + Fraction(29, 10) * Fraction(se)).passed
    assert not harness.stat_equal("x", t, Fraction(1, 2) + Fraction(31, 10) * Fraction(se)).passed


def test_one_sided_rules():
    t = Tally.of([0] * 99 + [1])
    assert harness.stat_at_most("x", t, Fraction(1, 100)).passed
    assert harness.stat_at_most("x", t, 0.0).passed  # within 3 SE
    assert not harness.stat_at_least("x", Tally.of([0, 0, 0]), Fraction(1, 2)).passed
    assert harness.stat_positive("x", t).passed
    assert not harness.stat_positive("x", Tally.of([0, 0])).passed


def test_zero_variance_needs_exact_match():
    t = Tally.of([1, 1, 1])
    assert harness.stat_equal("x", t, Fraction(1)).passed
    assert not harness.stat_equal("x", t, Fraction(999, 1000)).passed


def test_report_serialisation():
    rep = harness.ExperimentReport("triangle", "s", 4, 2, 0, [harness.stat_equal("m", Tally.of([1, 1]), 1)])
    d = json.loads(rep.to_json())
    assert set(d) >= {"preset", "seq", "horizon", "replicas", "base_seed", "stats", "wall_ms"}
    assert d["stats"][0] == {"name": "m", "target": "1/1", "bound": None, "mean": 1.0, "se": 0.0, "z": 0.0, "pass": True}
    assert rep.to_csv().splitlines()[0] == "name,target,bound,mean,se,z,pass"
    rep.wall_ms = 5
    assert json.loads(rep.to_json())["wall_ms"] is None
    assert json.loads(rep.to_json(include_timing=True))["wall_ms"] == 5


def test_plan_validation():
    with pytest.raises(ValueError):
        ExperimentPlan("nope")
    with pytest.raises(ValueError):
        ExperimentPlan("triangle", replicas=1)
    with pytest.raises(ValueError):
        ExperimentPlan("triangle", horizon=0)
    assert set(PRESETS) == {"triangle", "witness", "census", "star", "ray", "dbl-random", "degree-growth"}


def test_triangle_preset():
    rep = run(ExperimentPlan("triangle", replicas=3000, base_seed=4, params={"rounds": 2}))
    assert rep.passed
    assert rep.horizon == 27
    assert rep.stats[0].target == Fraction(2, 3) + Fraction(26, 325)


def test_triangle_horizon_must_reach_last_two():
    with pytest.raises(ValueError):
        run(ExperimentPlan("triangle", horizon=10, replicas=10, params={"rounds": 2}))


def test_witness_preset_defaults():
    rep = run(ExperimentPlan("witness", replicas=5000, base_seed=2))
    assert rep.passed
    assert [s.target for s in rep.stats] == [Fraction(7, 30), Fraction(21, 95), Fraction(9, 40)]


def test_witness_accepts_asymmetric_cases():
    rep = witness_law_check([(5, 2, 1, 1), (8, 3, 2, 0)], 4000, seed=3)
    assert rep.passed


def test_census_examples():
    zeros = run(ExperimentPlan("census", seq="zero-one:pattern=0", horizon=40, replicas=5))
    for s in zeros.stats:
        assert s.se == 0 and s.passed
    rep = run(ExperimentPlan("census", seq="explicit:0,1,1", horizon=3, replicas=20,
                             params={"k_max": 3, "grid": [(3, 2)]}))
    assert rep.stats[0].mean == 1 and rep.stats[0].se == 0
    ones = run(ExperimentPlan("census", seq="ones", horizon=51, replicas=20, params={"k_max": 1, "grid": [(1, 50)]}))
    assert ones.stats[0].target == 0 and ones.stats[0].mean == 0


def test_census_small_sparse():
    rep = run(ExperimentPlan("census", seq="geometric:base=2", horizon=200, replicas=400, base_seed=9))
    assert rep.passed
    assert rep.details["component_law_violations"] == 0


def test_default_census_grid_has_twenty_points():
    assert len(default_census_grid(1000)) == 20


def test_star_threshold_examples():
    single = ZeroOnePattern((0,), (0, 0, 0, 0, 1))
    assert star_threshold(single, 50) == 1
    assert star_product_bound(single, 1, 50) == Fraction(1, 4)
    rep = star_regime_probe(single, 50, 50, seed=1)
    assert rep.stats[0].mean == 1 and rep.passed
    assert star_threshold(GeometricOnes(4), 4**5) == 5


def test_star_probe_refuses_dense_families():
    with pytest.raises(ValueError):
        star_regime_probe(AllOnesAfterZero(), 100, 10, seed=0)


def test_star_preset_small():
    rep = run(ExperimentPlan("star", horizon=4**5, replicas=200, base_seed=6))
    assert rep.passed


def test_ray_preset_small():
    rep = run(ExperimentPlan("ray", horizon=300, replicas=400, base_seed=6))
    assert rep.passed and len(rep.stats) == 6


def test_chebyshev_rows():
    rep = chebyshev_tail_table(Fraction(1, 2), (3, 10_000), 1, 500, seed=2)
    rows = {r["n"]: r for r in rep.details["rows"]}
    assert not rows[3]["applicable"]
    assert rows[10_000]["bound"] == pytest.approx(0.1539, abs=1e-4)
    assert rep.passed


def test_chebyshev_p_one_is_deterministic():
    rep = chebyshev_tail_table(Fraction(1), (100,), 1, 20, seed=0)
    assert rep.stats[0].mean == 0 and rep.stats[0].target == 0


def test_degree_growth_dense_and_zero():
    dense = run(ExperimentPlan("degree-growth", seq="ones", replicas=15, params={"checkpoints": [50, 500, 5000]}))
    assert dense.passed
    zero = run(ExperimentPlan("degree-growth", seq="zero-one:pattern=0", replicas=5, params={"checkpoints": [10, 100]}))
    assert zero.stats[0].mean == 0 and zero.passed


def test_degree_growth_refuses_unregistered():
    with pytest.raises(ValueError):
        run(ExperimentPlan("degree-growth", seq="explicit:0,1,1,1,1", replicas=2, params={"checkpoints": [2, 4]}))


def test_budget_exhaustion_returns_invalid_partial_report():
    plan = ExperimentPlan("census", seq="ones", horizon=500, replicas=5000, time_budget_s=0.0)
    with pytest.raises(BudgetExceeded) as err:
        run(plan)
    rep = err.value.report
    assert not rep.valid and not rep.passed
    assert 0 < rep.replicas < 5000


def test_reports_do_not_depend_on_workers():
    plan = ExperimentPlan("triangle", replicas=600, base_seed=11)
    assert run(plan, 1).to_json() == run(plan, 3).to_json()
