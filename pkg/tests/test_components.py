from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from radolab.components import (
    ComponentTracker,
    bfs_census,
    destruction_survival,
    expectation_table,
    longest_new_path_probe,
    recursion_bounds_check,
    track,
    zero_one_atom_threshold,
)
from radolab.engine import GrowthGraph, ProcessRng, grow
from radolab.sequence import (
    AllOnesAfterZero,
    ConstFraction,
    Explicit,
    GeometricOnes,
    PowerOnes,
    ZeroOnePattern,
)


def test_observe_round_examples():
    tr = ComponentTracker()
    tr.observe_round(0, [])
    assert tr.census == {1: 1} and tr.zero_count == 1
    tr.observe_round(1, [0])
    assert tr.tree_count(2) == 1 and tr.tree_count(1) == 0
    tr = track(GrowthGraph([[], [], [0]]))
    assert {m: c for m, c in tr.census.items() if c} == {1: 1, 2: 1}
    assert tr.zero_count == 2 and tr.components == 2


def test_rounds_must_arrive_in_order():
    tr = ComponentTracker()
    with pytest.raises(ValueError):
        tr.observe_round(1, [])


def test_cycles_leave_the_tree_census():
    tr = track(GrowthGraph([[], [0], [0, 1]]))
    assert not tr.is_tree(0)
    assert sum(tr.census.values()) == 0
    assert tr.is_star(2) == (False, None)


def test_stars():
    assert track(GrowthGraph([[]])).is_star(0) == (True, 0)
    path3 = track(GrowthGraph([[], [0], [1]]))
    assert path3.is_star(0) == (True, 2)
    path4 = track(GrowthGraph([[], [0], [1], [2]]))
    assert path4.is_star(3) == (False, None)
    star = track(GrowthGraph([[], [0], [0], [0], [0]]))
    assert star.is_star(3) == (True, 4)
    assert track(GrowthGraph([[], [0]])).is_star(1) == (True, 1)


def test_census_report_shape():
    rep = track(GrowthGraph([[], [], [0], []])).census_report()
    assert rep == {"horizon": 4, "census": {"1": 2, "2": 1}, "zero_count": 3, "stars": {"0": 2, "1": 1}}


@given(seed=st.integers(0, 2**64 - 1), frac=st.sampled_from([Fraction(1, 5), Fraction(1, 2)]))
@settings(max_examples=25)
def test_tracker_matches_bfs_at_powers_of_two(seed, frac):
    seq = ConstFraction(frac)
    g = grow(seq, 300, ProcessRng(seed))
    tr = ComponentTracker()
    for i, b in enumerate(g.birth_sets):
        tr.observe_round(i, b)
        if (i + 1) & i == 0:
            census, comps = bfs_census(g, i + 1)
            assert {m: c for m, c in tr.census.items() if c} == census
            assert tr.components == comps
    assert sum(tr.size[r] for r in tr.roots()) == g.n


@given(
    bits=st.lists(st.integers(0, 1), min_size=1, max_size=400).map(lambda b: tuple([0] + b)),
    seed=st.integers(0, 2**64 - 1),
)
@settings(max_examples=40)
def test_zero_one_components_equal_zero_rounds(bits, seed):
    tr = ComponentTracker()

    def check(i, b, g):
        tr.observe_round(i, b)
        assert tr.components == tr.zero_count
        assert sum(m * c for m, c in tr.census.items()) == i + 1

    grow(Explicit(bits), len(bits), ProcessRng(seed), [check])


@given(seed=st.integers(0, 2**32), n=st.integers(1, 60))
@settings(max_examples=30)
def test_star_classification_matches_definition(seed, n):
    g = grow(GeometricOnes(2), n, ProcessRng(seed))
    tr = track(g)
    census, _ = bfs_census(g)
    for v in range(n):
        ok, l = tr.is_star(v)
        members = [u for u in range(n) if tr.find(u) == tr.find(v)]
        degs = sorted(g.degree(u) for u in members)
        tree = sum(degs) == 2 * (len(members) - 1)
        star = tree and (len(members) <= 2 or degs[-1] == len(members) - 1)
        assert ok == star
        if ok:
            assert l == len(members) - 1


def test_expectation_table_examples():
    t = expectation_table(Explicit((0, 1)), 2, 1)
    assert t(2, 1) == 1
    t = expectation_table(Explicit((0, 1, 1)), 3, 2)
    assert t(1, 1) == 0 and t(2, 2) == 0 and t(3, 2) == 1
    t = expectation_table(Explicit((0, 0, 1)), 2, 2)
    assert t(2, 2) == 1 and t(1, 2) == 1


def test_expectation_table_needs_zero_one():
    with pytest.raises(ValueError):
        expectation_table(Explicit((0, 1, 2)), 2, 2)
    with pytest.raises(ValueError):
        expectation_table(AllOnesAfterZero(), 0, 3)


def test_expectation_table_matches_enumeration_small():
    exact = oracles.expected_tree_counts(7, 5)
    for bits, values in exact.items():
        t = expectation_table(Explicit(bits), 5, len(bits) - 1)
        assert [t(k, len(bits) - 1) for k in range(1, 6)] == values


def test_table_zero_below_k_minus_one():
    t = expectation_table(GeometricOnes(2), 5, 50)
    for k in range(1, 6):
        for i in range(51):
            assert t(k, i) >= 0
            if i < k - 1:
                assert t(k, i) == 0


def test_ones_telescopes_to_no_singletons():
    t = expectation_table(AllOnesAfterZero(), 1, 50)
    assert t(1, 50) == 0


def test_all_zero_sequence_counts_singletons():
    t = expectation_table(ZeroOnePattern((0,)), 3, 30)
    assert [t(1, i) for i in range(31)] == list(range(1, 32))
    assert recursion_bounds_check(t, ZeroOnePattern((0,)))["violations"] == []


@pytest.mark.parametrize(
    "seq, horizon",
    [
        (GeometricOnes(2), 400),
        (PowerOnes(2), 400),
        (ZeroOnePattern((0, 0, 1)), 120),
        (AllOnesAfterZero(), 120),
    ],
    ids=lambda x: getattr(x, "spec", str(x)),
)
def test_recursion_bounds_hold(seq, horizon):
    rep = recursion_bounds_check(expectation_table(seq, 5, horizon), seq)
    assert rep["violations"] == []


def test_k2_upper_bound_by_degree_sum():
    seq = PowerOnes(2)
    t = expectation_table(seq, 2, 300)
    s = 0
    for i in range(301):
        s += seq.degree(i)
        assert t(2, i) <= 2 * s


def test_lower_anchor_reported():
    rep = recursion_bounds_check(expectation_table(GeometricOnes(2), 3, 300), GeometricOnes(2))
    assert rep["anchor_N"] == 20
    assert Fraction(rep["constants"]["C_3"]) > 0


def test_path_probe_examples():
    path = GrowthGraph([[], [0], [1], [2], [3]])
    assert longest_new_path_probe(path, 0, 0)
    assert longest_new_path_probe(path, 0, 3)
    assert longest_new_path_probe(path, 0, 4)
    assert not longest_new_path_probe(path, 0, 5)
    assert not longest_new_path_probe(path, 2, 3)
    star = GrowthGraph([[], [0], [0], [0], [0], [0]])
    assert longest_new_path_probe(star, 0, 1)
    assert not longest_new_path_probe(star, 0, 2)
    with pytest.raises(ValueError):
        longest_new_path_probe(star, 6, 1)


@given(seed=st.integers(0, 2**32), i=st.integers(0, 4), k=st.integers(0, 4))
@settings(max_examples=60)
def test_path_probe_matches_brute_force(seed, i, k):
    g = grow(ConstFraction(Fraction(1, 4)), 9, ProcessRng(seed))
    assert longest_new_path_probe(g, i, k) == oracles.path_exists(g.birth_sets, i, k)


def test_atom_threshold_examples():
    rep = zero_one_atom_threshold(ZeroOnePattern((0,)), 30, 4)
    assert set(rep["partial_sums"].values()) == {"0/1"}
    assert rep["threshold"] == 2
    rep = zero_one_atom_threshold(ZeroOnePattern((0,), (0, 1, 1, 1)), 30, 4)
    assert rep["partial_sums"]["2"] == "3/1"
    assert rep["threshold"] == 2 and rep["flags"]
    rep = zero_one_atom_threshold(GeometricOnes(2), 1024, 4)
    assert rep["threshold"] == 3 and rep["partial_sums"]["2"] == "11/1"
    assert zero_one_atom_threshold(AllOnesAfterZero(), 50, 3)["threshold"] is None
    assert zero_one_atom_threshold(PowerOnes(2), 100, 3)["threshold"] == 4


def test_destruction_survival_is_monotone():
    for seq in (GeometricOnes(2), PowerOnes(2)):
        qs = [destruction_survival(seq, 3, i, 500) for i in range(3, 500)]
        assert all(a <= b for a, b in zip(qs, qs[1:]))
