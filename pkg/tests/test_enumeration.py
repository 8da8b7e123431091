from __future__ import annotations

import itertools
from dataclasses import replace
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from k3fix.enumeration import (
    Capacity,
    CurvePoint,
    CurvePolicy,
    ProjectionBound,
    Scenario,
    SolutionSet,
    build_scenario_system,
    capacity_constraints,
    enumerate_configs,
    project_type,
    solve_integer_points,
    verify_equalities,
    verify_equalities_42,
)
from k3fix.errors import UnboundedError, UsageError
from k3fix.lefschetz import (
    G_SUM,
    CurveContribution,
    FixedLocusConfig,
    PointType,
    holomorphic_residual,
    isolated_types,
)
from k3fix.scenarios import load_shipped

ORDER21_POINTS = {(2, 20): 3, (3, 19): 2, (4, 18): 1, (5, 17): 1, (6, 16): 1, (7, 15): 3}


@pytest.fixture(scope="module")
def order21():
    return load_shipped("order21")


@pytest.fixture(scope="module")
def order21_solutions(order21):
    return enumerate_configs(order21)


# projections ---------------------------------------------------------------

def test_project_type_examples():
    assert project_type(PointType(21, 2, 20), 3) == PointType(7, 2, 6)
    assert project_type(PointType(21, 7, 15), 3) == CurvePoint(7)
    assert project_type(PointType(21, 11, 11), 7) == PointType(3, 2, 2)
    assert project_type(PointType(42, 2, 41), 2) == PointType(21, 2, 20)
    with pytest.raises(UsageError):
        project_type(PointType(21, 2, 20), 21)
    with pytest.raises(UsageError):
        project_type(PointType(21, 2, 20), 0)


def test_projection_groups_match_mapping_table():
    groups = {}
    for t in isolated_types(21):
        groups.setdefault(project_type(t, 3), []).append((t.i, t.j))
    assert groups[PointType(7, 2, 6)] == [(2, 20), (6, 16), (9, 13)]
    assert groups[PointType(7, 3, 5)] == [(3, 19), (5, 17), (10, 12)]
    assert groups[PointType(7, 4, 4)] == [(4, 18), (11, 11)]
    assert groups[CurvePoint(7)] == [(7, 15), (8, 14)]


@pytest.mark.parametrize("order", range(2, 43))
def test_projection_composes(order):
    for t in isolated_types(order):
        for k1 in range(1, order):
            mid_order = order // gcd(order, k1)
            if mid_order == 1:
                continue
            mid = project_type(t, k1)
            for k2 in range(1, mid_order):
                if mid_order // gcd(mid_order, k2) == 1:
                    continue
                direct = project_type(t, k1 * k2)
                if isinstance(mid, CurvePoint):
                    # a point on a fixed curve of sigma^k1 stays on one for its powers
                    assert isinstance(direct, CurvePoint)
                else:
                    assert project_type(mid, k2) == direct


# capacities ----------------------------------------------------------------

def test_order21_capacity_rows(order21):
    labels = [r.label for r in capacity_constraints(order21)]
    assert labels == [
        "m[2,20] + m[6,16] + m[9,13] <= 4",
        "m[3,19] + m[5,17] + m[10,12] <= 3",
        "m[4,18] + m[11,11] <= 1",
        "m[2,20] + m[5,17] + m[8,14] + m[11,11] <= 4",
    ]


def test_order42_forced_zeros():
    labels = [r.label for r in capacity_constraints(load_shipped("order42"))]
    assert labels[:6] == [
        "m[2,41] + m[20,23] <= 3",
        "m[3,40] + m[19,24] <= 2",
        "m[4,39] + m[18,25] <= 1",
        "m[5,38] + m[17,26] <= 1",
        "m[6,37] + m[16,27] <= 1",
        "m[7,36] + m[15,28] <= 3",
    ]
    zeros = {lab.split()[0] for lab in labels[6:]}
    assert zeros == {f"m[{i},{43 - i}]" for i in range(8, 15)}
    assert all(lab.endswith("== 0") for lab in labels[6:])


def test_explicit_capacities_and_forced_zero():
    t = PointType(21, 2, 20)
    s = Scenario(order=21, trace_on_S=10, capacities=(Capacity((t,), 2, "=="),), forced_zero=(PointType(21, 11, 11),))
    labels = [r.label for r in capacity_constraints(s)]
    assert labels == ["m[2,20] == 2", "m[11,11] == 0"]
    assert len(build_scenario_system(s).equalities) == 12 + 3
    with pytest.raises(UsageError):
        Capacity((t,), 2, ">=")


def test_scenario_validation():
    with pytest.raises(UsageError):
        Scenario(order=21, trace_on_S=10, rank_S=11)
    with pytest.raises(UsageError):
        Scenario(order=21, trace_on_S=10, forced_zero=(PointType(7, 2, 6),))
    with pytest.raises(UsageError):
        Scenario(order=1, trace_on_S=0)
    with pytest.raises(UsageError):
        Scenario(order=7, trace_on_S=0, q=0)
    assert Scenario(order=42, trace_on_S=10).euler == 11


# enumeration ---------------------------------------------------------------

def test_order21_unique(order21_solutions):
    assert len(order21_solutions) == 1
    c = order21_solutions[0]
    assert {(t.i, t.j): m for t, m in c.points} == ORDER21_POINTS
    assert c.curves.genera == (0,) and c.euler == 13 and c.isolated_count == 11


def test_order7_matches_brute_force_triples():
    s = load_shipped("order7")
    found = enumerate_configs(s)
    types = isolated_types(7)
    brute = []
    for ms in itertools.product(range(25), repeat=3):
        if sum(ms) > 24:
            continue
        if sum(ms) + 2 * 2 != 17:
            continue
        cfg = FixedLocusConfig(7, tuple(zip(types, ms)), CurveContribution((0, 0)), 17)
        if holomorphic_residual(cfg).is_zero():
            brute.append(ms)
    assert brute == [(6, 5, 2)]
    assert [tuple(c.multiplicity(t) for t in types) for c in found] == brute


def test_order7_free_curves_matches_grid_search():
    # all (m, g_sum) on a box, checked against the exact cyclotomic identity
    s = Scenario(order=7, trace_on_S=16, curve_policy=CurvePolicy(genus_max=0, max_curves=6),
                 max_multiplicity=24, g_sum_range=(-5, 6))
    points = solve_integer_points(s)
    types = isolated_types(7)
    grid = []
    for g in range(0, 7):
        for ms in itertools.product(range(25), repeat=3):
            if sum(ms) + 2 * g != 17:
                continue
            cfg = FixedLocusConfig(7, tuple(zip(types, ms)), CurveContribution((0,) * g), 17)
            if holomorphic_residual(cfg).is_zero():
                grid.append(ms + (g,))
    assert sorted(tuple(p[t.label] for t in types) + (p[G_SUM],) for p in points) == sorted(grid)


def test_every_config_resatisfies_its_system(order21_solutions):
    for name in ("order7", "order21", "order42"):
        s = load_shipped(name)
        system = build_scenario_system(s)
        for c in enumerate_configs(s):
            assert system.satisfied_by(c.assignment())
            assert holomorphic_residual(c).is_zero()
            assert c.euler == c.isolated_count + 2 * c.curves.g_sum == s.euler


def _drop_bound(s: Scenario, proj_index: int, image: PointType) -> Scenario:
    projections = list(s.projections)
    p = projections[proj_index]
    projections[proj_index] = replace(p, bounds={k: v for k, v in p.bounds.items() if k != image})
    return replace(s, projections=tuple(projections))


@pytest.mark.parametrize(
    "proj_index, image",
    [(0, PointType(7, 2, 6)), (0, PointType(7, 3, 5)), (0, PointType(7, 4, 4)), (1, PointType(3, 2, 2))],
)
def test_dropping_a_capacity_never_shrinks(order21, order21_solutions, proj_index, image):
    looser = enumerate_configs(_drop_bound(order21, proj_index, image))
    assert set(order21_solutions.configs) <= set(looser.configs)


def test_order21_without_capacities_admits_a_second_point_solution(order21):
    loose = enumerate_configs(replace(order21, projections=()))
    multisets = {tuple((t.i, t.j, m) for t, m in c.points) for c in loose}
    assert len(multisets) == 2
    assert tuple((i, j, m) for (i, j), m in ORDER21_POINTS.items()) in multisets


def _perturbation_check(s: Scenario, solutions: SolutionSet, data) -> None:
    system = build_scenario_system(s)
    known = {tuple(sorted(c.assignment().items())) for c in solutions}
    base = dict(data.draw(st.sampled_from(sorted(known))))
    names = sorted(base)
    a, b = data.draw(st.lists(st.sampled_from(names), min_size=2, max_size=2, unique=True))
    trial = dict(base)
    trial[a] += data.draw(st.sampled_from([-1, 1]))
    trial[b] += data.draw(st.sampled_from([-1, 1]))
    if any(trial[v] < 0 for v in names if v != G_SUM):
        return
    if system.satisfied_by(trial) and s.curve_policy.expand(trial[G_SUM]):
        assert tuple(sorted(trial.items())) in known


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_perturbation_sampler_finds_nothing_new(order21, order21_solutions, data):
    _perturbation_check(order21, order21_solutions, data)


LOOSE21 = Scenario(order=21, trace_on_S=10, curve_policy=CurvePolicy(max_curves=3, genus_max=2))


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_perturbation_sampler_on_a_loose_scenario(data):
    _perturbation_check(LOOSE21, enumerate_configs(LOOSE21), data)


def test_parallel_matches_serial(order21):
    loose = replace(order21, projections=())
    assert enumerate_configs(loose, jobs=3) == enumerate_configs(loose, jobs=1)
    assert enumerate_configs(order21, jobs=2) == enumerate_configs(order21)


def test_infeasible_is_empty():
    t = isolated_types(21)
    s = Scenario(order=21, trace_on_S=10, capacities=(Capacity(tuple(t), 0),))
    sol = enumerate_configs(s)
    assert len(sol) == 0
    assert sol.to_json()["status"] == "infeasible"


def test_unbounded_refuses():
    # the default curve policy still bounds g_sum, so an open range alone is fine
    assert len(enumerate_configs(Scenario(order=7, trace_on_S=16, g_sum_range=(None, None)))) > 0
    with pytest.raises(UnboundedError):
        solve_integer_points(Scenario(order=42, trace_on_S=10, max_multiplicity=None,
                                      g_sum_range=(None, None), curve_policy=CurvePolicy(max_curves=None)))
    with pytest.raises(UnboundedError):
        enumerate_configs(Scenario(order=7, trace_on_S=16, curve_policy=CurvePolicy(max_curves=None, genus_max=None)))
    with pytest.raises(UnboundedError):
        CurvePolicy(max_curves=None, genus_max=3).expand(1)


def test_curve_policy_expansion():
    p = CurvePolicy(max_curves=3, genus_max=2)
    assert sorted(p.expand(1)) == [(0,), (0, 0, 2), (0, 1), (0, 1, 1)]
    assert sorted(p.expand(-1)) == [(0, 2, 2), (1, 1, 2), (1, 2), (2,)]
    for g in range(-6, 4):
        for genera in p.expand(g):
            assert sum(1 - x for x in genera) == g and len(genera) <= 3 and max(genera, default=0) <= 2
    assert CurvePolicy(contained_in=((0, 0),)).expand(1) == [(0,)]
    assert CurvePolicy(exact=(0, 0)).expand(2) == [(0, 0)]
    assert CurvePolicy(exact=(0, 0)).expand(1) == []
    assert CurvePolicy(max_curves=None, genus_max=0).expand(2) == [(0, 0)]


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 4), st.integers(0, 4), st.integers(-12, 5))
def test_curve_policy_expansion_matches_brute_force(max_curves, genus_max, g_sum):
    brute = sorted({
        c
        for n in range(max_curves + 1)
        for c in itertools.combinations_with_replacement(range(genus_max + 1), n)
        if sum(1 - g for g in c) == g_sum
    })
    policy = CurvePolicy(max_curves=max_curves, genus_max=genus_max)
    assert sorted(policy.expand(g_sum)) == brute
    assert (g_sum in policy.g_sum_values(-50, 50)) == bool(brute)


def test_solution_set_json_round_trip(order21_solutions):
    doc = order21_solutions.to_json()
    assert SolutionSet.from_json(doc) == order21_solutions
    assert doc["solutions"][0]["M"] == 11 and doc["solutions"][0]["genera"] == [0]


def test_solution_set_sorted_and_deduplicated(order21_solutions):
    c = order21_solutions[0]
    twice = SolutionSet(21, (c, c), "x")
    assert len(twice) == 1
    loose = enumerate_configs(replace(load_shipped("order21"), projections=()))
    keys = [x.sort_key() for x in loose]
    assert keys == sorted(keys)


def test_equality_checks_report_only():
    s = load_shipped("order42")
    checks = verify_equalities_42(s)
    assert [c.holds for c in checks] == [True] * 6
    assert str(checks[0]) == "m[2,41] + m[20,23] = 3: holds (observed [3])"
    # without any capacities the report still runs and lists observed sums
    loose = replace(s, projections=(), curve_policy=CurvePolicy(contained_in=((0,),)),
                    max_multiplicity=3)
    report = verify_equalities(loose)
    assert len(report) == 6
    for chk in report:
        assert ("holds" if chk.holds else "FAILS") in str(chk)
    with pytest.raises(UsageError):
        verify_equalities_42(load_shipped("order21"))
