from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from localmaxmin.errors import DomainError, UnboundedError
from localmaxmin.instances import (chain_instance, random_bipartite_instance, single_agent_instance,
                                   star_instance)
from localmaxmin.lp import (LinearProgram, Relation, Row, Status, equitable_partition, simplex,
                            solve_max_min, solve_max_min_report)
from localmaxmin.model import Edge, MaxMinInstance, build_instance, check_feasible, min_utility

from conftest import bipartite_instances, relabel
from oracles import flow_omega, grid_bracket, highs_omega, vertex_enumeration_omega


def _lp(n, objective, rows, **kw):
    return LinearProgram(n, tuple(objective), tuple(Row(tuple(c), rel, rhs) for c, rel, rhs in rows), **kw)


# -- generic simplex ----------------------------------------------------------

def test_simplex_box():
    res = simplex(_lp(1, [1], [([1], Relation.LE, 1)]))
    assert res.status is Status.OPTIMAL and res.value == 1 and res.x == (1,)


def test_simplex_no_rows_unbounded():
    assert simplex(_lp(1, [1], [])).status is Status.UNBOUNDED


def test_simplex_infeasible():
    res = simplex(_lp(1, [1], [([1], Relation.LE, 1), ([1], Relation.GE, 2)]))
    assert res.status is Status.INFEASIBLE


def test_simplex_equalities_and_free_variables():
    # max x - y  s.t. x + y = 3, x <= 2, y free
    res = simplex(_lp(2, [1, -1], [([1, 1], Relation.EQ, 3), ([1, 0], Relation.LE, 2)],
                      nonneg=(True, False)))
    assert res.value == 1 and res.x == (2, 1)


def test_simplex_minimise_with_negative_rhs():
    # min x + y s.t. -x - 2y <= -4  (i.e. x + 2y >= 4)
    res = simplex(_lp(2, [1, 1], [([-1, -2], Relation.LE, -4)], maximize=False))
    assert res.value == 2 and res.x == (0, 2)


def test_simplex_redundant_equalities():
    res = simplex(_lp(2, [1, 2], [([1, 1], Relation.EQ, 1), ([2, 2], Relation.EQ, 2)]))
    assert res.value == 2 and res.x == (0, 1)


def test_simplex_degenerate_cycling_example():
    # a classic instance on which the largest-coefficient rule cycles
    rows = [([Fraction(1, 2), Fraction(-11, 2), Fraction(-5, 2), 9], Relation.LE, 0),
            ([Fraction(1, 2), Fraction(-3, 2), Fraction(-1, 2), 1], Relation.LE, 0),
            ([1, 0, 0, 0], Relation.LE, 1)]
    res = simplex(_lp(4, [10, -57, -9, -24], rows))
    assert res.status is Status.OPTIMAL and res.value == 1


def test_linear_program_shape_checked():
    with pytest.raises(ValueError):
        _lp(2, [1], [])
    with pytest.raises(ValueError):
        _lp(1, [1], [([1, 1], Relation.LE, 1)])


@given(st.lists(st.lists(st.integers(0, 5), min_size=3, max_size=3), min_size=1, max_size=4),
       st.lists(st.integers(0, 5), min_size=3, max_size=3))
def test_simplex_matches_highs_on_packing_lps(rows, objective):
    from scipy.optimize import linprog
    lp = _lp(3, objective, [(r, Relation.LE, 1) for r in rows])
    res = simplex(lp)
    ref = linprog([-v for v in objective], A_ub=rows, b_ub=[1] * len(rows), bounds=[(0, None)] * 3,
                  method="highs")
    if ref.status == 3:
        assert res.status is Status.UNBOUNDED
    else:
        assert res.status is Status.OPTIMAL
        assert float(res.value) == pytest.approx(-ref.fun, abs=1e-9)
        assert all(sum(c * v for c, v in zip(r, res.x)) <= 1 for r in rows)


# -- max-min ------------------------------------------------------------------

def test_sensor_optimum(sensor):
    omega, x = solve_max_min(sensor)
    assert omega == Fraction(3, 5)
    assert check_feasible(sensor, x) == [] and min_utility(sensor, x) == omega
    assert highs_omega(sensor) == pytest.approx(0.6, abs=1e-9)
    assert vertex_enumeration_omega(sensor) == pytest.approx(0.6, abs=1e-9)
    assert flow_omega(sensor) == pytest.approx(0.6, abs=1e-6)


@pytest.mark.parametrize("delta", [2, 3, 4, 7])
def test_star(delta):
    omega, x = solve_max_min(star_instance(delta))
    assert omega == Fraction(1, delta)
    assert set(x.values()) == {Fraction(1, delta)}


@pytest.mark.parametrize("a, c", [(1, 1), (2, 3), (Fraction(1, 2), Fraction(5, 4))])
def test_single_agent(a, c):
    omega, x = solve_max_min(single_agent_instance(a, c))
    assert omega == Fraction(c) / Fraction(a) and x == {0: 1 / Fraction(a)}


def test_chain_optimum_matches_oracle():
    inst = chain_instance(6)
    omega, _ = solve_max_min(inst)
    assert float(omega) == pytest.approx(highs_omega(inst), abs=1e-9)


def test_no_objectives_is_domain_error():
    inst = build_instance([0], [1], [], [(0, 1, 1)])
    with pytest.raises(DomainError):
        solve_max_min(inst)


def test_unconstrained_agent_is_unbounded():
    inst = build_instance([0], [1], [2], [(0, 1, 0), (0, 2, 1)])
    with pytest.raises(UnboundedError):
        solve_max_min(inst)


def test_isolated_objective_gives_zero():
    inst = build_instance([0], [1], [2, 3], [(0, 1, 1), (0, 2, 1)])
    omega, x = solve_max_min(inst)
    assert omega == 0 and x == {0: 0}


def test_quotient_collapses_symmetric_instances(sensor):
    report = solve_max_min_report(star_instance(5))
    assert report.classes == 3
    assert solve_max_min_report(sensor).classes < len(sensor.vertices)


def test_partition_is_equitable(sensor):
    classes = equitable_partition(sensor)
    for x in sensor.vertices:
        for y in sensor.vertices:
            if classes[x] == classes[y]:
                assert sorted((sensor.coef(x, w), classes[w]) for w in sensor.neighbours(x)) == \
                    sorted((sensor.coef(y, w), classes[w]) for w in sensor.neighbours(y))


def test_random_instances_against_highs():
    rng = random.Random(2024)
    for _ in range(40):
        inst = random_bipartite_instance(rng, rng.randint(1, 14), rng.choice([2, 3]), rng.choice([2, 3]))
        omega, x = solve_max_min(inst)
        assert check_feasible(inst, x) == [] and min_utility(inst, x) == omega
        assert float(omega) == pytest.approx(highs_omega(inst), rel=1e-9, abs=1e-9)


def test_small_instances_against_grid():
    rng = random.Random(7)
    for _ in range(12):
        inst = random_bipartite_instance(rng, rng.randint(1, 4), 2, 2)
        omega, _ = solve_max_min(inst)
        lo, hi = grid_bracket(inst, 6)
        assert lo <= omega <= hi


def test_small_instances_against_vertex_enumeration():
    rng = random.Random(11)
    for _ in range(10):
        inst = random_bipartite_instance(rng, rng.randint(1, 5), 2, 3)
        omega, _ = solve_max_min(inst)
        assert float(omega) == pytest.approx(vertex_enumeration_omega(inst), abs=1e-7)


def test_single_coordinate_moves_do_not_help():
    rng = random.Random(99)
    eps = Fraction(1, 97)
    for _ in range(50):
        inst = random_bipartite_instance(rng, rng.randint(1, 10), rng.choice([2, 3]), rng.choice([2, 3]))
        omega, x = solve_max_min(inst)
        for v in inst.agents:
            for step in (eps, -eps):
                y = dict(x)
                y[v] += step
                if check_feasible(inst, y) == []:
                    assert min_utility(inst, y) <= omega


@given(bipartite_instances(max_agents=10), st.randoms(use_true_random=False))
def test_invariant_under_relabelling(inst, rnd):
    ids = sorted(inst.vertices)
    shuffled = ids[:]
    rnd.shuffle(shuffled)
    perm = dict(zip(ids, [10 * s + 3 for s in shuffled]))
    omega, x = solve_max_min(inst)
    omega2, x2 = solve_max_min(relabel(inst, perm))
    assert omega == omega2
    assert all(x2[perm[v]] == x[v] for v in inst.agents)


@given(bipartite_instances())
def test_solution_is_exactly_feasible_and_optimal(inst):
    omega, x = solve_max_min(inst)
    assert all(isinstance(val, Fraction) for val in x.values())
    assert check_feasible(inst, x) == []
    assert min_utility(inst, x) == omega


@given(bipartite_instances(max_agents=8), st.integers(1, 5))
def test_scaling_a_scales_optimum(inst, t):
    scaled = MaxMinInstance(inst.agents, inst.constraints, inst.objectives, inst.edges,
                            {key: val * t for key, val in inst.a.items()}, inst.c,
                            inst.id_mode, inst.delta_i, inst.delta_k)
    assert solve_max_min(scaled)[0] * t == solve_max_min(inst)[0]


def test_non_bipartite_general_instance():
    # agent 0 in two constraints and two objectives
    inst = MaxMinInstance((0, 1), (2, 3), (4, 5),
                          (Edge(0, 2, 1, 1), Edge(0, 3, 2, 1), Edge(0, 4, 3, 1), Edge(0, 5, 4, 1),
                           Edge(1, 3, 1, 2), Edge(1, 5, 2, 2)),
                          {(2, 0): 2, (3, 0): 1, (3, 1): 1}, {(4, 0): 1, (5, 0): 1, (5, 1): 1})
    omega, x = solve_max_min(inst)
    assert omega == Fraction(1, 2) and float(omega) == pytest.approx(highs_omega(inst))
