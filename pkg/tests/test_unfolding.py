from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from localmaxmin.instances import chain_instance, four_cycle, star_instance, unfolding_example
from localmaxmin.model import Edge, MaxMinInstance
from localmaxmin.lowerbound import LowerBoundParams, build_S, girth, high_girth_biregular
from localmaxmin.model import IdMode, Role
from localmaxmin.unfolding import (canonical_code, consistency_check, local_view, render, truncate,
                                   view_code)

from conftest import bipartite_instances


def _labels(view):
    return [[n.role for n in level] for level in view.levels()]


def test_example_graph_view_depth_two():
    view = local_view(unfolding_example(), 0, 2)
    assert _labels(view) == [["a"], ["b", "c"], ["c", "b", "d"]]


def test_example_graph_views_match_hand_unfolding_deeper():
    # below b (via c) the walk continues to a and d; below c (via b) only to a
    view = local_view(unfolding_example(), 0, 3)
    assert _labels(view)[3] == ["a", "d", "a"]


def test_radius_zero_is_single_node(sensor):
    view = local_view(sensor, 0, 0)
    assert len(view) == 1 and view.root.children == []


def test_four_cycle_looks_like_a_path():
    view = local_view(four_cycle(), 0, 3)
    levels = view.levels()
    assert [len(level) for level in levels] == [1, 2, 2, 2]
    assert all(len(n.children) <= 1 for level in levels[1:] for n in level)


def test_port_numbering_view_hides_ids(sensor):
    assert all(n.vertex is None for n in local_view(sensor, 3, 5).nodes())
    ids = {n.vertex for n in local_view(sensor.with_id_mode(IdMode.UNIQUE_IDS), 3, 5).nodes()}
    assert None not in ids


def test_codes_deterministic_and_role_sensitive(sensor):
    assert view_code(sensor, 0, 4) == view_code(sensor, 0, 4)
    assert view_code(sensor, 0, 2) != view_code(sensor, 9, 2)
    assert view_code(sensor, 0, 2) != view_code(sensor, 0, 3)


def test_codes_see_ports():
    # the two end agents of a chain of two look identical, the middle ones differ by port layout
    star = star_instance(3)
    codes = {view_code(star, v, 3) for v in star.agents}
    # agent v reaches the constraint through its port 1, at constraint port v+1
    assert len(codes) == 3


def test_codes_see_coefficients():
    from localmaxmin.instances import single_agent_instance
    assert view_code(single_agent_instance(1, 1), 0, 1) != view_code(single_agent_instance(2, 1), 0, 1)


def test_render_mentions_ports():
    text = render(local_view(unfolding_example(), 0, 1))
    assert text.splitlines() == ["a", "  b via 1->1", "  c via 2->1"]


@given(bipartite_instances(), st.integers(0, 5))
def test_truncation_commutes(inst, r):
    v = min(inst.agents)
    assert canonical_code(truncate(local_view(inst, v, r + 1), r)) == view_code(inst, v, r)


@given(bipartite_instances(), st.integers(1, 6))
def test_branches_match_host_edges(inst, r):
    inst = inst.with_id_mode(IdMode.UNIQUE_IDS)
    view = local_view(inst, min(inst.agents), r)
    for node in view.nodes():
        if node.depth == r:
            continue
        host = {(p, nbr) for p, nbr, _ in inst.ports[node.vertex]}
        seen = {(ch.port_down, ch.vertex) for ch in node.children}
        if node.parent is not None:
            seen.add((node.port_up, node.parent.vertex))
        assert seen == host


def test_acyclic_view_is_ball():
    from localmaxmin.lowerbound import bfs_distances
    inst = chain_instance(5)
    assert girth(inst) == float("inf")
    for v in inst.agents:
        view = local_view(inst.with_id_mode(IdMode.UNIQUE_IDS), v, 4)
        ball = bfs_distances(inst, v, 4)
        assert sorted(n.vertex for n in view.nodes()) == sorted(ball)
        assert all(n.depth == ball[n.vertex] for n in view.nodes())


def test_high_girth_view_has_no_repeats():
    q = high_girth_biregular(2, 3, 10, seed=3)
    S = build_S(q, LowerBoundParams(2, 3, 0, 4))
    g = girth(S)
    r = (g - 2) // 2
    for v in list(S.agents)[:20]:
        ids = [n.vertex for n in local_view(S, v, r).nodes()]
        assert len(ids) == len(set(ids))


def test_consistency_constant_assignment_is_clean(sensor):
    assert consistency_check(sensor, {v: Fraction(1) for v in sensor.agents}, 5) == []


def _two_copies(inst):
    shift = max(inst.vertices) + 1
    edges = inst.edges + tuple(Edge(e.u + shift, e.v + shift, e.port_u, e.port_v) for e in inst.edges)
    a = {**inst.a, **{(i + shift, v + shift): val for (i, v), val in inst.a.items()}}
    c = {**inst.c, **{(k + shift, v + shift): val for (k, v), val in inst.c.items()}}
    return MaxMinInstance(inst.agents + tuple(v + shift for v in inst.agents),
                          inst.constraints + tuple(i + shift for i in inst.constraints),
                          inst.objectives + tuple(k + shift for k in inst.objectives),
                          edges, a, c), shift


def test_consistency_detects_split_twins(sensor):
    inst, shift = _two_copies(sensor)
    x = {v: Fraction(0 if v < shift else 1) for v in inst.agents}
    bad = consistency_check(inst, x, 6)
    assert len(bad) == len(sensor.agents)
    for u, w in bad:
        assert view_code(inst, u, 6) == view_code(inst, w, 6) and x[u] != x[w]


@given(bipartite_instances(), st.integers(0, 4))
def test_function_of_view_is_consistent(inst, r):
    x = {v: Fraction(len(view_code(inst, v, r)) % 7) for v in inst.agents}
    assert consistency_check(inst, x, r) == []


def test_root_marker_and_roles(sensor):
    view = local_view(sensor, 9, 2)
    assert view.root.role is Role.CONSTRAINT and view.root.parent is None
    assert {n.role for n in view.levels()[1]} == {Role.AGENT}


def test_local_view_rejects_bad_arguments(sensor):
    with pytest.raises(ValueError):
        local_view(sensor, 0, -1)
    with pytest.raises(KeyError):
        local_view(sensor, 999, 1)
