from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from localmaxmin.instances import random_bipartite_instance, sensor_instance

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def sensor():
    return sensor_instance()


def small_rationals(lo=0, hi=4, max_den=4):
    return st.builds(lambda n, d: Fraction(n, d), st.integers(lo * max_den, hi * max_den),
                     st.integers(1, max_den)).filter(lambda f: lo <= f <= hi)


@st.composite
def bipartite_instances(draw, max_agents=12, deltas=(2, 3)):
    seed = draw(st.integers(0, 2 ** 32 - 1))
    n = draw(st.integers(1, max_agents))
    di = draw(st.sampled_from(deltas))
    dk = draw(st.sampled_from(deltas))
    return random_bipartite_instance(random.Random(seed), n, di, dk)


@st.composite
def instance_and_assignment(draw, max_agents=10):
    inst = draw(bipartite_instances(max_agents=max_agents))
    values = draw(st.lists(small_rationals(0, 2), min_size=len(inst.agents), max_size=len(inst.agents)))
    return inst, dict(zip(sorted(inst.agents), values))


def relabel(inst, perm):
    """Copy of ``inst`` with every id ``x`` replaced by ``perm[x]``; ports are kept."""
    from localmaxmin.model import Edge, MaxMinInstance
    return MaxMinInstance(tuple(perm[v] for v in inst.agents), tuple(perm[i] for i in inst.constraints),
                          tuple(perm[k] for k in inst.objectives),
                          tuple(Edge(perm[e.u], perm[e.v], e.port_u, e.port_v) for e in inst.edges),
                          {(perm[i], perm[v]): w for (i, v), w in inst.a.items()},
                          {(perm[k], perm[v]): w for (k, v), w in inst.c.items()},
                          inst.id_mode, inst.delta_i, inst.delta_k)


ACCEPTANCE = []


def record_criterion(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
