"""Small named instances and a seeded random generator."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .model import IdMode, MaxMinInstance, build_instance
from .unfolding import PortGraph

# agent -> constraint and agent -> objective for the relay network example
_SENSOR_CONSTRAINT = {1: 1, 2: 1, 3: 1, 4: 2, 5: 2, 6: 2, 7: 3, 8: 3, 9: 3}
_SENSOR_OBJECTIVE = {1: 1, 2: 2, 4: 2, 3: 3, 5: 3, 7: 3, 6: 4, 8: 4, 9: 5}


def sensor_instance(id_mode: IdMode = IdMode.PORT_NUMBERING) -> MaxMinInstance:
    """Nine relay flows: agents x1..x9 are ids 0..8, relays i1..i3 are 9..11, sensors k1..k5 are 12..16."""
    links = [(v - 1, 8 + i, 1) for v, i in _SENSOR_CONSTRAINT.items()]
    links += [(v - 1, 11 + k, 1) for v, k in sorted(_SENSOR_OBJECTIVE.items())]
    return build_instance(range(9), range(9, 12), range(12, 17), links, id_mode=id_mode,
                          delta_i=3, delta_k=3)


def sensor_agent(n: int) -> int:
    return n - 1


def sensor_constraint(n: int) -> int:
    return 8 + n


def sensor_objective(n: int) -> int:
    return 11 + n


def star_instance(delta: int) -> MaxMinInstance:
    """One constraint shared by ``delta`` agents, each with its own objective."""
    links = [(v, delta, 1) for v in range(delta)]
    links += [(v, delta + 1 + v, 1) for v in range(delta)]
    return build_instance(range(delta), [delta], range(delta + 1, 2 * delta + 1), links)


def single_agent_instance(a=1, c=1) -> MaxMinInstance:
    return build_instance([0], [1], [2], [(0, 1, a), (0, 2, c)])


def chain_instance(n: int) -> MaxMinInstance:
    """The path k - v0 - i - v1 - k - v2 - i - ... of ``n`` agents, all coefficients 1."""
    links, constraints, objectives = [], [], [n]
    last = n  # the vertex shared with the previous agent
    for v in range(n):
        nxt = n + 1 + v
        (constraints if v % 2 == 0 else objectives).append(nxt)
        links += [(v, last, 1), (v, nxt, 1)]
        last = nxt
    return build_instance(range(n), constraints, objectives, links)


def four_cycle() -> PortGraph:
    return PortGraph.from_adjacency({0: [1, 3], 1: [2, 0], 2: [3, 1], 3: [0, 2]})


def unfolding_example() -> PortGraph:
    """Triangle a-b-c with pendant d at c; ids 0..3 labelled a..d."""
    return PortGraph.from_adjacency({0: [1, 2], 1: [0, 2], 2: [0, 1, 3], 3: [2]},
                                    labels={0: "a", 1: "b", 2: "c", 3: "d"})


def _coef(rng: random.Random, low_open: bool, denominators: Sequence[int]) -> Fraction:
    den = rng.choice(denominators)
    lo = 1 if low_open else 0
    return Fraction(rng.randint(lo, 4 * den), den)


def random_bipartite_instance(rng: random.Random, n_agents: int, delta_i: int, delta_k: int,
                              denominators: Sequence[int] = (1, 2, 3, 4),
                              id_mode: IdMode = IdMode.PORT_NUMBERING) -> MaxMinInstance:
    """A random bipartite instance with degrees at most ``(delta_i, delta_k)``.

    Agents are grouped into constraints and objectives by random group sizes;
    ``a`` is drawn from ``(0, 4]`` and ``c`` from ``[0, 4]``, and ports follow
    a random link order.
    """
    def groups(bound: int):
        order = list(range(n_agents))
        rng.shuffle(order)
        out = []
        while order:
            size = rng.randint(1, bound)
            out.append(order[:size])
            order = order[size:]
        return out

    cons, objs = groups(delta_i), groups(delta_k)
    first_c = n_agents
    first_o = first_c + len(cons)
    links = []
    for j, members in enumerate(cons):
        links += [(v, first_c + j, _coef(rng, True, denominators)) for v in members]
    for j, members in enumerate(objs):
        links += [(v, first_o + j, _coef(rng, False, denominators)) for v in members]
    rng.shuffle(links)
    return build_instance(range(n_agents), range(first_c, first_o),
                          range(first_o, first_o + len(objs)), links, id_mode=id_mode,
                          delta_i=delta_i, delta_k=delta_k)
