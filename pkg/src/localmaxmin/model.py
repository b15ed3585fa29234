"""Max-min LP instances, assignments, and their evaluation.

An instance is a bipartite communication graph between agents on one side
and constraints/objectives on the other. Every edge carries a port number at
both endpoints and a nonnegative rational coefficient (``a`` on
constraint-agent edges, ``c`` on objective-agent edges).  The problem is

    maximise   min_k  sum_{v in V_k} c_kv x_v
    subject to sum_{v in V_i} a_iv x_v <= 1   for every constraint i
               x_v >= 0.

All arithmetic is exact (:class:`fractions.Fraction`).
"""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from .errors import DomainError, RoleError

Rational = Fraction
Assignment = Dict[int, Fraction]


class Role(str, enum.Enum):
    AGENT = "agent"
    CONSTRAINT = "constraint"
    OBJECTIVE = "objective"


class IdMode(str, enum.Enum):
    PORT_NUMBERING = "port_numbering"
    UNIQUE_IDS = "unique_ids"


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    port_u: int
    port_v: int


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to an exact Fraction.

    Floats are refused: they would silently smuggle rounding into exact code.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if hasattr(value, "numerator") and hasattr(value, "denominator") and not isinstance(value, float):
        return Fraction(int(value.numerator), int(value.denominator))
    raise TypeError(f"not an exact rational: {value!r}")


@dataclass(frozen=True, eq=False)
class MaxMinInstance:
    """Immutable max-min LP instance.

    ``a`` is keyed by ``(constraint, agent)`` and ``c`` by ``(objective, agent)``.
    Vertex ids are unique nonnegative integers across the three role sets.
    ``delta_i``/``delta_k`` are optional declared degree bounds.
    """

    agents: Tuple[int, ...]
    constraints: Tuple[int, ...]
    objectives: Tuple[int, ...]
    edges: Tuple[Edge, ...]
    a: Mapping[Tuple[int, int], Fraction]
    c: Mapping[Tuple[int, int], Fraction]
    id_mode: IdMode = IdMode.PORT_NUMBERING
    delta_i: Optional[int] = None
    delta_k: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "objectives", tuple(self.objectives))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "a", {k: as_fraction(v) for k, v in self.a.items()})
        object.__setattr__(self, "c", {k: as_fraction(v) for k, v in self.c.items()})
        object.__setattr__(self, "id_mode", IdMode(self.id_mode))

    # -- structural views ---------------------------------------------------

    @cached_property
    def role(self) -> Dict[int, Role]:
        out: Dict[int, Role] = {}
        for ids, r in ((self.agents, Role.AGENT), (self.constraints, Role.CONSTRAINT),
                       (self.objectives, Role.OBJECTIVE)):
            for x in ids:
                out[x] = r
        return out

    @cached_property
    def ports(self) -> Dict[int, List[Tuple[int, int, int]]]:
        """vertex -> [(port here, neighbour, port at neighbour)] sorted by port."""
        out: Dict[int, List[Tuple[int, int, int]]] = {x: [] for x in self.role}
        for e in self.edges:
            out.setdefault(e.u, []).append((e.port_u, e.v, e.port_v))
            out.setdefault(e.v, []).append((e.port_v, e.u, e.port_u))
        for lst in out.values():
            lst.sort()
        return out

    @cached_property
    def vertices(self) -> Tuple[int, ...]:
        return tuple(sorted(self.role))

    def role_of(self, x: int) -> Role:
        try:
            return self.role[x]
        except KeyError:
            raise RoleError(f"unknown vertex {x}") from None

    def degree(self, x: int) -> int:
        return len(self.ports.get(x, ()))

    def neighbours(self, x: int) -> List[int]:
        return [n for _, n, _ in self.ports.get(x, ())]

    def coef(self, x: int, y: int) -> Optional[Fraction]:
        """Coefficient on the edge {x, y}, whichever endpoint is the agent."""
        for key in ((x, y), (y, x)):
            if key in self.a:
                return self.a[key]
            if key in self.c:
                return self.c[key]
        return None

    def agents_of(self, x: int) -> List[int]:
        """V_i or V_k: the agents adjacent to a constraint or objective."""
        return [n for n in self.neighbours(x) if self.role.get(n) is Role.AGENT]

    def constraints_of(self, v: int) -> List[int]:
        return [n for n in self.neighbours(v) if self.role.get(n) is Role.CONSTRAINT]

    def objectives_of(self, v: int) -> List[int]:
        return [n for n in self.neighbours(v) if self.role.get(n) is Role.OBJECTIVE]

    @cached_property
    def is_bipartite(self) -> bool:
        """Every agent has exactly one constraint and one objective neighbour."""
        return all(len(self.constraints_of(v)) == 1 and len(self.objectives_of(v)) == 1
                   for v in self.agents)

    @cached_property
    def is_zero_one(self) -> bool:
        return all(x == 1 for x in self.a.values()) and all(x == 1 for x in self.c.values())

    @cached_property
    def max_degrees(self) -> Tuple[int, int]:
        di = max((self.degree(i) for i in self.constraints), default=0)
        dk = max((self.degree(k) for k in self.objectives), default=0)
        return di, dk

    # -- derived instances --------------------------------------------------

    def with_id_mode(self, mode: IdMode) -> "MaxMinInstance":
        return MaxMinInstance(self.agents, self.constraints, self.objectives, self.edges,
                              self.a, self.c, mode, self.delta_i, self.delta_k)

    def with_deltas(self, delta_i: Optional[int], delta_k: Optional[int]) -> "MaxMinInstance":
        return MaxMinInstance(self.agents, self.constraints, self.objectives, self.edges,
                              self.a, self.c, self.id_mode, delta_i, delta_k)

    def _key(self):
        return (tuple(sorted(self.agents)), tuple(sorted(self.constraints)),
                tuple(sorted(self.objectives)),
                tuple(sorted((e.u, e.v, e.port_u, e.port_v) for e in self.edges)),
                tuple(sorted(self.a.items())), tuple(sorted(self.c.items())),
                self.id_mode, self.delta_i, self.delta_k)

    def __eq__(self, other):
        if not isinstance(other, MaxMinInstance):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return (f"MaxMinInstance(|V|={len(self.agents)}, |I|={len(self.constraints)}, "
                f"|K|={len(self.objectives)}, |E|={len(self.edges)}, {self.id_mode.value})")


@dataclass(frozen=True)
class Violation:
    kind: str
    where: object
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: Tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> List[str]:
        return [v.kind for v in self.violations]


def validate_instance(inst: MaxMinInstance) -> ValidationReport:
    """Report every violated structural invariant; never raises."""
    out: List[Violation] = []

    seen: Dict[int, str] = {}
    for name, ids in (("agents", inst.agents), ("constraints", inst.constraints),
                      ("objectives", inst.objectives)):
        for x in ids:
            if not isinstance(x, int) or isinstance(x, bool) or x < 0:
                out.append(Violation("bad id", x, f"id {x!r} in {name} is not a nonnegative integer"))
            if x in seen:
                out.append(Violation("duplicate id", x, f"id {x} listed in {seen[x]} and {name}"))
            seen[x] = name

    role = inst.role
    pairs = set()
    port_use: Dict[int, List[int]] = defaultdict(list)
    for idx, e in enumerate(inst.edges):
        where = (e.u, e.v)
        if e.u not in role or e.v not in role:
            out.append(Violation("unknown vertex", where, f"edge {idx} touches an undeclared vertex"))
            continue
        if e.u == e.v:
            out.append(Violation("self loop", where, f"edge {idx} is a loop"))
            continue
        ru, rv = role[e.u], role[e.v]
        if ru is Role.AGENT and rv is Role.AGENT:
            out.append(Violation("edge within V", where, f"edge {idx} joins two agents"))
        elif ru is not Role.AGENT and rv is not Role.AGENT:
            out.append(Violation("edge within I∪K", where, f"edge {idx} joins two non-agents"))
        key = frozenset((e.u, e.v))
        if key in pairs:
            out.append(Violation("parallel edge", where, f"edge {idx} duplicates an earlier edge"))
        pairs.add(key)
        port_use[e.u].append(e.port_u)
        port_use[e.v].append(e.port_v)

    for x in sorted(port_use):
        ps = port_use[x]
        if any(not isinstance(p, int) or p < 1 for p in ps):
            out.append(Violation("port range", x, f"ports {sorted(ps)} must be positive integers"))
            continue
        if len(set(ps)) != len(ps):
            out.append(Violation("port duplicate", x, f"ports {sorted(ps)} repeat"))
        elif sorted(ps) != list(range(1, len(ps) + 1)):
            out.append(Violation("port gap", x, f"ports {sorted(ps)} are not 1..{len(ps)}"))

    for table, want, label in ((inst.a, Role.CONSTRAINT, "a"), (inst.c, Role.OBJECTIVE, "c")):
        for (j, v), val in table.items():
            if role.get(j) is not want or role.get(v) is not Role.AGENT:
                out.append(Violation("coefficient role", (j, v), f"{label}[{j},{v}] has wrong endpoint roles"))
            elif frozenset((j, v)) not in pairs:
                out.append(Violation("dangling coefficient", (j, v), f"{label}[{j},{v}] has no edge"))
            if val < 0:
                out.append(Violation("negative coefficient", (j, v), f"{label}[{j},{v}] = {val} < 0"))
    for e in inst.edges:
        ru, rv = role.get(e.u), role.get(e.v)
        if ru is Role.AGENT and rv in (Role.CONSTRAINT, Role.OBJECTIVE):
            j, v = e.v, e.u
        elif rv is Role.AGENT and ru in (Role.CONSTRAINT, Role.OBJECTIVE):
            j, v = e.u, e.v
        else:
            continue
        table = inst.a if role[j] is Role.CONSTRAINT else inst.c
        if (j, v) not in table:
            out.append(Violation("missing coefficient", (j, v), f"edge {{{j},{v}}} has no coefficient"))

    for bound, ids, label in ((inst.delta_i, inst.constraints, "delta_i"),
                              (inst.delta_k, inst.objectives, "delta_k")):
        if bound is None:
            continue
        for x in ids:
            if inst.degree(x) > bound:
                out.append(Violation("degree bound", x, f"degree {inst.degree(x)} exceeds {label}={bound}"))

    return ValidationReport(tuple(out))


# -- evaluation ---------------------------------------------------------------

def _value(x: Mapping[int, Fraction], v: int) -> Fraction:
    try:
        return x[v]
    except KeyError:
        raise DomainError(f"assignment has no value for agent {v}") from None


def objective_utility(inst: MaxMinInstance, x: Mapping[int, Fraction], k: int) -> Fraction:
    if inst.role_of(k) is not Role.OBJECTIVE:
        raise RoleError(f"vertex {k} is a {inst.role_of(k).value}, not an objective")
    return sum((inst.c[(k, v)] * _value(x, v) for v in inst.agents_of(k)), Fraction(0))


def utilities(inst: MaxMinInstance, x: Mapping[int, Fraction]) -> Dict[int, Fraction]:
    return {k: objective_utility(inst, x, k) for k in inst.objectives}


def min_utility(inst: MaxMinInstance, x: Mapping[int, Fraction]) -> Fraction:
    if not inst.objectives:
        raise DomainError("instance has no objectives")
    return min(utilities(inst, x).values())


def constraint_load(inst: MaxMinInstance, x: Mapping[int, Fraction], i: int) -> Fraction:
    if inst.role_of(i) is not Role.CONSTRAINT:
        raise RoleError(f"vertex {i} is not a constraint")
    return sum((inst.a[(i, v)] * _value(x, v) for v in inst.agents_of(i)), Fraction(0))


def check_feasible(inst: MaxMinInstance, x: Mapping[int, Fraction]) -> List[int]:
    """Ids of violated constraints, followed by agents with a negative value.

    An empty list means ``x`` is exactly feasible.
    """
    missing = [v for v in inst.agents if v not in x]
    if missing:
        raise DomainError(f"assignment misses agents {missing[:5]}")
    bad = [i for i in inst.constraints if constraint_load(inst, x, i) > 1]
    bad += [v for v in inst.agents if x[v] < 0]
    return bad


def zero_assignment(inst: MaxMinInstance) -> Assignment:
    return {v: Fraction(0) for v in inst.agents}


def build_instance(agents: Iterable[int], constraints: Iterable[int], objectives: Iterable[int],
                   links: Iterable[Tuple[int, int, object]], *, id_mode: IdMode = IdMode.PORT_NUMBERING,
                   delta_i: Optional[int] = None, delta_k: Optional[int] = None) -> MaxMinInstance:
    """Convenience constructor: ``links`` are ``(agent, constraint_or_objective, coefficient)``.

    Ports are assigned in link order at every vertex.
    """
    agents, constraints, objectives = tuple(agents), tuple(constraints), tuple(objectives)
    role = {x: Role.AGENT for x in agents}
    role.update({x: Role.CONSTRAINT for x in constraints})
    role.update({x: Role.OBJECTIVE for x in objectives})
    next_port: Dict[int, int] = defaultdict(lambda: 1)
    edges, a, c = [], {}, {}
    for v, j, coef in links:
        pu, pv = next_port[v], next_port[j]
        next_port[v] += 1
        next_port[j] += 1
        edges.append(Edge(v, j, pu, pv))
        (a if role.get(j) is Role.CONSTRAINT else c)[(j, v)] = as_fraction(coef)
    return MaxMinInstance(agents, constraints, objectives, tuple(edges), a, c, id_mode, delta_i, delta_k)
