"""Adversarial instances built from high-girth biregular graphs.

A biregular skeleton ``Q = (I', K', E')`` is turned into a max-min LP ``S`` by
replacing every edge with a path of ``2s+1`` agents.  Around any original
objective ``k`` the ball of radius ``4s+2+r`` is a tree ``S_k`` that no
``r``-local algorithm can tell apart from ``S`` near ``k``, yet ``S_k`` has a
much larger optimum.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple, Union

from .errors import ConstructionError, DomainError, ParseError, ResourceBudgetError, RoleError, ValidationError
from .model import (Assignment, Edge, IdMode, MaxMinInstance, Role, ValidationReport, Violation,
                    build_instance)


@dataclass(frozen=True)
class BipartiteGraph:
    """Left vertices ``0..n_left-1``, right vertices ``0..n_right-1``; edges are ``(left, right)``."""

    n_left: int
    n_right: int
    edges: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(l), int(r)) for l, r in self.edges))
        for l, r in self.edges:
            if not (0 <= l < self.n_left and 0 <= r < self.n_right):
                raise DomainError(f"edge ({l}, {r}) out of range")

    @property
    def n_vertices(self) -> int:
        return self.n_left + self.n_right

    def left_degrees(self) -> List[int]:
        deg = [0] * self.n_left
        for l, _ in self.edges:
            deg[l] += 1
        return deg

    def right_degrees(self) -> List[int]:
        deg = [0] * self.n_right
        for _, r in self.edges:
            deg[r] += 1
        return deg

    def is_biregular(self, a: int, b: int) -> bool:
        return all(d == a for d in self.left_degrees()) and all(d == b for d in self.right_degrees())

    def adjacency(self) -> List[List[Tuple[int, int]]]:
        """Vertex ``l`` is left ``l``; vertex ``n_left + r`` is right ``r``; entries are ``(nbr, edge index)``."""
        adj: List[List[Tuple[int, int]]] = [[] for _ in range(self.n_vertices)]
        for e, (l, r) in enumerate(self.edges):
            adj[l].append((self.n_left + r, e))
            adj[self.n_left + r].append((l, e))
        return adj


def complete_bipartite(n_left: int, n_right: int) -> BipartiteGraph:
    return BipartiteGraph(n_left, n_right, tuple((l, r) for l in range(n_left) for r in range(n_right)))


def cycle_graph(length: int) -> BipartiteGraph:
    """An even cycle as a (2,2)-biregular graph."""
    if length < 4 or length % 2:
        raise DomainError("a bipartite cycle needs even length >= 4")
    h = length // 2
    return BipartiteGraph(h, h, tuple([(j, j) for j in range(h)] + [((j + 1) % h, j) for j in range(h)]))


def graph_to_dict(q: BipartiteGraph) -> dict:
    return {"n_left": q.n_left, "n_right": q.n_right, "edges": [list(e) for e in q.edges]}


def graph_from_dict(doc) -> BipartiteGraph:
    if not isinstance(doc, dict) or set(doc) != {"n_left", "n_right", "edges"}:
        raise ParseError("expected an object with n_left, n_right, edges")
    try:
        return BipartiteGraph(int(doc["n_left"]), int(doc["n_right"]),
                              tuple((int(l), int(r)) for l, r in doc["edges"]))
    except (TypeError, ValueError) as exc:
        raise ParseError(str(exc), "$.edges") from None


# -- girth and short cycles --------------------------------------------------

Adjacency = Sequence[Sequence[Tuple[int, int]]]


def _girth(adj: Adjacency, cap: float = math.inf) -> float:
    best = cap
    for s in range(len(adj)):
        dist = {s: 0}
        via = {s: -1}
        queue = deque([s])
        while queue:
            x = queue.popleft()
            if 2 * dist[x] + 1 >= best:
                break
            for y, e in adj[x]:
                if e == via[x]:
                    continue
                if y in dist:
                    best = min(best, dist[x] + dist[y] + 1)
                else:
                    dist[y] = dist[x] + 1
                    via[y] = e
                    queue.append(y)
    return best


def instance_adjacency(inst: MaxMinInstance) -> Tuple[List[List[Tuple[int, int]]], List[int]]:
    """Dense adjacency of an instance graph plus the vertex id of each index."""
    ids = sorted(inst.role)
    pos = {x: j for j, x in enumerate(ids)}
    adj: List[List[Tuple[int, int]]] = [[] for _ in ids]
    for e, edge in enumerate(inst.edges):
        adj[pos[edge.u]].append((pos[edge.v], e))
        adj[pos[edge.v]].append((pos[edge.u], e))
    return adj, ids


def girth(graph: Union[BipartiteGraph, MaxMinInstance]) -> Union[int, float]:
    """Length of a shortest cycle, or ``math.inf`` for a forest."""
    adj = graph.adjacency() if isinstance(graph, BipartiteGraph) else instance_adjacency(graph)[0]
    g = _girth(adj)
    return g if g == math.inf else int(g)


def shortest_cycles(q: BipartiteGraph) -> Tuple[Union[int, float], Set[FrozenSet[int]]]:
    """The girth and every cycle of that length, as sets of edge indices.

    Each shortest cycle through ``s`` closes at the vertex opposite ``s``, where
    two distinct shortest paths from ``s`` meet.
    """
    adj = q.adjacency()
    g = _girth(adj)
    if g == math.inf:
        return g, set()
    h = int(g) // 2
    cycles: Set[FrozenSet[int]] = set()
    for s in range(len(adj)):
        dist = {s: 0}
        path: Dict[int, Tuple[int, ...]] = {s: ()}
        meets: Dict[int, List[Tuple[int, ...]]] = {}
        queue = deque([s])
        while queue:
            x = queue.popleft()
            if dist[x] == h:
                continue
            for y, e in adj[x]:
                if path[x] and e == path[x][-1]:
                    continue
                if y in dist:
                    if dist[y] == dist[x] + 1:
                        meets.setdefault(y, [path[y]]).append(path[x] + (e,))
                    continue
                dist[y] = dist[x] + 1
                path[y] = path[x] + (e,)
                queue.append(y)
        for ways in meets.values():
            for j in range(len(ways)):
                for t in range(j + 1, len(ways)):
                    cycles.add(frozenset(ways[j]) | frozenset(ways[t]))
    return int(g), cycles


def lift(q: BipartiteGraph, s: Iterable[int]) -> BipartiteGraph:
    """The 2-lift keeping edges with index in ``s`` parallel and crossing the rest.

    Copy ``t`` of left vertex ``l`` is ``l + t * n_left`` (same on the right).
    """
    keep = set(s)
    nl, nr = q.n_left, q.n_right
    edges = []
    for e, (l, r) in enumerate(q.edges):
        if e in keep:
            edges += [(l, r), (l + nl, r + nr)]
        else:
            edges += [(l, r + nr), (l + nl, r)]
    return BipartiteGraph(2 * nl, 2 * nr, tuple(edges))


def _improve(cycles: List[FrozenSet[int]], n_edges: int, rng: random.Random) -> Tuple[int, Set[int]]:
    """Draw a uniform S, then flip single edges while that lowers the even-cycle count."""
    s = {e for e in range(n_edges) if rng.random() < 0.5}
    parity = [len(c & s) % 2 for c in cycles]
    touching: Dict[int, List[int]] = {}
    for j, c in enumerate(cycles):
        for e in c:
            touching.setdefault(e, []).append(j)
    improved = True
    while improved:
        improved = False
        order = sorted(touching)
        rng.shuffle(order)
        for e in order:
            gain = sum(1 if parity[j] == 0 else -1 for j in touching[e])
            if gain > 0:
                s ^= {e}
                for j in touching[e]:
                    parity[j] ^= 1
                improved = True
    return 2 * parity.count(0), s


@dataclass
class GenerationLog:
    """One entry per accepted lift: ``(vertices, girth, shortest-cycle count)`` before lifting."""

    steps: List[Tuple[int, int, int]] = field(default_factory=list)


def high_girth_biregular(a: int, b: int, g: int, seed: int, max_vertices: int = 1 << 14,
                         attempts: int = 8, log: Optional[GenerationLog] = None) -> BipartiteGraph:
    """An ``(a, b)``-biregular graph (left degree ``a``) with girth at least ``g``.

    Starts from the complete bipartite graph with ``b`` left and ``a`` right
    vertices and applies 2-lifts that strictly reduce the number of shortest
    cycles.  Raises :class:`ResourceBudgetError` when the next lift would
    exceed ``max_vertices`` or no improving lift is found.
    """
    if a < 2 or b < 2:
        raise DomainError("degrees must be at least 2")
    rng = random.Random(seed)
    q = complete_bipartite(b, a)
    while True:
        cur, cycles = shortest_cycles(q)
        if cur >= g:
            return q
        if 2 * q.n_vertices > max_vertices:
            raise ResourceBudgetError(f"girth {cur} after reaching {q.n_vertices} vertices; "
                                      f"the next lift exceeds the budget of {max_vertices}", cur)
        ordered = sorted(cycles, key=sorted)
        best = None
        for _ in range(attempts):
            count, s = _improve(ordered, len(q.edges), rng)
            if best is None or count < best[0]:
                best = (count, s)
            if count == 0:
                break
        if best[0] >= len(cycles):
            raise ResourceBudgetError(f"no improving lift found in {attempts} attempts at girth {cur}", cur)
        if log is not None:
            log.steps.append((q.n_vertices, cur, len(cycles)))
        nxt = lift(q, best[1])
        after, after_cycles = shortest_cycles(nxt)
        expected = best[0]
        observed = len(after_cycles) if after == cur else 0
        if observed != expected:
            raise ConstructionError(f"lift produced {observed} shortest cycles, parity count predicted {expected}")
        q = nxt


# -- the instances S and S_k -------------------------------------------------

@dataclass(frozen=True)
class LowerBoundParams:
    d_i: int
    d_k: int
    s: int
    r: int

    def __post_init__(self):
        if self.d_i < 2 or self.d_k < 2:
            raise DomainError("degrees must be at least 2")
        if self.s < 0:
            raise DomainError("s must be nonnegative")
        if self.r <= 0 or self.r % 4:
            raise DomainError("r must be a positive multiple of 4")

    @property
    def g(self) -> int:
        return 2 * (4 * self.s + 2 + self.r) + 1

    @property
    def ball_radius(self) -> int:
        return 4 * self.s + 2 + self.r

    @property
    def path_length(self) -> int:
        return 4 * self.s + 2


@dataclass(frozen=True)
class SLayout:
    """Id arithmetic for ``S``: original constraints, original objectives, then each path's interior."""

    q: BipartiteGraph
    s: int

    @property
    def interior(self) -> int:
        return 4 * self.s + 1

    def constraint_id(self, l: int) -> int:
        return l

    def objective_id(self, r: int) -> int:
        return self.q.n_left + r

    def path_vertex(self, e: int, position: int) -> int:
        """Vertex at ``position`` (0 = the original constraint, ``4s+2`` = the original objective)."""
        l, r = self.q.edges[e]
        if position == 0:
            return self.constraint_id(l)
        if position == 4 * self.s + 2:
            return self.objective_id(r)
        return self.q.n_left + self.q.n_right + e * self.interior + position - 1

    @property
    def original_constraints(self) -> List[int]:
        return list(range(self.q.n_left))

    @property
    def original_objectives(self) -> List[int]:
        return [self.objective_id(r) for r in range(self.q.n_right)]

    def layer(self, j: int) -> List[int]:
        """Agents whose nearest original constraint is at distance ``2j+1``."""
        if not 0 <= j <= 2 * self.s:
            raise DomainError(f"layer index must lie in 0..{2 * self.s}")
        return [self.path_vertex(e, 2 * j + 1) for e in range(len(self.q.edges))]

    def layers(self) -> List[List[int]]:
        return [self.layer(j) for j in range(2 * self.s + 1)]


def build_S(q: BipartiteGraph, params: LowerBoundParams,
            id_mode: IdMode = IdMode.UNIQUE_IDS) -> MaxMinInstance:
    """Replace every skeleton edge by a path with ``2s+1`` agents.

    Ports are assigned by sweeping the skeleton edges in order and each path
    from its constraint end.
    """
    if not q.is_biregular(params.d_i, params.d_k):
        raise ValidationError(ValidationReport([Violation(
            "degree bound", "Q", f"skeleton is not ({params.d_i}, {params.d_k})-biregular")]))
    lay = SLayout(q, params.s)
    length = params.path_length
    agents, constraints, objectives = [], list(lay.original_constraints), list(lay.original_objectives)
    links = []
    for e in range(len(q.edges)):
        for pos in range(1, length):
            x = lay.path_vertex(e, pos)
            if pos % 2 == 1:
                agents.append(x)
            elif pos % 4 == 2:
                objectives.append(x)
            else:
                constraints.append(x)
        for pos in range(1, length, 2):
            v = lay.path_vertex(e, pos)
            for other_pos in (pos - 1, pos + 1):
                other = lay.path_vertex(e, other_pos)
                # a = 1 on constraints, c = 1 at original objectives, d_k - 1 on path objectives
                coef = 1 if other_pos % 4 == 0 or other_pos == length else params.d_k - 1
                links.append((v, other, coef))
    return build_instance(agents, constraints, objectives, links, id_mode=id_mode,
                          delta_i=params.d_i, delta_k=params.d_k)


def utility_upper_bound(d_i: int, d_k: int, s: int) -> Fraction:
    """Upper bound on the optimum of ``S`` from layer averaging."""
    if d_i < 2 or d_k < 2 or s < 0:
        raise DomainError("need d_i, d_k >= 2 and s >= 0")
    return Fraction(d_k, d_i) * Fraction(d_k - 1 + d_k * d_i * s - d_i * s, d_k - 1 + d_k * s)


def bfs_distances(inst: MaxMinInstance, start: int, limit: Optional[int] = None) -> Dict[int, int]:
    dist = {start: 0}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        if limit is not None and dist[x] == limit:
            continue
        for y in inst.neighbours(x):
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def build_Sk(S: MaxMinInstance, k: int, params: LowerBoundParams) -> MaxMinInstance:
    """The subinstance induced by the ball of radius ``4s+2+r`` around ``k``.

    Ids, coefficients and ports are copied; a boundary vertex keeps only its
    inward edge, and its single port becomes 1.
    """
    if S.role_of(k) is not Role.OBJECTIVE:
        raise RoleError(f"vertex {k} is not an objective")
    radius = params.ball_radius
    dist = bfs_distances(S, k, radius)
    inside = set(dist)
    edges = [e for e in S.edges if e.u in inside and e.v in inside]
    if len(edges) != len(inside) - 1:
        raise ConstructionError(f"ball of radius {radius} around {k} contains a cycle "
                                f"({len(edges)} edges on {len(inside)} vertices)")
    leaves = [x for x in inside if dist[x] == radius]
    bad = [x for x in leaves if S.role[x] is not Role.CONSTRAINT]
    if bad:
        raise ConstructionError(f"boundary vertices {sorted(bad)[:5]} are not constraints")
    boundary = set(leaves)
    out = []
    for e in edges:
        out.append(Edge(e.u, e.v, 1 if e.u in boundary else e.port_u, 1 if e.v in boundary else e.port_v))
    pick = lambda ids: tuple(x for x in sorted(ids) if x in inside)  # noqa: E731
    a = {key: val for key, val in S.a.items() if key[0] in inside and key[1] in inside}
    c = {key: val for key, val in S.c.items() if key[0] in inside and key[1] in inside}
    return MaxMinInstance(pick(S.agents), pick(S.constraints), pick(S.objectives), tuple(out), a, c,
                          S.id_mode, S.delta_i, S.delta_k)


def appendix_solution(Sk: MaxMinInstance, k: int, d_i: Optional[int] = None,
                      d_k: Optional[int] = None) -> Assignment:
    """Closed-form feasible solution of ``S_k`` with utility above ``d_k - 1``.

    ``D = max(d_i, d_k + 1)``; an agent at distance ``4j+1`` from ``k`` gets
    ``1 - 1/D^(2j+1)`` and one at distance ``4j+3`` gets ``1/D^(2j+2)``.
    Degrees default to the largest constraint degree and the degree of ``k``.
    """
    if Sk.role_of(k) is not Role.OBJECTIVE:
        raise RoleError(f"vertex {k} is not an objective")
    if d_k is None:
        d_k = Sk.degree(k)
    if d_i is None:
        d_i = max((Sk.degree(i) for i in Sk.constraints), default=1)
    big = max(d_i, d_k + 1)
    dist = bfs_distances(Sk, k)
    x = {}
    for v in sorted(Sk.agents):
        d = dist.get(v)
        if d is None:
            raise ConstructionError(f"agent {v} is not connected to {k}")
        j, rem = divmod(d, 4)
        x[v] = 1 - Fraction(1, big ** (2 * j + 1)) if rem == 1 else Fraction(1, big ** (2 * j + 2))
    return x


def nearest_original_objective(S: MaxMinInstance, h: int, originals: Iterable[int]) -> int:
    """The closest member of ``originals`` to ``h``; ties go to the smallest id."""
    dist = bfs_distances(S, h)
    cands = [(dist[k], k) for k in originals if k in dist]
    if not cands:
        raise ConstructionError(f"no original objective reachable from {h}")
    return min(cands)[1]


# -- growth ------------------------------------------------------------------

def relative_growth(inst: MaxMinInstance, R: int) -> Fraction:
    """Max of ``|V ∩ B(v, r+2)| / |V ∩ B(v, r)|`` over agents ``v`` and ``R <= r <= ecc(v)``."""
    if R < 1:
        raise DomainError("R must be at least 1")
    worst = Fraction(1)
    agents = set(inst.agents)
    for v in sorted(inst.agents):
        dist = bfs_distances(inst, v)
        ecc = max(dist.values())
        counts = [0] * (ecc + 3)
        for x, d in dist.items():
            if x in agents:
                counts[d] += 1
        for d in range(1, len(counts)):
            counts[d] += counts[d - 1]
        for r in range(R, ecc + 1):
            ratio = Fraction(counts[r + 2], counts[r])
            if ratio > worst:
                worst = ratio
    return worst


def growth_bound(j: int, s: int) -> Fraction:
    if j < 1 or s < 0:
        raise DomainError("need j >= 1 and s >= 0")
    return 1 + Fraction(2 ** j, (2 ** j - 1) * (2 * s + 1))
