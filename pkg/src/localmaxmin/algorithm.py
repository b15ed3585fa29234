"""The local approximation algorithm for bipartite max-min LPs.

Each agent ``u`` looks at its radius ``8L+3`` view, pads it to a
``(delta_i, delta_k)``-regular tree with virtual nodes, and for every
objective ``k`` within distance ``4L+1`` solves the tree of radius ``4L+2``
around ``k``.  Its output is ``q`` times the sum of its own values in those
solutions.
"""

from __future__ import annotations

import os
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, MutableMapping, Optional, Tuple

from .errors import DomainError, UnsupportedInstanceError, ValidationError
from .lp import solve_max_min
from .model import (Assignment, Edge, IdMode, MaxMinInstance, Role, ValidationReport, Violation,
                    validate_instance)
from .unfolding import LocalView, ViewNode, local_view, view_code


@dataclass(frozen=True)
class AlgoParams:
    delta_i: int
    delta_k: int
    L: int

    def __post_init__(self):
        if self.delta_i < 2 or self.delta_k < 2:
            raise DomainError("degree bounds must be at least 2")
        if self.L < 0:
            raise DomainError("L must be nonnegative")

    @property
    def horizon(self) -> int:
        return 8 * self.L + 3

    @property
    def region_radius(self) -> int:
        """Objectives within this distance of an agent contribute to it."""
        return 4 * self.L + 1

    @property
    def subproblem_radius(self) -> int:
        return 4 * self.L + 2

    @property
    def q(self) -> Fraction:
        return averaging_factor(self)

    @property
    def alpha(self) -> Fraction:
        return approx_ratio(self)


@dataclass(frozen=True)
class RegionSizes:
    size_kv: int
    size_ki: int
    size_boundary: int


def n_of(l: int, p: AlgoParams) -> int:
    if l < 0:
        raise DomainError("l must be nonnegative")
    b = (p.delta_i - 1) * (p.delta_k - 1)
    return sum(b ** j for j in range(l))


def region_sizes(l: int, p: AlgoParams) -> RegionSizes:
    n = n_of(l, p)
    di, dk = p.delta_i, p.delta_k
    return RegionSizes(1 + (di - 1) * dk * n, di * n, 1 + (di * dk - di - dk) * n)


def averaging_factor(p: AlgoParams) -> Fraction:
    di, dk = p.delta_i, p.delta_k
    return Fraction(1, di + di * (di - 1) * (dk - 1) * n_of(p.L, p))


def approx_ratio(p: AlgoParams) -> Fraction:
    """``1 / (q * |K(v, L)|)``; valid for every L."""
    return 1 / (averaging_factor(p) * region_sizes(p.L, p).size_kv)


def approx_ratio_closed(p: AlgoParams) -> Fraction:
    """Equivalent form ``di * (1 - 1/(dk + 1/((di-1) n(L))))``; needs L >= 1."""
    if p.L < 1:
        raise DomainError("the closed form divides by n(L) and needs L >= 1")
    di, dk = p.delta_i, p.delta_k
    return di * (1 - 1 / (dk + Fraction(1, (di - 1) * n_of(p.L, p))))


def ratio_limit(delta_i: int, delta_k: int) -> Fraction:
    """The infimum of the ratio over L."""
    return delta_i * (1 - Fraction(1, delta_k))


# -- regularisation ----------------------------------------------------------

def _copy_tree(node: ViewNode, parent: Optional[ViewNode]) -> ViewNode:
    out = ViewNode(node.role, node.depth, node.port_up, node.port_down, node.coef,
                   node.vertex, node.virtual, [], parent)
    out.children = [_copy_tree(ch, out) for ch in node.children]
    return out


def regularize_view(view: LocalView, p: AlgoParams) -> LocalView:
    """Pad every constraint to ``delta_i`` agents and every objective to ``delta_k``.

    A virtual agent under a constraint gets ``a = 0`` and a virtual objective
    child with ``c = 1``; under an objective it gets ``c = 0`` and a virtual
    constraint child with ``a = 1``.  New ports continue after the existing
    ones; a virtual agent uses port 1 upward and port 2 downward.  Padding
    stops at the view radius.  The input view is not modified.
    """
    root = _copy_tree(view.root, None)
    radius = view.radius
    queue = deque([root])
    while queue:
        node = queue.popleft()
        if node.depth < radius and node.role in (Role.CONSTRAINT, Role.OBJECTIVE):
            _pad(node, radius, p)
        queue.extend(node.children)
    return LocalView(root, radius, view.id_mode)


def _pad(node: ViewNode, radius: int, p: AlgoParams) -> None:
    if node.role is Role.CONSTRAINT:
        want, far_role = p.delta_i, Role.OBJECTIVE
    else:
        want, far_role = p.delta_k, Role.CONSTRAINT
    deg = node.degree
    if deg > want:
        kind = "delta_i" if node.role is Role.CONSTRAINT else "delta_k"
        raise ValidationError(ValidationReport([Violation(
            "degree bound", f"view depth {node.depth}",
            f"{node.role.value} of degree {deg} exceeds {kind} = {want}")]))
    for port in range(deg + 1, want + 1):
        agent = ViewNode(Role.AGENT, node.depth + 1, port_up=1, port_down=port,
                         coef=Fraction(0), virtual=True, parent=node)
        node.children.append(agent)
        if agent.depth < radius:
            agent.children.append(ViewNode(far_role, agent.depth + 1, port_up=1, port_down=2,
                                           coef=Fraction(1), virtual=True, parent=agent))


def objectives_within(view: LocalView, depth: int) -> List[ViewNode]:
    """Objective nodes at depth <= ``depth``, in preorder."""
    return [n for n in view.nodes() if n.role is Role.OBJECTIVE and n.depth <= depth]


# -- subproblems -------------------------------------------------------------

@dataclass(eq=False)
class Subproblem:
    """A tree-shaped max-min LP rooted at objective ``root``.

    Ids are assigned in breadth-first order with neighbours visited by port,
    so two copies of the same surroundings produce identical instances.
    ``back_map`` sends subproblem agent ids to the view nodes they came from.
    """

    instance: MaxMinInstance
    root: int
    back_map: Dict[int, ViewNode]
    code: bytes
    index: Dict[int, int]  # id(view node) -> subproblem id

    def id_of(self, node: ViewNode) -> int:
        return self.index[id(node)]


def _incident(node: ViewNode) -> List[Tuple[int, ViewNode, int, Fraction]]:
    """``(port here, neighbour, port there, coefficient)`` sorted by port here."""
    out = [(ch.port_down, ch, ch.port_up, ch.coef) for ch in node.children]
    if node.parent is not None:
        out.append((node.port_up, node.parent, node.port_down, node.coef))
    out.sort(key=lambda t: t[0])
    return out


def build_subproblem(view: LocalView, k: ViewNode, p: AlgoParams) -> Subproblem:
    """The radius ``4L+2`` tree around objective node ``k`` of a regularized view."""
    if k.role is not Role.OBJECTIVE:
        raise DomainError("subproblems are rooted at objectives")
    if k.depth > p.region_radius:
        raise DomainError(f"objective at depth {k.depth} lies outside K(u, L) (radius {p.region_radius})")
    rho = p.subproblem_radius
    if k.depth + rho > view.radius:
        raise DomainError("view too shallow for this subproblem")

    order: List[ViewNode] = [k]
    index = {id(k): 0}
    dist = [0]
    links: List[Tuple[int, int, int, int, Fraction]] = []  # parent id, child id, port at parent, port at child, coef
    head = 0
    while head < len(order):
        x, d = order[head], dist[head]
        if d < rho:
            for port, nbr, nbr_port, coef in _incident(x):
                if id(nbr) in index:
                    continue
                j = len(order)
                index[id(nbr)] = j
                order.append(nbr)
                dist.append(d + 1)
                links.append((head, j, port, nbr_port, coef))
        head += 1

    # boundary nodes keep only their tree edge, so ports are renumbered by rank
    kept: Dict[int, List[int]] = {j: [] for j in range(len(order))}
    for pa, ch, pp, pc, _ in links:
        kept[pa].append(pp)
        kept[ch].append(pc)
    rank = {j: {port: r + 1 for r, port in enumerate(sorted(ports))} for j, ports in kept.items()}

    roles = {Role.AGENT: [], Role.CONSTRAINT: [], Role.OBJECTIVE: []}
    for j, n in enumerate(order):
        roles[n.role].append(j)
    edges, a, c = [], {}, {}
    for pa, ch, pp, pc, coef in links:
        if order[pa].role is Role.AGENT:
            agent, other = pa, ch
            e = Edge(agent, other, rank[pa][pp], rank[ch][pc])
        else:
            agent, other = ch, pa
            e = Edge(agent, other, rank[ch][pc], rank[pa][pp])
        edges.append(e)
        (a if order[other].role is Role.CONSTRAINT else c)[(other, agent)] = coef
    inst = MaxMinInstance(tuple(roles[Role.AGENT]), tuple(roles[Role.CONSTRAINT]),
                          tuple(roles[Role.OBJECTIVE]), tuple(edges), a, c,
                          IdMode.PORT_NUMBERING, p.delta_i, p.delta_k)
    back = {j: order[j] for j in roles[Role.AGENT]}
    return Subproblem(inst, 0, back, view_code(inst, 0, rho), index)


# -- the algorithm -----------------------------------------------------------

def check_supported(inst: MaxMinInstance, p: AlgoParams) -> None:
    report = validate_instance(inst)
    if not report.ok:
        raise ValidationError(report)
    if not inst.is_bipartite:
        raise UnsupportedInstanceError("not a bipartite max-min LP: every agent needs exactly one "
                                       "constraint and one objective")
    zero = [v for v in sorted(inst.agents) if inst.a[(inst.constraints_of(v)[0], v)] == 0]
    if zero:
        raise UnsupportedInstanceError(f"agents with a = 0 on their constraint are unsupported: {zero[:10]}")
    di, dk = inst.max_degrees
    problems = []
    if di > p.delta_i or (inst.delta_i is not None and inst.delta_i > p.delta_i):
        problems.append(Violation("degree bound", "delta_i",
                                  f"instance needs delta_i >= {max(di, inst.delta_i or 0)}, got {p.delta_i}"))
    if dk > p.delta_k or (inst.delta_k is not None and inst.delta_k > p.delta_k):
        problems.append(Violation("degree bound", "delta_k",
                                  f"instance needs delta_k >= {max(dk, inst.delta_k or 0)}, got {p.delta_k}"))
    if problems:
        raise ValidationError(ValidationReport(problems))


SolutionCache = MutableMapping[bytes, Tuple[Fraction, ...]]


def agent_value(inst: MaxMinInstance, u: int, p: AlgoParams, cache: Optional[SolutionCache] = None,
                subproblems: Optional[Dict[bytes, Subproblem]] = None) -> Fraction:
    """The output of agent ``u``; reads nothing beyond ``u``'s radius ``8L+3`` view."""
    if cache is None:
        cache = {}
    view = regularize_view(local_view(inst, u, p.horizon), p)
    total = Fraction(0)
    for k in objectives_within(view, p.region_radius):
        sub = build_subproblem(view, k, p)
        sol = cache.get(sub.code)
        if sol is None:
            _, x = solve_max_min(sub.instance)
            sol = tuple(x.get(j, Fraction(0)) for j in range(len(sub.instance.role)))
            cache[sub.code] = sol
        if subproblems is not None:
            subproblems.setdefault(sub.code, sub)
        total += sol[sub.id_of(view.root)]
    return averaging_factor(p) * total


def _run_chunk(args) -> List[Tuple[int, Fraction]]:
    inst, p, agents = args
    cache: Dict[bytes, Tuple[Fraction, ...]] = {}
    return [(u, agent_value(inst, u, p, cache)) for u in agents]


def run_local(inst: MaxMinInstance, p: AlgoParams, workers: Optional[int] = None,
              subproblems: Optional[Dict[bytes, Subproblem]] = None) -> Assignment:
    """Run the algorithm at every agent.

    ``workers > 1`` evaluates agents in a process pool; the result is
    identical to the sequential run.  ``subproblems``, if given, collects
    every distinct subproblem by code (sequential runs only).
    """
    check_supported(inst, p)
    agents = sorted(inst.agents)
    if workers and workers > 1 and subproblems is None and len(agents) > 1:
        size = max(1, -(-len(agents) // (workers * 4)))
        chunks = [(inst, p, agents[j:j + size]) for j in range(0, len(agents), size)]
        with ProcessPoolExecutor(max_workers=min(workers, os.cpu_count() or 1)) as pool:
            pairs = [pair for part in pool.map(_run_chunk, chunks) for pair in part]
        return dict(sorted(pairs))
    cache: Dict[bytes, Tuple[Fraction, ...]] = {}
    return {u: agent_value(inst, u, p, cache, subproblems) for u in agents}


def safe_baseline(inst: MaxMinInstance) -> Assignment:
    """``x_v = min_i 1/(|V_i| a_iv)`` over constraints with ``a_iv > 0``; 1 when there are none."""
    x = {}
    for v in sorted(inst.agents):
        caps = [1 / (len(inst.agents_of(i)) * inst.a[(i, v)])
                for i in inst.constraints_of(v) if inst.a[(i, v)] > 0]
        x[v] = min(caps) if caps else Fraction(1)
    return x
