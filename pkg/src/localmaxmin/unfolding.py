"""Radius-r local views: depth-truncated unfoldings built from non-backtracking walks.

A view is what a port-numbering algorithm at vertex ``v`` can learn in ``r``
rounds: the tree of all walks of length at most ``r`` from ``v`` that never
immediately traverse the same edge back. Revisits caused by cycles show up as
fresh tree nodes. Original vertex ids are only recorded in unique-ids mode.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Tuple, Union

from .model import IdMode, MaxMinInstance, Role

Label = Union[Role, str]

_ROLE_CHAR = {Role.AGENT: "A", Role.CONSTRAINT: "C", Role.OBJECTIVE: "O"}


@dataclass(eq=False)
class ViewNode:
    """One node of a view tree.

    ``port_up`` is the port at this node on the edge to its parent and
    ``port_down`` the port at the parent on that same edge; ``coef`` is the
    edge's coefficient. Children are kept sorted by ``port_down``.
    """

    role: Label
    depth: int
    port_up: Optional[int] = None
    port_down: Optional[int] = None
    coef: Optional[Fraction] = None
    vertex: Optional[int] = None
    virtual: bool = False
    children: List["ViewNode"] = field(default_factory=list)
    parent: Optional["ViewNode"] = field(default=None, repr=False)

    def neighbours(self) -> List["ViewNode"]:
        return self.children + ([self.parent] if self.parent is not None else [])

    @property
    def degree(self) -> int:
        return len(self.children) + (self.parent is not None)


@dataclass(eq=False)
class LocalView:
    root: ViewNode
    radius: int
    id_mode: IdMode = IdMode.PORT_NUMBERING

    def nodes(self) -> Iterator[ViewNode]:
        """Preorder traversal, children in port order."""
        stack = [self.root]
        while stack:
            n = stack.pop()
            yield n
            stack.extend(reversed(n.children))

    def __len__(self) -> int:
        return sum(1 for _ in self.nodes())

    def levels(self) -> List[List[ViewNode]]:
        out: List[List[ViewNode]] = []
        frontier = [self.root]
        while frontier:
            out.append(frontier)
            frontier = [c for n in frontier for c in n.children]
        return out


@dataclass(eq=False)
class PortGraph:
    """A plain port-numbered graph with string labels, for views of non-LP graphs.

    ``edges`` holds ``(u, v, port_u, port_v)``; labels default to ``str(vertex)``.
    """

    edges: List[Tuple[int, int, int, int]]
    labels: Mapping[int, str] = field(default_factory=dict)
    id_mode: IdMode = IdMode.PORT_NUMBERING

    def __post_init__(self):
        self.ports: Dict[int, List[Tuple[int, int, int]]] = defaultdict(list)
        for u, v, pu, pv in self.edges:
            self.ports[u].append((pu, v, pv))
            self.ports[v].append((pv, u, pu))
        for lst in self.ports.values():
            lst.sort()
        self.role = {x: self.labels.get(x, str(x)) for x in self.ports}

    @classmethod
    def from_adjacency(cls, adjacency: Mapping[int, List[int]], labels: Mapping[int, str] = None,
                       id_mode: IdMode = IdMode.PORT_NUMBERING) -> "PortGraph":
        """Ports follow the order of each adjacency list."""
        edges, seen = [], set()
        for u, nbrs in adjacency.items():
            for v in nbrs:
                if frozenset((u, v)) in seen:
                    continue
                seen.add(frozenset((u, v)))
                edges.append((u, v, adjacency[u].index(v) + 1, adjacency[v].index(u) + 1))
        return cls(edges, dict(labels or {}), id_mode)

    def coef(self, x: int, y: int) -> Optional[Fraction]:
        return None


Graph = Union[MaxMinInstance, PortGraph]


def local_view(inst: Graph, v: int, r: int) -> LocalView:
    """The depth-``r`` truncated unfolding of ``inst`` rooted at ``v``."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    if v not in inst.role:
        raise KeyError(f"unknown vertex {v}")
    uid = inst.id_mode is IdMode.UNIQUE_IDS
    root = ViewNode(inst.role[v], 0, vertex=v if uid else None)
    queue = deque([(root, v)])
    while queue:
        node, host = queue.popleft()
        if node.depth == r:
            continue
        for port, nbr, nbr_port in inst.ports[host]:
            if port == node.port_up:
                continue  # the edge we arrived by: no immediate backtracking
            child = ViewNode(inst.role[nbr], node.depth + 1, port_up=nbr_port, port_down=port,
                             coef=inst.coef(host, nbr), vertex=nbr if uid else None, parent=node)
            node.children.append(child)
            queue.append((child, nbr))
    return LocalView(root, r, inst.id_mode)


def truncate(view: LocalView, r: int) -> LocalView:
    def copy(n: ViewNode, parent: Optional[ViewNode]) -> ViewNode:
        m = ViewNode(n.role, n.depth, n.port_up, n.port_down, n.coef, n.vertex, n.virtual, [], parent)
        if n.depth < r:
            m.children = [copy(ch, m) for ch in n.children]
        return m

    return LocalView(copy(view.root, None), min(r, view.radius), view.id_mode)


def _label(role: Label) -> str:
    if isinstance(role, Role):
        return _ROLE_CHAR[role]
    s = str(role)
    return f"L{len(s)}:{s}"


def _coef(x: Optional[Fraction]) -> str:
    return "~" if x is None else f"{x.numerator}/{x.denominator}"


def node_code(node: ViewNode) -> str:
    """Canonical string of the subtree below ``node`` (edge to its parent excluded)."""
    head = _label(node.role)
    if node.virtual:
        head += "*"
    if node.vertex is not None:
        head += f"#{node.vertex}"
    parts = [f"{c.port_down}>{c.port_up}:{_coef(c.coef)}={node_code(c)}" for c in node.children]
    return head + "(" + ",".join(parts) + ")"


def canonical_code(view: LocalView) -> bytes:
    """Equal codes iff the views are isomorphic as rooted port-, role- and coefficient-labelled trees.

    Children are ordered by the parent-side port, which is unique per node, so
    no canonisation search is needed.
    """
    return f"r{view.radius}|{node_code(view.root)}".encode("utf-8")


def view_code(inst: Graph, v: int, r: int) -> bytes:
    return canonical_code(local_view(inst, v, r))


def render(view: LocalView) -> str:
    """Indented debug rendering, one node per line."""
    lines = []

    def walk(n: ViewNode, indent: int):
        label = n.role.value if isinstance(n.role, Role) else str(n.role)
        bits = [label]
        if n.port_down is not None:
            bits.append(f"via {n.port_down}->{n.port_up}")
        if n.coef is not None:
            bits.append(f"coef {_coef(n.coef)}")
        if n.vertex is not None:
            bits.append(f"id {n.vertex}")
        if n.virtual:
            bits.append("virtual")
        lines.append("  " * indent + " ".join(bits))
        for ch in n.children:
            walk(ch, indent + 1)

    walk(view.root, 0)
    return "\n".join(lines)


def consistency_check(inst: MaxMinInstance, x: Mapping[int, Fraction], r: int) -> List[Tuple[int, int]]:
    """All agent pairs with identical radius-``r`` views but different values.

    An empty result certifies that ``x`` is consistent with being computed by
    a deterministic ``r``-local algorithm on this instance.
    """
    groups: Dict[bytes, List[int]] = defaultdict(list)
    for v in sorted(inst.agents):
        groups[view_code(inst, v, r)].append(v)
    bad = []
    for members in groups.values():
        for i, u in enumerate(members):
            for w in members[i + 1:]:
                if x[u] != x[w]:
                    bad.append((u, w))
    return sorted(bad)


def tree_distances(start: ViewNode, limit: Optional[int] = None) -> Dict[int, Tuple[ViewNode, int]]:
    """Distances from ``start`` to every view node (keyed by ``id(node)``) within ``limit``."""
    out = {id(start): (start, 0)}
    queue = deque([start])
    while queue:
        n = queue.popleft()
        d = out[id(n)][1]
        if limit is not None and d == limit:
            continue
        for m in n.neighbours():
            if id(m) not in out:
                out[id(m)] = (m, d + 1)
                queue.append(m)
    return out
