"""Distinct link graphs ``L*_S[B]`` with typed edges and loops."""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass, field

from .abelian import AbelianGroup, GroupSubset, index2_subgroups, iter_bits

__all__ = [
    "LinkGraph",
    "DegreeProfile",
    "EdgeCounts",
    "build_link_graph",
    "degree_profile",
    "edge_counts",
    "component_census",
    "classify_component",
    "is_index2_coset",
]


@dataclass
class LinkGraph:
    """Vertices ``B``; ``adjacency[x]`` is a group-element bitset of neighbours of ``x``.

    Loops are kept in ``loops`` and never appear in ``adjacency``.
    """

    group: AbelianGroup
    source: GroupSubset
    vertices: GroupSubset
    adjacency: dict[int, int]
    edge_type: dict[tuple[int, int], int]
    loops: GroupSubset
    distinct: bool = True

    def edges(self) -> list[tuple[int, int]]:
        return sorted(self.edge_type)

    def degree(self, x: int) -> int:
        return self.adjacency[x].bit_count()

    @property
    def n_edges(self) -> int:
        return len(self.edge_type)

    def to_simple_graph(self):
        """Relabel onto ``0..|B|-1`` (ascending group index); looped vertices become forbidden."""
        from .misolver import SimpleGraph

        labels = self.vertices.to_list()
        pos = {x: i for i, x in enumerate(labels)}
        g = SimpleGraph(len(labels))
        for x, y in self.edge_type:
            g.add_edge(pos[x], pos[y])
        for x in self.loops:
            g.forbidden |= 1 << pos[x]
        return g, labels

    def to_dict(self) -> dict:
        return {
            "group": self.group.spec,
            "S": self.source.to_list(),
            "vertices": self.vertices.to_list(),
            "edges": [[x, y, self.edge_type[(x, y)]] for x, y in self.edges()],
            "loops": self.loops.to_list(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LinkGraph":
        from .abelian import parse_group_spec

        G = parse_group_spec(data["group"])
        B = G.subset(data["vertices"])
        adjacency = {x: 0 for x in B}
        edge_type = {}
        for x, y, t in data["edges"]:
            edge_type[(x, y)] = t
            adjacency[x] |= 1 << y
            adjacency[y] |= 1 << x
        return cls(G, G.subset(data["S"]), B, adjacency, edge_type, G.subset(data["loops"]))


def build_link_graph(
    G: AbelianGroup, S: GroupSubset, B: GroupSubset, distinct: bool = True
) -> LinkGraph:
    """Link graph of ``S`` on ``B``.

    ``xy`` is an edge when some ``s`` in ``S`` completes a (distinct) Schur
    triple with ``x`` and ``y``.  With ``distinct=True`` a loop sits at ``x``
    when two distinct elements of ``S`` complete a distinct triple with it;
    with ``distinct=False`` a loop marks any ``x`` for which ``S | {x}`` is
    not sum-free.  An edge is type 1 if ``x - y`` lies in ``(S | -S) - {0}``
    and type 2 otherwise.
    """
    add, sub = G.add, G.sub
    svals = S.to_list()
    pm = S.bits | S.negate().bits
    pm &= ~1
    adjacency = {x: 0 for x in B}
    edge_type: dict[tuple[int, int], int] = {}
    for x in B:
        for s in svals:
            for y, triple in (
                (sub(s, x), (x, sub(s, x), s)),
                (add(x, s), (x, s, add(x, s))),
                (sub(x, s), (sub(x, s), s, x)),
            ):
                if y == x or not B.bits >> y & 1:
                    continue
                if distinct and len(set(triple)) < 3:
                    continue
                adjacency[x] |= 1 << y
                adjacency[y] |= 1 << x
                key = (min(x, y), max(x, y))
                if key not in edge_type:
                    edge_type[key] = 1 if pm >> sub(x, y) & 1 else 2
    loops = 0
    if distinct:
        for i, s in enumerate(svals):
            for t in svals[i + 1 :]:
                for x, triple in (
                    (add(s, t), (s, t, add(s, t))),
                    (sub(s, t), (sub(s, t), t, s)),
                    (sub(t, s), (sub(t, s), s, t)),
                ):
                    if B.bits >> x & 1 and len(set(triple)) == 3:
                        loops |= 1 << x
    else:
        from .sumfree import can_extend

        for x in B:
            if not can_extend(S, x, distinct=False):
                loops |= 1 << x
    return LinkGraph(G, S, B, adjacency, edge_type, GroupSubset(G, loops), distinct)


def is_index2_coset(A: GroupSubset) -> bool:
    """``A`` is the non-identity coset of some index-2 subgroup."""
    G = A.group
    if G.n % 2:
        return False
    return any(H.members.complement() == A for H in index2_subgroups(G))


@dataclass
class DegreeProfile:
    d1: dict[int, int]
    d2: dict[int, int]
    max_degree: int
    min_degree: int
    claims_checked: bool
    claims_hold: bool | None
    failures: list[str] = field(default_factory=list)


def degree_profile(L: LinkGraph) -> DegreeProfile:
    """Per-vertex type-1/type-2 degrees plus the regularity claims.

    The claims (``d1 = |(S|-S) - {0}|``, ``d2 <= |S|``, no loops, and
    ``Delta <= 2 delta (+1 when 0 in S = -S)``) are only asserted when ``B``
    is an index-2 coset avoiding ``S``; otherwise a warning is issued and
    only degrees are returned.
    """
    G, S, B = L.group, L.source, L.vertices
    d1 = {x: 0 for x in B}
    d2 = {x: 0 for x in B}
    for (x, y), t in L.edge_type.items():
        target = d1 if t == 1 else d2
        target[x] += 1
        target[y] += 1
    degrees = [d1[x] + d2[x] for x in B]
    dmax = max(degrees, default=0)
    dmin = min(degrees, default=0)

    if not (is_index2_coset(B) and S.bits & B.bits == 0):
        warnings.warn("link graph is not over an index-2 coset disjoint from S; claim checks skipped")
        return DegreeProfile(d1, d2, dmax, dmin, False, None)

    failures = []
    pm_size = ((S | S.negate()).bits & ~1).bit_count()
    for x in B:
        if d1[x] != pm_size:
            failures.append(f"d1({x})={d1[x]} != {pm_size}")
        if d2[x] > len(S):
            failures.append(f"d2({x})={d2[x]} > |S|={len(S)}")
    if len(L.loops):
        failures.append(f"loops at {L.loops.to_list()}")
    symmetric_with_zero = 0 in S and S.negate() == S
    slack = 1 if symmetric_with_zero else 0
    if dmax > 2 * dmin + slack:
        failures.append(f"Delta={dmax} > 2*delta+{slack}={2 * dmin + slack}")
    return DegreeProfile(d1, d2, dmax, dmin, True, not failures, failures)


@dataclass
class EdgeCounts:
    e1: int
    e2: int
    total: int
    lower_bound: float
    bound_holds: bool


def edge_counts(L: LinkGraph) -> EdgeCounts:
    G, S, A = L.group, L.source, L.vertices
    e1 = sum(1 for t in L.edge_type.values() if t == 1)
    e2 = len(L.edge_type) - e1
    pm = S | S.negate()
    pm_size = (pm.bits & ~1).bit_count()
    bound = (pm_size + len(S)) / 2 * len(A) - len(S) * (len(pm) + 1) * 2**G.r
    return EdgeCounts(e1, e2, e1 + e2, bound, e1 + e2 >= bound)


def _components(adjacency: dict[int, int]) -> list[int]:
    seen = 0
    comps = []
    for v in adjacency:
        if seen >> v & 1:
            continue
        comp = 1 << v
        frontier = comp
        while frontier:
            nxt = 0
            for u in iter_bits(frontier):
                nxt |= adjacency[u]
            frontier = nxt & ~comp
            comp |= nxt
        seen |= comp
        comps.append(comp)
    return comps


def classify_component(adjacency: dict[int, int], comp: int) -> str:
    """Name a connected component by (size, degree sequence, triangle count)."""
    verts = list(iter_bits(comp))
    size = len(verts)
    degs = sorted((adjacency[v] & comp).bit_count() for v in verts)
    triangles = 0
    for v in verts:
        nv = adjacency[v] & comp
        for u in iter_bits(nv):
            if u > v:
                triangles += (nv & adjacency[u] & ~((1 << (u + 1)) - 1)).bit_count()
    if size == 1:
        return "K1"
    if size == 2:
        return "K2"
    if size == 3 and degs == [2, 2, 2]:
        return "K3"
    if size == 4 and degs == [3, 3, 3, 3]:
        return "K4"
    if size == 4 and degs == [2, 2, 2, 2] and triangles == 0:
        return "C4"
    if size == 6 and degs == [3] * 6 and triangles == 2:
        return "C3xK2"
    return f"other({size})"


def component_census(L) -> Counter:
    """Multiset of component names over ``K1, K2, K3, K4, C4, C3xK2, other(size)``.

    Accepts a ``LinkGraph`` or a ``SimpleGraph``.
    """
    if isinstance(L, LinkGraph):
        adjacency = L.adjacency
    else:
        adjacency = {v: L.adj[v] for v in range(L.n)}
    return Counter(classify_component(adjacency, c) for c in _components(adjacency))
