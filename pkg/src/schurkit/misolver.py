"""Maximal independent sets: exact counting, classical bounds, and a perfect-matching scan."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Iterator

import numpy as np

from .abelian import iter_bits

__all__ = [
    "SimpleGraph",
    "MisResult",
    "ScanReport",
    "MIS_CAP",
    "MATCHING_CAP",
    "DEFAULT_SEED",
    "enumerate_mis",
    "iter_mis",
    "mis_bruteforce",
    "named_graph",
    "matching",
    "complete",
    "cycle",
    "path",
    "triangles",
    "bridge_triangles",
    "cartesian_product",
    "disjoint_union",
    "bound_moon_moser",
    "bound_hujter_tuza",
    "bound_blst",
    "bound_triangle_sparse",
    "bound_stability",
    "has_perfect_matching",
    "parse_graph_text",
    "conjecture53_scan",
    "count_mis_over_matching",
]

MIS_CAP = 64
MATCHING_CAP = 24
DEFAULT_SEED = 20240601
EXHAUSTIVE_CAP = 8
RANDOM_CAP = 20
BLOCK = 1 << 14
CHUNK = 1 << 20


class SimpleGraph:
    """Loopless undirected graph on ``0..n-1`` with bitset adjacency.

    ``forbidden`` marks vertices that carry a loop upstream; they are
    deleted before any MIS computation.
    """

    def __init__(self, n: int, edges=(), forbidden: int = 0):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        self.n = n
        self.adj = [0] * n
        self.forbidden = forbidden
        for u, v in edges:
            self.add_edge(u, v)

    def add_edge(self, u: int, v: int) -> None:
        if u == v:
            raise ValueError(f"self-loop at {u}; mark it as forbidden instead")
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError(f"edge ({u}, {v}) out of range for {self.n} vertices")
        self.adj[u] |= 1 << v
        self.adj[v] |= 1 << u

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in iter_bits(self.adj[u]) if u < v]

    @property
    def n_edges(self) -> int:
        return sum(a.bit_count() for a in self.adj) // 2

    def degrees(self) -> list[int]:
        return [a.bit_count() for a in self.adj]

    @property
    def max_degree(self) -> int:
        return max(self.degrees(), default=0)

    @property
    def min_degree(self) -> int:
        return min(self.degrees(), default=0)

    def is_triangle_free(self) -> bool:
        return all(not (self.adj[u] & self.adj[v]) for u, v in self.edges())

    def induced(self, keep: int) -> "SimpleGraph":
        """Subgraph induced on the vertices of bitset ``keep``, relabelled in order."""
        verts = list(iter_bits(keep))
        pos = {v: i for i, v in enumerate(verts)}
        g = SimpleGraph(len(verts))
        for v in verts:
            for u in iter_bits(self.adj[v] & keep):
                if v < u:
                    g.add_edge(pos[v], pos[u])
        return g

    def delete(self, remove: int) -> "SimpleGraph":
        return self.induced(((1 << self.n) - 1) & ~remove)

    def to_text(self) -> str:
        edges = self.edges()
        lines = [f"{self.n} {len(edges)}"] + [f"{u} {v}" for u, v in edges]
        return "\n".join(lines) + "\n"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SimpleGraph)
            and self.n == other.n
            and self.adj == other.adj
            and self.forbidden == other.forbidden
        )

    def __repr__(self) -> str:
        return f"SimpleGraph(n={self.n}, edges={self.edges()})"


def parse_graph_text(text: str) -> SimpleGraph:
    """Parse ``"n m"`` followed by ``m`` lines ``"u v"`` with ``u < v``."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("line 1: empty graph text")
    try:
        n, m = (int(t) for t in lines[0].split())
    except ValueError:
        raise ValueError(f"line 1: expected 'n m', got {lines[0]!r}") from None
    if len(lines) - 1 != m:
        raise ValueError(f"line 1: header announces {m} edges, found {len(lines) - 1}")
    g = SimpleGraph(n)
    prev = None
    for i, ln in enumerate(lines[1:], start=2):
        try:
            u, v = (int(t) for t in ln.split())
        except ValueError:
            raise ValueError(f"line {i}: expected 'u v', got {ln!r}") from None
        if not 0 <= u < v < n:
            raise ValueError(f"line {i}: need 0 <= u < v < {n}, got {u} {v}")
        if prev is not None and (u, v) <= prev:
            raise ValueError(f"line {i}: edges must be strictly sorted")
        prev = (u, v)
        g.add_edge(u, v)
    return g


# -- enumeration ---------------------------------------------------------------


@dataclass
class MisResult:
    count: int
    max_size: int
    min_size: int
    witnesses: list[int] | None = None


def _prepare(g: SimpleGraph) -> tuple[int, list[int]]:
    if g.n > MIS_CAP:
        raise ValueError(f"MIS enumeration is capped at {MIS_CAP} vertices, got {g.n}")
    active = ((1 << g.n) - 1) & ~g.forbidden
    closed = [(g.adj[v] | 1 << v) & active for v in range(g.n)]
    return active, closed


def _pivot(P: int, X: int, closed: list[int]) -> int:
    best, best_size = -1, None
    for u in iter_bits(P | X):
        size = (P & closed[u]).bit_count()
        if best_size is None or size < best_size:
            best, best_size = u, size
            if size <= 1:
                break
    return best


def iter_mis(g: SimpleGraph) -> Iterator[int]:
    """Yield maximal independent sets of ``g`` (minus forbidden vertices) as bitsets."""
    active, closed = _prepare(g)

    def rec(R: int, P: int, X: int):
        if not P:
            if not X:
                yield R
            return
        u = _pivot(P, X, closed)
        for v in iter_bits(P & closed[u]):
            nv = closed[v]
            yield from rec(R | 1 << v, P & ~nv, X & ~nv)
            P &= ~(1 << v)
            X |= 1 << v

    yield from rec(0, active, 0)


def enumerate_mis(g: SimpleGraph, witnesses: bool = False) -> MisResult:
    """Exact count of maximal independent sets by pivoted branching.

    Forbidden (looped) vertices are removed first.  The empty graph has one
    maximal independent set, the empty set.
    """
    if witnesses:
        sets = list(iter_mis(g))
        sizes = [s.bit_count() for s in sets]
        return MisResult(len(sets), max(sizes), min(sizes), sets)

    active, closed = _prepare(g)
    stats = [0, 0, g.n + 1]

    def rec(size: int, P: int, X: int):
        if not P:
            if not X:
                stats[0] += 1
                if size > stats[1]:
                    stats[1] = size
                if size < stats[2]:
                    stats[2] = size
            return
        u = _pivot(P, X, closed)
        for v in iter_bits(P & closed[u]):
            nv = closed[v]
            rec(size + 1, P & ~nv, X & ~nv)
            P &= ~(1 << v)
            X |= 1 << v

    rec(0, active, 0)
    return MisResult(stats[0], stats[1], stats[2])


def mis_bruteforce(g: SimpleGraph) -> int:
    """Count maximal independent sets by filtering all ``2^n`` subsets."""
    active = ((1 << g.n) - 1) & ~g.forbidden
    verts = list(iter_bits(active))
    count = 0
    for r in range(len(verts) + 1):
        for combo in itertools.combinations(verts, r):
            mask = sum(1 << v for v in combo)
            if any(g.adj[v] & mask for v in combo):
                continue
            if all(g.adj[w] & mask for w in verts if not mask >> w & 1):
                count += 1
    return count


# -- named graphs --------------------------------------------------------------


def matching(m: int) -> SimpleGraph:
    return SimpleGraph(2 * m, [(2 * i, 2 * i + 1) for i in range(m)])


def complete(m: int) -> SimpleGraph:
    return SimpleGraph(m, itertools.combinations(range(m), 2))


def cycle(m: int) -> SimpleGraph:
    if m < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return SimpleGraph(m, [(i, (i + 1) % m) for i in range(m)])


def path(m: int) -> SimpleGraph:
    return SimpleGraph(m, [(i, i + 1) for i in range(m - 1)])


def disjoint_union(*graphs: SimpleGraph) -> SimpleGraph:
    out = SimpleGraph(sum(g.n for g in graphs))
    offset = 0
    for g in graphs:
        for u, v in g.edges():
            out.add_edge(u + offset, v + offset)
        out.forbidden |= g.forbidden << offset
        offset += g.n
    return out


def triangles(t: int) -> SimpleGraph:
    return disjoint_union(*[complete(3)] * t) if t else SimpleGraph(0)


def bridge_triangles() -> SimpleGraph:
    """Two triangles ``{0,1,2}`` and ``{3,4,5}`` joined by the edge ``2-3``."""
    return SimpleGraph(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (2, 3)])


def cartesian_product(g: SimpleGraph, h: SimpleGraph) -> SimpleGraph:
    """Vertex ``(i, j)`` is ``i * h.n + j``."""
    out = SimpleGraph(g.n * h.n)
    for i in range(g.n):
        for a, b in h.edges():
            out.add_edge(i * h.n + a, i * h.n + b)
    for j in range(h.n):
        for a, b in g.edges():
            out.add_edge(a * h.n + j, b * h.n + j)
    return out


_NAMED = {
    "matching": matching,
    "complete": complete,
    "cycle": cycle,
    "path": path,
    "triangles": triangles,
    "bridge_triangles": bridge_triangles,
    "cartesian_product": cartesian_product,
}


def named_graph(kind: str, *params) -> SimpleGraph:
    try:
        factory = _NAMED[kind]
    except KeyError:
        raise ValueError(f"unknown graph kind {kind!r}; choose from {sorted(_NAMED)}") from None
    for p in params:
        if isinstance(p, int) and p < 0:
            raise ValueError(f"negative parameter {p} for {kind}")
    return factory(*params)


# -- bounds ----------------------------------------------------------------------


def _up(x: float) -> float:
    return math.nextafter(x, math.inf)


def bound_moon_moser(g: SimpleGraph) -> float:
    return _up(3 ** (g.n / 3))


def bound_hujter_tuza(g: SimpleGraph) -> float | None:
    """``2^(n/2)`` for triangle-free graphs, ``None`` when not applicable."""
    if not g.is_triangle_free():
        return None
    return _up(2 ** (g.n / 2))


def bound_blst(g: SimpleGraph, k: float) -> float:
    """Binomial-sum bound for graphs with ``Delta <= k * delta``."""
    delta, Delta = g.min_degree, g.max_degree
    if k < 1:
        raise ValueError("k must be >= 1")
    if delta < 1:
        raise ValueError("minimum degree must be at least 1")
    if Delta > k * delta:
        raise ValueError(f"Delta={Delta} exceeds k*delta={k * delta}")
    n = g.n
    b = math.sqrt(delta)
    top = math.floor(n / b + 1e-12)
    binom_sum = sum(math.comb(n, i) for i in range(top + 1))
    expo = (k / (k + 1)) * n / 3 + 2 * n / (3 * b)
    return _up(_up(binom_sum * _up(3**expo)))


def bound_triangle_sparse(g: SimpleGraph, T=(), D: int | None = None) -> float:
    """``2^(n/2 - k/(100 D^2) + 2|T|)`` where ``g - T`` is triangle-free on ``n`` vertices with ``n/2 + k`` edges."""
    remove = sum(1 << v for v in T)
    rest = g.delete(remove)
    if not rest.is_triangle_free():
        raise ValueError("g minus T is not triangle-free")
    D = max(g.max_degree, 1) if D is None else D
    if g.max_degree > D:
        raise ValueError(f"max degree {g.max_degree} exceeds D={D}")
    n = rest.n
    k = rest.n_edges - n / 2
    return _up(2 ** (n / 2 - k / (100 * D * D) + 2 * len(set(T))))


def bound_stability(g: SimpleGraph) -> float:
    """``3^(Delta/13) * 3^(n/3 - k/(13 Delta))`` with ``e = n + k``."""
    Delta = g.max_degree
    if Delta < 1:
        raise ValueError("graph has no edges")
    n = g.n
    k = g.n_edges - n
    return _up(3 ** (Delta / 13) * _up(3 ** (n / 3 - k / (13 * Delta))))


# -- matchings ----------------------------------------------------------------------


def has_perfect_matching(g: SimpleGraph) -> bool:
    if g.n > MATCHING_CAP:
        raise ValueError(f"perfect matching search is capped at {MATCHING_CAP} vertices, got {g.n}")
    if g.n % 2:
        return False
    adj = tuple(g.adj)

    @lru_cache(maxsize=None)
    def rec(left: int) -> bool:
        if not left:
            return True
        v = (left & -left).bit_length() - 1
        rest = left & ~(1 << v)
        return any(rec(rest & ~(1 << u)) for u in iter_bits(adj[v] & rest))

    return rec((1 << g.n) - 1)


# -- conjecture scan -------------------------------------------------------------------


def _free_pairs(n: int) -> list[tuple[int, int]]:
    return [(u, v) for u, v in itertools.combinations(range(n), 2) if not (v == u + 1 and u % 2 == 0)]


def graph_from_mask(n: int, mask: int) -> SimpleGraph:
    """The fixed matching ``{01, 23, ...}`` plus the free pairs selected by ``mask``."""
    g = matching(n // 2)
    for i, (u, v) in enumerate(_free_pairs(n)):
        if mask >> i & 1:
            g.add_edge(u, v)
    return g


@lru_cache(maxsize=None)
def _subset_plan(n: int) -> list[tuple[int, list[int]]]:
    """For every matching-independent vertex set ``U``: the mask of free pairs inside ``U``
    and, for each vertex not dominated through its matching partner, the mask of free pairs
    linking it to ``U``."""
    pairs = _free_pairs(n)
    index = {p: i for i, p in enumerate(pairs)}

    def bit(u, v):
        return 1 << index[(min(u, v), max(u, v))]

    plan = []
    for choice in itertools.product((None, 0, 1), repeat=n // 2):
        U = [2 * i + c for i, c in enumerate(choice) if c is not None]
        inside = 0
        for u, v in itertools.combinations(U, 2):
            inside |= bit(u, v)
        needs = []
        for i, c in enumerate(choice):
            if c is not None:
                continue
            for w in (2 * i, 2 * i + 1):
                m = 0
                for u in U:
                    m |= bit(w, u)
                needs.append(m)
        plan.append((inside, needs))
    return plan


def count_mis_over_matching(n: int, masks: np.ndarray) -> np.ndarray:
    """Vectorized MIS counts for the graphs ``graph_from_mask(n, mask)``.

    Works by testing every vertex set that is independent in the matching for
    independence and domination; independent of the branching enumerator.
    """
    if len(_free_pairs(n)) > 64:
        raise ValueError("vectorized counting needs at most 64 free pairs (n <= 12)")
    masks = masks.astype(np.uint64, copy=False)
    counts = np.zeros(masks.shape, dtype=np.int32)
    zero = np.uint64(0)
    for inside, needs in _subset_plan(n):
        ok = (masks & np.uint64(inside)) == zero
        for m in needs:
            if m == 0:
                ok[:] = False
                break
            ok &= (masks & np.uint64(m)) != zero
        counts += ok
    return counts


@dataclass
class ScanReport:
    n: int
    mode: str
    seed: int
    graphs_checked: int
    max_mis: int
    attainers: list[list[list[int]]]
    n_attainers: int
    counterexamples: list[dict]
    partial: bool = False
    bound: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ScanReport":
        return cls(**data)


@dataclass
class _Partial:
    checked: int = 0
    max_mis: int = 0
    attainers: list[int] = field(default_factory=list)
    n_attainers: int = 0
    counterexamples: list[int] = field(default_factory=list)


def _summarize(n: int, masks: np.ndarray, counts: np.ndarray, max_attainers: int) -> _Partial:
    bound = 2 ** (n // 2)
    hit = counts == bound
    over = counts > bound
    return _Partial(
        checked=len(masks),
        max_mis=int(counts.max()) if len(counts) else 0,
        attainers=[int(m) for m in masks[hit][:max_attainers]],
        n_attainers=int(hit.sum()),
        counterexamples=[int(m) for m in masks[over]],
    )


def _exhaustive_chunk(args) -> _Partial:
    n, start, stop, max_attainers = args
    masks = np.arange(start, stop, dtype=np.uint64)
    return _summarize(n, masks, count_mis_over_matching(n, masks), max_attainers)


def _random_masks(n: int, seed: int, block: int, size: int) -> np.ndarray:
    """``size`` random free-pair masks; each sample draws its own edge density."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, block]))
    npairs = len(_free_pairs(n))
    density = rng.random(size)
    bits = rng.random((size, npairs)) < density[:, None]
    return bits


def _random_block(args) -> _Partial:
    n, seed, block, size, max_attainers = args
    bits = _random_masks(n, seed, block, size)
    npairs = bits.shape[1]
    if npairs <= 64:
        weights = np.uint64(1) << np.arange(npairs, dtype=np.uint64)
        masks = (bits.astype(np.uint64) * weights).sum(axis=1, dtype=np.uint64)
        return _summarize(n, masks, count_mis_over_matching(n, masks), max_attainers)
    bound = 2 ** (n // 2)
    out = _Partial(checked=size)
    weights = [1 << i for i in range(npairs)]
    for row in bits:
        mask = sum(w for w, b in zip(weights, row) if b)
        c = enumerate_mis(graph_from_mask(n, mask)).count
        out.max_mis = max(out.max_mis, c)
        if c == bound:
            out.n_attainers += 1
            if len(out.attainers) < max_attainers:
                out.attainers.append(mask)
        elif c > bound:
            out.counterexamples.append(mask)
    return out


def _run(fn, tasks, workers: int):
    if workers <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def conjecture53_scan(
    n: int,
    mode: str = "exhaustive",
    budget: int | None = None,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    max_attainers: int = 1000,
) -> ScanReport:
    """Search graphs containing a perfect matching for more than ``2^(n/2)`` MIS.

    Every graph is the fixed matching ``{01, 23, ...}`` plus extra edges, which
    covers all perfect-matching graphs up to relabelling.  Exhaustive mode
    walks all ``2^(free pairs)`` edge masks in order; random mode draws
    ``budget`` seeded samples in fixed blocks, so results do not depend on
    ``workers``.  ``partial`` is set when the budget stops an exhaustive
    scan early.
    """
    if n < 2 or n % 2:
        raise ValueError("n must be a positive even number")
    npairs = len(_free_pairs(n))
    partial = False
    if mode == "exhaustive":
        if n > EXHAUSTIVE_CAP:
            raise ValueError(f"exhaustive scan is capped at n={EXHAUSTIVE_CAP}")
        total = 1 << npairs
        if budget is not None and budget < total:
            total, partial = budget, True
        tasks = [(n, a, min(a + CHUNK, total), max_attainers) for a in range(0, total, CHUNK)]
        parts = _run(_exhaustive_chunk, tasks, workers)
    elif mode == "random":
        if n > RANDOM_CAP:
            raise ValueError(f"random scan is capped at n={RANDOM_CAP}")
        total = 100_000 if budget is None else budget
        tasks = [
            (n, seed, b, min(BLOCK, total - b * BLOCK), max_attainers)
            for b in range((total + BLOCK - 1) // BLOCK)
        ]
        parts = _run(_random_block, tasks, workers)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    attainers: list[int] = []
    counter: list[int] = []
    checked = max_mis = n_att = 0
    for p in parts:
        checked += p.checked
        max_mis = max(max_mis, p.max_mis)
        n_att += p.n_attainers
        attainers.extend(p.attainers[: max_attainers - len(attainers)])
        counter.extend(p.counterexamples)

    def edges(mask):
        return [list(e) for e in graph_from_mask(n, mask).edges()]

    return ScanReport(
        n=n,
        mode=mode,
        seed=seed,
        graphs_checked=checked,
        max_mis=max_mis,
        attainers=[edges(m) for m in attainers],
        n_attainers=n_att,
        counterexamples=[
            {"edges": edges(m), "graph": graph_from_mask(n, m).to_text(),
             "mis": enumerate_mis(graph_from_mask(n, m)).count}
            for m in counter
        ],
        partial=partial,
        bound=2 ** (n // 2),
    )
