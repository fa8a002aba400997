"""Schur triples, (distinct) sum-freeness, and explicit extremal families."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterator

from .abelian import (
    AbelianGroup,
    GroupSubset,
    Homomorphism,
    Subgroup,
    classify,
    homs_to_Zp,
    index2_subgroups,
    iter_bits,
    mu,
    order2_elements,
)

__all__ = [
    "ConstructionFamily",
    "TripleIndex",
    "is_schur_triple",
    "is_distinct_schur_triple",
    "is_sumfree",
    "is_distinct_sumfree",
    "is_free",
    "can_extend",
    "is_maximal_sumfree",
    "is_maximal_distinct_sumfree",
    "is_maximal_free",
    "max_free_subset",
    "mu_bruteforce",
    "mu_star_bruteforce",
    "extremal_sumfree_typeI",
    "gr_structure_check",
    "construct_prop32",
    "construct_z5k",
    "construct_prop53",
    "find_joint_triple",
    "BRUTEFORCE_CAP",
    "PAIRWISE_CAP",
]

BRUTEFORCE_CAP = 24
SEARCH_CAP = 1024
PAIRWISE_CAP = 1 << 12
PAIR_SAMPLES = 10_000


def is_schur_triple(G: AbelianGroup, x: int, y: int, z: int) -> bool:
    return G.add(x, y) == z


def is_distinct_schur_triple(G: AbelianGroup, x: int, y: int, z: int) -> bool:
    return x != y and y != z and x != z and G.add(x, y) == z


def is_sumfree(S: GroupSubset) -> bool:
    G = S.group
    members = S.to_list()
    bits = S.bits
    for i, x in enumerate(members):
        for y in members[i:]:
            if bits >> G.add(x, y) & 1:
                return False
    return True


def is_distinct_sumfree(S: GroupSubset) -> bool:
    G = S.group
    members = [x for x in S if x != 0]
    bits = S.bits
    for i, x in enumerate(members):
        for y in members[i + 1 :]:
            if bits >> G.add(x, y) & 1:
                return False
    return True


def is_free(S: GroupSubset, distinct: bool) -> bool:
    return is_distinct_sumfree(S) if distinct else is_sumfree(S)


def can_extend(S: GroupSubset, w: int, distinct: bool) -> bool:
    """True iff ``S | {w}`` is still (distinct) sum-free, assuming ``S`` is."""
    G = S.group
    if w in S:
        return True
    bits = S.bits | 1 << w
    if distinct:
        for a in S:
            z = G.add(w, a)
            if a != 0 and w != 0 and z != a and z != w and bits >> z & 1:
                return False
            b = G.sub(w, a)
            if b != a and b != w and a != w and S.bits >> b & 1:
                return False
        return True
    if w == 0:
        return False
    for a in itertools.chain(S, (w,)):
        if bits >> G.add(w, a) & 1:
            return False
    for a in S:
        if S.bits >> G.sub(w, a) & 1:
            return False
    return True


def is_maximal_free(S: GroupSubset, distinct: bool) -> bool:
    if not is_free(S, distinct):
        kind = "distinct sum-free" if distinct else "sum-free"
        raise ValueError(f"input set is not {kind}")
    return not any(can_extend(S, w, distinct) for w in S.complement())


def is_maximal_sumfree(S: GroupSubset) -> bool:
    return is_maximal_free(S, distinct=False)


def is_maximal_distinct_sumfree(S: GroupSubset) -> bool:
    return is_maximal_free(S, distinct=True)


class TripleIndex:
    """Precomputed kill masks for incremental (distinct) sum-free search.

    ``kill[x][a]`` is the set of ``w`` such that ``{w, x, a}`` forms a
    Schur triple (respecting distinctness), and ``self_kill[x]`` covers the
    triples in which ``x`` or ``w`` is repeated.  Adding ``x`` to a free set
    ``T`` therefore forbids ``self_kill[x] | OR(kill[x][a] for a in T)``.
    """

    def __init__(self, G: AbelianGroup, distinct: bool):
        if G.n > SEARCH_CAP:
            raise ValueError(f"free-set search is capped at order {SEARCH_CAP}, got {G.n}")
        self.group = G
        self.distinct = distinct
        n = G.n
        rows = G.add_rows
        neg = G.neg_table
        self.full = (1 << n) - 1
        kill = []
        for x in range(n):
            row = rows[x]
            masks = []
            for a in range(n):
                m = 0
                for w, triple in (
                    (row[a], (x, a, row[a])),
                    (rows[x][neg[a]], (a, rows[x][neg[a]], x)),
                    (rows[a][neg[x]], (x, rows[a][neg[x]], a)),
                ):
                    if not distinct or len(set(triple)) == 3:
                        m |= 1 << w
                masks.append(m)
            kill.append(masks)
        self.kill = kill
        self_kill = [0] * n
        if not distinct:
            doubles = G.double_table
            for x in range(n):
                self_kill[x] |= 1 | 1 << doubles[x]
            for w in range(n):
                self_kill[doubles[w]] |= 1 << w
        self.self_kill = self_kill
        # elements that can never join a set
        self.banned = 0 if distinct else 1
        partners = [0] * n
        for x in range(n):
            for a in range(n):
                if kill[x][a]:
                    partners[x] |= 1 << a
            partners[x] |= self_kill[x]
        for w in range(n):
            for x in range(n):
                if self_kill[x] >> w & 1:
                    partners[w] |= 1 << x
        self.partners = partners

    def add(self, cur: int, forb: int, x: int) -> int:
        kx = self.kill[x]
        forb |= self.self_kill[x]
        for a in iter_bits(cur):
            forb |= kx[a]
        return forb

    def closure_forbidden(self, members: int) -> int:
        """Forbidden mask for an arbitrary free set given as a bitset."""
        forb = self.banned
        cur = 0
        for x in iter_bits(members):
            forb = self.add(cur, forb, x)
            cur |= 1 << x
        return forb


@lru_cache(maxsize=64)
def triple_index(G: AbelianGroup, distinct: bool) -> TripleIndex:
    return TripleIndex(G, distinct)


def max_free_subset(
    G: AbelianGroup,
    universe: GroupSubset | None = None,
    distinct: bool = False,
    order: list[int] | None = None,
) -> GroupSubset:
    """Exact maximum (distinct) sum-free subset of ``universe`` by branch and bound.

    ``order`` fixes the branching priority; by default elements are ranked by
    how many Schur triples inside the universe they take part in.
    """
    idx = triple_index(G, distinct)
    uni = idx.full if universe is None else universe.bits
    uni &= ~idx.banned
    if order is None:
        order = _triple_degree_order(idx, uni)
    best = [0, 0]

    def rec(cur: int, size: int, forb: int, cands: int):
        if size > best[0]:
            best[0], best[1] = size, cur
        if size + cands.bit_count() <= best[0]:
            return
        for x in order:
            if cands >> x & 1:
                break
        else:
            return
        rest = cands & ~(1 << x)
        nf = idx.add(cur, forb, x)
        rec(cur | 1 << x, size + 1, nf, rest & ~nf)
        rec(cur, size, forb, rest)

    rec(0, 0, idx.banned, uni)
    return GroupSubset(G, best[1])


def _triple_degree_order(idx: TripleIndex, uni: int) -> list[int]:
    elems = list(iter_bits(uni))
    score = {}
    for x in elems:
        s = 0
        kx = idx.kill[x]
        for a in elems:
            s += (kx[a] & uni).bit_count()
        s += (idx.self_kill[x] & uni).bit_count()
        score[x] = s
    return sorted(elems, key=lambda x: (-score[x], x))


def mu_bruteforce(G: AbelianGroup) -> int:
    if G.n > BRUTEFORCE_CAP:
        raise ValueError(f"brute force capped at order {BRUTEFORCE_CAP}, got {G.n}")
    return len(max_free_subset(G, distinct=False))


def mu_star_bruteforce(G: AbelianGroup) -> int:
    if G.n > BRUTEFORCE_CAP:
        raise ValueError(f"brute force capped at order {BRUTEFORCE_CAP}, got {G.n}")
    return len(max_free_subset(G, distinct=True))


# -- explicit constructions ---------------------------------------------------


def _type_I_prime(G: AbelianGroup) -> int:
    t = classify(G)
    if t.kind != "I":
        raise ValueError(f"{G} is {t}, not of type I")
    return t.param


def extremal_sumfree_typeI(G: AbelianGroup, H: Subgroup | GroupSubset, g: int) -> GroupSubset:
    """Union of the cosets ``(3k+1)g + H`` for ``0 <= k <= (p-2)/3``.

    For ``p = 2`` this is the single coset ``g + H``, the odd coset of an
    index-2 subgroup.
    """
    p = _type_I_prime(G)
    members = H.members if isinstance(H, Subgroup) else H
    if len(members) * p != G.n:
        raise ValueError(f"H must have index {p}, got index {G.n / len(members):g}")
    if g in members:
        raise ValueError("g must lie outside H")
    out = 0
    for k in range((p - 2) // 3 + 1):
        out |= members.translate(G.mul(3 * k + 1, g)).bits
    return GroupSubset(G, out)


def gr_structure_check(G: AbelianGroup, A: GroupSubset) -> Homomorphism | None:
    """Find ``psi: G -> Z_p`` with ``A`` inside ``psi^{-1}({k+1, ..., 2k+1})``, ``p = 3k+2``."""
    p = _type_I_prime(G)
    k = (p - 2) // 3
    middle = set(range(k + 1, 2 * k + 2))
    for hom in homs_to_Zp(G, p):
        if all(hom(a) in middle for a in A):
            return hom
    return None


@dataclass
class ConstructionFamily:
    """A family of (distinct) sum-free sets that pairwise lie in different maximal sets.

    ``generate`` yields the sets lazily; ``generated_sets`` materializes them.
    ``distinct`` records which freeness predicate the family satisfies.
    """

    kind: str
    group: AbelianGroup
    params: dict
    expected_count: int
    distinct: bool
    generate: Callable[[], Iterator[GroupSubset]] = field(repr=False)
    _sets: list[GroupSubset] | None = field(default=None, repr=False)

    @property
    def generated_sets(self) -> list[GroupSubset]:
        if self._sets is None:
            if self.expected_count > 1 << 20:
                raise MemoryError(f"refusing to materialize {self.expected_count} sets")
            self._sets = list(self.generate())
        return self._sets

    def verify_free(self) -> bool:
        return all(is_free(S, self.distinct) for S in self.generated_sets)

    def verify_pairwise_conflict(self, seed: int = 0) -> bool:
        """Every pair's union contains a joint Schur triple.

        Families above ``PAIRWISE_CAP`` sets are checked on ``PAIR_SAMPLES``
        seeded random pairs.
        """
        sets = self.generated_sets
        m = len(sets)
        if m <= PAIRWISE_CAP:
            pairs: Iterator = itertools.combinations(range(m), 2)
        else:
            rng = random.Random(seed)
            pairs = (tuple(rng.sample(range(m), 2)) for _ in range(PAIR_SAMPLES))
        return all(find_joint_triple(sets[i], sets[j], self.distinct) is not None for i, j in pairs)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "group": self.group.spec,
            "params": self.params,
            "expected_count": self.expected_count,
            "distinct": self.distinct,
            "sets": [S.to_list() for S in self.generated_sets],
        }


def find_joint_triple(S: GroupSubset, T: GroupSubset, distinct: bool) -> tuple[int, int, int] | None:
    """A Schur triple ``x + y = z`` inside ``S | T`` that uses elements of both sets."""
    G = S.group
    U = S | T
    only_s = (S - T).bits
    only_t = (T - S).bits
    members = U.to_list()
    for x in members:
        for y in members:
            z = G.add(x, y)
            if not U.bits >> z & 1:
                continue
            if distinct and len({x, y, z}) < 3:
                continue
            used = (1 << x) | (1 << y) | (1 << z)
            if used & only_s and used & only_t:
                return x, y, z
    return None


def _first_order2(G: AbelianGroup, inside: int) -> int:
    for s in order2_elements(G):
        if inside >> s & 1:
            return s
    raise ValueError("no element of order 2 in the requested subgroup")


def construct_prop32(G: AbelianGroup) -> ConstructionFamily:
    """``{0}`` plus one element from each ``{x, -x}`` orbit of an extremal ``B = -B``.

    Uses the lexicographically first surjection ``psi: G -> Z_p`` for ``H``
    and the smallest ``g`` with ``psi(g) = 1``.
    """
    p = _type_I_prime(G)
    if p < 5:
        raise ValueError(f"needs a type I(p) group with p >= 5, got p={p}")
    hom = homs_to_Zp(G, p)[0]
    H = hom.kernel()
    g = next(x for x in G if hom(x) == 1)
    B = extremal_sumfree_typeI(G, H, g)
    if B.negate() != B:
        raise AssertionError("extremal set is not symmetric")
    orbits = []
    seen = 0
    for x in B:
        if seen >> x & 1:
            continue
        nx = G.neg(x)
        if nx == x:
            raise AssertionError("negation has a fixed point on B")
        orbits.append((x, nx))
        seen |= 1 << x | 1 << nx

    def generate():
        for choice in itertools.product(*orbits):
            yield GroupSubset.from_elements(G, (0, *choice))

    return ConstructionFamily(
        kind="Prop32",
        group=G,
        params={"p": p, "hom": list(hom.images), "H": H.to_list(), "g": g, "B": B.to_list()},
        expected_count=2 ** len(orbits),
        distinct=True,
        generate=generate,
    )


def construct_z5k(k: int) -> ConstructionFamily:
    """Sum-free sets ``{s} | U A_b`` in ``Z_5^k`` over the orbits of ``b -> -b - s`` on ``{2} + Z_5^(k-1)``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    G = AbelianGroup([5] * k)
    s = G.encode([1] + [0] * (k - 1))
    B2 = [x for x in G if G.decode(x)[0] == 2]
    fixed = G.add(s, s)
    orbits = []
    seen = set()
    for b in B2:
        if b in seen or b == fixed:
            continue
        phi = G.sub(G.neg(b), s)
        seen.update((b, phi))
        orbits.append(b)
    options = []
    for b in orbits:
        nb = G.neg(b)
        nbs = G.sub(nb, s)
        options.append(((b, nb), (b, nbs), (G.add(b, s), nbs)))

    def generate():
        for choice in itertools.product(*options):
            yield GroupSubset.from_elements(G, itertools.chain((s,), *choice))

    return ConstructionFamily(
        kind="Z5k",
        group=G,
        params={"k": k, "s": s, "orbit_representatives": orbits},
        expected_count=3 ** len(orbits),
        distinct=False,
        generate=generate,
    )


def construct_prop53(G: AbelianGroup) -> ConstructionFamily:
    """``{0, s} | I`` over maximal independent sets ``I`` of the link graph on an index-2 coset.

    For ``G = Z_2 + K`` (2-rank 1, no ``Z_{2^a}`` factor with ``a >= 2``) the
    seed set is ``{0}`` instead.  The first index-2 subgroup in homomorphism
    order and the smallest admissible ``s`` are used.
    """
    from .linkgraph import build_link_graph
    from .misolver import enumerate_mis

    if G.n % 2:
        raise ValueError(f"{G} has odd order")
    H = index2_subgroups(G)[0]
    A = H.members.complement()
    if G.r1 >= 1 or G.r2 >= 2:
        s = _first_order2(G, H.members.bits)
        S = GroupSubset.from_elements(G, (0, s))
        expected = 2 ** (G.n // 4)
    else:
        s = None
        S = GroupSubset.from_elements(G, (0,))
        expected = 2 ** ((G.n - 2) // 4)
    L = build_link_graph(G, S, A)
    graph, labels = L.to_simple_graph()

    def generate():
        for I in enumerate_mis(graph, witnesses=True).witnesses:
            yield GroupSubset(G, S.bits | sum(1 << labels[v] for v in iter_bits(I)))

    return ConstructionFamily(
        kind="Prop53",
        group=G,
        params={"H": H.members.to_list(), "A": A.to_list(), "s": s, "S": S.to_list()},
        expected_count=expected,
        distinct=True,
        generate=generate,
    )
