"""Finite abelian groups given as direct sums of cyclic groups.

Elements are plain integers in ``range(n)`` using a mixed-radix encoding over
the factor orders exactly as the user supplied them::

    index = a_1 + m_1 * (a_2 + m_2 * (a_3 + ...))

so ``AbelianGroup([4, 2])`` stores ``(1, 1)`` as ``1 + 4 * 1 = 5``.  The
canonical 2-primary decomposition is kept as metadata only.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "AbelianGroup",
    "GroupSubset",
    "GroupType",
    "Homomorphism",
    "Subgroup",
    "MAX_ORDER",
    "TABLE_CAP",
    "SUBGROUP_ENUM_CAP",
    "make_group",
    "parse_group_spec",
    "abelian_groups_of_order",
    "classify",
    "mu",
    "element_order",
    "exponent",
    "solutions_2x",
    "order2_elements",
    "two_G",
    "index2_subgroups",
    "homs_to_Zp",
    "subgroups_of_prime_index",
    "all_subgroups",
    "count_subgroups_of_order",
    "prime_factors",
]

MAX_ORDER = 1 << 24
TABLE_CAP = 4096
SUBGROUP_ENUM_CAP = 128


def prime_factors(n: int) -> list[int]:
    """Sorted distinct primes dividing ``n``."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


class AbelianGroup:
    """Direct sum ``Z_{m_1} + ... + Z_{m_k}`` with precomputed arithmetic.

    Instances are immutable after construction and cheap to share.  Full
    ``n x n`` addition tables exist only for ``n <= TABLE_CAP``; larger
    groups fall back to component-wise arithmetic.
    """

    def __init__(self, orders: Sequence[int]):
        orders = [int(m) for m in orders]
        if not orders:
            raise ValueError("a group needs at least one cyclic factor")
        for m in orders:
            if m < 2:
                raise ValueError(f"cyclic factor order must be >= 2, got {m}")
        n = math.prod(orders)
        if n > MAX_ORDER:
            raise OverflowError(f"group order {n} exceeds cap {MAX_ORDER}")
        self.factor_orders: tuple[int, ...] = tuple(orders)
        self.n = n
        strides = []
        acc = 1
        for m in orders:
            strides.append(acc)
            acc *= m
        self._strides = tuple(strides)

        alphas, r2, odd = [], 0, 1
        for m in orders:
            a = 0
            while m % 2 == 0:
                m //= 2
                a += 1
            if a == 1:
                r2 += 1
            elif a >= 2:
                alphas.append(a)
            odd *= m
        alphas.sort(reverse=True)
        self.alphas: tuple[int, ...] = tuple(alphas)
        self.r1 = len(alphas)
        self.r2 = r2
        self.r = self.r1 + self.r2
        self.odd_order = odd

    # -- encoding ---------------------------------------------------------
    def encode(self, coords: Sequence[int]) -> int:
        if len(coords) != len(self.factor_orders):
            raise ValueError("coordinate length does not match the number of factors")
        return sum((c % m) * s for c, m, s in zip(coords, self.factor_orders, self._strides))

    def decode(self, x: int) -> tuple[int, ...]:
        out = []
        for m in self.factor_orders:
            x, a = divmod(x, m)
            out.append(a)
        return tuple(out)

    @property
    def two_primary(self) -> tuple[tuple[int, ...], int, int]:
        """``(alphas, r2, |K|)`` for ``Z_{2^a1}+...+Z_2^{r2}+K``."""
        return self.alphas, self.r2, self.odd_order

    @property
    def identity(self) -> int:
        return 0

    def __len__(self) -> int:
        return self.n

    def __iter__(self) -> Iterator[int]:
        return iter(range(self.n))

    def __eq__(self, other) -> bool:
        return isinstance(other, AbelianGroup) and other.factor_orders == self.factor_orders

    def __hash__(self) -> int:
        return hash(self.factor_orders)

    def __repr__(self) -> str:
        return f"AbelianGroup({list(self.factor_orders)})"

    @property
    def spec(self) -> str:
        return ",".join(str(m) for m in self.factor_orders)

    def __str__(self) -> str:
        return "+".join(f"Z{m}" for m in self.factor_orders)

    # -- arithmetic -------------------------------------------------------
    @cached_property
    def add_table(self) -> np.ndarray | None:
        if self.n > TABLE_CAP:
            return None
        coords = np.array([self.decode(x) for x in range(self.n)], dtype=np.int64)
        orders = np.array(self.factor_orders, dtype=np.int64)
        strides = np.array(self._strides, dtype=np.int64)
        summed = (coords[:, None, :] + coords[None, :, :]) % orders
        dtype = np.int16 if self.n <= 1 << 15 else np.int32
        return (summed @ strides).astype(dtype)

    @cached_property
    def neg_table(self) -> tuple[int, ...]:
        return tuple(self._neg_slow(x) for x in range(self.n))

    @cached_property
    def add_rows(self) -> tuple[tuple[int, ...], ...]:
        """Addition table as nested tuples, for tight pure-Python loops."""
        table = self.add_table
        if table is None:
            raise MemoryError(f"no addition table for groups larger than {TABLE_CAP}")
        return tuple(tuple(row) for row in table.tolist())

    @cached_property
    def double_table(self) -> tuple[int, ...]:
        return tuple(self.add(x, x) for x in range(self.n))

    def _add_slow(self, x: int, y: int) -> int:
        out = 0
        for m, s in zip(self.factor_orders, self._strides):
            x, a = divmod(x, m)
            y, b = divmod(y, m)
            out += ((a + b) % m) * s
        return out

    def _neg_slow(self, x: int) -> int:
        out = 0
        for m, s in zip(self.factor_orders, self._strides):
            x, a = divmod(x, m)
            out += ((-a) % m) * s
        return out

    def add(self, x: int, y: int) -> int:
        if self.n <= TABLE_CAP:
            return self.add_rows[x][y]
        return self._add_slow(x, y)

    def neg(self, x: int) -> int:
        return self.neg_table[x] if self.n <= TABLE_CAP else self._neg_slow(x)

    def sub(self, x: int, y: int) -> int:
        return self.add(x, self.neg(y))

    def mul(self, k: int, x: int) -> int:
        return self.encode([k * a for a in self.decode(x)])

    def order_of(self, x: int) -> int:
        return reduce(
            _lcm, (m // math.gcd(a, m) for a, m in zip(self.decode(x), self.factor_orders)), 1
        )

    @property
    def exponent(self) -> int:
        return reduce(_lcm, self.factor_orders, 1)

    def subset(self, elements: Iterable[int] = ()) -> "GroupSubset":
        return GroupSubset.from_elements(self, elements)

    def full(self) -> "GroupSubset":
        return GroupSubset(self, (1 << self.n) - 1)


@dataclass(frozen=True)
class GroupSubset:
    """A subset of a group stored as an integer bitset (bit ``i`` = element ``i``)."""

    group: AbelianGroup
    bits: int = 0

    def __post_init__(self):
        if self.bits < 0 or self.bits >> self.group.n:
            raise ValueError("bitset has bits outside the group")

    @classmethod
    def from_elements(cls, group: AbelianGroup, elements: Iterable[int]) -> "GroupSubset":
        bits = 0
        for x in elements:
            x = int(x)
            if not 0 <= x < group.n:
                raise ValueError(f"element {x} not in group of order {group.n}")
            bits |= 1 << x
        return cls(group, bits)

    def __contains__(self, x: int) -> bool:
        return 0 <= x < self.group.n and bool(self.bits >> x & 1)

    def __iter__(self) -> Iterator[int]:
        return iter_bits(self.bits)

    def __len__(self) -> int:
        return self.bits.bit_count()

    @property
    def cardinality(self) -> int:
        return self.bits.bit_count()

    def __or__(self, other: "GroupSubset") -> "GroupSubset":
        return GroupSubset(self.group, self.bits | other.bits)

    def __and__(self, other: "GroupSubset") -> "GroupSubset":
        return GroupSubset(self.group, self.bits & other.bits)

    def __sub__(self, other: "GroupSubset") -> "GroupSubset":
        return GroupSubset(self.group, self.bits & ~other.bits)

    def complement(self) -> "GroupSubset":
        return GroupSubset(self.group, ((1 << self.group.n) - 1) & ~self.bits)

    def issubset(self, other: "GroupSubset") -> bool:
        return self.bits & ~other.bits == 0

    def negate(self) -> "GroupSubset":
        neg = self.group.neg
        return GroupSubset.from_elements(self.group, (neg(x) for x in self))

    def translate(self, g: int) -> "GroupSubset":
        add = self.group.add
        return GroupSubset.from_elements(self.group, (add(x, g) for x in self))

    def to_list(self) -> list[int]:
        return list(self)

    def __repr__(self) -> str:
        return f"GroupSubset({self.to_list()})"


def iter_bits(bits: int) -> Iterator[int]:
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


@dataclass(frozen=True)
class GroupType:
    """Type I(p), II or III(m); ``param`` is ``p``, ``None`` or the exponent ``m``."""

    kind: str
    param: int | None = None

    def __str__(self) -> str:
        if self.kind == "I":
            return f"TypeI({self.param})"
        if self.kind == "II":
            return "TypeII"
        return f"TypeIII({self.param})"


@dataclass(frozen=True)
class Homomorphism:
    """A homomorphism ``G -> Z_p`` given by the images of the cyclic generators."""

    group: AbelianGroup
    p: int
    images: tuple[int, ...]

    def __call__(self, x: int) -> int:
        return sum(a * c for a, c in zip(self.group.decode(x), self.images)) % self.p

    def preimage(self, values: Iterable[int]) -> GroupSubset:
        values = set(values)
        return GroupSubset.from_elements(self.group, (x for x in self.group if self(x) in values))

    def kernel(self) -> GroupSubset:
        return self.preimage([0])

    def is_surjective(self) -> bool:
        return any(self.images)


@dataclass(frozen=True)
class Subgroup:
    members: GroupSubset
    rank2: int
    index: int
    hom: Homomorphism | None = None

    @property
    def group(self) -> AbelianGroup:
        return self.members.group

    @property
    def order(self) -> int:
        return len(self.members)

    def coset(self, g: int) -> GroupSubset:
        return self.members.translate(g)


def make_group(orders: Sequence[int]) -> AbelianGroup:
    return AbelianGroup(orders)


def parse_group_spec(text: str) -> AbelianGroup:
    """Parse ``"4,2,3"`` (whitespace ignored) into ``Z4+Z2+Z3``."""
    cleaned = "".join(text.split())
    if not cleaned:
        raise ValueError("empty group spec")
    orders = []
    col = 1
    for part in cleaned.split(","):
        if not part.isdigit():
            raise ValueError(f"bad cyclic order {part!r} at column {col} of group spec {text!r}")
        orders.append(int(part))
        col += len(part) + 1
    return AbelianGroup(orders)


def _partitions(k: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    largest = k if largest is None else largest
    if k == 0:
        yield ()
        return
    for first in range(min(k, largest), 0, -1):
        for rest in _partitions(k - first, first):
            yield (first,) + rest


def abelian_groups_of_order(n: int) -> list[AbelianGroup]:
    """One representative per isomorphism class, as products of prime-power cycles."""
    if n < 2:
        return []
    per_prime = []
    for p in prime_factors(n):
        e = 0
        m = n
        while m % p == 0:
            m //= p
            e += 1
        per_prime.append([[p**part for part in lam] for lam in _partitions(e)])
    groups = []
    for combo in itertools.product(*per_prime):
        orders = [q for block in combo for q in block]
        groups.append(AbelianGroup(orders))
    return groups


def classify(G: AbelianGroup) -> GroupType:
    primes = prime_factors(G.n)
    for p in primes:
        if p % 3 == 2:
            return GroupType("I", p)
    if 3 in primes:
        return GroupType("II")
    return GroupType("III", G.exponent)


def mu(G: AbelianGroup) -> int:
    """Largest size of a sum-free subset of ``G``, by the type trichotomy."""
    t = classify(G)
    if t.kind == "I":
        value = G.n * (Fraction(1, 3) + Fraction(1, 3 * t.param))
    elif t.kind == "II":
        value = Fraction(G.n, 3)
    else:
        value = G.n * (Fraction(1, 3) - Fraction(1, 3 * t.param))
    if value.denominator != 1:
        raise ArithmeticError(f"non-integral mu={value} for {G}; classification is inconsistent")
    return int(value)


def element_order(G: AbelianGroup, x: int) -> int:
    return G.order_of(x)


def exponent(G: AbelianGroup) -> int:
    return G.exponent


def solutions_2x(G: AbelianGroup, g: int) -> GroupSubset:
    doubles = G.double_table
    return GroupSubset.from_elements(G, (x for x in G if doubles[x] == g))


def order2_elements(G: AbelianGroup) -> GroupSubset:
    doubles = G.double_table
    return GroupSubset.from_elements(G, (x for x in range(1, G.n) if doubles[x] == 0))


def _rank2(members: GroupSubset) -> int:
    """2-rank of a subgroup via ``|H| / |2H|`` (independent of counting involutions)."""
    doubles = members.group.double_table
    doubled = {doubles[x] for x in members}
    quotient = len(members) // len(doubled)
    return quotient.bit_length() - 1


def _subgroup(members: GroupSubset, hom: Homomorphism | None = None) -> Subgroup:
    return Subgroup(members, _rank2(members), members.group.n // len(members), hom)


def two_G(G: AbelianGroup) -> Subgroup:
    return _subgroup(GroupSubset.from_elements(G, set(G.double_table)))


def homs_to_Zp(G: AbelianGroup, p: int) -> list[Homomorphism]:
    """All surjective homomorphisms ``G -> Z_p``, in lexicographic order of generator images."""
    choices = [range(p) if m % p == 0 else (0,) for m in G.factor_orders]
    homs = []
    for images in itertools.product(*choices):
        hom = Homomorphism(G, p, tuple(images))
        if hom.is_surjective():
            homs.append(hom)
    return homs


def subgroups_of_prime_index(G: AbelianGroup, p: int) -> list[Subgroup]:
    """Kernels of surjections onto ``Z_p``, deduplicated by member set.

    Each subgroup carries the first (lexicographically) homomorphism that
    produced it.
    """
    seen: dict[int, Subgroup] = {}
    for hom in homs_to_Zp(G, p):
        ker = hom.kernel()
        if ker.bits not in seen:
            seen[ker.bits] = _subgroup(ker, hom)
    return list(seen.values())


def index2_subgroups(G: AbelianGroup) -> list[Subgroup]:
    if G.n % 2:
        raise ValueError(f"no index-2 subgroup: {G} has odd order {G.n}")
    return subgroups_of_prime_index(G, 2)


def _cyclic_subgroups(G: AbelianGroup) -> list[int]:
    add = G.add
    found = set()
    for g in range(1, G.n):
        bits, x = 1, g
        while x:
            bits |= 1 << x
            x = add(x, g)
        found.add(bits)
    return sorted(found)


def _join(G: AbelianGroup, h: int, c: int) -> int:
    rows = G.add_rows
    out = h
    for y in iter_bits(c):
        row = rows[y]
        for x in iter_bits(h):
            out |= 1 << row[x]
    return out


def all_subgroups(G: AbelianGroup) -> list[GroupSubset]:
    """Every subgroup, found by closing joins with cyclic subgroups (``n <= SUBGROUP_ENUM_CAP``)."""
    if G.n > SUBGROUP_ENUM_CAP:
        raise ValueError(f"subgroup enumeration capped at order {SUBGROUP_ENUM_CAP}, got {G.n}")
    return [GroupSubset(G, b) for b in _all_subgroup_bits(G)]


_SUBGROUP_CACHE: dict[tuple[int, ...], tuple[int, ...]] = {}


def _all_subgroup_bits(G: AbelianGroup) -> tuple[int, ...]:
    key = G.factor_orders
    if key not in _SUBGROUP_CACHE:
        cyclic = _cyclic_subgroups(G)
        seen = {1}
        frontier = [1]
        while frontier:
            nxt = []
            for h in frontier:
                for c in cyclic:
                    if c & ~h == 0:
                        continue
                    j = _join(G, h, c)
                    if j not in seen:
                        seen.add(j)
                        nxt.append(j)
            frontier = nxt
        _SUBGROUP_CACHE[key] = tuple(sorted(seen))
    return _SUBGROUP_CACHE[key]


def count_subgroups_of_order(G: AbelianGroup, k: int) -> int:
    if k < 1 or G.n % k:
        raise ValueError(f"{k} does not divide |G| = {G.n}")
    if G.n > SUBGROUP_ENUM_CAP:
        raise ValueError(f"subgroup enumeration capped at order {SUBGROUP_ENUM_CAP}, got {G.n}")
    if k == 1:
        return 1
    return sum(1 for b in _all_subgroup_bits(G) if b.bit_count() == k)
