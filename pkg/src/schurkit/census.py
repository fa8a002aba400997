"""Ground-truth counts of (maximal) (distinct) sum-free sets and related cross-checks."""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .abelian import AbelianGroup, GroupSubset, index2_subgroups, iter_bits, mu, order2_elements
from .linkgraph import build_link_graph
from .misolver import enumerate_mis, iter_mis
from .sumfree import is_free, is_maximal_free, max_free_subset, triple_index

__all__ = [
    "CensusReport",
    "GnpSample",
    "ExtensionCount",
    "ClaimsReport",
    "CENSUS_CAP",
    "MAXIMAL_CAP",
    "GNP_SOLVER_CAP",
    "census",
    "full_census",
    "restricted_maximal_count",
    "count_extensions",
    "generated_sets",
    "verify_claims_512_515",
    "gnp_experiment",
    "samples_to_json",
    "reports_to_csv",
]

CENSUS_CAP = 26
MAXIMAL_CAP = 32
CLAIMS_CAP = 24
GNP_SOLVER_CAP = 40


@dataclass
class CensusReport:
    group: str
    distinct: bool | None = None
    f: int | None = None
    f_star: int | None = None
    f_max: int | None = None
    f_star_max: int | None = None
    witnesses: list[list[int]] | None = None
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "CensusReport":
        return cls(**data)


class _Counter:
    """DFS over free sets; every node of the search tree is one free set."""

    def __init__(self, G, distinct, universe, required, maximal_only, keep_witnesses):
        self.idx = triple_index(G, distinct)
        self.full = self.idx.full
        self.maximal_only = maximal_only
        self.keep = keep_witnesses
        self.universe = universe & ~self.idx.banned
        self.required = required
        self.total = 0
        self.maximal = 0
        self.witnesses: list[int] = []

    def root(self):
        forb = self.idx.closure_forbidden(self.required)
        if self.required & forb:
            return None
        cands = self.universe & ~self.required & ~forb
        return self.required, forb, cands

    def visit(self, cur: int, forb: int, cands: int):
        if self.maximal_only:
            pending = self.full & ~cur & ~forb & ~cands
            partners = self.idx.partners
            for e in iter_bits(pending):
                if not partners[e] & cands:
                    return
        else:
            self.total += 1
        if not (self.full & ~cur & ~forb):
            self.maximal += 1
            if self.keep is not None and len(self.witnesses) < self.keep:
                self.witnesses.append(cur)
        idx = self.idx
        rest = cands
        while rest:
            low = rest & -rest
            x = low.bit_length() - 1
            rest ^= low
            nf = idx.add(cur, forb, x)
            self.visit(cur | low, nf, rest & ~nf)


def _subtree(args):
    orders, distinct, universe, required, maximal_only, start = args
    G = AbelianGroup(orders)
    c = _Counter(G, distinct, universe, required, maximal_only, None)
    cur, forb, cands = c.root()
    later = cands & ~((1 << (start + 1)) - 1)
    nf = c.idx.add(cur, forb, start)
    c.visit(cur | 1 << start, nf, later & ~nf)
    return c.total, c.maximal


def _count(G, distinct, universe=None, required=0, maximal_only=False, witnesses=None, workers=1):
    universe = (1 << G.n) - 1 if universe is None else universe
    c = _Counter(G, distinct, universe, required, maximal_only, witnesses)
    root = c.root()
    if root is None:
        return 0, 0, []
    if workers <= 1 or witnesses is not None:
        c.visit(*root)
        return c.total, c.maximal, c.witnesses
    cur, forb, cands = root
    # the root itself, then one task per smallest added element
    c.visit(cur, forb, 0)
    tasks = [(G.factor_orders, distinct, universe, required, maximal_only, x) for x in iter_bits(cands)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for total, maximal in pool.map(_subtree, tasks):
            c.total += total
            c.maximal += maximal
    return c.total, c.maximal, []


def census(
    G: AbelianGroup,
    distinct: bool,
    maximal_only: bool = False,
    witnesses: int | None = None,
    workers: int = 1,
) -> CensusReport:
    """Exact counts of free sets (``f`` or ``f_star``) and maximal ones.

    ``maximal_only`` skips the total count and prunes branches in which an
    excluded element can no longer be blocked.  ``witnesses`` keeps up to
    that many maximal sets.
    """
    cap = MAXIMAL_CAP if maximal_only else CENSUS_CAP
    if G.n > cap:
        raise ValueError(f"census capped at order {cap} (maximal_only={maximal_only}), got {G.n}")
    t0 = time.perf_counter()
    total, maximal, wit = _count(G, distinct, maximal_only=maximal_only, witnesses=witnesses, workers=workers)
    report = CensusReport(group=G.spec, distinct=distinct)
    if distinct:
        report.f_star = None if maximal_only else total
        report.f_star_max = maximal
    else:
        report.f = None if maximal_only else total
        report.f_max = maximal
    if witnesses is not None:
        report.witnesses = [list(iter_bits(w)) for w in wit]
    report.seconds = time.perf_counter() - t0
    return report


def full_census(G: AbelianGroup, workers: int = 1) -> CensusReport:
    """All four counts ``f, f_star, f_max, f_star_max`` in one report."""
    t0 = time.perf_counter()
    a = census(G, distinct=False, workers=workers)
    b = census(G, distinct=True, workers=workers)
    return CensusReport(
        group=G.spec, f=a.f, f_max=a.f_max, f_star=b.f_star, f_star_max=b.f_star_max,
        seconds=time.perf_counter() - t0,
    )


def restricted_maximal_count(G: AbelianGroup, S: GroupSubset, A: GroupSubset, distinct: bool = True) -> int:
    """Number of maximal free sets ``D`` of ``G`` with ``S <= D <= S | A`` (direct census)."""
    _, maximal, _ = _count(G, distinct, universe=(S | A).bits, required=S.bits)
    return maximal


@dataclass
class ExtensionCount:
    mis_count: int
    maximal_count: int | None = None


def count_extensions(
    G: AbelianGroup, S: GroupSubset, A: GroupSubset, distinct: bool = True, check_maximal: bool = False
) -> ExtensionCount:
    """Maximal independent sets of the link graph of ``S`` on ``A``.

    With ``check_maximal`` also counts the ``I`` for which ``S | I`` is a
    maximal free set of ``G``; that number never exceeds the MIS count.
    """
    if not is_free(S, distinct):
        raise ValueError("S is not free")
    if S.bits & A.bits:
        raise ValueError("S and A must be disjoint")
    L = build_link_graph(G, S, A, distinct=distinct)
    graph, labels = L.to_simple_graph()
    if not check_maximal:
        return ExtensionCount(enumerate_mis(graph).count)
    mis = maximal = 0
    for I in iter_mis(graph):
        mis += 1
        D = GroupSubset(G, S.bits | sum(1 << labels[v] for v in iter_bits(I)))
        if is_free(D, distinct) and is_maximal_free(D, distinct):
            maximal += 1
    return ExtensionCount(mis, maximal)


def generated_sets(G: AbelianGroup, S: GroupSubset, A: GroupSubset) -> set[int]:
    """Bitsets of maximal distinct sum-free ``S | I`` over MIS ``I`` of ``L*_S[A]``."""
    graph, labels = build_link_graph(G, S, A).to_simple_graph()
    out = set()
    for I in iter_mis(graph):
        D = GroupSubset(G, S.bits | sum(1 << labels[v] for v in iter_bits(I)))
        if is_free(D, True) and is_maximal_free(D, True):
            out.add(D.bits)
    return out


@dataclass
class ClaimsReport:
    group: str
    zero_pairs: int = 0
    zero_max_common: int = 0
    mixed_pairs: int = 0
    mixed_max_common: int = 0
    doubled_pairs: int = 0
    doubled_max_common: int = 0
    doubled_bound: float = 0.0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ok"] = self.ok
        return d


def verify_claims_512_515(G: AbelianGroup) -> ClaimsReport:
    """Overlap counts between the generated families of different ``(A, S)`` seeds.

    ``A`` runs over non-identity cosets of index-2 subgroups, ``S`` over
    ``{0}`` and ``{0, s}`` with ``s`` of order 2 outside ``A``.  Checks:
    at most one common set for ``(A,{0})`` vs ``(A',{0})``, none for
    ``(A,{0})`` vs ``(A',{0,s})``, and at most ``3^(n/12)`` for
    ``(A,{0,s})`` vs ``(A',{0,s'})``.
    """
    if G.n % 2:
        raise ValueError(f"{G} has odd order")
    if G.n > CLAIMS_CAP:
        raise ValueError(f"claim verification capped at order {CLAIMS_CAP}")
    cosets = [H.members.complement() for H in index2_subgroups(G)]
    invol = order2_elements(G).to_list()
    zero = G.subset([0])
    singles = {i: generated_sets(G, zero, A) for i, A in enumerate(cosets)}
    doubles = {}
    for i, A in enumerate(cosets):
        for s in invol:
            if s not in A:
                doubles[(i, s)] = generated_sets(G, G.subset([0, s]), A)

    rep = ClaimsReport(group=G.spec, doubled_bound=3 ** (G.n / 12))
    keys = list(singles)
    for a in range(len(keys)):
        for b in range(a + 1, len(keys)):
            common = len(singles[keys[a]] & singles[keys[b]])
            rep.zero_pairs += 1
            rep.zero_max_common = max(rep.zero_max_common, common)
            if common > 1:
                rep.violations.append(f"(A{keys[a]},{{0}}) vs (A{keys[b]},{{0}}): {common} common")
    for i, gi in singles.items():
        for (j, s), gj in doubles.items():
            common = len(gi & gj)
            rep.mixed_pairs += 1
            rep.mixed_max_common = max(rep.mixed_max_common, common)
            if common:
                rep.violations.append(f"(A{i},{{0}}) vs (A{j},{{0,{s}}}): {common} common")
    dkeys = list(doubles)
    for a in range(len(dkeys)):
        for b in range(a + 1, len(dkeys)):
            common = len(doubles[dkeys[a]] & doubles[dkeys[b]])
            rep.doubled_pairs += 1
            rep.doubled_max_common = max(rep.doubled_max_common, common)
            if common > rep.doubled_bound:
                rep.violations.append(f"{dkeys[a]} vs {dkeys[b]}: {common} common > 3^(n/12)")
    return rep


# -- random subsets ----------------------------------------------------------------


@dataclass
class GnpSample:
    p: float
    seed: int
    trial: int
    subset: list[int]
    largest_sumfree_size: int
    ratio: float

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "GnpSample":
        return cls(**data)


def _gnp_trial(args) -> GnpSample:
    orders, p, seed, trial, oversize = args
    G = AbelianGroup(orders)
    rng = np.random.default_rng(np.random.SeedSequence([seed, trial]))
    keep = rng.random(G.n) < p
    attempts = 0
    while keep.sum() > GNP_SOLVER_CAP:
        if oversize != "resample" or attempts >= 100:
            raise ValueError(
                f"sample of size {int(keep.sum())} exceeds the exact solver cap {GNP_SOLVER_CAP}"
            )
        keep = rng.random(G.n) < p
        attempts += 1
    subset = [int(x) for x in np.flatnonzero(keep)]
    size = len(max_free_subset(G, G.subset(subset), distinct=False))
    ratio = 0.0 if p == 0 else size / (mu(G) * p)
    return GnpSample(p=p, seed=seed, trial=trial, subset=subset, largest_sumfree_size=size, ratio=ratio)


def gnp_experiment(
    G: AbelianGroup, p: float, trials: int, seed: int, workers: int = 1, oversize: str = "error"
) -> list[GnpSample]:
    """Largest sum-free subsets of seeded random subsets ``G_{n,p}``.

    Trial ``t`` draws from ``SeedSequence([seed, t])`` so the output does not
    depend on ``workers``.  ``oversize="resample"`` redraws samples that are
    too large for the exact solver instead of failing.
    """
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    tasks = [(G.factor_orders, float(p), seed, t, oversize) for t in range(trials)]
    if workers <= 1:
        return [_gnp_trial(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_gnp_trial, tasks))


def samples_to_json(samples: list[GnpSample]) -> str:
    """JSON lines, one sample per line, with sorted keys."""
    return "".join(json.dumps(s.to_dict(), sort_keys=True) + "\n" for s in samples)


def reports_to_csv(reports: list[CensusReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["group", "f", "f_star", "f_max", "f_star_max", "seconds"])
    for r in reports:
        w.writerow(["" if v is None else v for v in (r.group, r.f, r.f_star, r.f_max, r.f_star_max, f"{r.seconds:.6f}")])
    return buf.getvalue()
