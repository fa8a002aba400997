"""Command-line entry point: ``schurkit <command> ...``.

Exit status is 0 on success, 1 when a checked invariant fails or the
conjecture scan finds a counterexample, and 2 on usage errors (bad group
spec, flags outside caps).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field

from . import abelian, census, linkgraph, misolver, sumfree
from .abelian import AbelianGroup, parse_group_spec

DEFAULT_SEED = misolver.DEFAULT_SEED

_DEFAULT_MAX_N = {
    "classify": abelian.MAX_ORDER,
    "mu": abelian.MAX_ORDER,
    "subgroups": abelian.TABLE_CAP,
    "census": census.CENSUS_CAP,
    "linkgraph": abelian.TABLE_CAP,
    "construct": 1024,
    "gnp": 1024,
    "verify-claims": 24,
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    group: str | None = None
    seed: int = DEFAULT_SEED
    max_n: int | None = None
    budget: int | None = None
    workers: int = 1
    format: str = "json"
    out: str | None = None
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        return cls(**data)


def parse_report(text: str):
    """Inverse of the JSON report writer: returns ``(RunConfig, result)``."""
    data = json.loads(text)
    config = RunConfig.from_dict(data["config"])
    result = data["result"]
    if config.subcommand == "census":
        result = census.CensusReport.from_dict(result)
    elif config.subcommand == "gnp":
        result = [census.GnpSample.from_dict(s) for s in result]
    elif config.subcommand == "conjecture-mis" and "graphs_checked" in result:
        result = misolver.ScanReport.from_dict(result)
    return config, result


def _elements(text: str, G: AbelianGroup, name: str) -> list[int]:
    cleaned = "".join(text.split())
    if not cleaned:
        return []
    out = []
    col = 1
    for part in cleaned.split(","):
        if not part.isdigit() or int(part) >= G.n:
            raise UsageError(f"{name}: bad element {part!r} at column {col} (need 0 <= x < {G.n})")
        out.append(int(part))
        col += len(part) + 1
    return out


def _group(cfg: RunConfig) -> AbelianGroup:
    try:
        G = parse_group_spec(cfg.group)
    except (ValueError, OverflowError) as exc:
        raise UsageError(str(exc)) from None
    cap = cfg.max_n if cfg.max_n is not None else _DEFAULT_MAX_N[cfg.subcommand]
    if G.n > cap:
        raise UsageError(f"group order {G.n} exceeds --max-n cap {cap}")
    return G


def cmd_classify(cfg: RunConfig):
    G = _group(cfg)
    t = abelian.classify(G)
    alphas, r2, k = G.two_primary
    result = {"type": str(t), "mu": abelian.mu(G), "n": G.n, "exponent": G.exponent,
              "alphas": list(alphas), "r1": G.r1, "r2": r2, "r": G.r, "odd_part": k}
    return result, f"{t}, mu={result['mu']}", 0


def cmd_mu(cfg: RunConfig):
    G = _group(cfg)
    value = abelian.mu(G)
    return {"mu": value, "type": str(abelian.classify(G))}, str(value), 0


def cmd_subgroups(cfg: RunConfig):
    G = _group(cfg)
    p = cfg.params.get("prime") or 2
    if p not in abelian.prime_factors(G.n):
        raise UsageError(f"{p} is not a prime divisor of |G| = {G.n}")
    subs = abelian.subgroups_of_prime_index(G, p)
    rows = [{"members": H.members.to_list(), "rank2": H.rank2, "index": H.index,
             "hom": list(H.hom.images)} for H in subs]
    result = {"prime": p, "count": len(rows), "subgroups": rows}
    if p == 2:
        result["rank_r"] = sum(1 for H in subs if H.rank2 == G.r)
        result["rank_r_minus_1"] = sum(1 for H in subs if H.rank2 == G.r - 1)
    text = "\n".join(f"rank2={r['rank2']} {r['members']}" for r in rows)
    return result, text, 0


def cmd_census(cfg: RunConfig):
    G = _group(cfg)
    rep = census.census(
        G,
        distinct=cfg.params.get("distinct", False),
        maximal_only=cfg.params.get("maximal", False),
        witnesses=cfg.params.get("witnesses"),
        workers=cfg.workers,
    )
    d = rep.to_dict()
    text = ", ".join(f"{k}={v}" for k, v in d.items() if k in ("f", "f_star", "f_max", "f_star_max") and v is not None)
    return rep, text, 0


def cmd_linkgraph(cfg: RunConfig):
    G = _group(cfg)
    S = G.subset(_elements(cfg.params.get("S", ""), G, "S"))
    B = G.subset(_elements(cfg.params.get("B", ""), G, "B"))
    L = linkgraph.build_link_graph(G, S, B)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        prof = linkgraph.degree_profile(L)
    ec = linkgraph.edge_counts(L)
    graph, _ = L.to_simple_graph()
    result = L.to_dict()
    result.update({
        "mis": misolver.enumerate_mis(graph).count,
        "components": dict(sorted(linkgraph.component_census(L).items())),
        "max_degree": prof.max_degree,
        "min_degree": prof.min_degree,
        "claims_checked": prof.claims_checked,
        "claims_hold": prof.claims_hold,
        "claim_failures": prof.failures,
        "e1": ec.e1, "e2": ec.e2, "edge_lower_bound": ec.lower_bound,
    })
    code = 0
    if prof.claims_checked and not (prof.claims_hold and ec.bound_holds):
        code = 1
    text = "\n".join(f"{x} {y} type{t}" for x, y, t in result["edges"])
    return result, text, code


def cmd_construct(cfg: RunConfig):
    G = _group(cfg)
    family = cfg.params.get("family", "prop53")
    try:
        if family == "prop32":
            F = sumfree.construct_prop32(G)
        elif family == "prop53":
            F = sumfree.construct_prop53(G)
        elif family == "z5k":
            if set(G.factor_orders) != {5}:
                raise UsageError("z5k needs a group spec of the form 5,5,...,5")
            F = sumfree.construct_z5k(len(G.factor_orders))
        else:
            raise UsageError(f"unknown family {family!r}")
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result = F.to_dict()
    free_ok = F.verify_free()
    conflict_ok = F.verify_pairwise_conflict(seed=cfg.seed)
    result.update({"all_free": free_ok, "pairwise_conflicting": conflict_ok,
                   "count_matches": len(F.generated_sets) == F.expected_count})
    ok = free_ok and conflict_ok and result["count_matches"]
    text = f"{F.kind}: {len(F.generated_sets)} sets (expected {F.expected_count}), verified={ok}"
    return result, text, 0 if ok else 1


def cmd_conjecture_mis(cfg: RunConfig):
    graph_file = cfg.params.get("graph")
    if graph_file:
        with open(graph_file) as fh:
            try:
                g = misolver.parse_graph_text(fh.read())
            except ValueError as exc:
                raise UsageError(f"{graph_file}: {exc}") from None
        count = misolver.enumerate_mis(g).count
        pm = misolver.has_perfect_matching(g)
        bound = 2 ** (g.n / 2)
        counter = pm and count > bound
        result = {"n": g.n, "mis": count, "perfect_matching": pm, "bound": bound, "counterexample": counter}
        return result, f"mis={count} perfect_matching={pm} bound={bound:g}", 1 if counter else 0
    n = cfg.params.get("n")
    if n is None:
        raise UsageError("--n or --graph is required")
    try:
        rep = misolver.conjecture53_scan(n, cfg.params.get("mode", "exhaustive"), cfg.budget, cfg.seed, cfg.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = (f"n={rep.n} mode={rep.mode} checked={rep.graphs_checked} max_mis={rep.max_mis} "
            f"attainers={rep.n_attainers} counterexamples={len(rep.counterexamples)}")
    return rep, text, 1 if rep.counterexamples else 0


def cmd_gnp(cfg: RunConfig):
    G = _group(cfg)
    try:
        samples = census.gnp_experiment(
            G, cfg.params["p"], cfg.params.get("trials", 1), cfg.seed, cfg.workers,
            oversize=cfg.params.get("oversize", "error"),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    mean = sum(s.ratio for s in samples) / len(samples)
    return samples, f"trials={len(samples)} mean_ratio={mean:.6f}", 0


def cmd_verify_claims(cfg: RunConfig):
    G = _group(cfg)
    try:
        rep = census.verify_claims_512_515(G)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = "ok" if rep.ok else "\n".join(rep.violations)
    return rep.to_dict(), text, 0 if rep.ok else 1


COMMANDS = {
    "classify": cmd_classify,
    "mu": cmd_mu,
    "subgroups": cmd_subgroups,
    "census": cmd_census,
    "linkgraph": cmd_linkgraph,
    "construct": cmd_construct,
    "conjecture-mis": cmd_conjecture_mis,
    "gnp": cmd_gnp,
    "verify-claims": cmd_verify_claims,
}

_TEXT_DEFAULT = {"classify", "mu"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "csv", "text"], default=None)
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--budget", type=int, default=None)
    common.add_argument("--max-n", type=int, default=None)

    parser = argparse.ArgumentParser(prog="schurkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def group_cmd(name, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("group", help='comma-separated cyclic orders, e.g. "4,2,3"')
        return p

    group_cmd("classify", "type and mu of a group")
    group_cmd("mu", "largest sum-free set size")
    p = group_cmd("subgroups", "subgroups of prime index")
    p.add_argument("--prime", type=int, default=2)
    p = group_cmd("census", "count (maximal) (distinct) sum-free sets")
    p.add_argument("--distinct", action="store_true")
    p.add_argument("--maximal", action="store_true", help="count maximal sets only")
    p.add_argument("--witnesses", type=int, default=None)
    p = group_cmd("linkgraph", "distinct link graph of S on B")
    p.add_argument("--S", dest="S", default="", help="comma-separated element indices")
    p.add_argument("--B", dest="B", default="", help="comma-separated element indices")
    p = group_cmd("construct", "explicit extremal families")
    p.add_argument("--family", choices=["prop32", "z5k", "prop53"], default="prop53")
    p = sub.add_parser("conjecture-mis", parents=[common], help="scan perfect-matching graphs")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--mode", choices=["exhaustive", "random"], default="exhaustive")
    p.add_argument("--graph", default=None, help="check one graph in 'n m / u v' text format")
    p = group_cmd("gnp", "largest sum-free subsets of random subsets")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--oversize", choices=["error", "resample"], default="error",
                   help="what to do with samples too large for the exact solver")
    group_cmd("verify-claims", "overlap checks between generated families")
    return parser


_GLOBAL = {"subcommand", "group", "seed", "max_n", "budget", "workers", "format", "out"}


def _render(cfg: RunConfig, result, text: str) -> str:
    if cfg.format == "text":
        return text + "\n"
    if cfg.format == "csv":
        if cfg.subcommand == "census":
            return census.reports_to_csv([result])
        if cfg.subcommand == "gnp":
            lines = ["p,seed,trial,size,largest_sumfree_size,ratio"]
            lines += [f"{s.p},{s.seed},{s.trial},{len(s.subset)},{s.largest_sumfree_size},{s.ratio!r}" for s in result]
            return "\n".join(lines) + "\n"
        raise UsageError(f"csv output is not available for {cfg.subcommand}")
    if hasattr(result, "to_dict"):
        payload = result.to_dict()
    elif isinstance(result, list):
        payload = [r.to_dict() for r in result]
    else:
        payload = result
    return json.dumps({"config": cfg.to_dict(), "result": payload}, sort_keys=True, indent=2) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    ns = vars(args)
    cfg = RunConfig(
        subcommand=args.subcommand,
        group=ns.get("group"),
        seed=args.seed,
        max_n=args.max_n,
        budget=args.budget,
        workers=args.workers,
        format=args.format or ("text" if args.subcommand in _TEXT_DEFAULT else "json"),
        out=args.out,
        params={k: v for k, v in ns.items() if k not in _GLOBAL},
    )
    try:
        if cfg.workers < 1:
            raise UsageError("--workers must be >= 1")
        result, text, code = COMMANDS[cfg.subcommand](cfg)
        output = _render(cfg, result, text)
    except UsageError as exc:
        print(f"schurkit {cfg.subcommand}: error: {exc}", file=sys.stderr)
        return 2
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(output)
    else:
        sys.stdout.write(output)
    return code


def run() -> None:
    sys.exit(main())
