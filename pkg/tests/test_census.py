import json

import pytest

from schurkit.abelian import abelian_groups_of_order, index2_subgroups, make_group, mu, order2_elements
from schurkit.census import (
    CensusReport,
    GnpSample,
    census,
    count_extensions,
    full_census,
    gnp_experiment,
    reports_to_csv,
    restricted_maximal_count,
    samples_to_json,
    verify_claims_512_515,
)
from schurkit.sumfree import is_free, is_maximal_free

from . import oracles

SMALL_GROUPS = [G for n in range(2, 13) for G in abelian_groups_of_order(n)]


@pytest.mark.parametrize("G", SMALL_GROUPS, ids=lambda G: G.spec)
def test_census_against_subset_oracle(G):
    orders = list(G.factor_orders)
    f, fmax = oracles.census_counts(orders, distinct=False)
    fs, fsmax = oracles.census_counts(orders, distinct=True)
    rep = full_census(G)
    assert (rep.f, rep.f_max, rep.f_star, rep.f_star_max) == (f, fmax, fs, fsmax)
    assert census(G, distinct=False, maximal_only=True).f_max == fmax
    assert census(G, distinct=True, maximal_only=True).f_star_max == fsmax


# frozen from the subset-filter oracle in tests/oracles.py
FROZEN = {
    "2": (2, 4, 1, 1),
    "5": (7, 20, 2, 6),
    "6": (14, 34, 5, 12),
    "2,2": (7, 14, 3, 3),
    "2,2,2": (64, 128, 7, 7),
    "14": (None, 907, None, 128),
    "2,2,3": (226, None, 14, None),
}


@pytest.mark.parametrize("spec", sorted(FROZEN))
def test_census_frozen(spec):
    G = make_group([int(t) for t in spec.split(",")])
    f, fs, fmax, fsmax = FROZEN[spec]
    rep = full_census(G)
    for got, want in ((rep.f, f), (rep.f_star, fs), (rep.f_max, fmax), (rep.f_star_max, fsmax)):
        if want is not None:
            assert got == want


def test_census_z5_squared():
    G = make_group([5, 5])
    rep = census(G, distinct=False)
    assert (rep.f, rep.f_max) == (12513, 372)
    rep = census(G, distinct=True)
    assert (rep.f_star, rep.f_star_max) == (32530, 2732)


def test_census_examples():
    assert census(make_group([2]), distinct=True, maximal_only=True, witnesses=5).witnesses == [[0, 1]]
    rep = census(make_group([5]), distinct=False, maximal_only=True, witnesses=5)
    assert rep.f_max == 2 and sorted(rep.witnesses) == [[1, 4], [2, 3]]
    assert census(make_group([6]), distinct=True, maximal_only=True).f_star_max >= 2


def test_f_le_f_star():
    for G in SMALL_GROUPS:
        rep = full_census(G)
        assert rep.f <= rep.f_star
        assert rep.f_max >= 1 and rep.f_star_max >= 1


def test_witnesses_are_maximal():
    for spec in ([8], [3, 3], [4, 3], [2, 2, 2, 2]):
        G = make_group(spec)
        for distinct in (False, True):
            rep = census(G, distinct=distinct, witnesses=50)
            for w in rep.witnesses:
                S = G.subset(w)
                assert is_free(S, distinct) and is_maximal_free(S, distinct)


def test_caps():
    with pytest.raises(ValueError):
        census(make_group([27]), distinct=False)
    with pytest.raises(ValueError):
        census(make_group([33]), distinct=False, maximal_only=True)


def test_parallel_census_matches_serial():
    G = make_group([4, 3])
    for distinct in (False, True):
        a = census(G, distinct)
        b = census(G, distinct, workers=2)
        assert (a.f, a.f_star, a.f_max, a.f_star_max) == (b.f, b.f_star, b.f_max, b.f_star_max)


def test_report_roundtrip_and_csv():
    rep = full_census(make_group([6]))
    back = CensusReport.from_dict(json.loads(json.dumps(rep.to_dict())))
    assert back == rep
    lines = reports_to_csv([rep]).splitlines()
    assert lines[0] == "group,f,f_star,f_max,f_star_max,seconds"
    assert lines[1].startswith("6,14,34,5,12,")


def test_count_extensions_examples():
    Z6 = make_group([6])
    ext = count_extensions(Z6, Z6.subset([0]), Z6.subset([1, 3, 5]), check_maximal=True)
    assert (ext.mis_count, ext.maximal_count) == (2, 2)

    Z8 = make_group([8])
    ext = count_extensions(Z8, Z8.subset([0, 4]), Z8.subset([1, 3, 5, 7]), check_maximal=True)
    assert ext.mis_count == 4
    assert ext.maximal_count == restricted_maximal_count(Z8, Z8.subset([0, 4]), Z8.subset([1, 3, 5, 7]))

    Z7 = make_group([7])
    ext = count_extensions(Z7, Z7.subset(), Z7.subset([3, 4]), distinct=False, check_maximal=True)
    assert ext.mis_count == 1 and ext.maximal_count == 1
    # {2,3,4} is still distinct sum-free, so {3,4} is not maximal in that sense
    ext = count_extensions(Z7, Z7.subset(), Z7.subset([3, 4]), check_maximal=True)
    assert ext.mis_count == 1 and ext.maximal_count == 0


def test_count_extensions_errors():
    Z6 = make_group([6])
    with pytest.raises(ValueError):
        count_extensions(Z6, Z6.subset([1, 2, 3]), Z6.subset([5]))
    with pytest.raises(ValueError):
        count_extensions(Z6, Z6.subset([1]), Z6.subset([1, 3]))


def test_extension_count_equivalence():
    checked = 0
    for n in range(2, 17, 2):
        for G in abelian_groups_of_order(n):
            for H in index2_subgroups(G):
                A = H.members.complement()
                seeds = [G.subset([0])] + [G.subset([0, s]) for s in order2_elements(G) if s in H.members]
                for S in seeds:
                    ext = count_extensions(G, S, A, check_maximal=True)
                    assert ext.maximal_count <= ext.mis_count
                    assert ext.maximal_count == restricted_maximal_count(G, S, A)
                    checked += 1
    assert checked > 50


def test_claims_examples():
    for spec in ([6], [2, 2, 3], [8], [4, 2], [2, 2, 2]):
        rep = verify_claims_512_515(make_group(spec))
        assert rep.ok, rep.violations
    rep = verify_claims_512_515(make_group([4, 2]))
    assert rep.mixed_pairs > 0 and rep.mixed_max_common == 0


def test_claims_z2_squared_overlap():
    # {0,1,3} is generated both from (A={1,3}, {0}) and from (A'={2,3}, {0,1})
    G = make_group([2, 2])
    rep = verify_claims_512_515(G)
    assert rep.mixed_max_common == 1
    assert any("{0,1}" in v for v in rep.violations)
    assert is_maximal_free(G.subset([0, 1, 3]), distinct=True)


def test_claims_errors():
    with pytest.raises(ValueError):
        verify_claims_512_515(make_group([9]))
    with pytest.raises(ValueError):
        verify_claims_512_515(make_group([26]))


def test_gnp_deterministic():
    G = make_group([5, 5])
    a = samples_to_json(gnp_experiment(G, 0.5, 20, seed=42))
    b = samples_to_json(gnp_experiment(G, 0.5, 20, seed=42))
    c = samples_to_json(gnp_experiment(G, 0.5, 20, seed=42, workers=2))
    assert a == b == c
    assert a != samples_to_json(gnp_experiment(G, 0.5, 20, seed=43))


def test_gnp_invariants():
    G = make_group([5, 5])
    for s in gnp_experiment(G, 0.5, 30, seed=1):
        assert set(s.subset) <= set(range(G.n))
        assert s.largest_sumfree_size <= min(len(s.subset), mu(G))
        assert s.ratio > 0
        back = GnpSample.from_dict(json.loads(json.dumps(s.to_dict())))
        assert back == s


def test_gnp_mean_ratio_example():
    samples = gnp_experiment(make_group([5, 5]), 0.5, 100, seed=42)
    mean = sum(s.ratio for s in samples) / len(samples)
    assert 0 < mean <= 1.5
    assert mean == pytest.approx(1.434)


def test_gnp_extremes():
    G = make_group([5, 5])
    full = gnp_experiment(G, 1.0, 2, seed=0)
    assert all(s.ratio == 1.0 and len(s.subset) == 25 for s in full)
    empty = gnp_experiment(G, 0.0, 2, seed=0)
    assert all(s.subset == [] and s.largest_sumfree_size == 0 and s.ratio == 0 for s in empty)


def test_gnp_oversize():
    G = make_group([64])
    with pytest.raises(ValueError, match="cap"):
        gnp_experiment(G, 0.9, 1, seed=0)
    samples = gnp_experiment(G, 0.55, 3, seed=0, oversize="resample")
    assert all(len(s.subset) <= 40 for s in samples)
    with pytest.raises(ValueError):
        gnp_experiment(G, 1.5, 1, seed=0)
