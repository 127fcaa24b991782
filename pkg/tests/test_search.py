import math

import pytest

from stsemi.constructors import type1, type3, type4, type4_params
from stsemi.pperm import PartialPerm
from stsemi.semigroup import Semigroup, conjugate, is_closed, is_singular
from stsemi.search import (
    SearchConfig, SearchLimitExceeded, classify, enumerate_singular, minimal_search,
    verify_bound_sweep,
)
from stsemi.semitrans import all_pass, audit_all, bound, is_semitransitive

from conftest import random_permutation


def size_of_In(n):
    return sum(math.comb(n, k) ** 2 * math.factorial(k) for k in range(n + 1))


class TestEnumerate:
    def test_degree2(self):
        els = enumerate_singular(2)
        assert len(els) == 5 == size_of_In(2) - 2
        assert els[0] == PartialPerm.zero(2)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_counts(self, n):
        els = enumerate_singular(n)
        assert len(els) == size_of_In(n) - math.factorial(n)
        assert len(set(els)) == len(els)
        assert all(a.rank < n for a in els)

    def test_range(self):
        with pytest.raises(ValueError):
            enumerate_singular(7)


class TestConfig:
    def test_defaults(self):
        c = SearchConfig(4)
        assert c.max_size == 7 and c.prune_mode == "lemmas" and c.symmetry_breaking

    def test_large_needs_opt_in(self):
        with pytest.raises(ValueError):
            SearchConfig(5)
        assert SearchConfig(5, allow_large=True).max_size == bound(5)

    def test_bad_values(self):
        with pytest.raises(ValueError):
            SearchConfig(3, prune_mode="fast")
        with pytest.raises(ValueError):
            SearchConfig(3, max_size=0)


def test_search_degree2():
    r = minimal_search(SearchConfig(2), classify_results=True)
    assert r.minimal_cardinality == 4 == bound(2)
    assert r.classes == 1
    rep = r.representatives[0].semigroup
    target = Semigroup([PartialPerm([1, 0]), PartialPerm([0, 2]), PartialPerm([2, 0]),
                        PartialPerm([0, 0])])
    from stsemi.semigroup import are_similar
    assert are_similar(rep, target) is not None


@pytest.mark.parametrize("prune", ["none", "lemmas"])
@pytest.mark.parametrize("sym", [False, True])
def test_search_degree3_modes_agree(prune, sym):
    r = minimal_search(SearchConfig(3, prune_mode=prune, symmetry_breaking=sym))
    assert r.minimal_cardinality == 6 == bound(3)
    baseline = minimal_search(SearchConfig(3, prune_mode="none", symmetry_breaking=False))
    assert [x.semigroup for x in r.representatives] == [x.semigroup for x in baseline.representatives]


def test_search_degree3_threads_deterministic():
    a = minimal_search(SearchConfig(3, threads=1))
    b = minimal_search(SearchConfig(3, threads=2))
    assert [x.semigroup for x in a.representatives] == [x.semigroup for x in b.representatives]


def test_representatives_are_valid():
    r = minimal_search(SearchConfig(3), classify_results=True)
    for rep in r.representatives:
        S = rep.semigroup
        assert is_closed(S) and is_singular(S) and is_semitransitive(S)
        assert len(S) == r.minimal_cardinality
        assert all_pass(audit_all(S))
        assert rep.classification


def test_larger_budget_finds_same_minimum():
    r = minimal_search(SearchConfig(3, max_size=8))
    assert r.minimal_cardinality == 6


def test_too_small_budget():
    r = minimal_search(SearchConfig(3, max_size=5))
    assert r.minimal_cardinality is None and r.representatives == []


def test_node_limit():
    with pytest.raises(SearchLimitExceeded) as info:
        minimal_search(SearchConfig(3, symmetry_breaking=False, max_nodes=10))
    assert info.value.progress.nodes > 10


def test_progress_hook_called():
    seen = []
    minimal_search(SearchConfig(4), progress_hook=seen.append)
    assert seen and seen[-1].nodes >= 1000


class TestClassify:
    def test_type1_degree4(self):
        labels = [label for label, _ in classify(type1(4, 2))]
        assert any(label.startswith("Type 1") for label in labels)

    def test_conjugated_type3(self, rng):
        S = conjugate(type3(8, 4), random_permutation(rng, 8))
        labels = [label for label, _ in classify(S)]
        assert any(label.startswith("Type 3") for label in labels)

    def test_type4_degree9(self):
        labels = [label for label, _ in classify(type4(type4_params(3, 2, 2)))]
        assert "Type 4 (n=9, p=3, m=2, l=2)" in labels

    def test_unclassified(self):
        assert classify(type1(8, 2)) == []  # size 15 is not minimal for n = 8


class TestSweep:
    def test_degree8(self):
        rep = verify_bound_sweep([8])
        sizes = {row.label: row.size for row in rep.rows if row.label.startswith("Type 1")}
        assert sizes["Type 1 (n=8, p=2, m=4)"] == 15
        assert sizes["Type 1 (n=8, p=4, m=2)"] == 13
        assert rep.minima[8] == (13, 13) and rep.ok

    def test_degree9(self):
        rep = verify_bound_sweep([9])
        row = next(r for r in rep.rows if r.label == "Type 4 (n=9, p=3, m=2, l=2)")
        assert row.size == 16 == bound(9)

    def test_degree10(self):
        rep = verify_bound_sweep([10])
        sizes = {r.label: r.size for r in rep.rows}
        assert sizes["Type 4 (n=10, p=2, m=3, l=2)"] == 19
        assert sizes["Type 1 (n=10, p=5, m=2)"] == 16 == bound(10)
        assert rep.ok
