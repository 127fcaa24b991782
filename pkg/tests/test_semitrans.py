import pytest

from stsemi.constructors import (
    applicable_types, example_semigroup, type1, type3,
)
from stsemi.pperm import PartialPerm, parse
from stsemi.search import enumerate_singular
from stsemi.semigroup import Semigroup, closure, conjugate, s_prime
from stsemi.semitrans import (
    NotSemitransitiveError, all_pass, audit_all, block_assignment, blocks, bound, gpd,
    is_semitransitive, is_transitive, nilpotent_partition, reach_matrix, sprime_blocks_agree,
    two_idempotents,
)

from conftest import random_permutation


def P(text, n):
    return parse(text, n)


SMALL = Semigroup([P("(1)(2]", 2), P("(1](2)", 2), P("(1,2]", 2), P("0", 2)])


def scan_reach(S):
    """Oracle: the pairs (x, xa) over every element, by direct enumeration."""
    return {(x, a(x)) for a in S for x in range(1, S.degree + 1) if a(x) is not None}


class TestReach:
    def test_small(self):
        assert reach_matrix(SMALL).pairs() == {(1, 1), (2, 2), (1, 2)}

    def test_zero(self):
        assert reach_matrix(Semigroup([P("0", 3)])).pairs() == set()

    def test_example1(self):
        S = example_semigroup(1)
        blk = {x: (x + 1) // 2 for x in range(1, 9)}
        expected = {(x, y) for x in range(1, 9) for y in range(1, 9) if blk[x] <= blk[y]}
        assert scan_reach(S) == expected
        assert reach_matrix(S).pairs() == expected

    def test_transitive_for_closed(self):
        for S in (example_semigroup(2), type3(9, 3), closure([P("(1,2](3,4]", 4), P("(2,3]", 4)])):
            assert reach_matrix(S).is_transitive_relation()


class TestSemitransitive:
    def test_example1(self):
        S = example_semigroup(1)
        assert is_semitransitive(S) and not is_transitive(S)

    def test_uncovered_pair(self):
        S = Semigroup([P("(1)(2]", 2), P("(1](2)", 2), P("0", 2)])
        assert not is_semitransitive(S)
        assert reach_matrix(S).uncovered() == [(1, 2)]

    @pytest.mark.parametrize("n", [2, 3])
    def test_full_singular_part(self, n):
        assert is_semitransitive(Semigroup(enumerate_singular(n)))


class TestBlocks:
    def test_example1(self):
        assert blocks(example_semigroup(1)).as_lists() == [[1, 2], [3, 4], [5, 6], [7, 8]]

    def test_example2(self):
        bs = blocks(example_semigroup(2))
        assert bs.as_lists() == [[1, 2], [3, 4, 5, 6], [7, 8, 9, 10]]
        assert bs.sizes == (2, 4, 4) and bs.t == 2

    def test_small(self):
        assert blocks(SMALL).as_lists() == [[1], [2]]

    def test_not_semitransitive(self):
        with pytest.raises(NotSemitransitiveError):
            blocks(Semigroup([P("(1)(2]", 2), P("(1](2)", 2), P("0", 2)]))

    def test_conjugation_relabels_blocks(self, rng):
        for tp in applicable_types(12)[:12]:
            S = tp.build()
            sigma = random_permutation(rng, 12)
            moved = [sorted(sigma(x) for x in b) for b in blocks(S).blocks]
            assert blocks(conjugate(S, sigma)).as_lists() == moved


class TestBlockAssignment:
    def test_example1(self):
        S = example_semigroup(1)
        g, h = two_idempotents(S)
        ba = block_assignment(S, blocks(S), g, h)
        assert ba.A == {1} and ba.B == {2, 3, 4}
        assert ba.B_i == {1: frozenset({1, 2, 3})}

    def test_example3(self):
        S = example_semigroup(3)
        g, h = two_idempotents(S)
        assert g == P("(1)(2)(5)(6)", 8)
        ba = block_assignment(S, blocks(S), g, h)
        assert ba.A == {1, 3} and ba.B == {2, 4}
        assert ba.B_i == {1: frozenset({1, 3}), 3: frozenset({-1, 1})}

    def test_two_blocks(self):
        S = type1(4, 2)
        g, h = two_idempotents(S)
        ba = block_assignment(S, blocks(S), g, h)
        assert (ba.A, ba.B, ba.B_i) == ({1}, {2}, {1: frozenset({1})})

    def test_split_block_rejected(self):
        S = example_semigroup(1)
        g, h = two_idempotents(S)
        with pytest.raises(ValueError):
            block_assignment(S, blocks(S), P("(1)", 8), h)


class TestNilpotentPartition:
    def test_example1(self):
        S = example_semigroup(1)
        g, h = two_idempotents(S)
        npart = nilpotent_partition(S, g, h, blocks(S))
        assert len(npart.N) == 6 == 8 - 2
        assert not npart.not_nilpotent and not npart.nonuniform

    def test_example3(self):
        S = example_semigroup(3)
        g, h = two_idempotents(S)
        npart = nilpotent_partition(S, g, h, blocks(S))
        nz = lambda s: {a for a in s if not a.is_zero}
        assert (len(nz(npart.N12)), len(nz(npart.N21)), len(npart.N)) == (4, 2, 6)

    def test_levels_are_block_jumps(self):
        S = example_semigroup(1)
        g, h = two_idempotents(S)
        npart = nilpotent_partition(S, g, h, blocks(S))
        assert npart.level[P("(1,3](2,4]", 8)] == 1
        assert npart.level[P("(1,7](2,8]", 8)] == 3
        assert npart.level[P("(3,5,7](4,6,8]", 8)] == 1
        assert all(v >= 1 for v in npart.level.values())


def test_gpd_and_bound():
    assert (gpd(8), gpd(7), gpd(12), gpd(2), gpd(9)) == (4, 1, 6, 1, 3)
    assert (bound(8), bound(2), bound(4)) == (13, 4, 7)
    with pytest.raises(ValueError):
        gpd(1)


class TestAudits:
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_examples_pass(self, k):
        reports = audit_all(example_semigroup(k))
        assert [r.status for r in reports] == ["pass"] * 8

    def test_named_details(self):
        rep = {r.name: r for r in audit_all(example_semigroup(1))}
        assert rep["nilpotent_count"].detail == "|N|=6 n-t=6"
        assert rep["lower_bound"].detail == "|S|=15 bound=13"
        assert "2 group, 4 nilpotent" in rep["group_or_nilpotent"].detail
        rep2 = {r.name: r for r in audit_all(example_semigroup(2))}
        assert rep2["divisibility"].detail == "sizes=[2, 4, 4] t=2"

    def test_corrupted_extra_idempotent(self):
        S = example_semigroup(1)
        bad = closure(list(S) + [PartialPerm.identity(8, [1])])
        rep = {r.name: r for r in audit_all(bad)}
        two = rep["two_idempotents"]
        assert not two.conclusion_holds and two.witnesses
        # the enlarged semigroup exceeds 2n, so the lemma does not apply
        assert len(bad) > 16 and two.status == "vacuous"

    def test_corrupted_missing_element(self):
        S = example_semigroup(1)
        broken = Semigroup([a for a in S if a != P("(1,3](2,4]", 8)], check=False)
        reports = audit_all(broken)
        assert all(r.status == "vacuous" for r in reports[:2])

    def test_corrupted_block_domain(self):
        # singular part of I_2: one block {1,2}, split by the idempotent (1)(2]
        S = Semigroup(enumerate_singular(2))
        rep = {r.name: r for r in audit_all(S)}
        assert blocks(S).as_lists() == [[1, 2]]
        assert rep["block_domains"].conclusion_holds is False
        assert len(rep["block_domains"].witnesses) == 2
        assert rep["block_domains"].status == "vacuous"  # |S| = 5 > 2n

    def test_failing_conclusion_has_witness(self):
        S = Semigroup(enumerate_singular(3))
        for r in audit_all(S):
            if not r.conclusion_holds:
                assert r.witnesses, r.name

    def test_not_semitransitive_is_vacuous(self):
        S = Semigroup([P("(1)(2]", 2), P("(1](2)", 2), P("0", 2)])
        assert all(r.status == "vacuous" for r in audit_all(S))


def _minimal_instances(nmax):
    for n in range(2, nmax + 1):
        for tp in applicable_types(n, gpd(n)):
            yield tp


@pytest.mark.parametrize("tp", list(_minimal_instances(14)), ids=lambda tp: tp.label)
def test_constructed_minimal_structure(tp):
    S = tp.build()
    g, h = two_idempotents(S)
    bs = blocks(S)
    ba = block_assignment(S, bs, g, h)
    assert len(ba.union()) == bs.m - 1
    npart = nilpotent_partition(S, g, h, bs)
    assert len(npart.N) == tp.n - tp.p
    assert not npart.nonuniform
    assert sprime_blocks_agree(S)
    assert blocks(s_prime(S, g, h)) == bs
    assert all_pass(audit_all(S))
