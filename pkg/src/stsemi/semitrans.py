"""Semitransitivity: reachability preorder, transitivity blocks and lemma audits.

``S`` is semitransitive when for every pair of points ``x, y`` (equal or not)
some element sends ``x`` to ``y`` or ``y`` to ``x``.  Mutual reachability
classes are the transitivity blocks; for a semitransitive semigroup they are
linearly ordered, ``X_1 >= X_2 >= ... >= X_m``, arrows only pointing from a
block to itself or to a later one.

The audit functions check, on a concrete semigroup, the conclusions of the
structural facts that force ``|S| >= 2n - p + 1``.  Each reports whether its
hypothesis holds and whether its conclusion holds, independently, so that it
can be run on anything.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .pperm import PartialPerm
from .semigroup import Semigroup, is_closed, is_singular, local, s_prime, units_and_nilpotents


class NotSemitransitiveError(ValueError):
    pass


def gpd(n: int) -> int:
    """Greatest proper divisor of n (1 for primes)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    d = 2
    while d * d <= n:
        if n % d == 0:
            return n // d
        d += 1
    return 1


def bound(n: int) -> int:
    """The minimal size 2n - gpd(n) + 1 of a semitransitive singular semigroup."""
    return 2 * n - gpd(n) + 1


@dataclass(frozen=True)
class ReachMatrix:
    n: int
    reach: tuple  # reach[x-1][y-1] iff some element sends x to y

    def __call__(self, x: int, y: int) -> bool:
        return self.reach[x - 1][y - 1]

    def pairs(self) -> set:
        return {(x + 1, y + 1) for x in range(self.n) for y in range(self.n) if self.reach[x][y]}

    def uncovered(self) -> list:
        """Pairs x <= y reachable in neither direction."""
        r = self.reach
        return [(x + 1, y + 1) for x in range(self.n) for y in range(x, self.n)
                if not r[x][y] and not r[y][x]]

    def is_transitive_relation(self) -> bool:
        r, n = self.reach, self.n
        return all(r[x][z] for x in range(n) for y in range(n) if r[x][y]
                   for z in range(n) if r[y][z])


def reach_matrix(S: Semigroup) -> ReachMatrix:
    n = S.degree
    r = [[False] * n for _ in range(n)]
    for a in S:
        for i, v in enumerate(a.targets):
            if v:
                r[i][v - 1] = True
    return ReachMatrix(n, tuple(tuple(row) for row in r))


def is_semitransitive(S: Semigroup) -> bool:
    return not reach_matrix(S).uncovered()


def is_transitive(S: Semigroup) -> bool:
    return all(all(row) for row in reach_matrix(S).reach)


@dataclass(frozen=True)
class BlockStructure:
    blocks: tuple  # ordered tuple of frozensets, X_1 first

    @property
    def sizes(self) -> tuple:
        return tuple(len(b) for b in self.blocks)

    @property
    def m(self) -> int:
        return len(self.blocks)

    @property
    def t(self) -> int:
        return min(self.sizes)

    def index(self, x: int) -> int:
        """1-based block index of point x."""
        for i, b in enumerate(self.blocks, 1):
            if x in b:
                return i
        raise KeyError(x)

    def index_map(self) -> dict:
        return {x: i for i, b in enumerate(self.blocks, 1) for x in b}

    def as_lists(self) -> list:
        return [sorted(b) for b in self.blocks]


def blocks(S: Semigroup) -> BlockStructure:
    rm = reach_matrix(S)
    bad = rm.uncovered()
    if bad:
        raise NotSemitransitiveError(f"points {bad[0]} are not comparable")
    r, n = rm.reach, rm.n
    classes = {}
    for x in range(n):
        key = frozenset(y for y in range(n) if r[x][y] and r[y][x])
        classes.setdefault(key, None)
    # a block reaching more points sits higher in the order
    ordered = sorted(classes, key=lambda c: (-sum(r[min(c)]), min(c)))
    return BlockStructure(tuple(frozenset(y + 1 for y in c) for c in ordered))


def two_idempotents(S: Semigroup):
    """(g, h) with dom(g) containing X_1's first point when S has exactly two
    nonzero idempotents; otherwise None."""
    idem = S.nonzero_idempotents()
    if len(idem) != 2:
        return None
    a, b = idem
    try:
        first = min(blocks(S).blocks[0])
    except NotSemitransitiveError:
        first = 1
    return (a, b) if a(first) else (b, a)


@dataclass(frozen=True)
class BlockAssignment:
    A: frozenset
    B: frozenset
    B_i: dict  # i in A -> frozenset of (j - i) for j in B

    def union(self) -> frozenset:
        out = frozenset()
        for v in self.B_i.values():
            out |= v
        return out


def _aligned(e: PartialPerm, bs: BlockStructure):
    """Blocks split by dom(e): list of (block index, inside, outside)."""
    dom = e.domain()
    bad = []
    for i, b in enumerate(bs.blocks, 1):
        inside = b & dom
        if inside and inside != b:
            bad.append((i, sorted(inside), sorted(b - dom)))
    return bad


def block_assignment(S: Semigroup, bs: BlockStructure, g: PartialPerm, h: PartialPerm) -> BlockAssignment:
    for e in (g, h):
        bad = _aligned(e, bs)
        if bad:
            raise ValueError(f"block X_{bad[0][0]} is split by dom({e})")
    dg, dh = g.domain(), h.domain()
    A, B = set(), set()
    for i, b in enumerate(bs.blocks, 1):
        if b <= dg:
            A.add(i)
        elif b <= dh:
            B.add(i)
        else:
            raise ValueError(f"block X_{i} lies in neither dom(g) nor dom(h)")
    B_i = {i: frozenset(j - i for j in B) for i in sorted(A)}
    return BlockAssignment(frozenset(A), frozenset(B), B_i)


@dataclass(frozen=True)
class NilpotentPartition:
    N12: frozenset
    N21: frozenset
    N: frozenset
    level: dict  # element -> block jump, for elements whose arrows share one jump
    nonuniform: frozenset  # elements whose arrows jump by different amounts
    not_nilpotent: frozenset


def block_jumps(a: PartialPerm, index: dict) -> set:
    return {index[y] - index[x] for x, y in a.arrows()}


def nilpotent_partition(S: Semigroup, g: PartialPerm, h: PartialPerm, bs: BlockStructure) -> NilpotentPartition:
    N12 = local(S, g, h)
    N21 = local(S, h, g)
    N = frozenset(a for a in N12 | N21 if not a.is_zero)
    index = bs.index_map()
    level, nonuniform = {}, set()
    pool = set(N)
    for e in (g, h):
        _, nil, _ = units_and_nilpotents(S, e)
        pool.update(nil)
    for a in pool:
        jumps = block_jumps(a, index)
        if len(jumps) == 1:
            level[a] = jumps.pop()
        else:
            nonuniform.add(a)
    bad = frozenset(a for a in N if not a.is_nilpotent)
    return NilpotentPartition(N12, N21, N, level, frozenset(nonuniform), bad)


# -- audits -----------------------------------------------------------------

@dataclass
class AuditReport:
    name: str
    hypothesis_holds: bool
    conclusion_holds: bool
    witnesses: list = field(default_factory=list)
    detail: str = ""

    @property
    def status(self) -> str:
        if not self.hypothesis_holds:
            return "vacuous"
        return "pass" if self.conclusion_holds else "fail"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "hypothesis_holds": self.hypothesis_holds,
            "conclusion_holds": self.conclusion_holds,
            "witnesses": [str(w) for w in self.witnesses],
            "detail": self.detail,
        }


class _Context:
    """Shared facts for one audit run, computed once."""

    def __init__(self, S: Semigroup):
        self.S = S
        self.n = S.degree
        self.closed = is_closed(S)
        self.singular = is_singular(S)
        self.rm = reach_matrix(S)
        self.uncovered = self.rm.uncovered()
        self.semitransitive = not self.uncovered
        self.small = len(S) <= 2 * self.n
        self.base = self.closed and self.singular and self.semitransitive
        self.bs = blocks(S) if self.semitransitive else None
        self.gh = two_idempotents(S) if self.semitransitive else None
        self._sp = None

    @property
    def lemma_hyp(self) -> bool:
        return self.base and self.small

    @property
    def gh_hyp(self) -> bool:
        return self.lemma_hyp and self.gh is not None

    def missing_structure(self, report: AuditReport) -> AuditReport:
        if not self.semitransitive:
            report.witnesses.append(f"uncovered pair {self.uncovered[0]}")
            report.detail = "not semitransitive: no block structure"
        else:
            report.witnesses.extend(self.S.nonzero_idempotents())
            report.detail = "cannot single out two nonzero idempotents"
        report.conclusion_holds = False
        return report

    def sprime(self):
        if self._sp is None:
            g, h = self.gh
            parts = set()
            for e in (g, h):
                for f in (g, h):
                    parts |= local(self.S, e, f)
            self._sp = parts
        return self._sp


def audit_two_idempotents(ctx: _Context) -> AuditReport:
    r = AuditReport("two_idempotents", ctx.lemma_hyp, True)
    idem = ctx.S.nonzero_idempotents()
    if len(idem) != 2:
        r.conclusion_holds = False
        r.witnesses.extend(idem)
        r.detail = f"{len(idem)} nonzero idempotents"
        return r
    a, b = idem
    da, db = a.domain(), b.domain()
    if da & db:
        r.conclusion_holds = False
        r.witnesses.append(f"shared points {sorted(da & db)}")
    missing = set(range(1, ctx.n + 1)) - (da | db)
    if missing:
        r.conclusion_holds = False
        r.witnesses.append(f"uncovered points {sorted(missing)}")
    return r


def audit_block_domains(ctx: _Context) -> AuditReport:
    r = AuditReport("block_domains", ctx.lemma_hyp, True)
    if ctx.bs is None:
        return ctx.missing_structure(r)
    for e in ctx.S.idempotents():
        for i, inside, outside in _aligned(e, ctx.bs):
            r.conclusion_holds = False
            r.witnesses.append(f"{e} splits X_{i}: {inside} | {outside}")
    return r


def audit_aux_arrows(ctx: _Context) -> AuditReport:
    r = AuditReport("aux_arrows", ctx.closed and ctx.semitransitive, True)
    if ctx.bs is None:
        return ctx.missing_structure(r)
    index = ctx.bs.index_map()
    covered = set()
    for a in ctx.S:
        arr = a.arrows()
        if all(index[x] == index[y] for x, y in arr):
            covered.update(arr)
    for b in ctx.bs.blocks:
        for x in sorted(b):
            for y in sorted(b):
                if (x, y) not in covered:
                    r.conclusion_holds = False
                    r.witnesses.append(f"no block-preserving element has arrow {x}->{y}")
    return r


def audit_group_or_nilpotent(ctx: _Context) -> AuditReport:
    r = AuditReport("group_or_nilpotent", ctx.lemma_hyp, True)
    counts = []
    for e in ctx.S.nonzero_idempotents():
        group, nil, other = units_and_nilpotents(ctx.S, e)
        counts.append(f"{e}: {len(group)} group, {len(nil)} nilpotent")
        if other:
            r.conclusion_holds = False
            r.witnesses.extend(other)
    r.detail = "; ".join(counts)
    return r


def audit_nilpotent_no_selfblock(ctx: _Context) -> AuditReport:
    r = AuditReport("nilpotent_no_selfblock", ctx.gh_hyp, True)
    if ctx.bs is None or ctx.gh is None:
        return ctx.missing_structure(r)
    index = ctx.bs.index_map()
    for a in sorted(ctx.sprime()):
        if a.is_zero or not a.is_nilpotent:
            continue
        for x, y in a.arrows():
            if index[y] <= index[x]:
                r.conclusion_holds = False
                r.witnesses.append(f"{a} has arrow {x}->{y} within or backwards")
                break
    return r


def audit_nilpotent_count(ctx: _Context) -> AuditReport:
    r = AuditReport("nilpotent_count", ctx.gh_hyp, True)
    if ctx.bs is None or ctx.gh is None:
        return ctx.missing_structure(r)
    g, h = ctx.gh
    N = {a for a in local(ctx.S, g, h) | local(ctx.S, h, g) if not a.is_zero}
    need = ctx.n - ctx.bs.t
    r.detail = f"|N|={len(N)} n-t={need}"
    if len(N) < need:
        r.conclusion_holds = False
        r.witnesses.append(r.detail)
    return r


def audit_divisibility(ctx: _Context) -> AuditReport:
    r = AuditReport("divisibility", ctx.gh_hyp, True)
    if ctx.bs is None:
        return ctx.missing_structure(r)
    t = ctx.bs.t
    r.detail = f"sizes={list(ctx.bs.sizes)} t={t}"
    for i, ti in enumerate(ctx.bs.sizes, 1):
        if ti % t:
            r.conclusion_holds = False
            r.witnesses.append(f"t_{i}={ti} not divisible by t={t}")
    return r


def audit_lower_bound(ctx: _Context) -> AuditReport:
    r = AuditReport("lower_bound", ctx.base and ctx.n >= 2, True)
    if ctx.n < 2:
        r.detail = "degree 1"
        return r
    need = bound(ctx.n)
    r.detail = f"|S|={len(ctx.S)} bound={need}"
    if len(ctx.S) < need:
        r.conclusion_holds = False
        r.witnesses.append(r.detail)
    return r


AUDITS = (
    audit_two_idempotents,
    audit_block_domains,
    audit_aux_arrows,
    audit_group_or_nilpotent,
    audit_nilpotent_no_selfblock,
    audit_nilpotent_count,
    audit_divisibility,
    audit_lower_bound,
)


def audit_all(S: Semigroup) -> list:
    ctx = _Context(S)
    return [audit(ctx) for audit in AUDITS]


def all_pass(reports) -> bool:
    return all(r.status == "pass" for r in reports)


def sprime_blocks_agree(S: Semigroup) -> bool:
    """blocks(S') == blocks(S) for the two-idempotent subsemigroup S'."""
    gh = two_idempotents(S)
    if gh is None:
        raise ValueError("S does not have exactly two nonzero idempotents")
    return blocks(s_prime(S, *gh)) == blocks(S)
