"""Exhaustive search for small semitransitive subsemigroups of I_n \\ S_n.

The search walks closed sets: from a closed set it adds one more element of
the singular part and re-closes.  Every node is expanded once, keyed either by
the set itself or, with symmetry breaking, by its canonical form under all
relabelings of the points.  Two prunes keep it small:

* size: a closed set larger than the current best can never shrink;
* coverage: each element has at most n-1 arrows, so a set still missing more
  comparable pairs than ``(best - |S|) * (n - 1)`` cannot be completed.

With ``prune_mode="lemmas"`` closed sets with three or more nonzero
idempotents are dropped as well; this is only applied while the size budget
is at most 2n, where such sets are known not to extend to semitransitive ones.
"""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from .constructors import applicable_types
from .pperm import PartialPerm
from .semigroup import Semigroup, are_similar, is_singular
from .semitrans import all_pass, audit_all, bound, gpd, is_semitransitive, is_transitive

log = logging.getLogger(__name__)

MAX_SEARCH_DEGREE = 6
DEFAULT_SEARCH_DEGREE = 4


class SearchLimitExceeded(RuntimeError):
    def __init__(self, message: str, progress: "SearchProgress"):
        super().__init__(message)
        self.progress = progress


def enumerate_singular(n: int) -> list:
    """All partial permutations of degree n with rank < n, by (rank, targets)."""
    if not 1 <= n <= MAX_SEARCH_DEGREE:
        raise ValueError(f"n must lie in 1..{MAX_SEARCH_DEGREE}")
    out = []
    for k in range(n):
        for dom in itertools.combinations(range(n), k):
            for img in itertools.permutations(range(1, n + 1), k):
                t = [0] * n
                for x, y in zip(dom, img):
                    t[x] = y
                out.append(PartialPerm(t))
    out.sort(key=lambda a: (a.rank, a.targets))
    return out


@dataclass
class SearchConfig:
    n: int
    max_size: int | None = None
    prune_mode: str = "lemmas"
    symmetry_breaking: bool = True
    threads: int = 1
    max_nodes: int = 5_000_000
    allow_large: bool = False

    def __post_init__(self):
        if self.max_size is None:
            self.max_size = bound(self.n) if self.n >= 2 else 1
        if self.max_size < 1:
            raise ValueError("max_size must be at least 1")
        if self.prune_mode not in ("none", "lemmas"):
            raise ValueError(f"unknown prune mode {self.prune_mode!r}")
        if self.threads < 1:
            raise ValueError("threads must be positive")
        if not 2 <= self.n <= MAX_SEARCH_DEGREE:
            raise ValueError(f"search supports 2 <= n <= {MAX_SEARCH_DEGREE}")
        if self.n > DEFAULT_SEARCH_DEGREE and not self.allow_large:
            raise ValueError(
                f"exhaustive search for n={self.n} is unsupported by default; "
                "set allow_large (and a node budget) to try it")


@dataclass
class SearchProgress:
    nodes: int = 0
    pruned_size: int = 0
    pruned_cover: int = 0
    pruned_idempotents: int = 0
    duplicates: int = 0
    best: int | None = None

    def merge(self, other: "SearchProgress") -> None:
        self.nodes += other.nodes
        self.pruned_size += other.pruned_size
        self.pruned_cover += other.pruned_cover
        self.pruned_idempotents += other.pruned_idempotents
        self.duplicates += other.duplicates


@dataclass
class Representative:
    semigroup: Semigroup
    classification: list = field(default_factory=list)  # (label, TypeParams)

    @property
    def labels(self) -> list:
        return [label for label, _ in self.classification] or ["unclassified"]


@dataclass
class SearchResult:
    n: int
    minimal_cardinality: int | None
    representatives: list
    progress: SearchProgress
    config: SearchConfig

    @property
    def classes(self) -> int:
        return len(self.representatives)


class _Ground:
    """Index tables for the singular part of I_n."""

    def __init__(self, n: int):
        self.n = n
        self.elements = enumerate_singular(n)
        self.index = {a: i for i, a in enumerate(self.elements)}
        els = self.elements
        idx = self.index
        self.mult = [[idx[a * b] for b in els] for a in els]
        npairs = n * (n + 1) // 2
        # each unordered pair (or diagonal point) gets one bit
        bit = {}
        k = 0
        for x in range(n):
            for y in range(x, n):
                bit[(x, y)] = bit[(y, x)] = k
                k += 1
        self.full = (1 << npairs) - 1
        self.cover = []
        for a in els:
            m = 0
            for x, y in a.arrows():
                m |= 1 << bit[(x - 1, y - 1)]
            self.cover.append(m)
        self.nonzero_idem = [a.is_idempotent and not a.is_zero for a in els]
        self.perms = []
        for perm in itertools.permutations(range(1, n + 1)):
            sigma = PartialPerm(perm)
            table = []
            for a in els:
                t = [0] * n
                for i, v in enumerate(a.targets):
                    if v:
                        t[perm[i] - 1] = perm[v - 1]
                table.append(idx[PartialPerm(t)])
            self.perms.append((sigma, table))

    def canonical(self, S) -> tuple:
        return min(tuple(sorted(tab[i] for i in S)) for _, tab in self.perms)

    def semigroup(self, S) -> Semigroup:
        return Semigroup((self.elements[i] for i in S), check=False)


def _popcount(x: int) -> int:
    return bin(x).count("1")


class _Searcher:
    def __init__(self, ground: _Ground, config: SearchConfig, progress_hook: Callable | None = None):
        self.g = ground
        self.cfg = config
        self.best = config.max_size
        self.found = {}  # key -> frozenset of indices
        self.visited = set()
        self.progress = SearchProgress()
        self.hook = progress_hook

    def key(self, S) -> tuple:
        if self.cfg.symmetry_breaking:
            return self.g.canonical(S)
        return tuple(sorted(S))

    def close_with(self, S: set, c: int, limit: int):
        """Closure of S ∪ {c}, or None if it exceeds ``limit`` elements."""
        mult = self.g.mult
        new = set(S)
        queue = [c]
        new.add(c)
        while queue:
            x = queue.pop()
            row = mult[x]
            for y in list(new):
                for z in (row[y], mult[y][x]):
                    if z not in new:
                        new.add(z)
                        if len(new) > limit:
                            return None
                        queue.append(z)
        return new

    def stats(self, S):
        cover = 0
        idem = 0
        for i in S:
            cover |= self.g.cover[i]
            idem += self.g.nonzero_idem[i]
        return cover, idem

    def lemma_prune(self) -> bool:
        return self.cfg.prune_mode == "lemmas" and self.best <= 2 * self.g.n

    def visit(self, S: frozenset) -> None:
        key = self.key(S)
        if key in self.visited:
            self.progress.duplicates += 1
            return
        self.visited.add(key)
        p = self.progress
        p.nodes += 1
        if p.nodes > self.cfg.max_nodes:
            raise SearchLimitExceeded(f"node budget {self.cfg.max_nodes} exhausted", p)
        if self.hook is not None and p.nodes % 1000 == 0:
            p.best = self.best if self.found else None
            self.hook(p)
        cover, idem = self.stats(S)
        if self.lemma_prune() and idem > 2:
            p.pruned_idempotents += 1
            return
        if cover == self.g.full:
            size = len(S)
            if size < self.best:
                self.best = size
                self.found = {}
            if size <= self.best:
                self.found[key] = S
            return
        missing = _popcount(self.g.full & ~cover)
        if missing > (self.best - len(S)) * (self.g.n - 1):
            p.pruned_cover += 1
            return
        for c in range(len(self.g.elements)):
            if c in S:
                continue
            T = self.close_with(S, c, self.best)
            if T is None:
                p.pruned_size += 1
                continue
            self.visit(frozenset(T))

    def roots(self) -> list:
        """Distinct single-generator closures within the size budget."""
        out = {}
        for c in range(len(self.g.elements)):
            T = self.close_with(set(), c, self.best)
            if T is None:
                continue
            out.setdefault(self.key(T), frozenset(T))
        return [out[k] for k in sorted(out)]


def _run_roots(args):
    n, config, roots = args
    searcher = _Searcher(_Ground(n), config)
    for r in roots:
        searcher.visit(r)
    best = min((len(S) for S in searcher.found.values()), default=None)
    return best, list(searcher.found.values()), searcher.progress


def minimal_search(config: SearchConfig, progress_hook: Callable | None = None,
                   classify_results: bool = False) -> SearchResult:
    """All minimal closed semitransitive subsets of I_n \\ S_n up to similarity."""
    ground = _Ground(config.n)
    searcher = _Searcher(ground, config, progress_hook)
    roots = searcher.roots()
    found = []
    progress = SearchProgress()
    if config.threads == 1:
        for r in roots:
            searcher.visit(r)
        found = list(searcher.found.values())
        progress = searcher.progress
    else:
        chunks = [roots[i::config.threads] for i in range(config.threads)]
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            for _best, sets, prog in pool.map(_run_roots, [(config.n, config, c) for c in chunks]):
                found.extend(sets)
                progress.merge(prog)
    minimal = min((len(S) for S in found), default=None)
    progress.best = minimal
    # one canonical representative per similarity class, in a fixed order
    reps = {}
    for S in found:
        if len(S) == minimal:
            key = ground.canonical(S)
            reps.setdefault(key, key)
    representatives = [Representative(ground.semigroup(k)) for k in sorted(reps)]
    if classify_results:
        for rep in representatives:
            rep.classification = classify(rep.semigroup)
    return SearchResult(config.n, minimal, representatives, progress, config)


def classify(S: Semigroup, groups: dict | None = None) -> list:
    """Constructed types similar to S, as (label, TypeParams) pairs.

    ``groups`` optionally maps a carrier size to extra regular groups (on the
    canonical carrier) to try alongside the cyclic ones.
    """
    n = S.degree
    p = gpd(n)
    sizes = sorted(len(b) for b in _blocks_or_none(S) or [])
    matches = []
    for tp in applicable_types(n, p):
        for G in _candidate_groups(tp, groups):
            T = tp.build(G)
            if len(T) != len(S):
                continue
            if sizes and sorted(len(b) for b in _blocks_or_none(T)) != sizes:
                continue
            if are_similar(T, S) is not None:
                label = tp.label if G is None else f"{tp.label} [group {_group_name(G)}]"
                matches.append((label, tp))
                break
    return matches


def _blocks_or_none(S):
    from .semitrans import NotSemitransitiveError, blocks
    try:
        return blocks(S).blocks
    except NotSemitransitiveError:
        return None


def _candidate_groups(tp, groups):
    yield None
    if not groups:
        return
    size = tp.p if tp.variant in (1, 2, 3) else tp.p * tp.l
    for G in groups.get(size, ()):
        yield G


def _group_name(G) -> str:
    return "{" + ", ".join("".join(map(str, a)) for a in G.elements) + "}"


@dataclass
class SweepRow:
    label: str
    size: int
    expected: int
    ok: bool
    problems: list


@dataclass
class SweepReport:
    rows: list
    minima: dict  # n -> (min size over p, bound(n))
    failures: list

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_bound_sweep(n_range) -> SweepReport:
    """Build every applicable type for each n and check size and audits."""
    rows, failures, minima = [], [], {}
    for n in n_range:
        best = None
        for tp in applicable_types(n):
            S = tp.build()
            expected = 2 * n - tp.p + 1
            problems = []
            if len(S) != expected:
                problems.append(f"size {len(S)} != {expected}")
            if not is_singular(S):
                problems.append("not singular")
            if not is_semitransitive(S):
                problems.append("not semitransitive")
            elif is_transitive(S):
                problems.append("transitive")
            if not S.has_zero:
                problems.append("no zero")
            reports = audit_all(S)
            if not all_pass(reports):
                problems.extend(f"audit {r.name}: {r.status} {r.witnesses[:1]}"
                                for r in reports if r.status != "pass")
            row = SweepRow(tp.label, len(S), expected, not problems, problems)
            rows.append(row)
            if problems:
                failures.append(row)
            best = len(S) if best is None else min(best, len(S))
        minima[n] = (best, bound(n))
        if best != bound(n):
            failures.append(SweepRow(f"n={n} minimum", best or 0, bound(n), False,
                                     [f"minimum over p is {best}, bound is {bound(n)}"]))
    return SweepReport(rows, minima, failures)


__all__ = [
    "SearchConfig", "SearchResult", "SearchProgress", "SearchLimitExceeded",
    "Representative", "enumerate_singular", "minimal_search", "classify",
    "verify_bound_sweep", "SweepReport",
]
