"""Finite semigroups of partial permutations."""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Iterable

from .pperm import PartialPerm


class NotClosedError(ValueError):
    pass


def _common_degree(elements) -> int:
    degrees = {a.degree for a in elements}
    if not degrees:
        raise ValueError("empty element set")
    if len(degrees) > 1:
        raise ValueError(f"mixed degrees: {sorted(degrees)}")
    return degrees.pop()


def is_closed(elements: Iterable[PartialPerm]) -> bool:
    elems = set(elements)
    return all(a * b in elems for a in elems for b in elems)


class Semigroup:
    """A composition-closed set of partial permutations of one degree.

    Closure is verified on construction unless ``check=False``.
    """

    __slots__ = ("degree", "_elements", "_set", "_zero")

    def __init__(self, elements: Iterable[PartialPerm], check: bool = True):
        elems = set(elements)
        self.degree = _common_degree(elems)
        if check:
            for a in elems:
                for b in elems:
                    if a * b not in elems:
                        raise NotClosedError(f"product {a} * {b} = {a * b} is missing")
        self._set = frozenset(elems)
        self._elements = tuple(sorted(elems, key=lambda a: (a.rank, a.targets)))
        z = PartialPerm.zero(self.degree)
        self._zero = z if z in self._set else None

    @property
    def elements(self) -> tuple:
        """Elements ordered by (rank, target sequence)."""
        return self._elements

    @property
    def zero(self) -> PartialPerm | None:
        return self._zero

    @property
    def has_zero(self) -> bool:
        return self._zero is not None

    def __len__(self) -> int:
        return len(self._set)

    def __iter__(self):
        return iter(self._elements)

    def __contains__(self, a) -> bool:
        return a in self._set

    def __eq__(self, other) -> bool:
        return isinstance(other, Semigroup) and self._set == other._set

    def __hash__(self) -> int:
        return hash(self._set)

    def __repr__(self) -> str:
        return f"<Semigroup n={self.degree} size={len(self)}>"

    def as_set(self) -> frozenset:
        return self._set

    def idempotents(self) -> list:
        return [a for a in self._elements if a.is_idempotent]

    def nonzero_idempotents(self) -> list:
        return [a for a in self._elements if a.is_idempotent and not a.is_zero]

    def inverse(self) -> "Semigroup":
        """Elementwise inverse; an anti-isomorphic copy."""
        return Semigroup((a.inverse() for a in self._elements), check=False)


def closure(generators: Iterable[PartialPerm]) -> Semigroup:
    gens = list(dict.fromkeys(generators))
    if not gens:
        raise ValueError("empty generator set")
    _common_degree(gens)
    seen = set(gens)
    frontier = list(gens)
    # right Cayley graph search: every product of generators is reached
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = a * g
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    return Semigroup(seen, check=False)


def is_singular(S: Semigroup) -> bool:
    return all(a.rank < S.degree for a in S)


@dataclass(frozen=True)
class IdempotentProfile:
    nonzero_idempotents: tuple
    has_zero: bool


def idempotent_profile(S: Semigroup) -> IdempotentProfile:
    return IdempotentProfile(tuple(S.nonzero_idempotents()), S.has_zero)


def _require_idempotent(S: Semigroup, e: PartialPerm, name: str) -> None:
    if e not in S:
        raise ValueError(f"{name} = {e} is not an element of S")
    if not e.is_idempotent:
        raise ValueError(f"{name} = {e} is not idempotent")


def local(S: Semigroup, e: PartialPerm, f: PartialPerm) -> frozenset:
    """The set eSf."""
    _require_idempotent(S, e, "e")
    _require_idempotent(S, f, "f")
    return frozenset(e * s * f for s in S)


def s_prime(S: Semigroup, g: PartialPerm, h: PartialPerm) -> Semigroup:
    """gSg ∪ gSh ∪ hSg ∪ hSh, checked for closure."""
    for x in (g, h):
        _require_idempotent(S, x, "idempotent")
        if x.is_zero:
            raise ValueError("idempotents must be nonzero")
    parts = set()
    for e, f in itertools.product((g, h), repeat=2):
        parts |= local(S, e, f)
    return Semigroup(parts)


def units_and_nilpotents(S: Semigroup, e: PartialPerm):
    """Split eSe \\ {0} into group elements, nilpotents and anything else.

    Returns ``(group, nilpotent, other)``; ``other`` is empty whenever the
    group/nilpotent dichotomy holds.
    """
    _require_idempotent(S, e, "e")
    if e.is_zero:
        raise ValueError("e must be nonzero")
    group, nil, other = [], [], []
    for a in sorted(local(S, e, e)):
        if a.is_zero:
            continue
        ip = a.idempotent_power()
        if ip == e:
            group.append(a)
        elif ip.is_zero:
            nil.append(a)
        else:
            other.append(a)
    return group, nil, other


def _conjugator(sigma: PartialPerm, n: int) -> PartialPerm:
    if sigma.degree != n:
        raise ValueError(f"conjugator degree {sigma.degree} != {n}")
    if not sigma.is_permutation:
        raise ValueError(f"{sigma} is not a permutation")
    return sigma


def conjugate_element(a: PartialPerm, sigma: PartialPerm) -> PartialPerm:
    """σ⁻¹ a σ: the map sending xσ to (xa)σ."""
    s = sigma.targets
    t = [0] * a.degree
    for i, v in enumerate(a.targets):
        if v:
            t[s[i] - 1] = s[v - 1]
    return PartialPerm._trusted(tuple(t))


def conjugate(S: Semigroup, sigma: PartialPerm) -> Semigroup:
    _conjugator(sigma, S.degree)
    return Semigroup((conjugate_element(a, sigma) for a in S), check=False)


def _arrow_counts(S: Semigroup) -> list:
    n = S.degree
    c = [[0] * n for _ in range(n)]
    for a in S:
        for i, v in enumerate(a.targets):
            if v:
                c[i][v - 1] += 1
    return c


def _point_signature(S: Semigroup, counts) -> list:
    n = S.degree
    sig = []
    for x in range(n):
        row = tuple(sorted(counts[x]))
        col = tuple(sorted(counts[y][x] for y in range(n)))
        in_idem = sum(1 for a in S if a.is_idempotent and a.targets[x])
        sig.append((counts[x][x], row, col, in_idem))
    return sig


def similarity_invariant(S: Semigroup) -> tuple:
    """Cheap conjugation invariant: size, rank multiset, idempotents, arrow profile."""
    ranks = tuple(sorted(Counter(a.rank for a in S).items()))
    idem = sum(1 for a in S if a.is_idempotent)
    counts = _arrow_counts(S)
    sig = tuple(sorted(_point_signature(S, counts)))
    return (S.degree, len(S), ranks, idem, sig)


def are_similar(S1: Semigroup, S2: Semigroup) -> PartialPerm | None:
    """A permutation σ with conjugate(S1, σ) == S2, or None.

    Backtracks over point assignments, keeping only those that preserve the
    per-pair arrow counts; candidates surviving to a full assignment are
    verified by conjugating the whole semigroup.
    """
    if S1.degree != S2.degree:
        raise ValueError("semigroups of different degree")
    n = S1.degree
    if len(S1) != len(S2):
        return None
    c1, c2 = _arrow_counts(S1), _arrow_counts(S2)
    sig1, sig2 = _point_signature(S1, c1), _point_signature(S2, c2)
    if sorted(sig1) != sorted(sig2):
        return None
    ranks1 = Counter(a.rank for a in S1)
    if ranks1 != Counter(a.rank for a in S2):
        return None
    # assign most-constrained points first
    classes = Counter(sig1)
    order = sorted(range(n), key=lambda x: (classes[sig1[x]], x))
    options = {x: [y for y in range(n) if sig2[y] == sig1[x]] for x in range(n)}
    target = S2.as_set()
    image = [0] * n
    used = [False] * n

    def consistent(k: int, y: int) -> bool:
        x = order[k]
        if c1[x][x] != c2[y][y]:
            return False
        for j in range(k):
            xp = order[j]
            yp = image[xp]
            if c1[x][xp] != c2[y][yp] or c1[xp][x] != c2[yp][y]:
                return False
        return True

    def search(k: int):
        if k == n:
            sigma = PartialPerm._trusted(tuple(v + 1 for v in image))
            if all(conjugate_element(a, sigma) in target for a in S1):
                return sigma
            return None
        x = order[k]
        for y in options[x]:
            if used[y] or not consistent(k, y):
                continue
            used[y] = True
            image[x] = y
            found = search(k + 1)
            if found is not None:
                return found
            used[y] = False
        return None

    return search(0)
