"""Partial injective maps on {1..n} and the chain-cycle notation.

Maps act on the right: ``x(ab) = (xa)b``, so ``a * b`` means "apply ``a``,
then ``b``".  Points are 1-based everywhere in the public interface.

Chain-cycle notation writes a map as disjoint terms.  A cycle ``(a1,...,ak)``
permutes its points cyclically; a chain ``(a1,...,ak]`` sends each point to the
next one and leaves ``ak`` undefined.  A singleton chain ``(a]`` is a point
outside both domain and image.  The empty map is written ``0``.
"""

from __future__ import annotations

import re
from typing import Iterable, Mapping

MAX_DEGREE = 64

_TERM_RE = re.compile(r"\(([^()\]]*)([)\]])")


class ParseError(ValueError):
    """Raised for malformed chain-cycle text."""


class PartialPerm:
    """Immutable partial injection of {1..n}.

    ``targets[x-1]`` is the image of ``x`` or 0 when ``x`` is outside the
    domain.
    """

    __slots__ = ("_t", "_hash")

    def __init__(self, targets: Iterable[int]):
        t = tuple(int(v) for v in targets)
        n = len(t)
        if n < 1 or n > MAX_DEGREE:
            raise ValueError(f"degree must lie in 1..{MAX_DEGREE}, got {n}")
        seen = set()
        for v in t:
            if v == 0:
                continue
            if not 1 <= v <= n:
                raise ValueError(f"target {v} out of range 1..{n}")
            if v in seen:
                raise ValueError(f"map is not injective: {v} hit twice")
            seen.add(v)
        self._t = t
        self._hash = hash(t)

    @classmethod
    def _trusted(cls, t: tuple) -> "PartialPerm":
        obj = object.__new__(cls)
        obj._t = t
        obj._hash = hash(t)
        return obj

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, int], n: int) -> "PartialPerm":
        t = [0] * n
        for x, y in mapping.items():
            if not 1 <= x <= n:
                raise ValueError(f"source {x} out of range 1..{n}")
            t[x - 1] = y
        return cls(t)

    @classmethod
    def zero(cls, n: int) -> "PartialPerm":
        return cls([0] * n)

    @classmethod
    def identity(cls, n: int, points: Iterable[int] | None = None) -> "PartialPerm":
        """Identity on ``points`` (all of {1..n} by default)."""
        if points is None:
            return cls(range(1, n + 1))
        return cls.from_mapping({x: x for x in points}, n)

    @property
    def degree(self) -> int:
        return len(self._t)

    @property
    def targets(self) -> tuple:
        return self._t

    def __call__(self, x: int) -> int | None:
        y = self._t[x - 1]
        return y or None

    def domain(self) -> frozenset:
        return frozenset(i + 1 for i, v in enumerate(self._t) if v)

    def image(self) -> frozenset:
        return frozenset(v for v in self._t if v)

    @property
    def dom_mask(self) -> int:
        """Domain as a bitmask; bit ``x-1`` set iff ``x`` is in the domain."""
        m = 0
        for i, v in enumerate(self._t):
            if v:
                m |= 1 << i
        return m

    @property
    def rank(self) -> int:
        return sum(1 for v in self._t if v)

    @property
    def is_zero(self) -> bool:
        return not any(self._t)

    @property
    def is_permutation(self) -> bool:
        return all(self._t)

    def __mul__(self, other: "PartialPerm") -> "PartialPerm":
        if not isinstance(other, PartialPerm):
            return NotImplemented
        if other.degree != self.degree:
            raise ValueError(f"degree mismatch: {self.degree} vs {other.degree}")
        o = other._t
        return PartialPerm._trusted(tuple(o[v - 1] if v else 0 for v in self._t))

    def inverse(self) -> "PartialPerm":
        inv = [0] * len(self._t)
        for i, v in enumerate(self._t):
            if v:
                inv[v - 1] = i + 1
        return PartialPerm._trusted(tuple(inv))

    def __pow__(self, k: int) -> "PartialPerm":
        if k < 1:
            raise ValueError("power must be a positive integer")
        result = self
        base = self
        k -= 1
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def cycle_points(self) -> frozenset:
        """Points lying on a cycle of the map (those that return to themselves)."""
        t = self._t
        on_cycle = set()
        for start in range(1, len(t) + 1):
            x = t[start - 1]
            steps = 0
            while x and x != start and steps < len(t):
                x = t[x - 1]
                steps += 1
            if x == start:
                on_cycle.add(start)
        return frozenset(on_cycle)

    def idempotent_power(self) -> "PartialPerm":
        # the idempotent power is the identity on the points lying on cycles
        return PartialPerm.identity(self.degree, self.cycle_points())

    @property
    def is_idempotent(self) -> bool:
        return all(v == 0 or v == i + 1 for i, v in enumerate(self._t))

    @property
    def is_nilpotent(self) -> bool:
        return not self.cycle_points()

    def arrows(self) -> list:
        return [(i + 1, v) for i, v in enumerate(self._t) if v]

    def terms(self) -> list:
        """Canonical chain-cycle terms as ``(kind, points)`` pairs."""
        t = self._t
        n = len(t)
        preimage = [0] * (n + 1)
        for i, v in enumerate(t):
            if v:
                preimage[v] = i + 1
        seen = [False] * (n + 1)
        out = []
        for x in range(1, n + 1):
            if seen[x]:
                continue
            # walk back to a chain source, or detect that x lies on a cycle
            start = x
            y = preimage[x]
            while y and y != x:
                start = y
                y = preimage[y]
            kind = "cycle" if y == x else "chain"
            if kind == "cycle":
                start = x
            pts = [start]
            seen[start] = True
            y = t[start - 1]
            while y and y != start:
                pts.append(y)
                seen[y] = True
                y = t[y - 1]
            if kind == "cycle":
                i = pts.index(min(pts))
                pts = pts[i:] + pts[:i]
            out.append((kind, tuple(pts)))
        out.sort(key=lambda term: min(term[1]))
        return out

    def __str__(self) -> str:
        return to_notation(self)

    def __repr__(self) -> str:
        return f"PartialPerm({to_notation(self)!r}, n={self.degree})"

    def __eq__(self, other) -> bool:
        return isinstance(other, PartialPerm) and self._t == other._t

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "PartialPerm") -> bool:
        return self.sort_key() < other.sort_key()

    def sort_key(self) -> tuple:
        return (self.degree, self._t)


# functional aliases

def compose(a: PartialPerm, b: PartialPerm) -> PartialPerm:
    """``x -> (xa)b``."""
    return a * b


def inverse(a: PartialPerm) -> PartialPerm:
    return a.inverse()


def rank(a: PartialPerm) -> int:
    return a.rank


def domain(a: PartialPerm) -> frozenset:
    return a.domain()


def image(a: PartialPerm) -> frozenset:
    return a.image()


def power(a: PartialPerm, k: int) -> PartialPerm:
    return a ** k


def idempotent_power(a: PartialPerm) -> PartialPerm:
    return a.idempotent_power()


def is_idempotent(a: PartialPerm) -> bool:
    return a.is_idempotent


def is_nilpotent(a: PartialPerm) -> bool:
    return a.is_nilpotent


def arrows(a: PartialPerm) -> list:
    return a.arrows()


def zero(n: int) -> PartialPerm:
    return PartialPerm.zero(n)


def identity(n: int, points: Iterable[int] | None = None) -> PartialPerm:
    return PartialPerm.identity(n, points)


def parse(text: str, n: int) -> PartialPerm:
    """Parse chain-cycle notation at degree ``n``.

    Points that do not occur are treated as singleton chains.  The literal
    ``0`` is the empty map.
    """
    if not 1 <= n <= MAX_DEGREE:
        raise ValueError(f"degree must lie in 1..{MAX_DEGREE}, got {n}")
    s = "".join(text.split())
    if s == "0":
        return PartialPerm.zero(n)
    if not s:
        raise ParseError("empty element")
    targets = [0] * n
    used = set()
    pos = 0
    while pos < len(s):
        m = _TERM_RE.match(s, pos)
        if m is None:
            raise ParseError(f"malformed term at offset {pos}: {s[pos:pos + 12]!r}")
        body, close = m.group(1), m.group(2)
        try:
            pts = [int(tok) for tok in body.split(",")]
        except ValueError:
            raise ParseError(f"malformed term {m.group(0)!r}") from None
        for x in pts:
            if not 1 <= x <= n:
                raise ParseError(f"point {x} out of range 1..{n}")
            if x in used:
                raise ParseError(f"point {x} repeated")
            used.add(x)
        for a, b in zip(pts, pts[1:]):
            targets[a - 1] = b
        if close == ")":
            targets[pts[-1] - 1] = pts[0]
        pos = m.end()
    return PartialPerm(targets)


def to_notation(a: PartialPerm) -> str:
    """Canonical complete chain-cycle string; ``0`` for the empty map."""
    if a.is_zero:
        return "0"
    parts = []
    for kind, pts in a.terms():
        body = ",".join(map(str, pts))
        parts.append(f"({body})" if kind == "cycle" else f"({body}]")
    return "".join(parts)
