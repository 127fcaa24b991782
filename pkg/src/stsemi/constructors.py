"""Builders for semitransitive semigroups of partial permutations.

Everything here comes from one recipe: a regular permutation group ``G`` of a
set ``Z`` combined with a small semigroup ``T`` of partial permutations of
block indices.  The pair ``(α, β)`` sends point ``z`` of block ``i`` to point
``αz`` of block ``βi``; all pairs with ``β = 0`` collapse to the empty map.
The five minimal families differ only in the choice of ``T`` (and, for
types 4 and 5, in letting ``G`` act on a larger block with imprimitivity
system).

Layouts are canonical unless given explicitly: blocks are consecutive runs of
points, and the bijections between blocks are order preserving.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Sequence

from .pperm import ParseError, PartialPerm, parse
from .semigroup import Semigroup, closure


class ConstructionError(ValueError):
    pass


# -- regular groups -----------------------------------------------------------

@dataclass(frozen=True)
class RegularGroup:
    """A permutation group of ``carrier`` whose order equals its degree.

    Each element is stored as a tuple of images aligned with ``carrier``.
    """

    carrier: tuple
    elements: tuple
    _pos: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_pos", {z: i for i, z in enumerate(self.carrier)})

    def __len__(self) -> int:
        return len(self.elements)

    def act(self, alpha: tuple, z: int) -> int:
        return alpha[self._pos[z]]

    @property
    def identity(self) -> tuple:
        return self.carrier

    def as_pperms(self, n: int) -> list:
        """Elements as partial permutations of degree n defined on the carrier."""
        return [PartialPerm.from_mapping(dict(zip(self.carrier, a)), n) for a in self.elements]

    def setwise_stabilizer(self, subset) -> list:
        s = frozenset(subset)
        return [a for a in self.elements if frozenset(self.act(a, z) for z in s) == s]


def _as_images(gen, carrier: tuple) -> tuple:
    if isinstance(gen, str):
        # cycle notation for a permutation: unmentioned points are fixed
        pp = parse(gen, max(_moved_points(gen) | set(carrier)))
        gen = tuple(pp(z) or z for z in carrier)
    if isinstance(gen, PartialPerm):
        images = []
        for z in carrier:
            y = gen(z) if z <= gen.degree else None
            if y is None:
                raise ConstructionError(f"generator {gen} is undefined at {z}")
            images.append(y)
        # points outside the carrier must be untouched
        for x, y in gen.arrows():
            if x not in carrier and x != y:
                raise ConstructionError(f"generator {gen} moves {x} outside the carrier")
        gen = tuple(images)
    gen = tuple(gen)
    if sorted(gen) != sorted(carrier):
        raise ConstructionError(f"generator {gen} is not a permutation of {carrier}")
    return gen


def _moved_points(gen) -> set:
    if isinstance(gen, str):
        return {int(tok) for tok in gen.replace("(", ",").replace(")", ",").replace("]", ",").split(",") if tok.strip()}
    if isinstance(gen, PartialPerm):
        return {x for x, y in gen.arrows() if x != y}
    raise ConstructionError("cannot infer the carrier from image tuples; pass carrier=")


def regular_group(generators: Iterable, carrier: Iterable[int] | None = None) -> RegularGroup:
    """Close ``generators`` into a group and check it acts regularly.

    Generators may be cycle strings such as ``"(3,5,4,6)"``, PartialPerms, or
    image tuples aligned with ``carrier``.
    """
    gens = list(generators)
    if carrier is None:
        pts = set()
        for gen in gens:
            pts |= _moved_points(gen)
        if not pts:
            raise ConstructionError("carrier required for a trivial group")
        carrier = pts
    carrier = tuple(sorted(carrier))
    pos = {z: i for i, z in enumerate(carrier)}
    imgs = [_as_images(gen, carrier) for gen in gens]
    elements = {carrier}
    frontier = [carrier]
    while frontier:
        nxt = []
        for a in frontier:
            for g in imgs:
                b = tuple(g[pos[y]] for y in a)
                if b not in elements:
                    elements.add(b)
                    nxt.append(b)
        frontier = nxt
    orbit = {a[0] for a in elements}
    if len(orbit) != len(carrier):
        raise ConstructionError(f"group is not transitive on {list(carrier)}")
    if len(elements) != len(carrier):
        raise ConstructionError(
            f"group of order {len(elements)} on {len(carrier)} points is not regular")
    return RegularGroup(carrier, tuple(sorted(elements)))


def cyclic_group(points: Iterable[int]) -> RegularGroup:
    """Cyclic group generated by the full cycle through the sorted points."""
    pts = tuple(sorted(points))
    if not pts:
        raise ConstructionError("empty carrier")
    shift = pts[1:] + pts[:1]
    return regular_group([shift], carrier=pts)


def block_cyclic_group(blocks: Sequence[Sequence[int]]) -> RegularGroup:
    """Cyclic group of order sum(|U_b|) having the given equal-size blocks as
    an imprimitivity system.

    The generating cycle visits the k-th point of every block before moving
    on to the (k+1)-th; for blocks {3,4}, {5,6} it is (3,5,4,6).
    """
    bl = [sorted(b) for b in blocks]
    size = len(bl[0])
    if any(len(b) != size for b in bl):
        raise ConstructionError("blocks must have equal size")
    cycle = [b[k] for k in range(size) for b in bl]
    carrier = tuple(sorted(cycle))
    succ = {cycle[i]: cycle[(i + 1) % len(cycle)] for i in range(len(cycle))}
    return regular_group([tuple(succ[z] for z in carrier)], carrier=carrier)


# -- the general product construction -------------------------------------------

def consecutive_partition(n: int, size: int) -> list:
    return [tuple(range(i + 1, i + size + 1)) for i in range(0, n, size)]


def _check_partition(partition, n: int | None = None) -> int:
    pts = [x for block in partition for x in block]
    total = len(pts)
    if n is not None and total != n:
        raise ConstructionError(f"partition covers {total} points, expected {n}")
    if sorted(pts) != list(range(1, total + 1)):
        raise ConstructionError("partition blocks must be disjoint and cover 1..n")
    return total


def parse_partition(text: str) -> list:
    """``"1,2|3,4"`` -> [(1, 2), (3, 4)]."""
    try:
        return [tuple(int(x) for x in part.split(",")) for part in text.split("|")]
    except ValueError:
        raise ConstructionError(f"malformed partition {text!r}") from None


def product_action(G: RegularGroup, T: Semigroup, partition: Sequence[Sequence[int]]) -> Semigroup:
    """Faithful image of (G x T)/I acting on the union of the partition blocks.

    ``T`` acts on block indices 1..l; ``G`` acts on a set of the common block
    size, identified with each block by sorted order.
    """
    blocks = [tuple(sorted(b)) for b in partition]
    l = len(blocks)
    if T.degree != l:
        raise ConstructionError(f"T has degree {T.degree} but there are {l} blocks")
    if l < 2:
        raise ConstructionError("need at least two blocks")
    if not T.has_zero:
        raise ConstructionError("T must contain the zero")
    size = len(G.carrier)
    if any(len(b) != size for b in blocks):
        raise ConstructionError(f"every block must have |Z| = {size} points")
    n = _check_partition(blocks)
    zpos = {z: k for k, z in enumerate(G.carrier)}
    elements = {PartialPerm.zero(n)}
    for beta in T:
        if beta.is_zero:
            continue
        for alpha in G.elements:
            t = [0] * n
            for i, block in enumerate(blocks, 1):
                j = beta(i)
                if j is None:
                    continue
                for k, x in enumerate(block):
                    t[x - 1] = blocks[j - 1][zpos[alpha[k]]]
            elements.add(PartialPerm(t))
    return Semigroup(elements)


def _pp(mapping: dict, n: int) -> PartialPerm:
    return PartialPerm.from_mapping(mapping, n)


def type1_generators(m: int) -> list:
    """phi=(1,2], psi=(2,3,...,m], g=(1), h=(2)...(m) on m indices."""
    phi = _pp({1: 2}, m)
    psi = _pp({i: i + 1 for i in range(2, m)}, m)
    g = PartialPerm.identity(m, [1])
    h = PartialPerm.identity(m, range(2, m + 1))
    return [phi, psi, g, h]


def type3_generators(m: int) -> list:
    """phi: odd i -> i+1, psi: even i -> i+1, g, h: identities on odd, even indices."""
    phi = _pp({i: i + 1 for i in range(1, m, 2)}, m)
    psi = _pp({i: i + 1 for i in range(2, m, 2)}, m)
    g = PartialPerm.identity(m, range(1, m + 1, 2))
    h = PartialPerm.identity(m, range(2, m + 1, 2))
    return [phi, psi, g, h]


def _index_semigroup(gens: list) -> Semigroup:
    m = gens[0].degree
    return Semigroup(closure(gens + [PartialPerm.zero(m)]))


def _divisor_layout(n: int, p: int, group, partition):
    if not 1 <= p < n or n % p:
        raise ConstructionError(f"p={p} is not a proper divisor of n={n}")
    m = n // p
    if partition is None:
        partition = consecutive_partition(n, p)
    else:
        partition = [tuple(sorted(b)) for b in partition]
        _check_partition(partition, n)
        if len(partition) != m or any(len(b) != p for b in partition):
            raise ConstructionError(f"partition must have {m} blocks of size {p}")
    if group is None:
        group = cyclic_group(partition[0])
    elif len(group.carrier) != p:
        raise ConstructionError(f"group must act on {p} points")
    return m, group, partition


def type1(n: int, p: int, group: RegularGroup | None = None, partition=None) -> Semigroup:
    m, group, partition = _divisor_layout(n, p, group, partition)
    return product_action(group, _index_semigroup(type1_generators(m)), partition)


def type2(n: int, p: int, group: RegularGroup | None = None, partition=None) -> Semigroup:
    return type1(n, p, group, partition).inverse()


def type3(n: int, p: int, group: RegularGroup | None = None, partition=None) -> Semigroup:
    m, group, partition = _divisor_layout(n, p, group, partition)
    return product_action(group, _index_semigroup(type3_generators(m)), partition)


def reference_chain(n: int, l: int, group: RegularGroup | None = None, partition=None) -> Semigroup:
    """(G x T^1)/I with T generated by the chain (1,2,...,l]."""
    if l < 2 or n % l:
        raise ConstructionError(f"l={l} must be at least 2 and divide n={n}")
    p = n // l
    if partition is None:
        partition = consecutive_partition(n, p)
    else:
        partition = [tuple(sorted(b)) for b in partition]
        _check_partition(partition, n)
        if len(partition) != l:
            raise ConstructionError(f"partition must have {l} blocks")
    if group is None:
        group = cyclic_group(partition[0])
    chain = _pp({i: i + 1 for i in range(1, l)}, l)
    T = closure([chain, PartialPerm.identity(l)])
    if not T.has_zero:
        T = Semigroup(set(T) | {PartialPerm.zero(l)})
    return product_action(group, T, partition)


# -- types 4 and 5 ---------------------------------------------------------------

@dataclass(frozen=True)
class Type4Params:
    """Layout for types 4 and 5: n = l*p*(m-1) + p.

    ``x1`` is the small top block; ``u[a-2][b-1]`` is the sub-block U_b^a of
    X_a.  ``group`` acts regularly on X_2 with the U_b^2 as imprimitivity
    blocks.
    """

    p: int
    l: int
    m: int
    x1: tuple
    u: tuple
    group: RegularGroup

    @property
    def n(self) -> int:
        return self.l * self.p * (self.m - 1) + self.p

    def x(self, a: int) -> tuple:
        if a == 1:
            return self.x1
        return tuple(sorted(z for ub in self.u[a - 2] for z in ub))

    def stabilizer(self) -> list:
        return self.group.setwise_stabilizer(self.u[0][0])

    def validate(self) -> None:
        p, l, m = self.p, self.l, self.m
        if p < 1 or l < 2 or m < 2:
            raise ConstructionError(f"need p >= 1, l >= 2, m >= 2 (got p={p}, l={l}, m={m})")
        if len(self.x1) != p:
            raise ConstructionError(f"|X_1| must be p={p}")
        if len(self.u) != m - 1 or any(len(row) != l for row in self.u):
            raise ConstructionError("u must hold l sub-blocks for each of X_2..X_m")
        if any(len(ub) != p for row in self.u for ub in row):
            raise ConstructionError(f"every U_b^a must have p={p} points")
        _check_partition([self.x1] + [ub for row in self.u for ub in row], self.n)
        if tuple(sorted(self.group.carrier)) != self.x(2):
            raise ConstructionError("group must act on X_2")
        subblocks = [frozenset(ub) for ub in self.u[0]]
        for alpha in self.group.elements:
            for ub in subblocks:
                img = frozenset(self.group.act(alpha, z) for z in ub)
                if img not in subblocks:
                    raise ConstructionError(
                        f"U_b^2 = {sorted(ub)} is not an imprimitivity block (image {sorted(img)})")
        H = self.stabilizer()
        if len(H) != p or len({self.group.act(a, self.u[0][0][0]) for a in H}) != p:
            raise ConstructionError("stabilizer of U_1^2 does not act regularly on it")


def type4_params(p: int, l: int, m: int, group: RegularGroup | None = None) -> Type4Params:
    """Canonical layout: X_1 = {1..p}, then X_2, ..., X_m consecutively, each
    cut into l consecutive sub-blocks of size p."""
    x1 = tuple(range(1, p + 1))
    u = []
    nxt = p + 1
    for _a in range(2, m + 1):
        row = []
        for _b in range(l):
            row.append(tuple(range(nxt, nxt + p)))
            nxt += p
        u.append(tuple(row))
    u = tuple(u)
    if group is None:
        group = block_cyclic_group(u[0])
    params = Type4Params(p, l, m, x1, u, group)
    params.validate()
    return params


def type4_index_generators(l: int, m: int) -> list:
    """phi, psi, g, h on Z = {(1,1)} ∪ {(a,b): 2<=a<=m, 1<=b<=l}, numbered
    (1,1) -> 1 and (a,b) -> 1 + (a-2)*l + b."""
    size = 1 + (m - 1) * l

    def idx(a, b):
        return 1 if a == 1 else 1 + (a - 2) * l + b

    phi = _pp({1: idx(2, 1)}, size)
    psi = _pp({idx(a, b): idx(a + 1, b) for a in range(2, m) for b in range(1, l + 1)}, size)
    g = PartialPerm.identity(size, [1])
    h = PartialPerm.identity(size, range(2, size + 1))
    return [phi, psi, g, h]


def type4(params: Type4Params) -> Semigroup:
    """(G x T)/I for the type 4 index semigroup T.

    A pair (α, β) moves the block coordinates by β and then the point and
    sub-block coordinates by α, read through the identification of every X_a
    with X_2.  Landing in X_1 is only possible for β = g, and then only when α
    fixes U_1^2 setwise.
    """
    params.validate()
    l, m = params.l, params.m
    n = params.n
    G = params.group
    coord = {}
    point = {}
    for k, x in enumerate(sorted(params.x1)):
        coord[x] = (k, 1, 1)
        point[(k, 1, 1)] = x
    for a in range(2, m + 1):
        for b in range(1, l + 1):
            for k, x in enumerate(sorted(params.u[a - 2][b - 1])):
                coord[x] = (k, a, b)
                point[(k, a, b)] = x

    def idx(a, b):
        return 1 if a == 1 else 1 + (a - 2) * l + b

    unidx = {idx(a, b): (a, b) for a in range(1, m + 1) for b in range(1, l + 1) if a > 1 or b == 1}
    T = _index_semigroup(type4_index_generators(l, m))
    elements = {PartialPerm.zero(n)}
    for beta in T:
        if beta.is_zero:
            continue
        for alpha in G.elements:
            t = [0] * n
            for x in range(1, n + 1):
                k, a, b = coord[x]
                w = beta(idx(a, b))
                if w is None:
                    continue
                a2, b2 = unidx[w]
                k3, _, b3 = coord[G.act(alpha, point[(k, 2, b2)])]
                if a2 == 1 and b3 != 1:
                    continue
                t[x - 1] = point[(k3, a2, b3)]
            pp = PartialPerm(t)
            if not pp.is_zero:
                elements.add(pp)
    return Semigroup(elements)


def type5(params: Type4Params) -> Semigroup:
    return type4(params).inverse()


# -- parameter sweeps -----------------------------------------------------------

def proper_divisors(n: int) -> list:
    return [d for d in range(1, n) if n % d == 0]


@dataclass(frozen=True)
class TypeParams:
    """One applicable construction: variant 1-5 plus its arithmetic parameters."""

    variant: int
    n: int
    p: int
    m: int
    l: int | None = None

    @property
    def label(self) -> str:
        extra = f", l={self.l}" if self.l is not None else ""
        return f"Type {self.variant} (n={self.n}, p={self.p}, m={self.m}{extra})"

    def build(self, group: RegularGroup | None = None) -> Semigroup:
        if self.variant in (1, 2, 3):
            fn = {1: type1, 2: type2, 3: type3}[self.variant]
            return fn(self.n, self.p, group)
        params = type4_params(self.p, self.l, self.m, group)
        return type4(params) if self.variant == 4 else type5(params)


def applicable_types(n: int, p: int | None = None) -> list:
    """Every (variant, parameters) combination realisable on n points,
    optionally restricted to one divisor p."""
    out = []
    for d in proper_divisors(n):
        if p is not None and d != p:
            continue
        m = n // d
        for v in (1, 2, 3):
            out.append(TypeParams(v, n, d, m))
        q1 = m - 1  # = l * (m4 - 1)
        for l in range(2, q1 + 1):
            if q1 % l == 0:
                m4 = q1 // l + 1
                for v in (4, 5):
                    out.append(TypeParams(v, n, d, m4, l))
    return out


# -- worked examples ------------------------------------------------------------

KNOWN_TYPOS = {
    1: ("(1,6](2,7](3](4](7](8]",),
    2: (),
    3: ("(1,7](2,8](2](3](4](5]", "(1,8](2,7](2](3](4](5]"),
}


def example_semigroup(k: int) -> Semigroup:
    if k == 1:
        return type1(8, 2, cyclic_group([1, 2]), consecutive_partition(8, 2))
    if k == 2:
        params = type4_params(2, 2, 3, regular_group(["(3,5,4,6)"]))
        return type4(params)
    if k == 3:
        return type3(8, 2, cyclic_group([1, 2]), consecutive_partition(8, 2))
    raise ValueError("example number must be 1, 2 or 3")


def load_transcription(k: int):
    """(n, [(line, PartialPerm or ParseError)]) for the listed example."""
    text = resources.files("stsemi.data").joinpath(f"example{k}.txt").read_text()
    n = None
    entries = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("n="):
            n = int(line[2:])
            continue
        try:
            entries.append((line, parse(line, n)))
        except ParseError as exc:
            entries.append((line, exc))
    return n, entries


@dataclass
class ExampleDiff:
    k: int
    semigroup: Semigroup
    matched: list
    malformed: list  # (line, error message)
    missing: list  # listed and well formed, but not produced
    unlisted: list  # produced nonzero elements absent from the listing

    @property
    def confined(self) -> bool:
        """Differences are exactly the documented malformed lines."""
        documented = set(KNOWN_TYPOS.get(self.k, ()))
        return (not self.missing
                and all(line in documented for line, _ in self.malformed)
                and len(self.unlisted) == len(self.malformed))

    def lines(self) -> list:
        out = [f"example {self.k}: built {len(self.semigroup)} elements, "
               f"{len(self.matched)} listed entries match"]
        for line, err in self.malformed:
            tag = "documented" if line in KNOWN_TYPOS.get(self.k, ()) else "UNDOCUMENTED"
            out.append(f"malformed ({tag}): {line}  [{err}]")
        for a in self.missing:
            out.append(f"listed but not built: {a}")
        for a in self.unlisted:
            out.append(f"built but not listed: {a}")
        return out


def build_example(k: int) -> ExampleDiff:
    S = example_semigroup(k)
    n, entries = load_transcription(k)
    if n != S.degree:
        raise ValueError(f"transcription degree {n} != {S.degree}")
    matched, malformed, missing = [], [], []
    listed = set()
    for line, val in entries:
        if isinstance(val, Exception):
            malformed.append((line, str(val)))
        elif val in S:
            matched.append(val)
            listed.add(val)
        else:
            missing.append(val)
    unlisted = [a for a in S if not a.is_zero and a not in listed]
    return ExampleDiff(k, S, matched, malformed, missing, unlisted)
