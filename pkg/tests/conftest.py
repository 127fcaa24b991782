import random

import pytest
from hypothesis import strategies as st

from stsemi.pperm import PartialPerm


@st.composite
def partial_perms(draw, n=None, min_n=1, max_n=8):
    if n is None:
        n = draw(st.integers(min_n, max_n))
    perm = draw(st.permutations(list(range(1, n + 1))))
    keep = draw(st.lists(st.booleans(), min_size=n, max_size=n))
    return PartialPerm([y if k else 0 for y, k in zip(perm, keep)])


@st.composite
def pperm_tuples(draw, k, min_n=1, max_n=8):
    n = draw(st.integers(min_n, max_n))
    return tuple(draw(partial_perms(n=n)) for _ in range(k))


def random_pperm(rng: random.Random, n: int, density: float = 0.7) -> PartialPerm:
    perm = list(range(1, n + 1))
    rng.shuffle(perm)
    return PartialPerm([y if rng.random() < density else 0 for y in perm])


def random_permutation(rng: random.Random, n: int) -> PartialPerm:
    perm = list(range(1, n + 1))
    rng.shuffle(perm)
    return PartialPerm(perm)


@pytest.fixture
def rng():
    return random.Random(20261017)
