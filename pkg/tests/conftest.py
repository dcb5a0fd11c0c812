from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product

import pytest

from twistchar.folded import folded_data

TWISTED = ["A3^2", "A5^2", "D3^2", "D5^2", "E6^2", "D4^3"]


@pytest.fixture(scope="session")
def fd():
    cache = {}

    def get(token):
        if token not in cache:
            cache[token] = folded_data(token)
        return cache[token]

    return get


@lru_cache(maxsize=None)
def partitions_bounded(n: int, largest: int) -> int:
    """Number of partitions of ``n`` with all parts <= ``largest`` (brute recursion)."""
    if n == 0:
        return 1
    if largest == 0:
        return 0
    return sum(partitions_bounded(n - j * largest, largest - 1) for j in range(n // largest + 1))


def brute_lattice(gram, bound):
    """Integer vectors with x^T G x <= bound, by scanning a generous box."""
    n = len(gram)
    box = 2 * int(bound) + 3
    out = {}
    for x in product(range(-box, box + 1), repeat=n):
        v = sum(Fraction(gram[i][j]) * x[i] * x[j] for i in range(n) for j in range(n))
        if v <= bound:
            out[x] = v
    return out
