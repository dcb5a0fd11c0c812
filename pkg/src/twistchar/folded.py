"""Simply-laced root lattices, diagram automorphisms and their folding.

Nodes are numbered from 1 in the user-facing API and stored 0-based.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterator, Sequence

from .quadform import ellipsoid_points, inverse, is_positive_definite
from .qseries import MultiSeries

_TWISTED = re.compile(r"^([ADE])(\d+)\^(\d+)$")
_UNTWISTED = re.compile(r"^untwisted:([ADE])(\d+)$")


class UnknownTypeError(ValueError):
    """Unknown or unsupported type token."""


@dataclass(frozen=True)
class TypeToken:
    letter: str
    rank: int
    order: int

    @property
    def twisted(self) -> bool:
        return self.order > 1

    def __str__(self) -> str:
        if self.order == 1:
            return f"untwisted:{self.letter}{self.rank}"
        return f"{self.letter}{self.rank}^{self.order}"


def parse_type(token: str) -> TypeToken:
    """Parse ``A3^2`` / ``D4^3`` / ``untwisted:E6`` style tokens."""
    s = str(token).strip()
    m = _TWISTED.match(s)
    if m:
        letter, rank, order = m.group(1), int(m.group(2)), int(m.group(3))
    else:
        m = _UNTWISTED.match(s)
        if not m:
            raise UnknownTypeError(f"unknown type token {token!r}")
        letter, rank, order = m.group(1), int(m.group(2)), 1
    t = TypeToken(letter, rank, order)
    _check_supported(t, token)
    return t


def _check_supported(t: TypeToken, token) -> None:
    bad = UnknownTypeError(f"unsupported type {token!r}")
    if t.order == 1:
        if t.letter == "A" and t.rank >= 1:
            return
        if t.letter == "D" and t.rank >= 4:
            return
        if t.letter == "E" and t.rank in (6, 7, 8):
            return
        raise bad
    if t.order == 2:
        if t.letter == "A":
            if t.rank < 3:
                raise UnknownTypeError(f"{token!r}: need l >= 2 in A_(2l-1)")
            if t.rank % 2 == 0:
                raise bad
            return
        if t.letter == "D":
            if t.rank < 3:
                raise UnknownTypeError(f"{token!r}: need l >= 2 in D_(l+1)")
            return
        if t.letter == "E" and t.rank == 6:
            return
        raise bad
    if t.order == 3 and t.letter == "D" and t.rank == 4:
        return
    raise bad


@dataclass(frozen=True)
class AmbientLattice:
    rank: int
    gram: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        g = self.gram
        n = self.rank
        if len(g) != n or any(len(row) != n for row in g):
            raise ValueError("gram has wrong shape")
        for i in range(n):
            if g[i][i] != 2:
                raise ValueError("diagonal of gram must be 2")
            for j in range(n):
                if g[i][j] != g[j][i]:
                    raise ValueError("gram is not symmetric")
                if i != j and g[i][j] not in (0, -1):
                    raise ValueError("off-diagonal gram entries must be 0 or -1")
        if not is_positive_definite(g):
            raise ValueError("gram is not positive definite")


@dataclass(frozen=True)
class DiagramAutomorphism:
    order: int
    perm: tuple[int, ...]  # 0-based image of each node

    def power(self, p: int) -> tuple[int, ...]:
        out = tuple(range(len(self.perm)))
        for _ in range(p % self.order if self.order else 0):
            out = tuple(self.perm[i] for i in out)
        return out

    def orbits(self) -> list[tuple[int, ...]]:
        seen: set[int] = set()
        out = []
        for i in range(len(self.perm)):
            if i in seen:
                continue
            orb = []
            j = i
            while j not in orb:
                orb.append(j)
                j = self.perm[j]
            seen.update(orb)
            out.append(tuple(sorted(orb)))
        return out

    def check(self, ambient: AmbientLattice) -> None:
        n = ambient.rank
        if sorted(self.perm) != list(range(n)):
            raise ValueError("perm is not a permutation of the nodes")
        if self.power(self.order) != tuple(range(n)) and self.order > 0:
            raise ValueError("perm^r is not the identity")
        if any(self.perm[i] != i for i in range(n)) and self.order == 1:
            raise ValueError("order 1 requires the identity permutation")
        g = ambient.gram
        for i in range(n):
            for j in range(n):
                if g[self.perm[i]][self.perm[j]] != g[i][j]:
                    raise ValueError("permutation does not preserve the gram matrix")


def _gram_from_edges(n: int, edges: Sequence[tuple[int, int]]) -> tuple[tuple[int, ...], ...]:
    g = [[0] * n for _ in range(n)]
    for i in range(n):
        g[i][i] = 2
    for a, b in edges:
        g[a - 1][b - 1] = g[b - 1][a - 1] = -1
    return tuple(tuple(row) for row in g)


def _edges(letter: str, n: int) -> list[tuple[int, int]]:
    if letter == "A":
        return [(i, i + 1) for i in range(1, n)]
    if letter == "D":
        # chain 1..n-2, nodes n-1 and n both hang off n-2
        return [(i, i + 1) for i in range(1, n - 2)] + [(n - 2, n - 1), (n - 2, n)]
    if letter == "E":
        # chain 1-2-3-5-6-..., node 4 hangs off 3
        chain = [1, 2, 3] + list(range(5, n + 1))
        return list(zip(chain, chain[1:])) + [(3, 4)]
    raise UnknownTypeError(letter)


def _perm(t: TypeToken) -> tuple[int, ...]:
    n = t.rank
    p = list(range(1, n + 1))
    if t.order == 1:
        pass
    elif t.letter == "A":
        p = [n + 1 - i for i in range(1, n + 1)]
    elif t.letter == "D" and t.order == 2:
        p[n - 2], p[n - 1] = n, n - 1
    elif t.letter == "E":
        p = [6, 5, 3, 4, 2, 1]
    else:  # D4^3: 1 -> 3 -> 4 -> 1
        p = [3, 2, 4, 1]
    return tuple(x - 1 for x in p)


def build_ambient(twisted_type: str | TypeToken) -> tuple[AmbientLattice, DiagramAutomorphism]:
    t = twisted_type if isinstance(twisted_type, TypeToken) else parse_type(twisted_type)
    gram = _gram_from_edges(t.rank, _edges(t.letter, t.rank))
    amb = AmbientLattice(t.rank, gram, tuple(f"alpha_{i}" for i in range(1, t.rank + 1)))
    aut = DiagramAutomorphism(t.order, _perm(t))
    aut.check(amb)
    return amb, aut


def highest_root(gram: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Highest root of a connected simply-laced diagram, in simple-root coordinates."""
    n = len(gram)
    beta = [0] * n
    beta[0] = 1
    while True:
        for i in range(n):
            if sum(gram[i][j] * beta[j] for j in range(n)) < 0:
                beta[i] += 1
                break
        else:
            return tuple(beta)


def _theta0(t: TypeToken, gram) -> tuple[int, ...]:
    n = t.rank
    if t.order == 1:
        return highest_root(gram)
    if t.letter == "A":
        # alpha_1 + ... + alpha_{2l-2}
        return tuple(1 if i < n - 1 else 0 for i in range(n))
    if t.letter == "D" and t.order == 2:
        # alpha_1 + ... + alpha_l
        return tuple(1 if i < n - 1 else 0 for i in range(n))
    if t.letter == "E":
        return (1, 2, 2, 1, 1, 1)
    return (1, 1, 1, 0)


@dataclass(frozen=True)
class FoldedData:
    token: TypeToken
    ambient: AmbientLattice
    automorphism: DiagramAutomorphism
    orbits: tuple[tuple[int, ...], ...]
    gram0: tuple[tuple[Fraction, ...], ...]
    rho: tuple[Fraction, ...]
    h_dims: tuple[int, ...]
    theta0: tuple[int, ...]
    _inv: tuple[tuple[Fraction, ...], ...] = field(repr=False, compare=False, default=())

    @property
    def r(self) -> int:
        return self.automorphism.order

    @property
    def l(self) -> int:
        return len(self.orbits)

    @property
    def orbit_reps(self) -> tuple[int, ...]:
        """1-based orbit representatives (lowest node index)."""
        return tuple(o[0] + 1 for o in self.orbits)

    @property
    def theta0_folded(self) -> tuple[int, ...]:
        """Coefficients ``t_i`` of the projected ``theta^0`` in the ``beta`` basis."""
        return tuple(sum(self.theta0[j] for j in orb) for orb in self.orbits)

    @property
    def gram0_inverse(self) -> tuple[tuple[Fraction, ...], ...]:
        return self._inv

    @property
    def grid(self) -> int:
        """Common denominator of all norms ``<lambda, lambda>/2`` on the lattice."""
        g = 1
        for i in range(self.l):
            g = lcm(g, self.rho[i].denominator)
            for j in range(i):
                g = lcm(g, self.gram0[i][j].denominator)
        return g

    def pair(self, x: Sequence, y: Sequence) -> Fraction:
        """``<x, y>`` for vectors written in the ``beta`` basis."""
        g = self.gram0
        return sum((g[i][j] * x[i] * y[j] for i in range(len(x)) if x[i]
                    for j in range(len(y)) if y[j]), Fraction(0))

    def norm(self, x: Sequence) -> Fraction:
        return self.pair(x, x)

    def is_chain(self) -> bool:
        g = self.gram0
        return all(g[i][j] == 0 for i in range(self.l) for j in range(self.l) if abs(i - j) >= 2)

    def require_chain(self) -> None:
        if not self.is_chain():
            raise NotImplementedError(
                f"{self.token}: folded diagram is not a chain, the previous-color "
                "condition on quasi-particle energies does not cover it")

    def as_dict(self) -> dict:
        fmt = lambda x: f"{x.numerator}/{x.denominator}"  # noqa: E731
        return {
            "type": str(self.token),
            "r": self.r,
            "l": self.l,
            "orbit_reps": list(self.orbit_reps),
            "orbits": [[i + 1 for i in o] for o in self.orbits],
            "gram0": [[fmt(x) for x in row] for row in self.gram0],
            "rho": [fmt(x) for x in self.rho],
            "h_dims": list(self.h_dims),
            "theta0": list(self.theta0),
        }


def _cycle_lengths(perm: Sequence[int]) -> list[int]:
    seen: set[int] = set()
    out = []
    for i in range(len(perm)):
        if i in seen:
            continue
        j, n = i, 0
        while j not in seen:
            seen.add(j)
            j = perm[j]
            n += 1
        out.append(n)
    return out


def eigenspace_dims(aut: DiagramAutomorphism) -> tuple[int, ...]:
    """Dimension of each ``eta^j`` eigenspace of the permutation action."""
    r = aut.order
    cycles = _cycle_lengths(aut.perm)
    return tuple(sum(1 for c in cycles if (c * j) % r == 0) for j in range(r))


def fold(ambient: AmbientLattice, automorphism: DiagramAutomorphism,
         token: TypeToken | None = None) -> FoldedData:
    automorphism.check(ambient)
    r = automorphism.order
    orbits = sorted(automorphism.orbits(), key=lambda o: o[0])
    powers = [automorphism.power(p) for p in range(r)]
    g = ambient.gram
    gram0 = tuple(
        tuple(Fraction(sum(g[pw[a[0]]][b[0]] for pw in powers), r) for b in orbits)
        for a in orbits
    )
    if not is_positive_definite(gram0):
        raise ValueError("folded gram matrix is not positive definite")
    rho = tuple(gram0[i][i] / 2 for i in range(len(orbits)))
    if token is None:
        token = _guess_token(ambient, automorphism)
    theta0 = _theta0(token, g)
    inv = tuple(tuple(row) for row in inverse(gram0))
    return FoldedData(token, ambient, automorphism, tuple(orbits), gram0, rho,
                      eigenspace_dims(automorphism), theta0, inv)


def _guess_token(ambient: AmbientLattice, aut: DiagramAutomorphism) -> TypeToken:
    for letter in "ADE":
        for order in (1, 2, 3):
            t = TypeToken(letter, ambient.rank, order)
            try:
                _check_supported(t, str(t))
            except UnknownTypeError:
                continue
            try:
                amb, a = build_ambient(t)
            except (UnknownTypeError, ValueError):
                continue
            if amb.gram == ambient.gram and a.perm == aut.perm:
                return t
    raise UnknownTypeError("could not identify the ambient diagram")


def folded_data(token: str | TypeToken) -> FoldedData:
    t = token if isinstance(token, TypeToken) else parse_type(token)
    amb, aut = build_ambient(t)
    return fold(amb, aut, t)


def lattice_points(folded: FoldedData, bound: Fraction) -> Iterator[tuple[tuple[int, ...], Fraction]]:
    """All ``lambda`` in the ``beta`` lattice with ``<lambda, lambda>/2 <= bound``."""
    for x, val in ellipsoid_points(folded.gram0, 2 * Fraction(bound)):
        yield x, val / 2


def theta_series(folded: FoldedData, N) -> MultiSeries:
    N = Fraction(N)
    terms: dict[tuple[Fraction, tuple[int, ...]], int] = {}
    for x, e in lattice_points(folded, N):
        terms[(e, x)] = 1
    return MultiSeries(folded.l, N, terms, grid=folded.grid)
