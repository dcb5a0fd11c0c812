"""Closed-form fermionic sums for the principal and parafermionic characters.

Both are sums over nonnegative ``l x S`` matrices ``P`` of

    q^(1/2 P^T (gram0 (x) K) P) * prod_{i,s} 1/(q^rho_i; q^rho_i)_{p_i^(s)} * y^w

with ``w_i = sum_s s p_i^(s)``; ``K`` is ``[min(s,t)]`` (``S = k``) for the
principal subspace and ``D^(k)`` (``S = k-1``) for the parafermionic space.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .folded import FoldedData
from .quadform import ellipsoid_points, kron, matmul
from .qseries import MultiSeries, divide_geometric_dense


@dataclass(frozen=True)
class DMatrix:
    k: int
    entries: tuple[tuple[Fraction, ...], ...]

    @property
    def size(self) -> int:
        return len(self.entries)

    def times_cartan(self) -> list[list[Fraction]]:
        return matmul(self.entries, cartan_a(self.size)) if self.size else []


def cartan_a(n: int) -> list[list[int]]:
    """Cartan matrix of the finite type ``A_n``."""
    return [[2 if i == j else -1 if abs(i - j) == 1 else 0 for j in range(n)] for i in range(n)]


def d_matrix(k: int) -> DMatrix:
    """``D_{s,t} = min(s,t) - s t / k`` for ``1 <= s, t <= k-1``."""
    if k <= 0:
        raise ValueError("level must be positive")
    return DMatrix(k, tuple(tuple(Fraction(min(s, t)) - Fraction(s * t, k) for t in range(1, k))
                            for s in range(1, k)))


def min_matrix(size: int) -> list[list[int]]:
    return [[min(s, t) for t in range(1, size + 1)] for s in range(1, size + 1)]


def d_form(folded: FoldedData, k: int, d: DMatrix | Sequence[Sequence] | None = None):
    entries = d_matrix(k).entries if d is None else getattr(d, "entries", d)
    return kron(folded.gram0, entries)


def fermionic_sum(folded: FoldedData, kernel: Sequence[Sequence], N, grid: int) -> MultiSeries:
    """The generic sum above for an ``S x S`` kernel ``K`` (must keep the form PD)."""
    N = Fraction(N)
    l, size = folded.l, len(kernel)
    t = N * grid
    n = t.numerator // t.denominator + 1
    steps = []
    for rho in folded.rho:
        st = rho * grid
        if st.denominator != 1:
            raise ValueError(f"rho={rho} is not on the 1/{grid} grid")
        steps.append(int(st))
    rows: dict[tuple[int, ...], list[int]] = {}
    if size == 0 or l == 0:
        return MultiSeries.colorless(l, N, grid, [1])
    form = kron(folded.gram0, kernel)
    for x, val in ellipsoid_points(form, 2 * N, nonnegative=True):
        e = val / 2 * grid
        if e.denominator != 1:
            raise ValueError(f"exponent {val / 2} off the 1/{grid} grid")
        off = int(e)
        coeffs = [0] * (n - off)
        coeffs[0] = 1
        for i in range(l):
            for s in range(size):
                p = x[i * size + s]
                for j in range(1, p + 1):
                    divide_geometric_dense(coeffs, j * steps[i])
        w = tuple(sum((s + 1) * x[i * size + s] for s in range(size)) for i in range(l))
        row = rows.get(w)
        if row is None:
            row = rows[w] = [0] * n
        for j, c in enumerate(coeffs):
            row[off + j] += c
    return MultiSeries._from_rows(l, N, grid, rows)


def principal_char_formula(folded: FoldedData, k: int, N,
                           kernel: Sequence[Sequence] | None = None) -> MultiSeries:
    """Fermionic sum for the principal subspace; ``kernel`` overrides ``[min(s,t)]``."""
    if k < 1:
        raise ValueError("level must be positive")
    return fermionic_sum(folded, min_matrix(k) if kernel is None else kernel, N, 2 * folded.r * k)


def parafermionic_char_formula(folded: FoldedData, k: int, N,
                               d: DMatrix | Sequence[Sequence] | None = None) -> MultiSeries:
    """Fermionic sum for the parafermionic space; ``d`` overrides ``D^(k)``."""
    if k < 1:
        raise ValueError("level must be positive")
    entries = d_matrix(k).entries if d is None else getattr(d, "entries", d)
    return fermionic_sum(folded, entries, N, 2 * folded.r * k)
