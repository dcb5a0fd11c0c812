"""Exact linear algebra and lattice-point enumeration over the rationals.

Everything here works on lists of :class:`fractions.Fraction` (or ints) and
never touches floating point.
"""
from __future__ import annotations

from fractions import Fraction
from math import isqrt
from typing import Iterator, Sequence

Matrix = Sequence[Sequence[Fraction]]


def as_fraction_matrix(m: Matrix) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in m]


def determinant(m: Matrix) -> Fraction:
    a = as_fraction_matrix(m)
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] / a[col][col]
            if f:
                for c in range(col, n):
                    a[r][c] -= f * a[col][c]
    return det


def inverse(m: Matrix) -> list[list[Fraction]]:
    """Gauss-Jordan inverse; raises ``ValueError`` on a singular matrix."""
    n = len(m)
    a = [list(row) + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(as_fraction_matrix(m))]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise ValueError("matrix is singular")
        a[col], a[pivot] = a[pivot], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def matmul(a: Matrix, b: Matrix) -> list[list[Fraction]]:
    return [[sum((Fraction(a[i][k]) * b[k][j] for k in range(len(b))), Fraction(0))
             for j in range(len(b[0]))] for i in range(len(a))]


def is_positive_definite(m: Matrix) -> bool:
    """Sylvester's criterion on the leading principal minors."""
    n = len(m)
    if any(m[i][j] != m[j][i] for i in range(n) for j in range(n)):
        return False
    return all(determinant([row[:k] for row in m[:k]]) > 0 for k in range(1, n + 1))


def bilinear(m: Matrix, x: Sequence, y: Sequence) -> Fraction:
    return sum((Fraction(m[i][j]) * x[i] * y[j]
                for i in range(len(x)) if x[i]
                for j in range(len(y)) if y[j]), Fraction(0))


def kron(a: Matrix, b: Matrix) -> list[list[Fraction]]:
    """Kronecker product, index ``(i, s)`` flattened as ``i * len(b) + s``.

    ``a`` is the outer (color) factor and ``b`` the inner (charge) factor.
    """
    na, nb = len(a), len(b)
    return [[Fraction(a[i][j]) * b[s][t] for j in range(na) for t in range(nb)]
            for i in range(na) for s in range(nb)]


def floor_sqrt(x: Fraction) -> int:
    """Largest integer ``n >= 0`` with ``n*n <= x`` (``x >= 0``)."""
    if x < 0:
        raise ValueError("negative argument")
    n = isqrt(x.numerator // x.denominator)
    while (n + 1) * (n + 1) <= x:
        n += 1
    return n


def _ldl_upper(a: list[list[Fraction]]) -> tuple[list[Fraction], list[list[Fraction]]]:
    # x^T A x = sum_i d[i] * (x_i + sum_{j>i} u[i][j] x_j)^2
    n = len(a)
    d = [Fraction(0)] * n
    u = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        d[i] = a[i][i] - sum((d[k] * u[k][i] ** 2 for k in range(i)), Fraction(0))
        if d[i] <= 0:
            raise ValueError("quadratic form is not positive definite")
        for j in range(i + 1, n):
            u[i][j] = (a[i][j] - sum((d[k] * u[k][i] * u[k][j] for k in range(i)),
                                     Fraction(0))) / d[i]
    return d, u


def ellipsoid_points(
    form: Matrix,
    bound: Fraction | int,
    center: Sequence[Fraction] | None = None,
    nonnegative: bool = False,
) -> Iterator[tuple[tuple[int, ...], Fraction]]:
    """Yield every integer ``x`` with ``(x-c)^T A (x-c) <= bound`` and its value.

    Fincke-Pohst enumeration with exact rational arithmetic: coordinates are
    fixed from the last to the first, and at each level the admissible range
    follows from the remaining budget, so no lattice point is missed.
    ``nonnegative`` restricts to ``x >= 0`` componentwise.
    """
    a = as_fraction_matrix(form)
    n = len(a)
    bound = Fraction(bound)
    if n == 0:
        if bound >= 0:
            yield (), Fraction(0)
        return
    if bound < 0:
        return
    c = [Fraction(0)] * n if center is None else [Fraction(v) for v in center]
    d, u = _ldl_upper(a)
    x = [0] * n

    def rec(i: int, remaining: Fraction) -> Iterator[tuple[tuple[int, ...], Fraction]]:
        shift = -c[i] + sum((u[i][j] * (x[j] - c[j]) for j in range(i + 1, n)), Fraction(0))
        # need d_i * (x_i + shift)^2 <= remaining
        t = remaining / d[i]
        r = floor_sqrt(t) + 1
        lo = -shift - r
        hi = -shift + r
        lo_i = lo.numerator // lo.denominator
        hi_i = -((-hi.numerator) // hi.denominator)
        if nonnegative:
            lo_i = max(lo_i, 0)
        for xi in range(lo_i, hi_i + 1):
            z = xi + shift
            used = d[i] * z * z
            if used > remaining:
                continue
            x[i] = xi
            if i == 0:
                yield tuple(x), bound - (remaining - used)
            else:
                yield from rec(i - 1, remaining - used)
        x[i] = 0

    yield from rec(n - 1, bound)
