"""Quasi-particle monomials, the admissibility conditions (C1)-(C3) and
enumeration of the resulting bases.

Conventions used throughout:

* colors are 0-based internally, particles within a color are indexed
  ``p = 1, 2, ...`` in order of weakly decreasing charge;
* ``P[i][s-1]`` is the number of color-``i`` particles of charge exactly ``s``;
* the plain energy of a monomial is ``-sum(m)``.
"""
from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from . import kernels
from .fermionic import d_form
from .folded import FoldedData
from .quadform import ellipsoid_points, kron
from .qseries import MultiSeries

Charges = tuple[tuple[int, ...], ...]
PMatrix = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class QPMonomial:
    charges: Charges
    energies: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if len(self.charges) != len(self.energies):
            raise ValueError("charges and energies cover different numbers of colors")
        for i, (ns, ms) in enumerate(zip(self.charges, self.energies)):
            if len(ns) != len(ms):
                raise ValueError(f"color {i + 1}: {len(ns)} charges but {len(ms)} energies")

    @classmethod
    def make(cls, charges: Sequence[Sequence[int]], energies: Sequence[Sequence]) -> "QPMonomial":
        return cls(tuple(tuple(int(n) for n in ns) for ns in charges),
                   tuple(tuple(Fraction(m) for m in ms) for ms in energies))

    @classmethod
    def empty(cls, l: int) -> "QPMonomial":
        return cls(((),) * l, ((),) * l)

    @property
    def num_colors(self) -> int:
        return len(self.charges)

    def color_type(self) -> tuple[int, ...]:
        return tuple(sum(ns) for ns in self.charges)

    def plain_energy(self) -> Fraction:
        return -sum((m for ms in self.energies for m in ms), Fraction(0))

    def p_matrix(self, size: int | None = None) -> PMatrix:
        return p_matrix(self.charges, size)

    def to_text(self) -> str:
        """``[(n, m), ...]`` per color, colors joined by ``"; "``."""
        return "; ".join(
            "[" + ", ".join(f"({n}, {m.numerator}/{m.denominator})" for n, m in zip(ns, ms)) + "]"
            for ns, ms in zip(self.charges, self.energies))

    @classmethod
    def from_text(cls, text: str) -> "QPMonomial":
        charges, energies = [], []
        for part in text.split(";"):
            part = part.strip()
            if not (part.startswith("[") and part.endswith("]")):
                raise ValueError(f"malformed color block {part!r}")
            ns, ms = [], []
            for n, m in _PAIR.findall(part[1:-1]):
                ns.append(int(n))
                ms.append(Fraction(m))
            leftover = _PAIR.sub("", part[1:-1]).replace(",", "").strip()
            if leftover:
                raise ValueError(f"malformed color block {part!r}")
            charges.append(ns)
            energies.append(ms)
        return cls.make(charges, energies)

    def sort_key(self):
        return (self.plain_energy(), self.charges, self.energies)


_PAIR = re.compile(r"\(\s*(\d+)\s*,\s*(-?\d+(?:/\d+)?)\s*\)")


def dual_charge(charges: Sequence[int], k: int) -> tuple[int, ...]:
    """``r^(s) = #{p : n_p >= s}`` for ``s = 1..k`` (one color)."""
    if any(n > k for n in charges):
        raise ValueError(f"charge exceeds level {k}")
    if any(n < 1 for n in charges):
        raise ValueError("charges must be positive")
    return tuple(sum(1 for n in charges if n >= s) for s in range(1, k + 1))


def transpose(parts: Sequence[int]) -> tuple[int, ...]:
    """Conjugate partition, dropping trailing zeros."""
    top = max(parts, default=0)
    return tuple(sum(1 for x in parts if x >= s) for s in range(1, top + 1))


def p_matrix(charges: Sequence[Sequence[int]], size: int | None = None) -> PMatrix:
    top = max((n for ns in charges for n in ns), default=0)
    size = top if size is None else size
    if top > size:
        raise ValueError("charge exceeds P-matrix width")
    return tuple(tuple(sum(1 for n in ns if n == s) for s in range(1, size + 1)) for ns in charges)


def charges_from_p(P: PMatrix) -> Charges:
    return tuple(tuple(s for s in range(len(row), 0, -1) for _ in range(row[s - 1])) for row in P)


def _check_charges(charges: Charges) -> None:
    for i, ns in enumerate(charges):
        if any(a < b for a, b in zip(ns, ns[1:])):
            raise ValueError(f"color {i + 1}: charges are not weakly decreasing")
        if any(n < 1 for n in ns):
            raise ValueError(f"color {i + 1}: charges must be positive")


def caps(charges: Charges, folded: FoldedData) -> tuple[tuple[Fraction, ...], ...]:
    """Upper bound on ``m_{p,i}`` from (C2), for every particle."""
    folded.require_chain()
    g, rho = folded.gram0, folded.rho
    out = []
    for i, ns in enumerate(charges):
        prev = charges[i - 1] if i > 0 else ()
        row = []
        for p, n in enumerate(ns, start=1):
            c = -(2 * p - 1) * rho[i] * n
            if prev:
                c -= g[i][i - 1] * sum(min(n, nq) for nq in prev)
            row.append(c)
        out.append(tuple(row))
    return tuple(out)


def max_energies(charges: Charges, folded: FoldedData) -> tuple[tuple[tuple[Fraction, ...], ...], Fraction]:
    """Packed energies and the minimal total plain energy for a charge-type.

    Within an equal-charge run the (C3) chain from the run's first cap lands
    exactly on the (C2) caps of the later particles, so the packed values are
    the (C2) caps themselves.
    """
    charges = tuple(tuple(ns) for ns in charges)
    _check_charges(charges)
    c = caps(charges, folded)
    return c, -sum((x for row in c for x in row), Fraction(0))


def min_form(folded: FoldedData, size: int) -> list[list[Fraction]]:
    """``gram0 (x) [min(s,t)]`` on flattened P-matrices (twice the minimal energy)."""
    return kron(folded.gram0, [[min(s, t) for t in range(1, size + 1)] for s in range(1, size + 1)])


def min_total_energy(P: PMatrix, folded: FoldedData) -> Fraction:
    """``1/2 sum_{i,j} sum_{s,t} min(s,t) gram0[i][j] p_i^(s) p_j^(t)``."""
    g = folded.gram0
    total = Fraction(0)
    for i, row_i in enumerate(P):
        for j, row_j in enumerate(P):
            if not g[i][j]:
                continue
            for s, a in enumerate(row_i, 1):
                if a:
                    for t, b in enumerate(row_j, 1):
                        if b:
                            total += g[i][j] * min(s, t) * a * b
    return total / 2


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    clause: str | None = None
    color: int | None = None  # 1-based
    index: int | None = None  # particle index p, 1-based
    detail: str = ""

    def __bool__(self) -> bool:
        return self.valid


def validate(m: QPMonomial, folded: FoldedData, k: int) -> ValidationReport:
    """Check (C1)-(C3); report the first violated clause.

    Colors are scanned in order and within each color the particles in
    order; for a given particle the clauses are checked as C1, C3, C2
    (the gap to the previous particle is reported before the cap).
    """
    if m.num_colors != folded.l:
        raise ValueError(f"monomial has {m.num_colors} colors, type has {folded.l}")
    _check_charges(m.charges)
    if any(n > k for ns in m.charges for n in ns):
        raise ValueError(f"charge exceeds level {k}")
    c = caps(m.charges, folded)
    rho = folded.rho
    for i, (ns, ms) in enumerate(zip(m.charges, m.energies)):
        for p, (n, e) in enumerate(zip(ns, ms), start=1):
            if (e / rho[i]).denominator != 1:
                return ValidationReport(False, "C1", i + 1, p, f"m={e} not in {rho[i]}Z")
            if p > 1 and ns[p - 2] == n and e > ms[p - 2] - 2 * rho[i] * n:
                return ValidationReport(False, "C3", i + 1, p,
                                        f"m={e} > {ms[p - 2] - 2 * rho[i] * n}")
            if e > c[i][p - 1]:
                return ValidationReport(False, "C2", i + 1, p, f"m={e} > {c[i][p - 1]}")
    return ValidationReport(True)


def _weakly_increasing(length: int, budget: int) -> list[tuple[int, tuple[int, ...]]]:
    """All ``0 <= o_1 <= ... <= o_length`` with ``sum(o) <= budget``, with their sums."""
    out: list[tuple[int, tuple[int, ...]]] = []

    def rec(pos: int, lo: int, left: int, acc: list[int]):
        if pos == length:
            out.append((budget - left, tuple(acc)))
            return
        remaining = length - pos
        v = lo
        while v * remaining <= left:
            acc.append(v)
            rec(pos + 1, v, left - v, acc)
            acc.pop()
            v += 1

    rec(0, 0, budget, [])
    return out


def p_matrices(folded: FoldedData, size: int, bound: Fraction,
               form: Sequence[Sequence[Fraction]] | None = None) -> Iterator[tuple[PMatrix, Fraction]]:
    """All P (``l x size``, entries >= 0) with ``1/2 P^T form P <= bound``.

    ``form`` defaults to :func:`min_form`; yields ``(P, value/2)``.
    """
    l = folded.l
    if size == 0 or l == 0:
        yield tuple(() for _ in range(l)), Fraction(0)
        return
    if form is None:
        form = min_form(folded, size)
    for x, val in ellipsoid_points(form, 2 * Fraction(bound), nonnegative=True):
        yield tuple(tuple(x[i * size:(i + 1) * size]) for i in range(l)), val / 2


def _runs(charges: Charges) -> list[tuple[int, int, int]]:
    """``(color, start, length)`` for each maximal equal-charge run."""
    out = []
    for i, ns in enumerate(charges):
        p = 0
        while p < len(ns):
            q = p
            while q < len(ns) and ns[q] == ns[p]:
                q += 1
            out.append((i, p, q - p))
            p = q
    return out


def _monomials_for(charges: Charges, folded: FoldedData, budget: Fraction,
                   check: bool, k: int) -> Iterator[tuple[QPMonomial, Fraction]]:
    """Every valid monomial of one charge-type with plain energy <= min + budget.

    Yields ``(monomial, plain_energy)``.
    """
    c, low = max_energies(charges, folded)
    rho = folded.rho
    runs = _runs(charges)
    # offsets are counted in units of rho_color
    options = []
    for color, start, length in runs:
        units = budget / rho[color]
        units = units.numerator // units.denominator
        options.append((color, start, length, _weakly_increasing(length, units)))
    energies = [list(row) for row in c]
    offsets = [[0] * len(row) for row in c]

    def rec(idx: int, left: Fraction) -> Iterator[Fraction]:
        if idx == len(options):
            yield budget - left
            return
        color, start, length, opts = options[idx]
        r = rho[color]
        for w, seq in opts:
            cost = w * r
            if cost > left:
                continue
            for t, o in enumerate(seq):
                offsets[color][start + t] = o
            yield from rec(idx + 1, left - cost)

    for spent in rec(0, budget):
        for i, row in enumerate(c):
            for p, cap in enumerate(row):
                energies[i][p] = cap - rho[i] * offsets[i][p]
        mono = QPMonomial(charges, tuple(tuple(e) for e in energies))
        if check:
            rep = validate(mono, folded, k)
            if not rep:
                raise AssertionError(f"enumerated monomial fails {rep.clause}: {mono.to_text()}")
        yield mono, low + spent


def iter_monomials(folded: FoldedData, k: int, N, charge_cap: int,
                   check: bool = True) -> Iterator[tuple[QPMonomial, PMatrix, Fraction]]:
    """Unordered stream of ``(monomial, P, plain_energy)`` with energy <= N."""
    N = Fraction(N)
    if charge_cap not in (k, k - 1):
        raise ValueError("charge_cap must be k or k-1")
    folded.require_chain()
    for P, low in p_matrices(folded, charge_cap, N):
        charges = charges_from_p(P) if charge_cap else tuple(() for _ in range(folded.l))
        for mono, e in _monomials_for(charges, folded, N - low, check, k):
            yield mono, P, e


def enumerate_monomials(folded: FoldedData, k: int, N, charge_cap: int,
                        check: bool = True) -> list[QPMonomial]:
    """Monomials with charges <= charge_cap satisfying (C1)-(C3) and plain energy <= N.

    Sorted by total energy, then charge-type, then energies.
    """
    out = [m for m, _, _ in iter_monomials(folded, k, N, charge_cap, check)]
    out.sort(key=QPMonomial.sort_key)
    return out


def grid_for(folded: FoldedData, k: int) -> int:
    return 2 * folded.r * k


def _charge_type_histogram(charges: Charges, folded: FoldedData, budget: Fraction,
                           grid: int, check: bool) -> tuple[Fraction, list[int]]:
    """Minimal plain energy and the count of valid tuples per surplus (grid units)."""
    c, low = max_energies(charges, folded)
    caps_flat, rho_flat, charge_flat, starts = [], [], [], []
    for i, ns in enumerate(charges):
        for p, n in enumerate(ns):
            caps_flat.append(_on_grid(c[i][p], grid))
            rho_flat.append(_on_grid(folded.rho[i], grid))
            charge_flat.append(n)
            starts.append(p == 0 or ns[p - 1] != n)
    b = budget * grid
    hist = kernels.qp_histogram(caps_flat, rho_flat, charge_flat, starts,
                                b.numerator // b.denominator, check)
    return low, hist


def _on_grid(x: Fraction, grid: int) -> int:
    y = x * grid
    if y.denominator != 1:
        raise AssertionError(f"{x} is off the 1/{grid} grid")
    return y.numerator


def principal_char_enum(folded: FoldedData, k: int, N, check: bool = True) -> MultiSeries:
    """Sum of ``q^(plain energy) y^(color type)`` over the enumerated basis."""
    N = Fraction(N)
    folded.require_chain()
    grid = grid_for(folded, k)
    acc = _Accumulator(folded.l, N, grid)
    for P, low in p_matrices(folded, k, N):
        charges = charges_from_p(P)
        low2, hist = _charge_type_histogram(charges, folded, N - low, grid, check)
        if check and low2 != low:
            raise AssertionError("packed energy differs from the quadratic form")
        acc.add_hist(low, tuple(sum(ns) for ns in charges), hist)
    return acc.series()


def conformal_energy(m: QPMonomial, folded: FoldedData, k: int) -> Fraction:
    """``-sum(m) - 1/2 sum (s t / k) gram0[i][j] p_i^(s) p_j^(t)``."""
    if any(n >= k for ns in m.charges for n in ns):
        if any(n > k for ns in m.charges for n in ns):
            raise ValueError(f"charge exceeds level {k}")
        warnings.warn("charge k quasi-particle outside the parafermionic range", stacklevel=2)
    g = folded.gram0
    r = m.color_type()  # sum_s s p_i^(s)
    quad = sum((g[i][j] * r[i] * r[j] for i in range(len(r)) for j in range(len(r))), Fraction(0))
    return m.plain_energy() - quad / (2 * k)


def parafermionic_char_enum(folded: FoldedData, k: int, N, check: bool = True) -> MultiSeries:
    N = Fraction(N)
    grid = grid_for(folded, k)
    acc = _Accumulator(folded.l, N, grid)
    if k == 1:
        acc.add(Fraction(0), (0,) * folded.l)
        return acc.series()
    # conformal = plain - |w|^2/2k = (D-form value) + offsets
    folded.require_chain()
    g, l = folded.gram0, folded.l
    for P, dval in p_matrices(folded, k - 1, N, form=d_form(folded, k)):
        charges = charges_from_p(P)
        w = tuple(sum(ns) for ns in charges)
        low, hist = _charge_type_histogram(charges, folded, N - dval, grid, check)
        shift = sum((g[i][j] * w[i] * w[j] for i in range(l) for j in range(l)), Fraction(0)) / (2 * k)
        if check and low - shift != dval:
            raise AssertionError("conformal shift bookkeeping mismatch")
        acc.add_hist(dval, w, hist)
    return acc.series()


class _Accumulator:
    """Dense per-``y`` coefficient rows on a fixed grid."""

    def __init__(self, l: int, N: Fraction, grid: int):
        self.l, self.N, self.grid = l, N, grid
        t = N * grid
        self.n = t.numerator // t.denominator + 1
        self.rows: dict[tuple[int, ...], list[int]] = {}

    def add(self, e: Fraction, y: tuple[int, ...], c: int = 1) -> None:
        if e < 0:
            raise AssertionError(f"negative energy {e}")
        if e > self.N:
            return
        j = e * self.grid
        if j.denominator != 1:
            raise AssertionError(f"energy {e} off the 1/{self.grid} grid")
        row = self.rows.get(y)
        if row is None:
            row = self.rows[y] = [0] * self.n
        row[int(j)] += c

    def add_hist(self, e0: Fraction, y: tuple[int, ...], hist: list[int]) -> None:
        """Add ``hist[j]`` at energy ``e0 + j/grid``."""
        if e0 < 0:
            raise AssertionError(f"negative energy {e0}")
        off = _on_grid(e0, self.grid)
        if off >= self.n:
            return
        row = self.rows.get(y)
        if row is None:
            row = self.rows[y] = [0] * self.n
        for j, c in enumerate(hist[: self.n - off]):
            if c:
                row[off + j] += c

    def series(self) -> MultiSeries:
        return MultiSeries._from_rows(self.l, self.N, self.grid, self.rows)
