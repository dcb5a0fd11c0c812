"""Truncated formal series in ``q`` (rational exponents) and ``y_1..y_l``.

A :class:`MultiSeries` keeps, for every ``y``-exponent vector, a dense list
of integer coefficients on the grid ``q^(j/grid)``, ``0 <= j/grid <= N``.
"""
from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from math import lcm
from typing import Iterable, Iterator, Mapping

from . import kernels

SCHEMA = "twistchar.multiseries/1"

YExp = tuple[int, ...]


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``"num/den"`` or an integer; decimals are rejected."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    s = str(text).strip()
    if not s or "." in s or "e" in s.lower():
        raise ValueError(f"not a rational of the form num/den: {text!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a rational of the form num/den: {text!r}") from None


def format_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


class MultiSeries:
    """Exact truncated series ``sum c(e, y) q^e y^y`` with ``0 <= e <= truncation``."""

    __slots__ = ("num_colors", "truncation", "grid", "_rows")

    def __init__(
        self,
        num_colors: int,
        truncation: Fraction | int,
        terms: Mapping[tuple[Fraction, YExp], int] | None = None,
        grid: int | None = None,
    ):
        self.num_colors = num_colors
        self.truncation = Fraction(truncation)
        if self.truncation < 0:
            raise ValueError("truncation must be nonnegative")
        terms = dict(terms or {})
        if grid is None:
            grid = 1
            for (e, _), _c in terms.items():
                grid = lcm(grid, Fraction(e).denominator)
        self.grid = grid
        self._rows: dict[YExp, list[int]] = {}
        length = self._length()
        for (e, y), c in terms.items():
            e = Fraction(e)
            if len(y) != num_colors:
                raise ValueError(f"y exponent {y} has wrong length")
            if e < 0:
                raise ValueError(f"negative q exponent {e}")
            if e > self.truncation or not c:
                continue
            j = e * grid
            if j.denominator != 1:
                raise ValueError(f"q exponent {e} not on grid 1/{grid}")
            row = self._rows.setdefault(tuple(y), [0] * length)
            row[int(j)] += int(c)
        self._prune()

    # construction helpers

    @classmethod
    def _from_rows(cls, num_colors: int, truncation: Fraction, grid: int,
                   rows: dict[YExp, list[int]]) -> "MultiSeries":
        s = cls.__new__(cls)
        s.num_colors = num_colors
        s.truncation = Fraction(truncation)
        s.grid = grid
        s._rows = rows
        s._prune()
        return s

    @classmethod
    def zero(cls, num_colors: int, truncation, grid: int = 1) -> "MultiSeries":
        return cls(num_colors, truncation, grid=grid)

    @classmethod
    def one(cls, num_colors: int, truncation, grid: int = 1) -> "MultiSeries":
        return cls.monomial(num_colors, truncation, 0, (0,) * num_colors, grid=grid)

    @classmethod
    def monomial(cls, num_colors: int, truncation, q, y: Iterable[int] | None = None,
                 coeff: int = 1, grid: int | None = None) -> "MultiSeries":
        q = Fraction(q)
        y = tuple(y) if y is not None else (0,) * num_colors
        if grid is None:
            grid = q.denominator
        return cls(num_colors, truncation, {(q, y): coeff}, grid=lcm(grid, q.denominator))

    @classmethod
    def colorless(cls, num_colors: int, truncation, grid: int, coeffs: list[int]) -> "MultiSeries":
        """Series with all ``y``-exponents zero from a dense list on ``grid``."""
        s = cls.__new__(cls)
        s.num_colors = num_colors
        s.truncation = Fraction(truncation)
        s.grid = grid
        n = s._length()
        row = list(coeffs[:n]) + [0] * max(0, n - len(coeffs))
        s._rows = {(0,) * num_colors: row}
        s._prune()
        return s

    # internals

    def _length(self) -> int:
        t = self.truncation * self.grid
        return t.numerator // t.denominator + 1

    def _prune(self) -> None:
        for y in [y for y, row in self._rows.items() if not any(row)]:
            del self._rows[y]

    def regrid(self, grid: int) -> "MultiSeries":
        if grid == self.grid:
            return self
        if grid % self.grid:
            raise ValueError(f"grid {grid} is not a multiple of {self.grid}")
        f = grid // self.grid
        s = MultiSeries._from_rows(self.num_colors, self.truncation, grid, {})
        n = s._length()
        for y, row in self._rows.items():
            new = [0] * n
            for j, c in enumerate(row):
                if c:
                    new[j * f] = c
            s._rows[y] = new
        return s

    def _aligned(self, other: "MultiSeries") -> tuple["MultiSeries", "MultiSeries", int]:
        if self.num_colors != other.num_colors:
            raise ValueError(f"color count mismatch: {self.num_colors} vs {other.num_colors}")
        g = lcm(self.grid, other.grid)
        return self.regrid(g), other.regrid(g), g

    def rows(self) -> dict[YExp, list[int]]:
        """Dense coefficient lists keyed by ``y``-exponent (read-only view)."""
        return self._rows

    # public API

    def terms(self) -> dict[tuple[Fraction, YExp], int]:
        return dict(self.items())

    def items(self) -> Iterator[tuple[tuple[Fraction, YExp], int]]:
        """Nonzero terms in canonical order: ascending ``q``, then ``y`` lexicographic."""
        out = []
        for y, row in self._rows.items():
            for j, c in enumerate(row):
                if c:
                    out.append(((j, y), c))
        out.sort()
        for (j, y), c in out:
            yield (Fraction(j, self.grid), y), c

    def __len__(self) -> int:
        return sum(1 for row in self._rows.values() for c in row if c)

    def coefficient(self, q, y: Iterable[int] | None = None) -> int:
        q = Fraction(q)
        y = tuple(y) if y is not None else (0,) * self.num_colors
        if q < 0 or q > self.truncation:
            return 0
        j = q * self.grid
        if j.denominator != 1:
            return 0
        row = self._rows.get(y)
        return row[int(j)] if row else 0

    def q_coefficients(self) -> dict[Fraction, int]:
        """Specialization ``y_i -> 1``: coefficient of each power of ``q``."""
        acc: dict[int, int] = {}
        for row in self._rows.values():
            for j, c in enumerate(row):
                if c:
                    acc[j] = acc.get(j, 0) + c
        return {Fraction(j, self.grid): c for j, c in sorted(acc.items()) if c}

    def truncate(self, n) -> "MultiSeries":
        n = min(Fraction(n), self.truncation)
        s = MultiSeries._from_rows(self.num_colors, n, self.grid, {})
        m = s._length()
        s._rows = {y: row[:m] for y, row in self._rows.items()}
        s._prune()
        return s

    def shift(self, q, y: Iterable[int] | None = None) -> "MultiSeries":
        """Multiply by the monomial ``q^q y^y`` (``q >= 0``), keeping the truncation."""
        q = Fraction(q)
        if q < 0:
            raise ValueError("negative q shift")
        y = tuple(y) if y is not None else (0,) * self.num_colors
        g = lcm(self.grid, q.denominator)
        base = self.regrid(g)
        off = int(q * g)
        n = base._length()
        rows = {}
        for yy, row in base._rows.items():
            if off >= n:
                break
            new = [0] * off + row[: n - off]
            rows[tuple(a + b for a, b in zip(yy, y))] = new
        return MultiSeries._from_rows(self.num_colors, self.truncation, g, rows)

    def add_into(self, other: "MultiSeries") -> None:
        """In-place ``self += other`` (other's grid must divide self's)."""
        if other.num_colors != self.num_colors:
            raise ValueError("color count mismatch")
        o = other.regrid(self.grid) if other.grid != self.grid else other
        n = self._length()
        for y, row in o._rows.items():
            tgt = self._rows.get(y)
            if tgt is None:
                tgt = self._rows[y] = [0] * n
            for j in range(min(n, len(row))):
                if row[j]:
                    tgt[j] += row[j]
        self._prune()

    def __add__(self, other: "MultiSeries") -> "MultiSeries":
        a, b, g = self._aligned(other)
        out = a.truncate(min(a.truncation, b.truncation))
        out._rows = {y: list(r) for y, r in out._rows.items()}
        out.add_into(b.truncate(out.truncation))
        return out

    def __neg__(self) -> "MultiSeries":
        return MultiSeries._from_rows(self.num_colors, self.truncation, self.grid,
                                      {y: [-c for c in r] for y, r in self._rows.items()})

    def __sub__(self, other: "MultiSeries") -> "MultiSeries":
        return self + (-other)

    def scale(self, k: int) -> "MultiSeries":
        return MultiSeries._from_rows(self.num_colors, self.truncation, self.grid,
                                      {y: [k * c for c in r] for y, r in self._rows.items()})

    def __mul__(self, other: "MultiSeries") -> "MultiSeries":
        a, b, g = self._aligned(other)
        n_trunc = min(a.truncation, b.truncation)
        out = MultiSeries._from_rows(a.num_colors, n_trunc, g, {})
        n = out._length()
        rows: dict[YExp, list[int]] = {}
        for ya, ra in a._rows.items():
            for yb, rb in b._rows.items():
                prod = kernels.conv_trunc(ra, rb, n)
                y = tuple(p + q for p, q in zip(ya, yb))
                tgt = rows.get(y)
                if tgt is None:
                    rows[y] = prod
                else:
                    for j, c in enumerate(prod):
                        if c:
                            tgt[j] += c
        out._rows = rows
        out._prune()
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultiSeries):
            return NotImplemented
        return (self.num_colors == other.num_colors
                and self.truncation == other.truncation
                and self.terms() == other.terms())

    def __hash__(self):
        return hash((self.num_colors, self.truncation, tuple(self.items())))

    def first_difference(self, other: "MultiSeries", upto=None):
        """First ``(q, y, lhs, rhs)`` in canonical order where the two differ.

        Compared up to ``upto`` (default: the smaller truncation); ``None`` if
        they agree.
        """
        n = min(self.truncation, other.truncation) if upto is None else Fraction(upto)
        a, b = self.truncate(n).terms(), other.truncate(n).terms()
        for key in sorted(set(a) | set(b)):
            if a.get(key, 0) != b.get(key, 0):
                return key[0], key[1], a.get(key, 0), b.get(key, 0)
        return None

    def is_nonnegative(self) -> bool:
        return all(c >= 0 for row in self._rows.values() for c in row)

    def __repr__(self) -> str:
        return f"MultiSeries({self.num_colors}, {self.truncation}, {self.pretty(limit=8)!r})"

    # serialization

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "num_colors": self.num_colors,
            "truncation": format_rational(self.truncation),
            "terms": [{"q": format_rational(q), "y": list(y), "c": c} for (q, y), c in self.items()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: Mapping) -> "MultiSeries":
        terms: dict[tuple[Fraction, YExp], int] = {}
        for t in data["terms"]:
            key = (parse_rational(t["q"]), tuple(t["y"]))
            terms[key] = terms.get(key, 0) + int(t["c"])
        num_colors = int(data.get("num_colors", len(data["terms"][0]["y"]) if data["terms"] else 0))
        return cls(num_colors, parse_rational(data["truncation"]), terms)

    @classmethod
    def from_json(cls, text: str) -> "MultiSeries":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["q"] + [f"y_{i + 1}" for i in range(self.num_colors)] + ["coeff"])
        for (q, y), c in self.items():
            w.writerow([format_rational(q)] + list(y) + [c])
        return buf.getvalue()

    def pretty(self, limit: int | None = None) -> str:
        parts = []
        for n, ((q, y), c) in enumerate(self.items()):
            if limit is not None and n >= limit:
                parts.append("...")
                break
            parts.append(_format_term(q, y, c))
        body = " + ".join(parts) if parts else "0"
        return body.replace("+ -", "- ") + f" + O(q^{_format_exp(self.truncation)}+)"


def _format_exp(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"({x.numerator}/{x.denominator})"


def _format_term(q: Fraction, y: YExp, c: int) -> str:
    factors = []
    if q:
        factors.append("q" if q == 1 else f"q^{_format_exp(q)}")
    for i, e in enumerate(y, 1):
        if e == 1:
            factors.append(f"y{i}")
        elif e:
            factors.append(f"y{i}^{e}" if e > 0 else f"y{i}^({e})")
    mono = "*".join(factors)
    if not mono:
        return str(c)
    if c == 1:
        return mono
    if c == -1:
        return "-" + mono
    return f"{c}*{mono}"


def inv_pochhammer(base, length: int, truncation, num_colors: int = 0,
                   grid: int | None = None) -> MultiSeries:
    """Expansion of ``1 / prod_{j=1}^{length} (1 - q^{j*base})`` up to ``truncation``."""
    base = Fraction(base)
    if base <= 0:
        raise ValueError("base must be positive")
    if length < 0:
        raise ValueError("length must be nonnegative")
    g = lcm(grid or 1, base.denominator)
    coeffs = inv_pochhammer_dense(int(base * g), length, _dense_len(truncation, g))
    return MultiSeries.colorless(num_colors, truncation, g, coeffs)


def _dense_len(truncation, grid: int) -> int:
    t = Fraction(truncation) * grid
    return t.numerator // t.denominator + 1


def inv_pochhammer_dense(step: int, length: int, n: int) -> list[int]:
    """Dense coefficients of ``1/prod_{j=1}^{length}(1 - x^{j*step})``, ``n`` terms."""
    out = [0] * n
    if n:
        out[0] = 1
    for j in range(1, length + 1):
        s = j * step
        for i in range(s, n):
            out[i] += out[i - s]
    return out


def divide_geometric_dense(coeffs: list[int], step: int, times: int = 1) -> None:
    """In place: multiply a dense series by ``(1 - x^step)^(-times)``."""
    n = len(coeffs)
    for _ in range(times):
        for i in range(step, n):
            coeffs[i] += coeffs[i - step]
