"""Independent character oracles.

* a Kac-Moody route: affine GCM from the folding data, root multiplicities
  by Peterson's recursion, weight multiplicities of ``L(k Lambda_0)`` by
  Freudenthal's formula;
* the level-1 route: Heisenberg Fock factor times the theta series.
"""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from pathlib import Path
from typing import Sequence

from . import kernels
from .folded import FoldedData, highest_root, theta_series
from .quadform import determinant
from .qseries import MultiSeries, divide_geometric_dense

FORMAT_VERSION = 1


@dataclass(frozen=True)
class AffineGCM:
    folded: FoldedData
    a: tuple[tuple[int, ...], ...]
    sym: tuple[Fraction, ...]
    marks: tuple[int, ...]
    bgram: tuple[tuple[Fraction, ...], ...]
    beta0: tuple[int, ...]  # beta_0 in the beta_1..beta_l basis

    @property
    def size(self) -> int:
        return len(self.a)

    def scale(self) -> int:
        """Smallest integer making ``bgram`` and ``sym`` integral."""
        s = 1
        for row in self.bgram:
            for x in row:
                s = lcm(s, x.denominator)
        for e in self.sym:
            s = lcm(s, e.denominator)
        return s

    def depth_of(self, coords: Sequence[int]) -> int:
        return coords[0]

    def pair(self, x: Sequence, y: Sequence) -> Fraction:
        g = self.bgram
        return sum((g[i][j] * x[i] * y[j] for i in range(len(x)) if x[i]
                    for j in range(len(y)) if y[j]), Fraction(0))


def _theta_folded(folded: FoldedData) -> tuple[int, ...]:
    if folded.r == 1:
        return highest_root(folded.ambient.gram)
    return folded.theta0_folded


def build_gcm(folded: FoldedData) -> AffineGCM:
    t = _theta_folded(folded)
    l = folded.l
    vecs = [tuple(-x for x in t)] + [tuple(int(i == j) for j in range(l)) for i in range(l)]
    bgram = tuple(tuple(folded.pair(u, v) for v in vecs) for u in vecs)
    n = l + 1
    a = []
    for i in range(n):
        row = []
        for j in range(n):
            v = 2 * bgram[i][j] / bgram[i][i]
            if v.denominator != 1:
                raise ArithmeticError(f"non-integral Cartan entry at ({i},{j})")
            row.append(int(v))
        a.append(tuple(row))
    marks = (1,) + tuple(t)
    for i in range(n):
        if sum(a[i][j] * marks[j] for j in range(n)) != 0:
            raise ArithmeticError("marks are not a null vector of the GCM")
    sym = tuple(bgram[i][i] / 2 for i in range(n))
    return AffineGCM(folded, tuple(a), sym, marks, bgram, vecs[0])


def check_gcm(g: AffineGCM) -> None:
    """Assert the structural properties of an affine GCM."""
    n = g.size
    for i in range(n):
        if g.a[i][i] != 2:
            raise AssertionError("diagonal entry is not 2")
        for j in range(n):
            if i != j and g.a[i][j] > 0:
                raise AssertionError("positive off-diagonal entry")
            if (g.a[i][j] == 0) != (g.a[j][i] == 0):
                raise AssertionError("zero pattern is not symmetric")
            if g.sym[i] * g.a[i][j] != g.sym[j] * g.a[j][i]:
                raise AssertionError("symmetrizer fails")
    if determinant(g.a) != 0:
        raise AssertionError("GCM is not singular")
    if any(determinant([[g.a[i][j] for j in range(n) if j != d] for i in range(n) if i != d]) == 0
           for d in range(n)):
        raise AssertionError("corank exceeds one")
    if any(m <= 0 for m in g.marks):
        raise AssertionError("marks are not positive")


@dataclass
class RootMultTable:
    gcm: AffineGCM
    max_depth: int
    mults: dict[tuple[int, ...], int] = field(default_factory=dict)

    def mult(self, coords: Sequence[int]) -> int:
        return self.mults.get(tuple(coords), 0)

    def delta(self, n: int) -> tuple[int, ...]:
        return tuple(n * m for m in self.gcm.marks)

    def roots(self, max_depth: int | None = None) -> list[tuple[tuple[int, ...], int]]:
        d = self.max_depth if max_depth is None else max_depth
        return sorted((c, m) for c, m in self.mults.items() if c[0] <= d)

    def is_real(self, coords: Sequence[int]) -> bool:
        return self.gcm.pair(coords, coords) != 0


def peterson_mults(gcm: AffineGCM, max_depth: int) -> RootMultTable:
    """Positive root multiplicities with ``alpha_0``-coefficient <= max_depth.

    Peterson's recursion ``(b|b - 2 rho) c_b = sum_{b'+b''=b} (b'|b'') c_b' c_b''``
    with ``c_b = sum_{n>=1} mult(b/n)/n``, over positive roots by height.
    """
    if max_depth < 1:
        raise ValueError("max_depth must be positive")
    n = gcm.size
    s = gcm.scale()
    B = [[int(gcm.bgram[i][j] * s) for j in range(n)] for i in range(n)]
    two_rho = [int(2 * gcm.sym[i] * s) for i in range(n)]

    def form(x, y):
        return sum(B[i][j] * x[i] * y[j] for i in range(n) if x[i] for j in range(n) if y[j])

    simple = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    mult: dict[tuple[int, ...], int] = {e: 1 for e in simple}
    cval: dict[tuple[int, ...], Fraction] = {e: Fraction(1) for e in simple}
    by_height: dict[int, list[tuple[int, ...]]] = {1: list(simple)}
    height = 1
    while by_height.get(height):
        height += 1
        cand: set[tuple[int, ...]] = set()
        for root in by_height[height - 1]:
            if mult.get(root):
                for e in simple:
                    c = tuple(a + b for a, b in zip(root, e))
                    if c[0] <= max_depth:
                        cand.add(c)
        for h in range(1, height):
            if height % h == 0:
                for root in by_height.get(h, []):
                    if mult.get(root):
                        c = tuple(x * (height // h) for x in root)
                        if c[0] <= max_depth:
                            cand.add(c)
        known = [b for b in cval if cval[b]]
        found = []
        for beta in sorted(cand):
            lhs = form(beta, beta) - sum(two_rho[i] * beta[i] for i in range(n))
            rhs = Fraction(0)
            for b1 in known:
                b2 = tuple(x - y for x, y in zip(beta, b1))
                if min(b2) < 0:
                    continue
                c2 = cval.get(b2)
                if c2:
                    rhs += form(b1, b2) * cval[b1] * c2
            lower = Fraction(0)
            for d in range(2, max(beta) + 1):
                if all(x % d == 0 for x in beta):
                    lower += Fraction(mult.get(tuple(x // d for x in beta), 0), d)
            if lhs == 0:
                # only simple roots are roots here, so beta is not a root
                if rhs != 0:
                    raise ArithmeticError(f"Peterson recursion inconsistent at {beta}")
                if lower:
                    cval[beta] = lower
                continue
            cb = rhs / lhs
            m = cb - lower
            if m.denominator != 1 or m < 0:
                raise ArithmeticError(f"bad multiplicity {m} at {beta}")
            if cb:
                cval[beta] = cb
            if m:
                mult[beta] = int(m)
                found.append(beta)
        by_height[height] = found
    return RootMultTable(gcm, max_depth, mult)


@dataclass
class WeightMultTable:
    """Weight multiplicities of ``L(k Lambda_0)`` keyed by (finite weight, depth).

    The finite weight is written in the ``beta_1..beta_l`` basis; the
    energy of a depth-``d`` weight is ``d / r``.
    """
    type: str
    level: int
    max_depth: int
    r: int
    mults: dict[tuple[tuple[int, ...], int], int]

    def energy(self, depth: int) -> Fraction:
        return Fraction(depth, self.r)

    def mult(self, weight: Sequence[int], depth: int) -> int:
        return self.mults.get((tuple(weight), depth), 0)

    def to_series(self, N=None) -> MultiSeries:
        top = Fraction(self.max_depth, self.r)
        N = top if N is None else min(Fraction(N), top)
        l = len(next(iter(self.mults))[0])
        terms = {(Fraction(d, self.r), w): m for (w, d), m in self.mults.items()}
        return MultiSeries(l, N, terms, grid=self.r)

    def to_json(self) -> str:
        items = sorted(self.mults.items(), key=lambda kv: (kv[0][1], kv[0][0]))
        return json.dumps({
            "header": {"type": self.type, "level": self.level, "depth": self.max_depth,
                       "format_version": FORMAT_VERSION, "code": code_hash()},
            "r": self.r,
            "weights": [[d, list(w), m] for (w, d), m in items],
        }, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "WeightMultTable":
        data = json.loads(text)
        h = data["header"]
        return cls(h["type"], h["level"], h["depth"], data["r"],
                   {(tuple(w), d): m for d, w, m in data["weights"]})


def _initial_box(gcm: AffineGCM, k: int, max_depth: int) -> list[int]:
    return [max_depth] + [m * (max_depth + k) + 1 for m in gcm.marks[1:]]


def freudenthal_char(gcm: AffineGCM, k: int, max_depth: int,
                     roots: RootMultTable | None = None, backend: str | None = None,
                     cache: "Cache | None" = None) -> WeightMultTable:
    if k < 1:
        raise ValueError("level must be positive")
    if max_depth < 0:
        raise ValueError("depth must be nonnegative")
    token = str(gcm.folded.token)
    if cache is not None:
        hit = cache.load(token, k, max_depth)
        if hit is not None:
            return hit
    if roots is None:
        roots = peterson_mults(gcm, max(max_depth, 1))
    n = gcm.size
    s = gcm.scale()
    bform = [[int(gcm.bgram[i][j] * s) for j in range(n)] for i in range(n)]
    lev = [int(k * gcm.sym[0] * s)] + [0] * (n - 1)
    rho = [int(gcm.sym[i] * s) for i in range(n)]
    raw = kernels.freudenthal_mults(bform, lev, rho, roots.roots(max_depth), max_depth,
                                    _initial_box(gcm, k, max_depth), backend=backend)
    t = _theta_folded(gcm.folded)
    mults = {}
    for c, m in raw.items():
        w = tuple(c[0] * t[i] - c[i + 1] for i in range(n - 1))
        mults[(w, c[0])] = m
    table = WeightMultTable(token, k, max_depth, gcm.folded.r, mults)
    if cache is not None:
        cache.store(table)
    return table


def reflect(folded: FoldedData, weight: Sequence[int], i: int) -> tuple[int, ...]:
    """Simple reflection ``s_i`` (0-based color) of a weight in the beta basis."""
    g = folded.gram0
    num = 2 * sum(weight[j] * g[j][i] for j in range(len(weight)))
    coef = num / g[i][i]
    if coef.denominator != 1:
        raise ArithmeticError("reflection leaves the lattice")
    out = list(weight)
    out[i] -= int(coef)
    return tuple(out)


def check_weyl_symmetry(table: WeightMultTable, folded: FoldedData) -> None:
    for (w, d), m in table.mults.items():
        for i in range(folded.l):
            if table.mult(reflect(folded, w, i), d) != m:
                raise AssertionError(f"table not invariant under s_{i + 1} at {w}, depth {d}")


def heisenberg_char(folded: FoldedData, N, grid: int | None = None) -> MultiSeries:
    """``prod_{m in (1/r)Z_{>0}} (1 - q^m)^(-h_dims[r m mod r])`` up to ``N``."""
    N = Fraction(N)
    r = folded.r
    grid = lcm(grid or 1, r)
    t = N * grid
    n = t.numerator // t.denominator + 1
    coeffs = [0] * n
    coeffs[0] = 1
    step = grid // r
    j = 1
    while j * step < n:
        divide_geometric_dense(coeffs, j * step, folded.h_dims[j % r])
        j += 1
    return MultiSeries.colorless(folded.l, N, grid, coeffs)


def level1_char(folded: FoldedData, N) -> MultiSeries:
    N = Fraction(N)
    theta = theta_series(folded, N)
    return heisenberg_char(folded, N, theta.grid) * theta


def code_hash() -> str:
    """Hash of the sources that determine oracle tables."""
    h = hashlib.sha256()
    here = Path(__file__).parent
    for rel in ("oracle.py", "folded.py", "quadform.py", "kernels/_pykernels.py",
                "kernels/_ckernels.pyx"):
        p = here / rel
        if p.exists():
            h.update(p.read_bytes())
    return h.hexdigest()[:16]


def default_cache_dir() -> Path:
    env = os.environ.get("TWISTCHAR_CACHE")
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "twistchar"


class Cache:
    """On-disk store of Freudenthal tables, one JSON file per (type, level, depth)."""

    def __init__(self, directory: str | os.PathLike | None = None):
        self.dir = Path(directory) if directory is not None else default_cache_dir()

    def path(self, token: str, k: int, depth: int) -> Path:
        safe = token.replace(":", "_").replace("^", "o")
        return self.dir / f"{safe}-k{k}-d{depth}.json"

    def load(self, token: str, k: int, depth: int) -> WeightMultTable | None:
        p = self.path(token, k, depth)
        if not p.exists():
            return None
        try:
            data = json.loads(p.read_text())
            h = data["header"]
        except (OSError, ValueError, KeyError):
            return None
        if (h.get("format_version") != FORMAT_VERSION or h.get("code") != code_hash()
                or h.get("type") != token or h.get("level") != k or h.get("depth") != depth):
            return None
        return WeightMultTable.from_json(p.read_text())

    def store(self, table: WeightMultTable) -> Path:
        self.dir.mkdir(parents=True, exist_ok=True)
        p = self.path(table.type, table.level, table.max_depth)
        tmp = p.with_suffix(f".tmp{os.getpid()}")
        tmp.write_text(table.to_json())
        os.replace(tmp, p)
        return p

    def entries(self) -> list[Path]:
        if not self.dir.exists():
            return []
        return sorted(self.dir.glob("*.json"))

    def clear(self) -> int:
        files = self.entries()
        for p in files:
            p.unlink()
        return len(files)

    def stat(self) -> dict:
        files = self.entries()
        return {"directory": str(self.dir), "entries": len(files),
                "bytes": sum(p.stat().st_size for p in files),
                "files": [p.name for p in files]}


def oracle_series(folded: FoldedData, k: int, N, cache: Cache | None = None,
                  backend: str | None = None) -> MultiSeries:
    """Freudenthal character of ``L(k Lambda_0)`` as a series up to energy N."""
    N = Fraction(N)
    depth_f = N * folded.r
    depth = depth_f.numerator // depth_f.denominator
    table = freudenthal_char(build_gcm(folded), k, depth, cache=cache, backend=backend)
    return table.to_series(N)


