"""Pure-Python reference kernels.

Same contracts as the compiled ``_ckernels`` module; used when the extension
is unavailable and as the baseline in the benchmark.
"""
from __future__ import annotations

from typing import Sequence


class BoxTooSmall(RuntimeError):
    """A weight with nonzero multiplicity touched the enumeration box face."""


def conv_trunc(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    """First ``n`` coefficients of the product of two dense coefficient lists."""
    out = [0] * n
    bl = min(len(b), n)
    for i in range(min(len(a), n)):
        ai = a[i]
        if not ai:
            continue
        for j in range(min(bl, n - i)):
            bj = b[j]
            if bj:
                out[i + j] += ai * bj
    return out


def _prepare_roots(bform, lev, roots):
    prepared = []
    for coords, mult in roots:
        ba = [sum(bform[i][j] * coords[j] for j in range(len(coords))) for i in range(len(coords))]
        norm = sum(coords[i] * ba[i] for i in range(len(coords)))
        lev_a = sum(coords[j] * lev[j] for j in range(len(coords)))
        prepared.append((tuple(coords), mult, ba, norm, lev_a))
    return prepared


def freudenthal_mults(
    bform: Sequence[Sequence[int]],
    lev: Sequence[int],
    rho: Sequence[int],
    roots: Sequence[tuple[Sequence[int], int]],
    max_depth: int,
    upper: Sequence[int] | None = None,
) -> dict[tuple[int, ...], int]:
    """Weight multiplicities of an integrable highest-weight module.

    Weights are written ``Lambda - sum_j c_j alpha_j`` and keyed by ``c``.
    ``bform`` is the (integer-scaled) invariant form on simple roots, ``lev``
    and ``rho`` the pairings ``(Lambda|alpha_j)`` and ``(rho|alpha_j)`` in the
    same scale, ``roots`` the positive roots with multiplicities (all roots
    with ``c_0 <= max_depth`` are needed). Breadth-first by height, so every
    weight ``lambda + j*alpha`` is final before ``lambda`` is visited.
    ``upper`` is accepted for signature parity with the compiled kernel.
    """
    n = len(bform)
    prepared = _prepare_roots(bform, lev, roots)
    zero = (0,) * n
    table: dict[tuple[int, ...], int] = {zero: 1}
    frontier = [zero]
    while frontier:
        candidates = set()
        for c in frontier:
            for j in range(n):
                if j == 0 and c[0] >= max_depth:
                    continue
                cc = list(c)
                cc[j] += 1
                candidates.add(tuple(cc))
        frontier = []
        for c in sorted(candidates):
            denom = 0
            for i in range(n):
                if c[i]:
                    denom += 2 * c[i] * (lev[i] + rho[i])
                    row = bform[i]
                    denom -= c[i] * sum(row[j] * c[j] for j in range(n) if c[j])
            total = 0
            for coords, mult, ba, norm, lev_a in prepared:
                base = lev_a - sum(c[i] * ba[i] for i in range(n) if c[i])
                acc = 0
                jj = 1
                while True:
                    shifted = tuple(c[i] - jj * coords[i] for i in range(n))
                    if min(shifted) < 0:
                        break
                    m = table.get(shifted)
                    if m:
                        acc += (base + jj * norm) * m
                    jj += 1
                if acc:
                    total += mult * acc
            total *= 2
            if denom == 0:
                if total != 0:
                    raise ArithmeticError(f"Freudenthal denominator vanishes at {c}")
                continue
            q, rem = divmod(total, denom)
            if rem:
                raise ArithmeticError(f"non-integral multiplicity at {c}: {total}/{denom}")
            if q < 0:
                raise ArithmeticError(f"negative multiplicity at {c}")
            if q:
                table[c] = q
                frontier.append(c)
    return table


def qp_histogram(
    caps: Sequence[int],
    rho: Sequence[int],
    charge: Sequence[int],
    run_start: Sequence[int],
    budget: int,
    check: bool = True,
) -> list[int]:
    """Count admissible energy tuples of one charge-type by energy surplus.

    All quantities are integers in units of a common grid. Particle ``t`` has
    mode ``m_t = caps[t] - rho[t] * o_t`` where the offsets ``o`` are weakly
    increasing inside each equal-charge run (``run_start[t]`` marks the first
    particle of a run). Entry ``j`` of the result counts tuples with
    ``sum(rho[t] * o_t) == j <= budget``. With ``check`` every tuple is
    re-tested against the mode conditions (membership in ``rho*Z``, the cap,
    and the gap ``2*rho*n`` between equal charges).
    """
    n = len(caps)
    hist = [0] * (budget + 1)
    if budget < 0:
        return hist
    run_left = [0] * n
    for t in range(n - 1, -1, -1):
        run_left[t] = 1 if t == n - 1 or run_start[t + 1] else run_left[t + 1] + 1
    o = [0] * n

    def rec(t: int, left: int) -> None:
        if t == n:
            if check:
                for s in range(n):
                    m = caps[s] - rho[s] * o[s]
                    if m % rho[s] or m > caps[s]:
                        raise AssertionError(f"mode condition fails at particle {s}")
                    if not run_start[s]:
                        prev = caps[s - 1] - rho[s - 1] * o[s - 1]
                        if m > prev - 2 * rho[s] * charge[s]:
                            raise AssertionError(f"gap condition fails at particle {s}")
            hist[budget - left] += 1
            return
        v = 0 if run_start[t] else o[t - 1]
        step = rho[t]
        while v * step * run_left[t] <= left:
            o[t] = v
            rec(t + 1, left - v * step)
            v += 1

    rec(0, budget)
    return hist
