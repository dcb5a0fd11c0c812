# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels (int64 with overflow trapping).

Any intermediate that does not fit in a signed 64-bit integer raises
``OverflowError``; the dispatcher then reruns the pure-Python kernel, so
results stay exact.
"""
from array import array

from libc.stdlib cimport free, malloc


cdef extern from *:
    bint __builtin_saddll_overflow(long long a, long long b, long long *res) nogil
    bint __builtin_smulll_overflow(long long a, long long b, long long *res) nogil


from twistchar.kernels._pykernels import BoxTooSmall


cdef inline long long _add(long long a, long long b) except? -1:
    cdef long long r
    if __builtin_saddll_overflow(a, b, &r):
        raise OverflowError("int64 overflow")
    return r


cdef inline long long _mul(long long a, long long b) except? -1:
    cdef long long r
    if __builtin_smulll_overflow(a, b, &r):
        raise OverflowError("int64 overflow")
    return r


def conv_trunc(a, b, Py_ssize_t n):
    cdef Py_ssize_t na = min(len(a), n)
    cdef Py_ssize_t nb = min(len(b), n)
    if na == 0 or nb == 0:
        return [0] * n
    cdef long long[::1] av = array("q", a[:na])
    cdef long long[::1] bv = array("q", b[:nb])
    cdef long long[::1] out = array("q", bytes(8 * n))
    cdef Py_ssize_t i, j, jmax
    cdef long long ai
    for i in range(na):
        ai = av[i]
        if ai == 0:
            continue
        jmax = nb if nb < n - i else n - i
        for j in range(jmax):
            if bv[j] != 0:
                out[i + j] = _add(out[i + j], _mul(ai, bv[j]))
    return list(out)


def freudenthal_mults(bform, lev, rho, roots, int max_depth, upper):
    """Dense-box variant of ``_pykernels.freudenthal_mults``.

    ``upper[i]`` bounds ``c_i`` (``upper[0]`` is ignored in favour of
    ``max_depth``). Points are visited in lexicographic order of ``c``, which
    refines the dominance order, so all higher weights are final first.
    Raises ``BoxTooSmall`` if a weight lands on an outer face ``c_i =
    upper[i]`` (i >= 1), since its neighbours beyond the box were not computed.
    """
    cdef int n = len(bform)
    cdef int nroots = len(roots)
    cdef Py_ssize_t total_size = 1
    cdef int i, j, r
    ub = [max_depth] + [int(x) for x in upper[1:]]
    for i in range(n):
        total_size *= ub[i] + 1
    cdef long long[::1] dims = array("q", [u + 1 for u in ub])
    cdef long long[::1] strides = array("q", [0] * n)
    strides[n - 1] = 1
    for i in range(n - 2, -1, -1):
        strides[i] = strides[i + 1] * dims[i + 1]

    cdef long long[::1] B = array("q", [int(bform[i][j]) for i in range(n) for j in range(n)])
    cdef long long[::1] levrho = array("q", [int(lev[i]) + int(rho[i]) for i in range(n)])
    flat_coords = []
    flat_ba = []
    mults_l = []
    norms_l = []
    leva_l = []
    offsets_l = []
    for coords, mult in roots:
        ba = [sum(int(bform[i][j]) * int(coords[j]) for j in range(n)) for i in range(n)]
        flat_coords.extend(int(x) for x in coords)
        flat_ba.extend(ba)
        mults_l.append(int(mult))
        norms_l.append(sum(int(coords[i]) * ba[i] for i in range(n)))
        leva_l.append(sum(int(coords[j]) * int(lev[j]) for j in range(n)))
        offsets_l.append(sum(int(coords[i]) * strides[i] for i in range(n)))
    cdef long long[::1] rc = array("q", flat_coords or [0])
    cdef long long[::1] rba = array("q", flat_ba or [0])
    cdef long long[::1] rmult = array("q", mults_l or [0])
    cdef long long[::1] rnorm = array("q", norms_l or [0])
    cdef long long[::1] rlev = array("q", leva_l or [0])
    cdef long long[::1] roff = array("q", offsets_l or [0])

    cdef long long *table = <long long *> malloc(total_size * sizeof(long long))
    cdef long long *c = <long long *> malloc(n * sizeof(long long))
    cdef long long *sh = <long long *> malloc(n * sizeof(long long))
    if table == NULL or c == NULL or sh == NULL:
        free(table); free(c); free(sh)
        raise MemoryError()
    cdef Py_ssize_t idx, sidx
    cdef long long denom, tot, acc, base, m, jj, q
    cdef bint reachable, ok
    result = {}
    try:
        for i in range(n):
            c[i] = 0
        for idx in range(total_size):
            if idx > 0:
                # odometer increment of c
                i = n - 1
                while True:
                    c[i] += 1
                    if c[i] < dims[i]:
                        break
                    c[i] = 0
                    i -= 1
            table[idx] = 0
            if idx == 0:
                table[0] = 1
                continue
            reachable = False
            for j in range(n):
                if c[j] > 0 and table[idx - strides[j]] != 0:
                    reachable = True
                    break
            if not reachable:
                continue
            denom = 0
            for i in range(n):
                if c[i] != 0:
                    denom = _add(denom, _mul(2 * c[i], levrho[i]))
                    for j in range(n):
                        if c[j] != 0:
                            denom = _add(denom, -_mul(_mul(c[i], B[i * n + j]), c[j]))
            tot = 0
            for r in range(nroots):
                base = rlev[r]
                for i in range(n):
                    if c[i] != 0:
                        base = _add(base, -_mul(c[i], rba[r * n + i]))
                acc = 0
                jj = 1
                for i in range(n):
                    sh[i] = c[i]
                sidx = idx
                while True:
                    ok = True
                    for i in range(n):
                        sh[i] -= rc[r * n + i]
                        if sh[i] < 0:
                            ok = False
                    if not ok:
                        break
                    sidx -= roff[r]
                    m = table[sidx]
                    if m != 0:
                        acc = _add(acc, _mul(_add(base, _mul(jj, rnorm[r])), m))
                    jj += 1
                if acc != 0:
                    tot = _add(tot, _mul(rmult[r], acc))
            tot = _mul(tot, 2)
            if denom == 0:
                if tot != 0:
                    raise ArithmeticError("Freudenthal denominator vanishes at %r" % ([c[i] for i in range(n)],))
                continue
            if tot % denom != 0:
                raise ArithmeticError("non-integral multiplicity at %r" % ([c[i] for i in range(n)],))
            q = tot // denom
            if q < 0:
                raise ArithmeticError("negative multiplicity at %r" % ([c[i] for i in range(n)],))
            if q != 0:
                for i in range(1, n):
                    if c[i] == dims[i] - 1:
                        raise BoxTooSmall("weight on box face %d" % i)
                table[idx] = q
                result[tuple([c[i] for i in range(n)])] = q
    finally:
        free(table)
        free(c)
        free(sh)
    result[(0,) * n] = 1
    return result


def qp_histogram(caps, rho, charge, run_start, long long budget, bint check=True):
    cdef Py_ssize_t n = len(caps)
    hist_py = [0] * (budget + 1 if budget >= 0 else 0)
    if budget < 0:
        return hist_py
    cdef long long[::1] hist = array("q", bytes(8 * (budget + 1)))
    if n == 0:
        hist[0] = 1
        return list(hist)
    cdef long long[::1] cp = array("q", [int(x) for x in caps])
    cdef long long[::1] rh = array("q", [int(x) for x in rho])
    cdef long long[::1] ch = array("q", [int(x) for x in charge])
    cdef long long[::1] rs = array("q", [1 if x else 0 for x in run_start])
    cdef long long[::1] rl = array("q", bytes(8 * n))
    cdef long long[::1] o = array("q", bytes(8 * n))
    cdef long long[::1] left = array("q", bytes(8 * (n + 1)))
    cdef Py_ssize_t t, s
    cdef long long m, prev
    for t in range(n - 1, -1, -1):
        rl[t] = 1 if (t == n - 1 or rs[t + 1]) else rl[t + 1] + 1
    for t in range(n):
        _mul(_mul(budget + 1, rh[t]), rl[t])  # traps overflow up front
    t = 0
    left[0] = budget
    o[0] = 0
    while True:
        if t == n:
            if check:
                for s in range(n):
                    m = cp[s] - rh[s] * o[s]
                    if m % rh[s] != 0 or m > cp[s]:
                        raise AssertionError("mode condition fails at particle %d" % s)
                    if not rs[s]:
                        prev = cp[s - 1] - rh[s - 1] * o[s - 1]
                        if m > prev - 2 * rh[s] * ch[s]:
                            raise AssertionError("gap condition fails at particle %d" % s)
            hist[budget - left[n]] += 1
            t -= 1
            o[t] += 1
            continue
        if o[t] * rh[t] * rl[t] > left[t]:
            if t == 0:
                break
            t -= 1
            o[t] += 1
            continue
        left[t + 1] = left[t] - o[t] * rh[t]
        t += 1
        if t < n:
            o[t] = 0 if rs[t] else o[t - 1]
    return list(hist)
