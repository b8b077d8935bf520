# cython: language_level=3
"""Compiled EPDA backtracking kernel; see ``_search_py`` for the algorithm."""
from libc.stdlib cimport malloc, free

ctypedef unsigned long long u64

cdef extern from *:
    int popcount "__builtin_popcountll"(u64) nogil
    int ctz "__builtin_ctzll"(u64) nogil

cdef enum:
    MAXDIM = 64
    MAXCELLS = 4096

# Limits so that every bitmask fits in 64 bits.
MAX_ROWS = 62
MAX_COLS = 64
MAX_INTS = 63


cdef struct State:
    int f, k, z, l, s, n
    long long nodes
    u64 limit
    u64 colpat[MAXDIM]
    u64 ns_row[MAXDIM]
    u64 colused[MAXDIM]
    u64 rows_of[MAXDIM]
    u64 cols_of[MAXDIM]
    int cell_r[MAXCELLS]
    int cell_c[MAXCELLS]
    int value[MAXCELLS]


cdef bint fill_rec(State* st, int idx, int maxused) noexcept nogil:
    cdef int r, c, v, top
    cdef u64 nc, nr, rr, oc, orow
    cdef bint ok
    st.nodes += 1
    if st.n - idx < st.s - maxused:
        return 0
    if idx == st.n:
        return maxused == st.s
    r = st.cell_r[idx]
    c = st.cell_c[idx]
    top = maxused + 1 if maxused < st.s else st.s
    for v in range(1, top + 1):
        if (st.colused[c] >> v) & 1:
            continue
        nc = st.cols_of[v] | (<u64>1 << c)
        nr = st.rows_of[v] | (<u64>1 << r)
        rr = nr
        ok = 1
        while rr:
            if popcount(st.ns_row[ctz(rr)] & nc) > st.l:
                ok = 0
                break
            rr &= rr - 1
        if not ok:
            continue
        oc = st.cols_of[v]
        orow = st.rows_of[v]
        st.colused[c] |= <u64>1 << v
        st.cols_of[v] = nc
        st.rows_of[v] = nr
        st.value[idx] = v
        if fill_rec(st, idx + 1, v if v > maxused else maxused):
            return 1
        st.colused[c] &= ~(<u64>1 << v)
        st.cols_of[v] = oc
        st.rows_of[v] = orow
    return 0


cdef bint fill(State* st) noexcept nogil:
    cdef int r, c, n = 0
    for r in range(st.f):
        st.ns_row[r] = 0
        for c in range(st.k):
            if not (st.colpat[c] >> r) & 1:
                st.ns_row[r] |= <u64>1 << c
    for r in range(st.f):
        for c in range(st.k):
            if (st.ns_row[r] >> c) & 1:
                st.cell_r[n] = r
                st.cell_c[n] = c
                n += 1
    st.n = n
    for c in range(st.k):
        st.colused[c] = 0
    for r in range(st.s + 1):
        st.rows_of[r] = 0
        st.cols_of[r] = 0
    return fill_rec(st, 0, 0)


cdef bint stars_rec(State* st, int col, u64 start) noexcept nogil:
    cdef u64 x = start, low, ripple
    if col == st.k:
        return fill(st)
    while x < st.limit:
        st.colpat[col] = x
        if stars_rec(st, col + 1, x):
            return 1
        if x == 0:
            break
        low = x & (~x + 1)
        ripple = x + low
        x = (((ripple ^ x) >> 2) // low) | ripple
    return 0


def search(int f, int k, int z, int l, int s):
    """Return ``(grid, nodes)``; ``grid`` is a list of rows (-1 = star) or None."""
    if f > MAX_ROWS or k > MAX_COLS or s > MAX_INTS or f * k > MAXCELLS:
        raise ValueError("instance exceeds the compiled kernel's 64-bit limits")
    cdef State* st = <State*>malloc(sizeof(State))
    if st == NULL:
        raise MemoryError()
    cdef bint found
    cdef int i
    try:
        st.f = f; st.k = k; st.z = z; st.l = l; st.s = s
        st.nodes = 0
        st.limit = <u64>1 << f
        with nogil:
            found = stars_rec(st, 0, (<u64>1 << z) - 1)
        nodes = st.nodes
        if not found:
            return None, nodes
        grid = [[-1] * k for _ in range(f)]
        for i in range(st.n):
            grid[st.cell_r[i]][st.cell_c[i]] = st.value[i]
        return grid, nodes
    finally:
        free(st)
