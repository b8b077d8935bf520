"""Pure-Python EPDA backtracking kernel.

Mirrors ``_search_ext.pyx`` step for step (same enumeration order, same node
count), so either backend returns the same array.

Rows, columns and integers are tracked as bitmasks. Star patterns are
enumerated per column in increasing bitmask order (Gosper's hack) with
non-decreasing patterns left to right, which removes column permutations.
Integers are then assigned in row-major order, a new integer only ever being
one more than the largest used so far, which removes relabelings.
"""


def _popcount(x):
    return bin(x).count("1")


def _next_combination(x):
    low = x & -x
    ripple = x + low
    return (((ripple ^ x) >> 2) // low) | ripple


def search(f, k, z, l, s):
    """Return ``(grid, nodes)``; ``grid`` is a list of rows (-1 = star) or None."""
    nodes = 0
    limit = 1 << f
    colpat = [0] * k

    def fill():
        ns_row = [0] * f
        for c in range(k):
            pat = colpat[c]
            for r in range(f):
                if not (pat >> r) & 1:
                    ns_row[r] |= 1 << c
        cells = [(r, c) for r in range(f) for c in range(k) if (ns_row[r] >> c) & 1]
        n = len(cells)
        colused = [0] * k
        rows_of = [0] * (s + 1)
        cols_of = [0] * (s + 1)
        value = [0] * n

        def rec(idx, maxused):
            nonlocal nodes
            nodes += 1
            if n - idx < s - maxused:
                return False
            if idx == n:
                return maxused == s
            r, c = cells[idx]
            top = maxused + 1 if maxused < s else s
            for v in range(1, top + 1):
                if (colused[c] >> v) & 1:
                    continue
                nc = cols_of[v] | (1 << c)
                nr = rows_of[v] | (1 << r)
                rr = nr
                ok = True
                while rr:
                    low = rr & -rr
                    if _popcount(ns_row[low.bit_length() - 1] & nc) > l:
                        ok = False
                        break
                    rr ^= low
                if not ok:
                    continue
                oc, orow = cols_of[v], rows_of[v]
                colused[c] |= 1 << v
                cols_of[v], rows_of[v] = nc, nr
                value[idx] = v
                if rec(idx + 1, v if v > maxused else maxused):
                    return True
                colused[c] &= ~(1 << v)
                cols_of[v], rows_of[v] = oc, orow
            return False

        if not rec(0, 0):
            return None
        grid = [[-1] * k for _ in range(f)]
        for (r, c), v in zip(cells, value):
            grid[r][c] = v
        return grid

    def stars(col, start):
        if col == k:
            return fill()
        x = start
        while x < limit:
            colpat[col] = x
            found = stars(col + 1, x)
            if found is not None:
                return found
            if x == 0:
                break
            x = _next_combination(x)
        return None

    grid = stars(0, (1 << z) - 1)
    return grid, nodes
