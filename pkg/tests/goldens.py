"""Hand-transcribed reference arrays. ``*`` is a star, ``.`` a null cell."""
import numpy as np

from macc2d.arrays import NULL, STAR


def grid(text):
    rows = []
    for line in text.strip().splitlines():
        rows.append([STAR if t == "*" else NULL if t == "." else int(t) for t in line.split()])
    return np.array(rows, dtype=np.int64)


LEX_3x3 = [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (3, 3)]

# 3x3 grid, r=2, L=5, M/N=1/9
C_3x3 = np.where(np.eye(9, dtype=bool), STAR, NULL).astype(np.int64)
B_3x3 = grid("""
* 1 * 1 1 1 * 1 *
* * 1 2 2 2 * * 1
1 * * 3 3 3 1 * *
* 2 * * 4 * 2 2 2
* * 2 * * 4 3 3 3
2 * * 4 * * 4 4 4
3 3 3 * 5 * * 5 *
4 4 4 * * 5 * * 5
5 5 5 5 * * 5 * *
""")
B1_3x3 = grid("""
* 1 * 1 1 1 * 1 *
* * 1 2 2 2 * * 1
1 * * 3 3 3 1 * *
""")

# 3x4 grid, r=2, L=4, M/N=1/6, columns (1,1), (2,1), (3,1), (1,2), ...
K1_FASTEST_3x4 = [(a, b) for b in range(1, 5) for a in range(1, 4)]
C1_3x4 = grid("""
* . . . . . * . . . . .
. * . . . . . * . . . .
. . * . . . . . * . . .
. . . * . . . . . * . .
. . . . * . . . . . * .
. . . . . * . . . . . *
""")
B1_3x4 = grid("""
* 1 * * 1 * * 1 * * 1 *
* * 1 * * 1 * * 1 * * 1
1 * * 1 * * 1 * * 1 * *
* 2 * * 2 * * 2 * * 2 *
* * 2 * * 2 * * 2 * * 2
2 * * 2 * * 2 * * 2 * *
""")

# (4, 2, 4, 2, 2) EPDA
EPDA_4 = grid("""
* 2 1 *
* * 2 1
1 * * 2
2 1 * *
""")
