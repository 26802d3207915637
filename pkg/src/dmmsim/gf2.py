"""Dense GF(2) linear algebra on bit-packed matrices.

Rows are packed eight columns per byte (``np.packbits`` order), so row
elimination is a vectorized XOR over byte rows. Matrices of a few
thousand columns reduce in well under a second.
"""

import numpy as np


def row_reduce(mat):
    """Reduced row echelon form of a binary matrix over GF(2).

    Args:
        mat: (m, n) array-like of 0/1 values.

    Returns:
        (rref, pivot_cols): the reduced matrix as a (m, n) uint8 array
        and the pivot column indices in increasing order. The GF(2)
        rank is ``len(pivot_cols)``.
    """
    M = np.asarray(mat, dtype=np.uint8) & 1
    if M.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    m, n = M.shape
    P = np.packbits(M, axis=1)
    pivot_cols = []
    r = 0
    for col in range(n):
        if r == m:
            break
        byte, bit = divmod(col, 8)
        mask = np.uint8(1 << (7 - bit))
        nz = np.nonzero(P[r:, byte] & mask)[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            P[[r, i]] = P[[i, r]]
        hits = np.nonzero(P[:, byte] & mask)[0]
        hits = hits[hits != r]
        if hits.size:
            P[hits] ^= P[r]
        pivot_cols.append(col)
        r += 1
    R = np.unpackbits(P, axis=1)[:, :n]
    return R, pivot_cols


def rank(mat):
    """GF(2) rank of a binary matrix."""
    return len(row_reduce(mat)[1])
