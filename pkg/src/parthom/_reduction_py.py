"""Pure-Python backend for the GF(p) column reduction.

Same contract as the compiled backend in ``_reduction.pyx``: columns are
reduced against previously claimed pivot columns sharing the same lowest
(largest) row until they die or claim a fresh pivot row. The number of
claimed rows is the rank of the matrix mod p.

Columns must be given with row indices sorted ascending and no duplicates.
"""

from __future__ import annotations

import numpy as np


def rank_reduction(nrows, indptr, indices, data, p, skip=None, entry_limit=None):
    """Rank of a sparse integer matrix mod p by lowest-row column reduction.

    ``indptr``/``indices``/``data`` is column-major CSC-style storage.
    ``skip``: optional per-column mask of columns known to reduce to zero;
    they are not processed. Returns (rank, pivot_rows) with pivot_rows the
    int32 array of claimed rows in claim order. Raises MemoryError when the
    stored pivot entries would exceed ``entry_limit``.
    """
    ncols = len(indptr) - 1
    limit = entry_limit if entry_limit is not None else float("inf")
    owners: dict[int, dict[int, int]] = {}
    pivot_rows = []
    stored = 0
    indices = np.asarray(indices)
    data = np.asarray(data)
    for j in range(ncols):
        if skip is not None and skip[j]:
            continue
        lo, hi = int(indptr[j]), int(indptr[j + 1])
        col = {}
        for t in range(lo, hi):
            v = int(data[t]) % p
            if v:
                col[int(indices[t])] = v
        while col:
            low = max(col)
            owner = owners.get(low)
            if owner is None:
                owners[low] = col
                pivot_rows.append(low)
                stored += len(col)
                if stored > limit:
                    raise MemoryError(
                        f"reduction exceeded entry limit ({stored} > {limit})"
                    )
                break
            mult = col[low] * pow(owner[low], p - 2, p) % p
            for r, v in owner.items():
                nv = (col.get(r, 0) - mult * v) % p
                if nv:
                    col[r] = nv
                else:
                    col.pop(r, None)
    return len(pivot_rows), np.asarray(pivot_rows, dtype=np.int32)
