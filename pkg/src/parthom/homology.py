"""Exact homology of simplicial complexes over Q and Z.

Rational Betti numbers come from exact boundary-matrix ranks: the fast path
is a GF(p) column reduction run for two fixed 31-bit primes (with the
clearing trick across consecutive dimensions), escalating to a certified
fraction-free integer elimination whenever the primes disagree. Integral
homology diagonalizes the boundary maps over Z (Smith normal form) and
reports free ranks plus torsion invariant factors.

Betti at dimension d needs only the d-th and (d+1)-st boundary maps, so
matrices are built, consumed and discarded one dimension at a time.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernel, config
from .complexes import OrderComplex
from .errors import ConsistencyError, ResourceAbort

__all__ = [
    "PRIMES",
    "SparseBoundaryMatrix",
    "HomologySummary",
    "boundary_matrix",
    "boundary_between",
    "compose_is_zero",
    "rank_mod_p",
    "rank_certified",
    "rank_exact",
    "betti_numbers",
    "smith_normal_form",
    "integral_homology",
    "relative_homology",
]

log = logging.getLogger(__name__)

# two fixed 31-bit primes: independent moduli for the fast rank path
PRIMES = (2147483647, 2147483629)


@dataclass(frozen=True)
class SparseBoundaryMatrix:
    """Column-major sparse integer matrix.

    Stored CSC-style with row indices sorted ascending inside each column
    and duplicates coalesced; boundary matrices have entries in {-1, +1}
    and exactly d+1 nonzeros per column.
    """

    nrows: int
    ncols: int
    indptr: np.ndarray  # int64, len ncols+1
    indices: np.ndarray  # int32 row ids
    data: np.ndarray  # int64 values

    @classmethod
    def from_triples(cls, nrows, ncols, triples) -> "SparseBoundaryMatrix":
        """Build from (row, col, value) triples (any order; duplicates add)."""
        cells: dict[tuple[int, int], int] = {}
        for r, c, v in triples:
            if not 0 <= r < nrows or not 0 <= c < ncols:
                raise ValueError(f"entry ({r},{c}) outside {nrows}x{ncols}")
            cells[(c, r)] = cells.get((c, r), 0) + int(v)
        items = sorted((c, r, v) for (c, r), v in cells.items() if v)
        indptr = np.zeros(ncols + 1, dtype=np.int64)
        for c, _, _ in items:
            indptr[c + 1] += 1
        indptr = np.cumsum(indptr)
        indices = np.array([r for _, r, _ in items], dtype=np.int32)
        data = np.array([v for _, _, v in items], dtype=np.int64)
        return cls(nrows, ncols, indptr, indices, data)

    @classmethod
    def from_dense(cls, rows) -> "SparseBoundaryMatrix":
        rows = [list(r) for r in rows]
        nrows = len(rows)
        ncols = len(rows[0]) if rows else 0
        triples = [
            (i, j, v) for i, r in enumerate(rows) for j, v in enumerate(r) if v
        ]
        return cls.from_triples(nrows, ncols, triples)

    @property
    def nnz(self) -> int:
        return len(self.indices)

    def column(self, j: int) -> list[tuple[int, int]]:
        lo, hi = int(self.indptr[j]), int(self.indptr[j + 1])
        return [(int(self.indices[t]), int(self.data[t])) for t in range(lo, hi)]

    def triples(self):
        for j in range(self.ncols):
            for r, v in self.column(j):
                yield r, j, v

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for r, j, v in self.triples():
            out[r][j] = v
        return out

    def transpose(self) -> "SparseBoundaryMatrix":
        return SparseBoundaryMatrix.from_triples(
            self.ncols, self.nrows, ((j, r, v) for r, j, v in self.triples())
        )


@dataclass(frozen=True)
class HomologySummary:
    """Per-dimension Betti numbers, optional torsion, and tags.

    ``betti`` maps dimension -> rank (dimension -1 appears only for the
    reduced homology of the empty complex). ``torsion`` is present exactly
    when coefficients are the integers.
    """

    betti: dict[int, int]
    coefficients: str  # "Q" or "Z"
    reduced: bool
    torsion: Optional[dict[int, tuple[int, ...]]] = None

    def __post_init__(self):
        if self.coefficients not in ("Q", "Z"):
            raise ValueError(f"unknown coefficient tag {self.coefficients!r}")
        if (self.torsion is not None) != (self.coefficients == "Z"):
            raise ValueError("torsion is reported for integer coefficients only")

    def rank(self, d: int) -> int:
        return self.betti.get(d, 0)

    def euler(self) -> int:
        """Alternating Betti sum over d >= 0 (matches chi for unreduced)."""
        return sum((-1) ** d * b for d, b in self.betti.items() if d >= 0)

    def to_record(self) -> dict:
        groups = []
        for d in sorted(self.betti):
            entry = {"dim": d, "betti": self.betti[d]}
            entry["torsion"] = list(self.torsion.get(d, ())) if self.torsion is not None else []
            groups.append(entry)
        return {
            "coefficients": self.coefficients,
            "reduced": self.reduced,
            "groups": groups,
        }


# -- boundary matrices -------------------------------------------------------


def _face_keys(faces: np.ndarray, base: int) -> np.ndarray:
    width = faces.shape[1]
    powers = base ** np.arange(width - 1, -1, -1, dtype=np.int64)
    return (faces.astype(np.int64) * powers).sum(axis=1)


def _locator(faces: np.ndarray, num_vertices: int):
    """Map query face rows to their indices in ``faces`` (-1 when absent).

    ``faces`` must be lex-sorted, which makes positional int64 keys sorted;
    falls back to a byte-key dict when the key would overflow 62 bits.
    """
    width = faces.shape[1]
    base = max(num_vertices, 2)
    if width * math.log2(base) <= 62:
        keys = _face_keys(faces, base)

        def find(queries: np.ndarray) -> np.ndarray:
            if len(keys) == 0:
                return np.full(len(queries), -1, dtype=np.int64)
            q = _face_keys(queries, base)
            pos = np.minimum(np.searchsorted(keys, q), len(keys) - 1).astype(np.int64)
            return np.where(keys[pos] == q, pos, -1)

        return find

    table = {row.tobytes(): i for i, row in enumerate(np.ascontiguousarray(faces))}

    def find_dict(queries: np.ndarray) -> np.ndarray:
        q = np.ascontiguousarray(queries)
        return np.fromiter(
            (table.get(row.tobytes(), -1) for row in q), dtype=np.int64, count=len(q)
        )

    return find_dict


def _boundary_csc(prev: np.ndarray, cur: np.ndarray, num_vertices: int, drop_missing=False):
    """CSC arrays of the boundary map from ``cur`` faces to ``prev`` faces.

    Deleting vertex i of a chain carries sign (-1)^i. With ``drop_missing``
    the facets absent from ``prev`` are dropped (relative chain complexes);
    otherwise their absence is an error.
    """
    nfaces, width = cur.shape
    find = _locator(prev, num_vertices)
    rows = np.empty((nfaces, width), dtype=np.int64)
    for i in range(width):
        q = np.concatenate([cur[:, :i], cur[:, i + 1:]], axis=1)
        rows[:, i] = find(q)
    signs = np.where(np.arange(width) % 2 == 0, 1, -1).astype(np.int64)
    order = np.argsort(rows, axis=1, kind="stable")
    rows_sorted = np.take_along_axis(rows, order, axis=1)
    signs_sorted = np.broadcast_to(signs, (nfaces, width))
    signs_sorted = np.take_along_axis(signs_sorted, order, axis=1)
    if drop_missing:
        keep = rows_sorted >= 0
        counts = keep.sum(axis=1).astype(np.int64)
        indptr = np.zeros(nfaces + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        indices = rows_sorted[keep].astype(np.int32)
        data = signs_sorted[keep]
        return indptr, indices, data
    if (rows_sorted < 0).any():
        raise AssertionError("boundary face missing from the lower dimension")
    indptr = np.arange(0, nfaces * width + 1, width, dtype=np.int64)
    return indptr, rows_sorted.ravel().astype(np.int32), signs_sorted.ravel()


def boundary_between(prev: np.ndarray, cur: np.ndarray) -> SparseBoundaryMatrix:
    """Boundary matrix between explicit face arrays (rows must be lex-sorted)."""
    prev = np.asarray(prev, dtype=np.int32)
    cur = np.asarray(cur, dtype=np.int32)
    base = int(max(prev.max(initial=-1), cur.max(initial=-1))) + 1
    indptr, indices, data = _boundary_csc(prev, cur, base)
    return SparseBoundaryMatrix(len(prev), len(cur), indptr, indices, data)


def boundary_matrix(c: OrderComplex, d: int) -> SparseBoundaryMatrix:
    """The d-th boundary map of the complex; d = 0 gives the augmentation."""
    if d < 0 or d > c.dim:
        raise ValueError(f"dimension {d} out of range [0, {c.dim}]")
    if d == 0:
        f0 = c.f_vector()[0]
        return SparseBoundaryMatrix(
            1,
            f0,
            np.arange(f0 + 1, dtype=np.int64),
            np.zeros(f0, dtype=np.int32),
            np.ones(f0, dtype=np.int64),
        )
    prev, cur = c.faces(d - 1), c.faces(d)
    indptr, indices, data = _boundary_csc(prev, cur, c.num_vertices)
    return SparseBoundaryMatrix(len(prev), len(cur), indptr, indices, data)


def compose_is_zero(outer: SparseBoundaryMatrix, inner: SparseBoundaryMatrix) -> bool:
    """Exact integer check that outer @ inner == 0."""
    if outer.ncols != inner.nrows:
        raise ValueError("shape mismatch")
    rows_of = [outer.column(j) for j in range(outer.ncols)]
    for j in range(inner.ncols):
        acc: dict[int, int] = {}
        for mid, v in inner.column(j):
            for r, w in rows_of[mid]:
                acc[r] = acc.get(r, 0) + v * w
        if any(acc.values()):
            return False
    return True


# -- exact rank ---------------------------------------------------------------


def rank_mod_p(m: SparseBoundaryMatrix, p: int) -> int:
    """Rank of the matrix over GF(p) (dispatches to the selected backend)."""
    try:
        rank, _ = _kernel.rank_reduction(
            m.nrows, m.indptr, m.indices, m.data, p,
            entry_limit=config.reduction_entry_limit(),
        )
    except MemoryError as exc:
        raise ResourceAbort(f"GF({p}) reduction over budget: {exc}") from exc
    return rank


def rank_certified(m: SparseBoundaryMatrix) -> int:
    """Fraction-free integer elimination (Bareiss), fill-minimizing pivots.

    Exact over Z hence over Q; this is the certified route the modular fast
    path escalates to.
    """
    rows: dict[int, dict[int, int]] = {}
    for r, j, v in m.triples():
        rows.setdefault(r, {})[j] = v
    col_count: dict[int, int] = {}
    for r, row in rows.items():
        for c in row:
            col_count[c] = col_count.get(c, 0) + 1
    prev_pivot = 1
    rank = 0
    while rows:
        best = None
        for r in rows:
            lr = len(rows[r]) - 1
            for c, v in rows[r].items():
                key = (lr * (col_count[c] - 1), abs(v), r, c)
                if best is None or key < best[0]:
                    best = (key, r, c)
        _, pr, pc = best
        pivot_row = rows.pop(pr)
        pv = pivot_row[pc]
        for c in pivot_row:
            col_count[c] -= 1
        new_rows: dict[int, dict[int, int]] = {}
        for r, row in rows.items():
            f = row.get(pc, 0)
            out: dict[int, int] = {}
            for c in set(row) | (set(pivot_row) if f else set()):
                val = pv * row.get(c, 0) - f * pivot_row.get(c, 0)
                assert val % prev_pivot == 0
                val //= prev_pivot
                if val:
                    out[c] = val
                    if c not in row:
                        col_count[c] += 1
                elif c in row:
                    col_count[c] -= 1
            out.pop(pc, None)
            if out:
                new_rows[r] = out
        rows = new_rows
        prev_pivot = pv
        rank += 1
    return rank


def rank_exact(m: SparseBoundaryMatrix) -> int:
    """Rank over the rationals: two-prime modular fast path, certified on
    disagreement."""
    r0 = rank_mod_p(m, PRIMES[0])
    r1 = rank_mod_p(m, PRIMES[1])
    if r0 == r1:
        return r0
    log.warning("modular ranks disagree (%d vs %d); escalating", r0, r1)
    return rank_certified(m)


# -- rational Betti numbers ---------------------------------------------------


def _boundary_ranks_mod_p(c: OrderComplex, p: int) -> list[int]:
    """Ranks of all boundary maps mod p, top dimension first with clearing:
    pivot rows of the (d+1)-st reduction index columns of the d-th matrix
    that are guaranteed to reduce to zero and are skipped."""
    dim = c.dim
    ranks = [0] * (dim + 2)
    if dim < 0:
        return ranks
    entry_limit = config.reduction_entry_limit()
    cleared: Optional[np.ndarray] = None
    cur = c.faces(dim) if dim > 0 else None
    for d in range(dim, 0, -1):
        prev = c.faces(d - 1)
        indptr, indices, data = _boundary_csc(prev, cur, c.num_vertices)
        skip = None
        if cleared is not None and len(cleared):
            skip = np.zeros(len(cur), dtype=np.uint8)
            skip[cleared] = 1
        try:
            rank, pivots = _kernel.rank_reduction(
                len(prev), indptr, indices, data, p,
                skip=skip, entry_limit=entry_limit,
            )
        except MemoryError as exc:
            raise ResourceAbort(f"GF({p}) reduction over budget at d={d}") from exc
        ranks[d] = rank
        cleared = pivots
        cur = prev
    return ranks


def _boundary_ranks_rational(c: OrderComplex) -> list[int]:
    ranks0 = _boundary_ranks_mod_p(c, PRIMES[0])
    ranks1 = _boundary_ranks_mod_p(c, PRIMES[1])
    if ranks0 == ranks1:
        return ranks0
    log.warning("modular rank pipelines disagree (%s vs %s); escalating", ranks0, ranks1)
    out = [0] * len(ranks0)
    for d in range(1, c.dim + 1):
        if ranks0[d] == ranks1[d]:
            out[d] = ranks0[d]
        else:
            out[d] = rank_certified(boundary_matrix(c, d))
    return out


def betti_numbers(c: OrderComplex, reduced: bool = False) -> HomologySummary:
    """Rational Betti numbers: betti_d = f_d - rank d_d - rank d_{d+1}.

    The reduced variant subtracts 1 in dimension 0 for nonempty complexes
    and reports the (-1)-dimensional rank 1 for the empty complex.
    """
    fv = c.f_vector()
    if fv.dim < 0:
        return HomologySummary({-1: 1} if reduced else {}, "Q", reduced)
    ranks = _boundary_ranks_rational(c)
    betti = {d: fv[d] - ranks[d] - ranks[d + 1] for d in range(fv.dim + 1)}
    if reduced:
        betti[0] -= 1
    return HomologySummary(betti, "Q", reduced)


# -- Smith normal form and integral homology ----------------------------------


def smith_normal_form(m: SparseBoundaryMatrix) -> list[int]:
    """Invariant factors d_1 | d_2 | ... | d_r of the matrix over Z.

    Pivoting prefers +-1 entries (abundant in simplicial boundaries), then
    smallest magnitude, breaking ties by Markowitz fill cost; entry growth
    is monitored and logged. The diagonal left by elimination is normalized
    into a divisibility chain afterwards.
    """
    rows: dict[int, dict[int, int]] = {}
    cols: dict[int, dict[int, int]] = {}
    for r, c, v in m.triples():
        rows.setdefault(r, {})[c] = v
        cols.setdefault(c, {})[r] = v

    max_abs = 1

    def set_entry(r: int, c: int, v: int):
        nonlocal max_abs
        if v:
            rows.setdefault(r, {})[c] = v
            cols.setdefault(c, {})[r] = v
            if abs(v) > max_abs:
                max_abs = abs(v)
        else:
            rows.get(r, {}).pop(c, None)
            cols.get(c, {}).pop(r, None)
            if r in rows and not rows[r]:
                del rows[r]
            if c in cols and not cols[c]:
                del cols[c]

    def add_row(dst: int, src: int, q: int):
        # row[dst] += q * row[src]
        for c, v in list(rows.get(src, {}).items()):
            set_entry(dst, c, rows.get(dst, {}).get(c, 0) + q * v)

    def add_col(dst: int, src: int, q: int):
        for r, v in list(cols.get(src, {}).items()):
            set_entry(r, dst, rows.get(r, {}).get(dst, 0) + q * v)

    diag: list[int] = []
    while rows:
        best = None
        for r, row in rows.items():
            lr = len(row) - 1
            for c, v in row.items():
                key = (0 if abs(v) == 1 else 1, abs(v), lr * (len(cols[c]) - 1), r, c)
                if best is None or key < best[0]:
                    best = (key, r, c)
        _, pr, pc = best
        # shrink the pivot until it divides its whole row and column
        while True:
            pv = rows[pr][pc]
            culprit = None
            for r2, v2 in cols[pc].items():
                if r2 != pr and v2 % pv:
                    culprit = ("row", r2)
                    break
            if culprit is None:
                for c2, v2 in rows[pr].items():
                    if c2 != pc and v2 % pv:
                        culprit = ("col", c2)
                        break
            if culprit is None:
                break
            if culprit[0] == "row":
                r2 = culprit[1]
                add_row(r2, pr, -(cols[pc][r2] // pv))
                if rows.get(r2, {}).get(pc):
                    pr = r2  # remainder is smaller; make it the pivot
            else:
                c2 = culprit[1]
                add_col(c2, pc, -(rows[pr][c2] // pv))
                if rows.get(pr, {}).get(c2):
                    pc = c2
        pv = rows[pr][pc]
        for r2 in [r for r in cols[pc] if r != pr]:
            add_row(r2, pr, -(cols[pc][r2] // pv))
        for c2 in [c for c in rows[pr] if c != pc]:
            add_col(c2, pc, -(rows[pr][c2] // pv))
        diag.append(abs(pv))
        set_entry(pr, pc, 0)

    if max_abs > 1 << 40:
        log.info("SNF entry growth peaked at %d digits", len(str(max_abs)))
    else:
        log.debug("SNF peak entry magnitude %d", max_abs)

    # sort prime exponents across the diagonal into a divisibility chain
    diag.sort()
    for _ in range(len(diag) * len(diag) + 1):
        changed = False
        for i in range(len(diag) - 1):
            a, b = diag[i], diag[i + 1]
            if b % a:
                g = math.gcd(a, b)
                diag[i], diag[i + 1] = g, a * b // g
                changed = True
        if not changed:
            return diag
        diag.sort()
    raise AssertionError("divisibility normalization did not converge")


def integral_homology(c: OrderComplex) -> HomologySummary:
    """Free ranks and torsion of H_*(c; Z) via consecutive Smith forms.

    Free ranks are cross-checked against the rational Betti numbers; a
    mismatch is a ConsistencyError, while exceeding the configured size
    budget is a ResourceAbort (a result limit, not a wrong answer).
    """
    fv = c.f_vector()
    if fv.total_faces > config.snf_face_limit():
        raise ResourceAbort(
            f"integral homology needs SNF of {fv.total_faces} faces; "
            f"limit is {config.snf_face_limit()} (raise PARTHOM_SNF_LIMIT to force)"
        )
    if fv.dim < 0:
        return HomologySummary({}, "Z", False, torsion={})
    factors: dict[int, list[int]] = {d: [] for d in range(fv.dim + 2)}
    for d in range(1, fv.dim + 1):
        factors[d] = smith_normal_form(boundary_matrix(c, d))
    free = {}
    torsion = {}
    for d in range(fv.dim + 1):
        free[d] = fv[d] - len(factors[d]) - len(factors[d + 1])
        tors = tuple(x for x in factors[d + 1] if x > 1)
        if tors:
            torsion[d] = tors
    rational = betti_numbers(c)
    if free != rational.betti:
        raise ConsistencyError(
            f"integral free ranks {free} disagree with rational Betti {rational.betti}"
        )
    return HomologySummary(free, "Z", False, torsion=torsion)


# -- relative homology --------------------------------------------------------


def relative_homology(pair: tuple[OrderComplex, OrderComplex]) -> HomologySummary:
    """Homology of the quotient chain complex of a (complex, full subcomplex)
    pair: the chains on faces of the first that are not faces of the second."""
    total, sub = pair
    sub_ids = []
    tindex = total.vertex_index()
    for p in sub.vertices:
        if p not in tindex:
            raise ValueError("subcomplex vertex missing from the complex")
        sub_ids.append(tindex[p])
    insub = np.zeros(total.num_vertices, dtype=bool)
    insub[sub_ids] = True

    sub_fv = sub.f_vector()
    rel_faces: list[np.ndarray] = []
    for d, arr in total.iter_faces():
        in_sub = insub[arr].all(axis=1) if len(arr) else np.zeros(0, dtype=bool)
        if int(in_sub.sum()) != sub_fv[d]:
            raise ValueError(
                f"not a full subcomplex: {int(in_sub.sum())} induced {d}-faces "
                f"vs {sub_fv[d]} in the subcomplex"
            )
        rel_faces.append(arr[~in_sub])

    while rel_faces and len(rel_faces[-1]) == 0:
        rel_faces.pop()
    if not rel_faces:
        return HomologySummary({}, "Q", False)

    ranks = [0] * (len(rel_faces) + 1)
    for d in range(1, len(rel_faces)):
        indptr, indices, data = _boundary_csc(
            rel_faces[d - 1], rel_faces[d], total.num_vertices, drop_missing=True
        )
        mat = SparseBoundaryMatrix(
            len(rel_faces[d - 1]), len(rel_faces[d]), indptr, indices, data
        )
        ranks[d] = rank_exact(mat)
    betti = {
        d: len(rel_faces[d]) - ranks[d] - ranks[d + 1] for d in range(len(rel_faces))
    }
    return HomologySummary(betti, "Q", False)
