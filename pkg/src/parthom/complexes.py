"""Order complexes of partition posets.

Vertices are set partitions, simplices are strictly increasing refinement
chains. The global vertex order is: number of blocks descending, then
lexicographic RGS. Chains are stored finest-first, so every face is an
ascending tuple of vertex indices and the boundary orientation needs no
sign juggling.

Faces are generated dimension by dimension by extending chains upward.
Small complexes are materialized; large ones (n >= 7 by default) stream,
with an on-disk cache keyed by (kind, n).
"""

from __future__ import annotations

import functools
import itertools
import os
import tempfile
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from . import config
from .errors import ResourceAbort
from .partitions import (
    RgsCode,
    SetPartition,
    enumerate_partitions,
    has_part_odd,
    refines_strictly,
)

__all__ = [
    "FVector",
    "OrderComplex",
    "build_delta",
    "build_delta_A",
    "build_xi2",
    "link_complex",
    "euler_characteristic",
    "export_facets",
    "import_facets",
]

_CACHEABLE_KINDS = ("delta", "boundary_delta", "xi2")
_CACHE_FORMAT = "v1"


@dataclass(frozen=True)
class FVector:
    """Per-dimension face counts, starting at the empty face f_{-1} = 1."""

    counts: tuple[int, ...]

    def __getitem__(self, d: int) -> int:
        i = d + 1
        return self.counts[i] if 0 <= i < len(self.counts) else 0

    @property
    def dim(self) -> int:
        return len(self.counts) - 2

    @property
    def total_faces(self) -> int:
        """Number of nonempty faces."""
        return sum(self.counts[1:])

    def euler(self) -> int:
        return sum((-1) ** d * c for d, c in enumerate(self.counts[1:]))


@functools.lru_cache(maxsize=4)
def _lattice(n: int):
    """Partition lattice minus the all-singletons element.

    Returns (vertices, index, above) where ``above[i]`` is a bitmask over
    vertex ids of everything strictly coarser than vertex i. The strict
    order is computed as the transitive closure of block merges.
    """
    vertices = tuple(
        sorted(
            (p for p in enumerate_partitions(n) if p.num_blocks < n or n == 1),
            key=lambda p: (-p.num_blocks, p.sort_key()),
        )
    )
    index = {p: i for i, p in enumerate(vertices)}
    above = [0] * len(vertices)
    # coarsest first, so above[] of every merge target is already complete
    for i in sorted(range(len(vertices)), key=lambda i: vertices[i].num_blocks):
        blocks = vertices[i].blocks
        k = len(blocks)
        acc = 0
        for a in range(k):
            for b in range(a + 1, k):
                merged = [blocks[x] for x in range(k) if x != a and x != b]
                merged.append(blocks[a] + blocks[b])
                j = index[SetPartition.from_blocks(n, merged)]
                acc |= (1 << j) | above[j]
        above[i] = acc
    return vertices, index, above


def _bit_indices(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


class OrderComplex:
    """A simplicial complex of refinement chains on a fixed vertex list.

    ``above`` is CSR adjacency: for vertex i, the sorted vertex ids strictly
    coarser than i inside this complex. When ``explicit_faces`` is given
    (facet-file imports) the face set is exactly that list instead of all
    chains of the vertex poset.
    """

    def __init__(
        self,
        n: int,
        kind: str,
        vertices: tuple[SetPartition, ...],
        above_indptr: np.ndarray,
        above_indices: np.ndarray,
        explicit_faces: Optional[list[np.ndarray]] = None,
    ):
        self.n = n
        self.kind = kind
        self.vertices = vertices
        self._indptr = above_indptr
        self._indices = above_indices
        self._explicit = explicit_faces
        self._materialized: Optional[list[np.ndarray]] = explicit_faces
        self._fvec: Optional[FVector] = None
        self._vertex_index: Optional[dict[SetPartition, int]] = None

    # -- basic queries ----------------------------------------------------

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    def vertex_index(self) -> dict[SetPartition, int]:
        if self._vertex_index is None:
            self._vertex_index = {p: i for i, p in enumerate(self.vertices)}
        return self._vertex_index

    def rgs_strings(self) -> list[str]:
        return [str(RgsCode.from_partition(p)) for p in self.vertices]

    def f_vector(self) -> FVector:
        if self._fvec is not None:
            return self._fvec
        if self._explicit is not None:
            self._fvec = FVector((1,) + tuple(len(a) for a in self._explicit))
            return self._fvec
        # chain-count DP; no face materialization needed
        counts = []
        deg = np.diff(self._indptr)
        c = np.ones(self.num_vertices, dtype=np.int64)
        while c.any():
            counts.append(int(c.sum()))
            nxt = np.zeros_like(c)
            np.add.at(nxt, self._indices, np.repeat(c, deg))
            c = nxt
        self._fvec = FVector((1,) + tuple(counts))
        return self._fvec

    @property
    def dim(self) -> int:
        return self.f_vector().dim

    def euler(self) -> int:
        return self.f_vector().euler()

    # -- face generation ---------------------------------------------------

    def _extend(self, prev: np.ndarray) -> np.ndarray:
        """All one-vertex-up extensions of the chains in ``prev``."""
        last = prev[:, -1]
        starts = self._indptr[last]
        counts = (self._indptr[last + 1] - starts).astype(np.int64)
        total = int(counts.sum())
        width = prev.shape[1]
        out = np.empty((total, width + 1), dtype=np.int32)
        if total:
            out[:, :width] = np.repeat(prev, counts, axis=0)
            ends = np.cumsum(counts)
            grp = np.repeat(ends - counts, counts)
            pos = np.arange(total, dtype=np.int64) - grp
            out[:, width] = self._indices[np.repeat(starts, counts) + pos]
        return out

    def _cache_path(self, d: int) -> Optional[str]:
        if self.kind not in _CACHEABLE_KINDS or self.n < 7:
            return None
        root = os.path.join(config.cache_dir(), _CACHE_FORMAT)
        return os.path.join(root, f"{self.kind}-n{self.n}-d{d}.npy")

    def _load_or_gen(self, d: int, prev: Optional[np.ndarray]) -> np.ndarray:
        path = self._cache_path(d)
        if path and os.path.exists(path):
            return np.load(path)
        if d == 0:
            arr = np.arange(self.num_vertices, dtype=np.int32).reshape(-1, 1)
        else:
            assert prev is not None
            arr = self._extend(prev)
        if path and arr.size:
            os.makedirs(os.path.dirname(path), exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), suffix=".npy")
            os.close(fd)
            np.save(tmp, arr)
            os.replace(tmp, path)
        return arr

    def iter_faces(self) -> Iterator[tuple[int, np.ndarray]]:
        """Yield (dimension, faces) ascending; faces are lex-sorted rows of
        vertex ids. Holds at most two dimensions in memory when streaming."""
        if self._materialized is not None:
            for d, arr in enumerate(self._materialized):
                yield d, arr
            return
        if self.f_vector().total_faces <= config.materialize_limit():
            mat = []
            arr = self._load_or_gen(0, None)
            while arr.size:
                mat.append(arr)
                arr = self._load_or_gen(len(mat), arr)
            self._materialized = mat
            yield from enumerate(mat)
            return
        d = 0
        arr = self._load_or_gen(0, None)
        while arr.size:
            yield d, arr
            nxt = self._load_or_gen(d + 1, arr)
            arr = nxt
            d += 1

    def faces(self, d: int) -> np.ndarray:
        """Faces of one dimension (regenerates lower ones when streaming)."""
        if d < 0 or d > self.dim:
            raise ValueError(f"dimension {d} out of range [0, {self.dim}]")
        for dd, arr in self.iter_faces():
            if dd == d:
                return arr
        raise AssertionError("unreachable")

    def facets(self) -> list[tuple[int, np.ndarray]]:
        """Maximal faces per dimension (inclusion-maximal chains)."""
        all_faces = [arr for _, arr in self.iter_faces()]
        out = []
        covered: set[tuple[int, ...]] = set()
        for d in range(len(all_faces) - 1, -1, -1):
            arr = all_faces[d]
            rows = [tuple(r) for r in arr.tolist()]
            keep = [r for r in rows if r not in covered]
            if keep:
                out.append((d, np.array(keep, dtype=np.int32)))
            covered = set()
            for r in rows:
                for i in range(len(r)):
                    covered.add(r[:i] + r[i + 1:])
        out.reverse()
        return out

    def maximal_vertex(self) -> int:
        """Index of the unique maximal vertex, or raise."""
        deg = np.diff(self._indptr)
        maxima = np.nonzero(deg == 0)[0]
        if self.num_vertices == 0 or len(maxima) != 1:
            raise ValueError(
                f"complex has {len(maxima) if self.num_vertices else 0} maximal "
                "vertices; link requires exactly one"
            )
        apex = int(maxima[0])
        # every other vertex must lie below the apex
        others = np.setdiff1d(np.arange(self.num_vertices), [apex])
        for v in others:
            row = self._indices[self._indptr[v]:self._indptr[v + 1]]
            if apex not in row:
                raise ValueError("maximal vertex does not dominate the poset")
        return apex

    def validate_faces(self, sample: Optional[int] = None, rng_seed: int = 0) -> None:
        """Check the chain invariant on every face (or a per-dimension sample);
        with sample=None additionally check closure under subsets."""
        rng = np.random.default_rng(rng_seed)
        prev_set: Optional[set] = None
        for d, arr in self.iter_faces():
            rows = arr
            if sample is not None and len(arr) > sample:
                rows = arr[rng.choice(len(arr), sample, replace=False)]
            for row in rows.tolist():
                for a, b in zip(row, row[1:]):
                    if not refines_strictly(self.vertices[a], self.vertices[b]):
                        raise AssertionError(f"face {row} is not a chain")
                if sample is None and d > 0:
                    t = tuple(row)
                    for i in range(len(t)):
                        if t[:i] + t[i + 1:] not in prev_set:
                            raise AssertionError(f"face {row} not closed under subsets")
            if sample is None:
                prev_set = set(map(tuple, arr.tolist()))


# -- construction ----------------------------------------------------------


def _from_lattice(n: int, kind: str, member) -> OrderComplex:
    """Subcomplex of the partition lattice induced on ``member`` vertices."""
    vertices, _, above = _lattice(n)
    keep = [i for i, p in enumerate(vertices) if member(i, p)]
    keep_mask = 0
    for i in keep:
        keep_mask |= 1 << i
    relabel = {old: new for new, old in enumerate(keep)}
    indptr = [0]
    indices: list[int] = []
    for i in keep:
        ups = [relabel[j] for j in _bit_indices(above[i] & keep_mask)]
        indices.extend(sorted(ups))
        indptr.append(len(indices))
    return OrderComplex(
        n,
        kind,
        tuple(vertices[i] for i in keep),
        np.asarray(indptr, dtype=np.int64),
        np.asarray(indices, dtype=np.int32),
    )


def _check_n(n: int, minimum: int) -> None:
    cap = config.max_n()
    if not minimum <= n <= cap:
        raise ValueError(f"ground-set size {n} outside supported range [{minimum}, {cap}]")


def build_delta(n: int) -> OrderComplex:
    """Order complex of all partitions of {1..n} with a block of size >= 2.

    A cone with apex the one-block partition, hence contractible.
    """
    _check_n(n, 3)
    return _from_lattice(n, "delta", lambda i, p: True)


def build_delta_A(a: SetPartition, n: int) -> OrderComplex:
    """Order complex of the subpartitions of ``a`` (including ``a``)."""
    if a.n != n:
        raise ValueError(f"partition of {a.n} elements does not match n={n}")
    _check_n(n, 3)
    if all(len(b) == 1 for b in a.blocks):
        raise ValueError("all blocks are singletons; the complex would be empty")
    vertices, index, above = _lattice(n)
    ai = index[a]
    return _from_lattice(
        n, "delta_A", lambda i, p: i == ai or bool((above[i] >> ai) & 1)
    )


def build_xi2(n: int) -> OrderComplex:
    """Order complex of partitions with a block of size >= 2 and an odd block.

    Defined for even n only; this is the full subcomplex of build_delta(n)
    induced on the not-2-divisible vertices.
    """
    if n % 2 != 0:
        raise ValueError(f"the not-2-divisible complex needs an even ground set, got n={n}")
    _check_n(n, 4)
    return _from_lattice(n, "xi2", lambda i, p: has_part_odd(p))


_LINK_KIND = {"delta": "boundary_delta", "delta_A": "boundary_delta_A"}


def link_complex(c: OrderComplex) -> OrderComplex:
    """Subcomplex of all faces avoiding the unique maximal vertex."""
    apex = c.maximal_vertex()
    keep = [i for i in range(c.num_vertices) if i != apex]
    relabel = {old: new for new, old in enumerate(keep)}
    indptr = [0]
    indices: list[int] = []
    for i in keep:
        row = c._indices[c._indptr[i]:c._indptr[i + 1]]
        indices.extend(relabel[j] for j in row.tolist() if j != apex)
        indptr.append(len(indices))
    return OrderComplex(
        c.n,
        _LINK_KIND.get(c.kind, "custom"),
        tuple(c.vertices[i] for i in keep),
        np.asarray(indptr, dtype=np.int64),
        np.asarray(indices, dtype=np.int32),
    )


def euler_characteristic(
    c: OrderComplex, closed_supports_complement: Optional[OrderComplex] = None
) -> int:
    """Alternating face-count sum; with a subcomplex, the compactly
    supported Euler characteristic of the complement chi(c) - chi(sub)."""
    if closed_supports_complement is None:
        return c.euler()
    sub = closed_supports_complement
    if sub.n != c.n:
        raise ValueError("complexes live on different ground sets")
    cset = set(c.vertices)
    if any(p not in cset for p in sub.vertices):
        raise ValueError("subcomplex vertices are not vertices of the complex")
    return c.euler() - sub.euler()


# -- facet file format -------------------------------------------------------


def export_facets(c: OrderComplex) -> str:
    """One maximal face per line: whitespace-separated RGS strings in chain
    order. Deterministic: dimension descending, lexicographic within."""
    if c.f_vector().total_faces > config.materialize_limit():
        raise ResourceAbort(
            f"facet export needs materialized faces; total {c.f_vector().total_faces} "
            f"exceeds limit {config.materialize_limit()}"
        )
    rgs = c.rgs_strings()
    lines = []
    for d, arr in reversed(c.facets()):
        for row in arr.tolist():
            lines.append(" ".join(rgs[v] for v in row))
    return "\n".join(lines) + ("\n" if lines else "")


def import_facets(text: str) -> OrderComplex:
    """Rebuild a complex from a facet file; faces are all subchains of the
    listed facets. Rejects lines that are not strictly increasing chains."""
    chains: list[tuple[SetPartition, ...]] = []
    n = None
    for ln, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        parts = tuple(RgsCode.parse(tok).to_partition() for tok in line.split())
        if n is None:
            n = parts[0].n
        for p in parts:
            if p.n != n:
                raise ValueError(f"line {ln}: mixed ground-set sizes")
        for a, b in zip(parts, parts[1:]):
            if not refines_strictly(a, b):
                raise ValueError(f"line {ln}: not a strictly increasing chain")
        chains.append(parts)
    if n is None:
        return OrderComplex(
            1, "custom", (), np.zeros(1, dtype=np.int64), np.zeros(0, dtype=np.int32)
        )
    vertices = tuple(
        sorted({p for ch in chains for p in ch}, key=lambda p: (-p.num_blocks, p.sort_key()))
    )
    index = {p: i for i, p in enumerate(vertices)}
    per_dim: list[set[tuple[int, ...]]] = []
    for ch in chains:
        ids = tuple(index[p] for p in ch)
        m = len(ids)
        for size in range(1, m + 1):
            while len(per_dim) < size:
                per_dim.append(set())
            for sub in _subchains(ids, size):
                per_dim[size - 1].add(sub)
    explicit = [
        np.array(sorted(s), dtype=np.int32).reshape(len(s), d + 1)
        for d, s in enumerate(per_dim)
    ]
    # pairwise strict-refinement adjacency (imports are small)
    indptr = [0]
    indices: list[int] = []
    for p in vertices:
        ups = [j for j, q in enumerate(vertices) if refines_strictly(p, q)]
        indices.extend(ups)
        indptr.append(len(indices))
    return OrderComplex(
        n,
        "custom",
        vertices,
        np.asarray(indptr, dtype=np.int64),
        np.asarray(indices, dtype=np.int32),
        explicit_faces=explicit,
    )


def _subchains(ids: tuple[int, ...], size: int) -> Iterator[tuple[int, ...]]:
    return itertools.combinations(ids, size)
