"""Set partitions of {1..n} and the counting formulas built on them.

A partition is kept in canonical form (blocks sorted ascending, blocks
ordered by smallest element), with the restricted growth string as the
compact canonical key: equality, hashing and enumeration order all go
through it.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Callable, Iterator, Optional

__all__ = [
    "SetPartition",
    "RgsCode",
    "enumerate_partitions",
    "refines",
    "refines_strictly",
    "is_two_divisible",
    "is_k_divisible",
    "has_part_odd",
    "signed_euler_sum",
    "count_admissible_permutations",
    "double_factorial",
    "double_factorial_formula",
    "sum_factorial_products",
]

# RGS digits are serialized as single characters; enough for n <= 36.
_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"

MAX_PERMUTATION_N = 12  # (N-1)! candidates; pruning keeps this bound honest


@dataclass(frozen=True)
class SetPartition:
    """A partition of {1..n} into disjoint nonempty blocks.

    ``blocks`` is canonical: each block ascending, blocks ordered by their
    smallest element, so structural equality is partition equality.
    """

    n: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"ground set must be nonempty, got n={self.n}")
        seen = set()
        prev_min = 0
        for block in self.blocks:
            if not block:
                raise ValueError("empty block")
            if list(block) != sorted(block):
                raise ValueError(f"block {block} not sorted ascending")
            if block[0] <= prev_min:
                raise ValueError("blocks not ordered by smallest element")
            if seen.intersection(block):
                raise ValueError("blocks are not disjoint")
            prev_min = block[0]
            seen.update(block)
        if seen != set(range(1, self.n + 1)):
            raise ValueError(f"blocks do not partition {{1..{self.n}}}")

    @classmethod
    def from_blocks(cls, n: int, blocks) -> "SetPartition":
        """Canonicalize an iterable of iterables into a SetPartition."""
        canon = sorted(tuple(sorted(b)) for b in blocks)
        return cls(n, tuple(canon))

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    @property
    def sizes(self) -> tuple[int, ...]:
        """Block cardinalities in canonical block order."""
        return tuple(len(b) for b in self.blocks)

    def block_of(self) -> tuple[int, ...]:
        """Element -> block index map as a tuple indexed by element-1."""
        out = [0] * self.n
        for bi, block in enumerate(self.blocks):
            for e in block:
                out[e - 1] = bi
        return tuple(out)

    def rgs(self) -> "RgsCode":
        return RgsCode(self.block_of())

    def sort_key(self) -> tuple[int, ...]:
        """Lexicographic RGS key (canonical total order at fixed n)."""
        return self.block_of()

    def __str__(self):
        return "|".join("".join(_DIGITS[e - 1] if self.n > 9 else str(e) for e in b) for b in self.blocks)


@dataclass(frozen=True)
class RgsCode:
    """Restricted growth string: digit i is the block index of element i+1.

    Round-trips bijectively with SetPartition; the string form (e.g.
    ``"001022"``) is the vertex identifier in all file formats.
    """

    digits: tuple[int, ...]

    def __post_init__(self):
        if not self.digits:
            raise ValueError("empty RGS")
        if self.digits[0] != 0:
            raise ValueError("RGS must start with 0")
        top = 0
        for d in self.digits[1:]:
            if d < 0 or d > top + 1:
                raise ValueError(f"restricted growth violated in {self.digits}")
            top = max(top, d)

    @classmethod
    def from_partition(cls, p: SetPartition) -> "RgsCode":
        return cls(p.block_of())

    def to_partition(self) -> SetPartition:
        nb = max(self.digits) + 1
        blocks = [[] for _ in range(nb)]
        for i, d in enumerate(self.digits):
            blocks[d].append(i + 1)
        return SetPartition(len(self.digits), tuple(tuple(b) for b in blocks))

    @classmethod
    def parse(cls, s: str) -> "RgsCode":
        try:
            return cls(tuple(_DIGITS.index(ch) for ch in s.strip().lower()))
        except ValueError as exc:
            raise ValueError(f"not an RGS string: {s!r}") from exc

    def __str__(self):
        return "".join(_DIGITS[d] for d in self.digits)


def enumerate_partitions(
    n: int,
    k: Optional[int] = None,
    pred: Optional[Callable[[SetPartition], bool]] = None,
) -> Iterator[SetPartition]:
    """Yield partitions of {1..n} in lexicographic RGS order.

    ``k`` restricts to exactly k blocks; ``pred`` is an arbitrary filter.
    Without filters the total count is the Bell number.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if k is not None and not 1 <= k <= n:
        raise ValueError(f"block count k={k} out of range [1, {n}]")
    digits = [0] * n

    def rec(i: int, top: int) -> Iterator[SetPartition]:
        if i == n:
            if k is not None and top + 1 != k:
                return
            p = RgsCode(tuple(digits)).to_partition()
            if pred is None or pred(p):
                yield p
            return
        # with k fixed, prune branches that can no longer reach k blocks
        hi = top + 1 if k is None else min(top + 1, k - 1)
        for d in range(hi + 1):
            if k is not None and max(top, d) + 1 + (n - i - 1) < k:
                continue
            digits[i] = d
            yield from rec(i + 1, max(top, d))

    return rec(1, 0)


def refines(a: SetPartition, b: SetPartition) -> bool:
    """True iff every block of ``a`` lies inside some block of ``b``."""
    if a.n != b.n:
        raise ValueError(f"mismatched ground sets: {a.n} != {b.n}")
    b_of = b.block_of()
    for block in a.blocks:
        bid = b_of[block[0] - 1]
        if any(b_of[e - 1] != bid for e in block[1:]):
            return False
    return True


def refines_strictly(a: SetPartition, b: SetPartition) -> bool:
    return a != b and refines(a, b)


def is_two_divisible(a: SetPartition) -> bool:
    """All block sizes even."""
    return all(s % 2 == 0 for s in a.sizes)


def is_k_divisible(a: SetPartition, d: int) -> bool:
    """All block sizes divisible by d (d=2 recovers is_two_divisible)."""
    if d < 1:
        raise ValueError(f"divisor must be positive, got {d}")
    return all(s % d == 0 for s in a.sizes)


def has_part_odd(a: SetPartition) -> bool:
    """At least one block of odd size."""
    return not is_two_divisible(a)


def double_factorial(n: int) -> int:
    """n!! as a direct product of every other integer; (-1)!! = 0!! = 1."""
    if n < -1:
        raise ValueError(f"double factorial undefined for {n}")
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def _require_even(N: int, minimum: int = 4) -> None:
    if N % 2 != 0 or N < minimum:
        raise ValueError(f"need an even N >= {minimum}, got {N}")


def double_factorial_formula(N: int) -> int:
    """(N-1)!! * (N-3)!! for even N >= 4."""
    _require_even(N)
    return double_factorial(N - 1) * double_factorial(N - 3)


def signed_euler_sum(N: int) -> int:
    """Sum of (-1)^(k+1) * prod (a_j - 1)! over 2-divisible partitions of {1..N}.

    The contribution a 2-divisible partition with k blocks of sizes a_j makes
    to the compactly-supported Euler characteristic of the pieces lying over
    it; the total must equal (N-1)!!(N-3)!!.
    """
    _require_even(N)
    total = 0
    for p in enumerate_partitions(N, pred=is_two_divisible):
        term = 1
        for s in p.sizes:
            term *= factorial(s - 1)
        total += term if p.num_blocks % 2 == 1 else -term
    return total


def count_admissible_permutations(N: int) -> int:
    """Count permutations (a_1..a_N) of {1..N} with a_1 = 1 such that no odd
    position r in [3, N-1] holds the minimum of the remaining suffix.

    Exhaustive DFS over the (N-1)! candidate tails; a branch placing the
    minimum of the unused pool at a forbidden position is pruned there,
    which keeps the bound N <= 12 practical.
    """
    _require_even(N)
    if N > MAX_PERMUTATION_N:
        raise ValueError(f"permutation enumeration capped at N={MAX_PERMUTATION_N}, got {N}")
    pool = list(range(2, N + 1))  # ascending; pool[0] is the current minimum

    def dfs(pos: int, pool: list[int]) -> int:
        if not pool:
            return 1
        forbid_min = pos % 2 == 1 and pos < N
        count = 0
        for i in range(1 if forbid_min else 0, len(pool)):
            count += dfs(pos + 1, pool[:i] + pool[i + 1:])
        return count

    return dfs(2, pool)


def sum_factorial_products(N: int, k: int, even_only: bool = False) -> int:
    """Sum of prod (a_j - 1)! over partitions of {1..N} into exactly k blocks.

    Without the 2-divisibility restriction this is the unsigned Stirling
    number of the first kind c(N, k).
    """
    if not 1 <= k <= N:
        raise ValueError(f"block count k={k} out of range [1, {N}]")
    pred = is_two_divisible if even_only else None
    total = 0
    for p in enumerate_partitions(N, k=k, pred=pred):
        term = 1
        for s in p.sizes:
            term *= factorial(s - 1)
        total += term
    return total
