"""Partition layer: enumeration, order, predicates, counting formulas.

Expected values come from independent oracles computed here: the Bell
triangle, the Stirling first-kind recurrence, and plain brute force over
permutations.
"""

import itertools
from functools import lru_cache
from math import factorial

import pytest

from parthom.partitions import (
    RgsCode,
    SetPartition,
    count_admissible_permutations,
    double_factorial,
    double_factorial_formula,
    enumerate_partitions,
    has_part_odd,
    is_k_divisible,
    is_two_divisible,
    refines,
    refines_strictly,
    signed_euler_sum,
    sum_factorial_products,
)


def bell_numbers(limit):
    """Bell triangle oracle."""
    row = [1]
    out = [1]
    for _ in range(limit):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        out.append(nxt[0])
        row = nxt
    return out  # out[n] = Bell(n), with out[0] = 1


@lru_cache(maxsize=None)
def stirling_first(n, k):
    """Unsigned Stirling numbers of the first kind via the recurrence."""
    if n == 0:
        return 1 if k == 0 else 0
    if k == 0:
        return 0
    return stirling_first(n - 1, k - 1) + (n - 1) * stirling_first(n - 1, k)


@lru_cache(maxsize=None)
def stirling_second(n, k):
    if n == 0:
        return 1 if k == 0 else 0
    if k == 0:
        return 0
    return stirling_second(n - 1, k - 1) + k * stirling_second(n - 1, k)


def part(n, *blocks):
    return SetPartition.from_blocks(n, blocks)


class TestEnumeration:
    def test_singleton_ground_set(self):
        assert list(enumerate_partitions(1)) == [SetPartition(1, ((1,),))]

    @pytest.mark.parametrize("n", range(1, 9))
    def test_counts_match_bell_triangle(self, n):
        bell = bell_numbers(8)
        assert sum(1 for _ in enumerate_partitions(n)) == bell[n]

    @pytest.mark.parametrize("n", range(1, 8))
    def test_block_count_filter_matches_stirling_second(self, n):
        for k in range(1, n + 1):
            got = sum(1 for _ in enumerate_partitions(n, k=k))
            assert got == stirling_second(n, k)

    def test_lexicographic_rgs_order(self):
        codes = [p.block_of() for p in enumerate_partitions(5)]
        assert codes == sorted(codes)
        assert len(set(codes)) == len(codes)

    def test_two_divisible_pairs_of_six(self):
        got = list(enumerate_partitions(6, k=2, pred=is_two_divisible))
        assert len(got) == 15
        assert all(sorted(p.sizes) == [2, 4] for p in got)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            list(enumerate_partitions(0))
        with pytest.raises(ValueError):
            list(enumerate_partitions(4, k=0))
        with pytest.raises(ValueError):
            list(enumerate_partitions(4, k=5))

    @pytest.mark.parametrize("n", range(1, 7))
    def test_rgs_round_trip(self, n):
        for p in enumerate_partitions(n):
            code = RgsCode.from_partition(p)
            assert code.to_partition() == p
            assert RgsCode.parse(str(code)) == code

    def test_rgs_rejects_non_restricted_growth(self):
        with pytest.raises(ValueError):
            RgsCode((0, 2))
        with pytest.raises(ValueError):
            RgsCode((1, 0))


class TestRefinement:
    def test_examples(self):
        a = part(4, [1, 2], [3], [4])
        b = part(4, [1, 2, 3], [4])
        assert refines(a, b)
        assert refines(a, a)
        assert not refines(part(4, [1, 2], [3, 4]), part(4, [1, 3], [2, 4]))

    def test_mismatched_ground_sets(self):
        with pytest.raises(ValueError):
            refines(part(3, [1, 2, 3]), part(4, [1, 2, 3, 4]))

    def test_partial_order_axioms_exhaustive(self):
        # antisymmetry and transitivity over all partitions of {1..4}
        parts = list(enumerate_partitions(4))
        for a, b in itertools.product(parts, repeat=2):
            if refines(a, b) and refines(b, a):
                assert a == b
        for a, b, c in itertools.product(parts, repeat=3):
            if refines(a, b) and refines(b, c):
                assert refines(a, c)

    def test_strict_version(self):
        a = part(3, [1, 2], [3])
        b = part(3, [1, 2, 3])
        assert refines_strictly(a, b)
        assert not refines_strictly(a, a)


class TestPredicates:
    def test_two_divisible(self):
        assert is_two_divisible(part(6, [1, 2], [3, 4, 5, 6]))
        assert not is_two_divisible(part(6, [1, 2, 3], [4, 5, 6]))
        assert is_two_divisible(part(6, [1, 2, 3, 4, 5, 6]))

    def test_has_part_odd(self):
        assert has_part_odd(part(4, [1, 2, 3], [4]))
        assert not has_part_odd(part(4, [1, 2], [3, 4]))
        assert has_part_odd(part(4, [1], [2], [3], [4]))

    @pytest.mark.parametrize("n", range(1, 7))
    def test_odd_part_is_negation(self, n):
        for p in enumerate_partitions(n):
            assert has_part_odd(p) == (not is_two_divisible(p))

    def test_k_divisible(self):
        assert is_k_divisible(part(6, [1, 2, 3], [4, 5, 6]), 3)
        assert not is_k_divisible(part(6, [1, 2, 3], [4, 5, 6]), 2)
        assert is_k_divisible(part(6, [1, 2, 3, 4, 5, 6]), 1)
        with pytest.raises(ValueError):
            is_k_divisible(part(2, [1, 2]), 0)


class TestDoubleFactorial:
    def test_small_values(self):
        assert double_factorial(-1) == 1
        assert double_factorial(0) == 1
        assert double_factorial(5) == 15
        assert double_factorial(9) == 945

    def test_formula_values(self):
        assert double_factorial_formula(4) == 3
        assert double_factorial_formula(6) == 45
        assert double_factorial_formula(10) == 945 * 105

    def test_rejects_odd_or_tiny(self):
        for bad in (2, 3, 5, 7):
            with pytest.raises(ValueError):
                double_factorial_formula(bad)


class TestSignedEulerSum:
    def test_n4_contributions(self):
        # +3! from the one-block partition, -1 from each of three 2+2 splits
        assert signed_euler_sum(4) == 6 - 3 == 3

    @pytest.mark.parametrize("n", [4, 6, 8])
    def test_equals_double_factorial_formula(self, n):
        assert signed_euler_sum(n) == double_factorial_formula(n)

    def test_rejects_odd_and_tiny(self):
        for bad in (5, 2, 3):
            with pytest.raises(ValueError):
                signed_euler_sum(bad)


def brute_force_admissible(n):
    """No-pruning oracle: check every tail via suffix minima."""
    count = 0
    for tail in itertools.permutations(range(2, n + 1)):
        perm = (1,) + tail
        ok = True
        # suffix minima right to left
        suffix_min = [0] * (n + 1)
        cur = n + 1
        for i in range(n - 1, -1, -1):
            suffix_min[i] = cur
            cur = min(cur, perm[i])
        for r in range(3, n, 2):  # odd positions 3..N-1, 1-indexed
            if perm[r - 1] < suffix_min[r - 1]:
                ok = False
                break
        if ok:
            count += 1
    return count


class TestAdmissiblePermutations:
    @pytest.mark.parametrize("n,expected", [(4, 3), (6, 45), (8, 1575)])
    def test_known_values(self, n, expected):
        assert count_admissible_permutations(n) == expected

    @pytest.mark.parametrize("n", [4, 6, 8])
    def test_against_no_pruning_brute_force(self, n):
        assert count_admissible_permutations(n) == brute_force_admissible(n)

    def test_bounds(self):
        with pytest.raises(ValueError):
            count_admissible_permutations(14)
        with pytest.raises(ValueError):
            count_admissible_permutations(5)


class TestSumFactorialProducts:
    def test_stirling_example(self):
        assert sum_factorial_products(3, 2) == 3  # c(3,2)

    @pytest.mark.parametrize("n", range(1, 9))
    def test_matches_stirling_recurrence(self, n):
        for k in range(1, n + 1):
            assert sum_factorial_products(n, k) == stirling_first(n, k)

    def test_even_only_values_for_six(self):
        assert sum_factorial_products(6, 2, even_only=True) == 90
        assert sum_factorial_products(6, 1, even_only=True) == factorial(5)
        assert sum_factorial_products(6, 3, even_only=True) == 15

    def test_rejects_bad_k(self):
        with pytest.raises(ValueError):
            sum_factorial_products(4, 0)
        with pytest.raises(ValueError):
            sum_factorial_products(4, 5)


class TestCanonicalForm:
    def test_from_blocks_canonicalizes(self):
        p = SetPartition.from_blocks(5, [[3, 5], [4, 2], [1]])
        assert p.blocks == ((1,), (2, 4), (3, 5))
        assert p.sizes == (1, 2, 2)
        assert p.num_blocks == 3

    def test_invalid_partitions_rejected(self):
        with pytest.raises(ValueError):
            SetPartition(3, ((1, 2),))  # does not cover
        with pytest.raises(ValueError):
            SetPartition(3, ((1, 2), (2, 3)))  # overlap
        with pytest.raises(ValueError):
            SetPartition(2, ((2, 1),))  # not sorted

    def test_equality_and_hash_are_structural(self):
        a = SetPartition.from_blocks(4, [[1, 2], [3, 4]])
        b = SetPartition.from_blocks(4, [[3, 4], [2, 1]])
        assert a == b and hash(a) == hash(b)
