"""Rank tables of the filtration spectral sequence and the polynomial
identities around it.

Everything here is finite integer bookkeeping: pages are (p, q) -> rank
maps, differentials are never constructed, and the second page is pinned
by row-wise acyclicity (alternating sums), which is exactly what the
supporting theory guarantees when m exceeds N/2 - 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Optional

from .complexes import build_delta_A, link_complex
from .errors import ConsistencyError
from .homology import relative_homology
from .partitions import (
    double_factorial,
    enumerate_partitions,
    is_two_divisible,
    sum_factorial_products,
)

__all__ = [
    "IntPolynomial",
    "SpectralPage",
    "projective_power_poincare",
    "e1_page_closed_form",
    "e1_page_computed",
    "e2_page",
    "support_check",
    "twisted_poincare_closed",
    "twisted_poincare_from_page",
    "gm_identity_check",
]


class IntPolynomial:
    """Sparse integer polynomial in one variable t; all arithmetic exact."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Optional[dict[int, int]] = None):
        self._c = {e: c for e, c in (coeffs or {}).items() if c}
        if any(e < 0 for e in self._c):
            raise ValueError("negative exponent")

    @classmethod
    def zero(cls) -> "IntPolynomial":
        return cls()

    @classmethod
    def one(cls) -> "IntPolynomial":
        return cls({0: 1})

    @classmethod
    def monomial(cls, coeff: int, exp: int) -> "IntPolynomial":
        return cls({exp: coeff})

    def coeff(self, exp: int) -> int:
        return self._c.get(exp, 0)

    def degree(self) -> int:
        """Degree, with the zero polynomial at -1."""
        return max(self._c) if self._c else -1

    def to_pairs(self) -> list[tuple[int, int]]:
        """Sorted (exponent, coefficient) pairs."""
        return sorted(self._c.items())

    def __bool__(self):
        return bool(self._c)

    def __eq__(self, other):
        return isinstance(other, IntPolynomial) and self._c == other._c

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        out = dict(self._c)
        for e, c in other._c.items():
            out[e] = out.get(e, 0) + c
        return IntPolynomial(out)

    def __sub__(self, other: "IntPolynomial") -> "IntPolynomial":
        out = dict(self._c)
        for e, c in other._c.items():
            out[e] = out.get(e, 0) - c
        return IntPolynomial(out)

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        out: dict[int, int] = {}
        for e1, c1 in self._c.items():
            for e2, c2 in other._c.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        return IntPolynomial(out)

    def __pow__(self, n: int) -> "IntPolynomial":
        if n < 0:
            raise ValueError("negative power")
        out = IntPolynomial.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def scale(self, k: int) -> "IntPolynomial":
        return IntPolynomial({e: k * c for e, c in self._c.items()})

    def __repr__(self):
        if not self._c:
            return "0"
        terms = []
        for e, c in self.to_pairs():
            if e == 0:
                terms.append(str(c))
            elif e == 1:
                terms.append(f"{c}*t")
            else:
                terms.append(f"{c}*t^{e}")
        return " + ".join(terms)


@dataclass(frozen=True)
class SpectralPage:
    """One page of the rank table: (p, q) -> nonnegative rank at fixed N, m.

    ``verified`` drops to False when the small-m override bypassed the
    acyclicity hypothesis.
    """

    n: int
    m: int
    page: int
    cells: dict[tuple[int, int], int] = field(default_factory=dict)
    verified: bool = True

    def __post_init__(self):
        for (p, q), r in self.cells.items():
            if r < 0:
                raise ValueError(f"negative rank at ({p},{q})")

    def rank(self, p: int, q: int) -> int:
        return self.cells.get((p, q), 0)

    def nonzero_cells(self) -> list[tuple[int, int, int]]:
        return sorted((p, q, r) for (p, q), r in self.cells.items() if r)

    def to_json_dict(self) -> dict:
        out = {
            "N": self.n,
            "m": self.m,
            "page": self.page,
            "cells": [
                {"p": p, "q": q, "rank": r} for p, q, r in self.nonzero_cells()
            ],
        }
        if not self.verified:
            out["verified"] = False
        return out

    def render(self) -> str:
        """Aligned text grid, rows q = 0, m, 2m, ... bottom-up."""
        rows = self.n // 2 - 1
        pmax = self.n - 2
        width = max(
            [len(str(r)) for _, _, r in self.nonzero_cells()] + [3, len(str(rows * self.m))]
        )
        lines = []
        for a in range(rows, -1, -1):
            q = a * self.m
            cells = []
            for p in range(pmax + 1):
                r = self.rank(p, q)
                cells.append(str(r).rjust(width) if r else ".".rjust(width))
            lines.append(f"q={q}".rjust(6) + " |" + " ".join(cells))
        lines.append(" " * 6 + " +" + "-" * ((width + 1) * (pmax + 1)))
        lines.append(
            " " * 6 + "  " + " ".join(f"p={p}".rjust(width) for p in range(pmax + 1))
        )
        return "\n".join(lines)


def _require_even_n(n: int, lo: int = 4, hi: int = 8) -> None:
    if n % 2 != 0 or not lo <= n <= hi:
        raise ValueError(f"need an even N in [{lo}, {hi}], got {n}")


def _require_odd_m(m: int, minimum: int = 3) -> None:
    if m % 2 == 0 or m < minimum:
        raise ValueError(f"need an odd m >= {minimum}, got {m}")


def projective_power_poincare(k: int, m: int) -> IntPolynomial:
    """(1 + t^m)^(k-1): rational Poincare polynomial of the (k-1)-fold power
    of odd-dimensional real projective space."""
    if k < 1:
        raise ValueError(f"need k >= 1, got {k}")
    _require_odd_m(m)
    return IntPolynomial({0: 1, m: 1}) ** (k - 1)


def e1_page_closed_form(n: int, m: int) -> SpectralPage:
    """First page from the closed form: cell (p, a*m) holds
    binom(n-p-2, a) * sum of prod (a_j-1)! over 2-divisible partitions
    into n-p-1 blocks."""
    _require_even_n(n)
    _require_odd_m(m)
    cells: dict[tuple[int, int], int] = {}
    for p in range(1, n - 1):
        w = sum_factorial_products(n, n - p - 1, even_only=True)
        if not w:
            continue
        for a in range(n - p - 1):
            cells[(p, a * m)] = comb(n - p - 2, a) * w
    return SpectralPage(n, m, 1, cells)


def e1_page_computed(n: int, m: int) -> SpectralPage:
    """First page assembled from actual relative-homology computations:
    each 2-divisible partition contributes the tensor product of the
    homology of its subpartition pair with the projective-power factor.
    No concentration in a single degree is assumed."""
    _require_even_n(n, hi=6)
    _require_odd_m(m)
    cells: dict[tuple[int, int], int] = {}
    for a_part in enumerate_partitions(n, pred=is_two_divisible):
        k = a_part.num_blocks
        p = n - k - 1
        delta_a = build_delta_A(a_part, n)
        rel = relative_homology((delta_a, link_complex(delta_a)))
        poly = projective_power_poincare(k, m)
        for i, ri in rel.betti.items():
            if not ri:
                continue
            for j, cj in poly.to_pairs():
                key = (p, i + j - p)
                cells[key] = cells.get(key, 0) + ri * cj
    return SpectralPage(n, m, 1, {k: v for k, v in cells.items() if v})


def e2_page(e1: SpectralPage, allow_small_m: bool = False) -> SpectralPage:
    """Second page under row-wise acyclicity: row q = a*m survives only in
    its top cell p* = N-2-a, with rank the absolute alternating sum of the
    row. The sign pattern must match, otherwise the acyclicity premise is
    violated and this raises."""
    if e1.page != 1:
        raise ValueError("expected a first page")
    n, m = e1.n, e1.m
    if m <= n // 2 - 1 and not allow_small_m:
        raise ValueError(
            f"acyclicity argument requires m > N/2 - 1 = {n // 2 - 1}; "
            "pass allow_small_m=True to force (result marked unverified)"
        )
    ok, violations = support_check(e1)
    if not ok:
        raise ConsistencyError(f"first page violates its support: {violations}")
    cells: dict[tuple[int, int], int] = {}
    for a in range(n // 2):
        q = a * m
        total = sum((-1) ** p * e1.rank(p, q) for p in range(n - 1))
        if total == 0:
            continue
        p_star = n - 2 - a
        if (total > 0) != (p_star % 2 == 0):
            raise ConsistencyError(
                f"row q={q}: alternating sum {total} has the wrong sign for a "
                f"complex acyclic away from p={p_star}"
            )
        cells[(p_star, q)] = abs(total)
    return SpectralPage(n, m, 2, cells, verified=e1.verified and m > n // 2 - 1)


def support_check(page: SpectralPage) -> tuple[bool, list[str]]:
    """Verify the support constraints; returns (ok, violation strings).

    First-page cells must lie in the triangle p in [N/2-1, N-2],
    q in {0, m, ..., (N/2-1)m}, p*m + q <= (N-2)m; on later pages every
    surviving cell must additionally sit at p + q/m = N - 2.
    """
    n, m = page.n, page.m
    violations = []
    for p, q, r in page.nonzero_cells():
        where = f"cell ({p},{q}) rank {r}"
        if not n // 2 - 1 <= p <= n - 2:
            violations.append(f"{where}: p outside [{n // 2 - 1}, {n - 2}]")
        if q % m or not 0 <= q // m <= n // 2 - 1:
            violations.append(f"{where}: q not in {{0, m, ..., {(n // 2 - 1)}m}}")
        if p * m + q > (n - 2) * m:
            violations.append(f"{where}: p*m+q exceeds (N-2)m = {(n - 2) * m}")
        if page.page >= 2 and q % m == 0 and p + q // m != n - 2:
            violations.append(f"{where}: total position p + q/m != N-2 = {n - 2}")
    return not violations, violations


def twisted_poincare_closed(n: int, m: int) -> IntPolynomial:
    """(N-1)!! t^{(N/2)(m-1)} * prod_{j=1}^{N/2-1} (1 + (2j-1) t^{m-1})."""
    if n % 2 != 0 or n < 4:
        raise ValueError(f"need an even N >= 4, got {n}")
    _require_odd_m(m)
    out = IntPolynomial.monomial(double_factorial(n - 1), (n // 2) * (m - 1))
    for j in range(1, n // 2):
        out = out * IntPolynomial({0: 1, m - 1: 2 * j - 1})
    return out


def twisted_poincare_from_page(e2: SpectralPage) -> IntPolynomial:
    """Read the twisted Poincare polynomial off a second page: a cell
    (p, q) of rank r contributes r * t^(m(N-1) - (p+q) - 1)."""
    if e2.page != 2:
        raise ValueError("expected a second page")
    n, m = e2.n, e2.m
    if m <= n // 2 - 1:
        raise ValueError(f"page collapse needs m > N/2 - 1 = {n // 2 - 1}")
    out = IntPolynomial.zero()
    for p, q, r in e2.nonzero_cells():
        out = out + IntPolynomial.monomial(r, m * (n - 1) - (p + q) - 1)
    return out


def gm_identity_check(n: int, m: int) -> tuple[bool, IntPolynomial, IntPolynomial]:
    """Compare the configuration-space polynomial prod_{j=1}^{N-1}(1+j t^(m-1))
    with the arrangement-side sum over all partitions: each partition with k
    blocks of sizes a_j contributes prod (a_j - 1)! at exponent (m-1)(N-k).

    Returns (equal, configuration side, arrangement side).
    """
    if not 3 <= n <= 8:
        raise ValueError(f"need N in [3, 8], got {n}")
    if m < 2:
        raise ValueError(f"need m >= 2, got {m}")
    conf = IntPolynomial.one()
    for j in range(1, n):
        conf = conf * IntPolynomial({0: 1, m - 1: j})
    arr = IntPolynomial.zero()
    for k in range(1, n + 1):
        w = sum_factorial_products(n, k, even_only=False)
        arr = arr + IntPolynomial.monomial(w, (m - 1) * (n - k))
    return conf == arr, conf, arr
