"""Order-complex layer: construction, f-vectors, links, Euler bookkeeping,
and the facet file format."""

import numpy as np
import pytest

from parthom.partitions import (
    SetPartition,
    double_factorial_formula,
    enumerate_partitions,
    has_part_odd,
)
from parthom.complexes import (
    build_delta,
    build_delta_A,
    build_xi2,
    euler_characteristic,
    export_facets,
    import_facets,
    link_complex,
)


def bell(n):
    row, out = [1], [1]
    for _ in range(n):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        out.append(nxt[0])
        row = nxt
    return out[n]


def part(n, *blocks):
    return SetPartition.from_blocks(n, blocks)


class TestBuildDelta:
    def test_delta3_by_hand(self):
        c = build_delta(3)
        assert c.f_vector().counts == (1, 4, 3)
        assert c.euler() == 1

    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_vertex_count_is_bell_minus_one(self, n):
        assert build_delta(n).num_vertices == bell(n) - 1

    @pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
    def test_cone_is_contractible(self, n):
        assert build_delta(n).euler() == 1

    def test_range_checks(self):
        with pytest.raises(ValueError):
            build_delta(2)
        with pytest.raises(ValueError):
            build_delta(9)

    def test_vertex_order_blocks_descending_then_rgs(self):
        c = build_delta(4)
        keys = [(-p.num_blocks, p.sort_key()) for p in c.vertices]
        assert keys == sorted(keys)

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_faces_are_chains_exhaustive(self, n):
        build_delta(n).validate_faces()

    def test_faces_are_chains_sampled_n6(self):
        build_delta(6).validate_faces(sample=200)


class TestLink:
    def test_link_of_delta3_is_three_points(self):
        link = link_complex(build_delta(3))
        assert link.f_vector().counts == (1, 3)

    def test_link_of_delta4_has_13_vertices(self):
        link = link_complex(build_delta(4))
        assert link.num_vertices == 14 - 1
        assert link.f_vector()[0] == 13

    def test_link_of_a_point_is_empty(self):
        point = build_delta_A(part(4, [1, 2], [3], [4]), 4)
        assert point.f_vector().counts == (1, 1)
        empty = link_complex(point)
        assert empty.f_vector().counts == (1,)
        assert empty.dim == -1

    def test_link_requires_unique_maximum(self):
        with pytest.raises(ValueError):
            link_complex(build_xi2(4))


class TestDeltaA:
    def test_one_block_partition_recovers_delta(self):
        for n in (4, 5):
            full = build_delta(n)
            via_a = build_delta_A(part(n, list(range(1, n + 1))), n)
            assert via_a.f_vector().counts == full.f_vector().counts
            assert via_a.vertices == full.vertices

    def test_two_pairs_in_four(self):
        c = build_delta_A(part(4, [1, 2], [3, 4]), 4)
        assert [str(p) for p in c.vertices] == ["12|3|4", "1|2|34", "12|34"]
        assert c.f_vector().counts == (1, 3, 2)
        assert c.euler() == 1

    def test_rejects_all_singletons(self):
        with pytest.raises(ValueError):
            build_delta_A(part(3, [1], [2], [3]), 3)

    def test_rejects_mismatched_n(self):
        with pytest.raises(ValueError):
            build_delta_A(part(3, [1, 2, 3]), 4)


class TestXi2:
    def test_f_vector_n4(self):
        c = build_xi2(4)
        assert c.f_vector().counts == (1, 10, 12)
        assert c.dim == 1

    def test_euler_n4(self):
        assert build_xi2(4).euler() == -2

    def test_euler_n6(self):
        assert build_xi2(6).euler() == -44

    def test_rejects_odd_n(self):
        with pytest.raises(ValueError):
            build_xi2(5)

    @pytest.mark.parametrize("n", [4, 6])
    def test_full_subcomplex_of_delta(self, n):
        delta = build_delta(n)
        xi2 = build_xi2(n)
        keep = np.array([has_part_odd(p) for p in delta.vertices])
        xi_ids = {p: i for i, p in enumerate(xi2.vertices)}
        for d, arr in delta.iter_faces():
            induced = arr[keep[arr].all(axis=1)]
            translated = sorted(
                tuple(xi_ids[delta.vertices[v]] for v in row) for row in induced.tolist()
            )
            xi_faces = sorted(map(tuple, xi2.faces(d).tolist())) if d <= xi2.dim else []
            assert translated == xi_faces

    def test_faces_are_chains(self):
        build_xi2(4).validate_faces()
        build_xi2(6).validate_faces(sample=200)


class TestEuler:
    def test_delta_alone(self):
        assert euler_characteristic(build_delta(5)) == 1

    @pytest.mark.parametrize("n", [4, 6, 8])
    def test_three_way_cross_check(self, n):
        # simplex counting vs the closed formula
        diff = euler_characteristic(build_delta(n), build_xi2(n))
        assert diff == double_factorial_formula(n)

    def test_fvector_alternating_sum_matches(self):
        for c in (build_delta(4), build_xi2(6), link_complex(build_delta(5))):
            fv = c.f_vector()
            assert c.euler() == sum(
                (-1) ** d * fv[d] for d in range(fv.dim + 1)
            )

    def test_rejects_foreign_subcomplex(self):
        with pytest.raises(ValueError):
            euler_characteristic(build_xi2(4), build_delta(4))
        with pytest.raises(ValueError):
            euler_characteristic(build_delta(4), build_xi2(6))


class TestFacetFormat:
    def test_delta3_export(self):
        text = export_facets(build_delta(3))
        lines = text.strip().splitlines()
        assert lines == ["001 000", "010 000", "011 000"]

    def test_empty_complex_exports_empty(self):
        empty = link_complex(build_delta_A(part(4, [1, 2], [3], [4]), 4))
        assert export_facets(empty) == ""
        assert import_facets("").f_vector().counts == (1,)

    @pytest.mark.parametrize("builder,n", [(build_xi2, 4), (build_delta, 4), (build_xi2, 6)])
    def test_round_trip_preserves_f_vector(self, builder, n):
        c = builder(n)
        back = import_facets(export_facets(c))
        assert back.f_vector().counts == c.f_vector().counts
        assert [str(p) for p in back.vertices] == [str(p) for p in c.vertices]

    def test_round_trip_is_identity_on_canonical_form(self):
        c = build_xi2(4)
        once = export_facets(c)
        assert export_facets(import_facets(once)) == once

    def test_import_rejects_non_chains(self):
        with pytest.raises(ValueError):
            import_facets("001 010\n")  # incomparable partitions
        with pytest.raises(ValueError):
            import_facets("000 001\n")  # wrong direction
        with pytest.raises(ValueError):
            import_facets("001 0010\n")  # mixed ground sets

    def test_import_plain_vertices(self):
        c = import_facets("001\n010\n")
        assert c.f_vector().counts == (1, 2)


class TestStreamingAndCache:
    def test_materialized_and_streamed_agree(self, monkeypatch, tmp_path):
        monkeypatch.setenv("PARTHOM_CACHE_DIR", str(tmp_path))
        c1 = build_delta(5)
        mat = [arr.copy() for _, arr in c1.iter_faces()]
        monkeypatch.setenv("PARTHOM_MATERIALIZE_LIMIT", "10")
        c2 = build_delta(5)
        streamed = [arr.copy() for _, arr in c2.iter_faces()]
        assert len(mat) == len(streamed)
        for a, b in zip(mat, streamed):
            assert np.array_equal(a, b)

    def test_disk_cache_round_trip(self, monkeypatch, tmp_path):
        monkeypatch.setenv("PARTHOM_CACHE_DIR", str(tmp_path))
        monkeypatch.setenv("PARTHOM_MATERIALIZE_LIMIT", "10")
        c = build_delta(7)
        first = [arr.copy() for _, arr in c.iter_faces()]
        assert any(tmp_path.rglob("*.npy"))
        again = [arr.copy() for _, arr in build_delta(7).iter_faces()]
        for a, b in zip(first, again):
            assert np.array_equal(a, b)

    def test_fvector_matches_generated_faces(self):
        for c in (build_delta(5), build_xi2(6)):
            fv = c.f_vector()
            gen = [len(arr) for _, arr in c.iter_faces()]
            assert list(fv.counts[1:]) == gen
