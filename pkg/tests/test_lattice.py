import itertools
import math

import pytest

from bosonlab.core.lattice import (
    adjacency_pairs,
    boson_sites,
    box_lattice,
    build_lattice,
    chain_lattice,
    initial_configuration,
    min_spacing,
    neighbors,
    separation_chain,
    site_distance,
    snake_path,
)
from bosonlab.core.models import LatticeSpec
from bosonlab.utils.exceptions import ValidationError


class TestBuildLattice:
    def test_two_dimensional_four_bosons(self):
        spec = build_lattice(4, 3, 1.5, 2)
        assert spec.m == 96
        assert spec.side == 10
        assert min_spacing(spec) == pytest.approx(2.5)
        bosons = sorted(spec.coords[i] for i in spec.occupied)
        assert bosons == [(2, 2), (2, 7), (7, 2), (7, 7)]

        occ = initial_configuration(spec).occ
        assert sum(1 for x in occ if x == 1) == 4
        assert sum(1 for x in occ if x == 0) == 92

    def test_ancillas_sit_outside_the_ordinary_sites(self):
        spec = build_lattice(4, 3, 1.5, 2)
        assert len(spec.ancilla_coords) == 4
        assert not set(spec.ancilla_coords) & set(spec.coords)

    def test_single_boson(self):
        spec = build_lattice(1, 1, 1, 1)
        assert spec.m == 1
        assert spec.L == pytest.approx(1.0)
        assert initial_configuration(spec).occ == (1,)

    def test_two_bosons_on_a_chain(self):
        spec = build_lattice(2, 2, 1, 1)
        assert spec.m == 4
        assert spec.side == 6
        assert spec.occupied == (0, 3)
        assert spec.L == pytest.approx(1.5)

    @pytest.mark.parametrize(
        "d,beta,sizes,expected",
        [
            (1, 2, (2, 4, 8), (1.5, 2.5, 4.5)),
            (2, 3, (4, 9), (2.0, 4.5)),
        ],
    )
    def test_boson_spacing_grows_with_n(self, d, beta, sizes, expected):
        lengths = [build_lattice(n, beta, 1, d).L for n in sizes]
        assert lengths == pytest.approx(list(expected))

    def test_bosons_sit_on_ordinary_sites(self):
        for n, beta, d in [(3, 2, 1), (4, 2, 2), (8, 2, 3)]:
            spec = build_lattice(n, beta, 1, d)
            assert len(spec.occupied) == n
            assert all(0 <= i < spec.m for i in spec.occupied)

    @pytest.mark.parametrize(
        "args",
        [
            (2, 2, 1, 4),
            (0, 2, 1, 1),
            (2, 2, 0, 1),
            (2, 0.5, 1, 1),
            (4, 1, 0.5, 1),
        ],
    )
    def test_rejects_bad_parameters(self, args):
        with pytest.raises(ValidationError):
            build_lattice(*args)

    @pytest.mark.parametrize("d", [1, 2, 3])
    @pytest.mark.parametrize("c1", [1, 2, 3])
    def test_linear_density_row_builds(self, d, c1):
        for n in range(1, 9):
            spec = build_lattice(n, 1, c1, d)
            assert spec.m == c1 * n
            assert spec.m + n <= spec.side**d
            assert len(spec.ancilla_coords) == n
            assert not set(spec.ancilla_coords) & set(spec.coords)
            assert all(0 <= x < spec.side for c in spec.ancilla_coords + spec.coords for x in c)
            bosons = [spec.coords[i] for i in spec.occupied]
            for a, b in itertools.combinations(bosons, 2):
                assert math.dist(a, b) >= 2 * spec.L - 1e-12

    def test_dense_chain_shrinks_the_spacing(self):
        assert build_lattice(2, 1, 1, 1).occupied == (0, 1)
        spec = build_lattice(4, 1, 3, 1)
        assert spec.m == 12
        assert spec.occupied == (0, 3, 6, 9)
        assert spec.L == pytest.approx(1.5)
        assert spec.ancilla_coords == tuple((x,) for x in range(12, 16))

    def test_packed_square_puts_ancillas_in_the_nearest_free_cells(self):
        spec = build_lattice(4, 1, 1, 2)
        assert spec.side == 3
        assert sorted(spec.coords[i] for i in spec.occupied) == [(0, 0), (0, 1), (1, 0), (1, 1)]
        assert spec.ancilla_coords == ((0, 2), (1, 2), (2, 0), (2, 1))
        assert spec.L == pytest.approx(0.5)

    def test_same_arguments_same_lattice(self):
        for args in [(4, 3, 1.5, 2), (5, 2, 1, 1), (8, 2, 1, 3), (4, 1, 1, 2)]:
            assert build_lattice(*args) == build_lattice(*args)

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_length_scale_over_n(self, d):
        # m = n^2 gives spacing floor((n + 1)^(1/d)), never decreasing in n
        lengths = [build_lattice(n, 2, 1, d).L for n in range(2, 65)]
        expected = [max(s for s in range(1, n + 2) if s**d <= n + 1) / 2 for n in range(2, 65)]
        assert lengths == expected
        assert all(a <= b for a, b in zip(lengths, lengths[1:]))


class TestHelperLattices:
    def test_chain_length_scale(self):
        spec = chain_lattice(10, [0, 9])
        assert spec.L == pytest.approx(4.5)
        assert spec.ancilla_coords == ()

    def test_separation_chain_is_centred(self):
        spec = separation_chain(2, 4, m=11)
        assert spec.occupied == (3, 7)
        assert spec.L == pytest.approx(2.0)

    def test_separation_chain_padding(self):
        spec = separation_chain(3, 2, padding=5)
        assert spec.m == 5 + 5 + 5
        assert spec.occupied == (5, 7, 9)

    def test_separation_chain_too_short(self):
        with pytest.raises(ValidationError, match="need"):
            separation_chain(3, 10, m=12)

    def test_box_lattice(self):
        spec = box_lattice((3, 4), [(0, 0), (2, 3)])
        assert spec.m == 12
        assert spec.d == 2
        assert spec.occupied == (spec.index_of[(0, 0)], spec.index_of[(2, 3)])
        assert spec.L == pytest.approx(((2**2 + 3**2) ** 0.5) / 2)

    @pytest.mark.parametrize("occupied", [[], [1, 1], [-1], [10]])
    def test_chain_rejects_bad_sites(self, occupied):
        with pytest.raises(ValidationError):
            chain_lattice(10, occupied)


class TestGeometry:
    def test_boson_sites_feed_the_initial_configuration(self):
        spec = build_lattice(4, 3, 1.5, 2)
        sites = boson_sites(spec)
        assert [spec.coords[i] for i in sites] == [(2, 2), (2, 7), (7, 2), (7, 7)]
        assert tuple(initial_configuration(spec).sites) == sites

    def test_site_distance(self):
        spec = box_lattice((4, 4), [(0, 0)])
        a = spec.index_of[(0, 0)]
        b = spec.index_of[(3, 3)]
        assert site_distance(spec, a, b) == pytest.approx(18**0.5)
        assert site_distance(spec, a, a) == 0.0

    def test_site_distance_out_of_range(self, two_site_chain):
        with pytest.raises(ValidationError):
            site_distance(two_site_chain, 0, 2)

    def test_neighbors(self):
        spec = box_lattice((3, 3), [(1, 1)])
        centre = spec.index_of[(1, 1)]
        assert sorted(spec.coords[j] for j in neighbors(spec, centre)) == [(0, 1), (1, 0), (1, 2), (2, 1)]
        corner = spec.index_of[(0, 0)]
        assert len(neighbors(spec, corner)) == 2

    def test_adjacency_pairs_count_bonds(self):
        assert len(adjacency_pairs(chain_lattice(5, [0]))) == 4
        assert len(adjacency_pairs(box_lattice((3, 3), [(0, 0)]))) == 12
        assert all(i < j for i, j in adjacency_pairs(box_lattice((2, 2, 2), [(0, 0, 0)])))


class TestSnakePath:
    def test_box_path_visits_every_site_by_bonds(self):
        spec = box_lattice((3, 4), [(0, 0)])
        path = snake_path(spec)
        assert sorted(path) == list(range(spec.m))
        assert all(spec.adjacency[a, b] for a, b in zip(path, path[1:]))

    def test_chain_path_is_the_chain(self):
        assert snake_path(chain_lattice(6, [2])) == list(range(6))

    def test_path_routes_around_ancilla_holes(self):
        spec = build_lattice(4, 2, 2, 2)
        assert {(1, 2), (1, 5), (4, 2), (4, 5)} == set(spec.ancilla_coords)
        path = snake_path(spec)
        assert sorted(path) == list(range(spec.m))
        assert all(spec.adjacency[a, b] for a, b in zip(path, path[1:]))
        assert {spec.coords[path[0]], spec.coords[path[-1]]} == {(0, 5), (5, 5)}

    def test_lattice_without_a_path(self):
        # two dead ends on the same checkerboard colour with an even site count
        spec = build_lattice(2, 2, 2.5, 2)
        assert {(0, 1), (0, 3)} == set(spec.ancilla_coords)
        with pytest.raises(ValidationError, match="no nearest-neighbour path"):
            snake_path(spec)

    def test_star_has_too_many_dead_ends(self):
        coords = ((0, 1), (1, 0), (1, 1), (1, 2), (2, 1))
        spec = LatticeSpec(2, 1, 1.0, 5.0, 5, 3, coords, (), (2,), 1.5)
        with pytest.raises(ValidationError):
            snake_path(spec)

    def test_search_budget(self):
        with pytest.raises(ValidationError):
            snake_path(build_lattice(4, 2, 2, 2), budget=3)
