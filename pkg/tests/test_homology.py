import random

import pytest

from deltaplex.complex_core import Cell, NotConnectedError, build_complex
from deltaplex.constructors import hyperoctahedron, rp2, simplex_boundary, suspension
from deltaplex.homology import (
    DimensionOutOfRangeError,
    IntegerMatrix,
    boundary_matrix,
    cohomology,
    has_connected_double_cover,
    homology,
    smith_normal_form,
)

from oracles import minor_gcd_invariant_factors, naive_invariant_factors


def minimal_circle():
    return build_complex([Cell("v", 0, ()), Cell("e", 1, ("v", "v"))])


class TestIntegerMatrix:
    def test_shape_and_entries(self):
        m = IntegerMatrix([[1, 2], [3, 4], [5, 6]])
        assert (m.rows, m.cols) == (3, 2)
        assert m.transpose().entries == ((1, 3, 5), (2, 4, 6))

    def test_degenerate_shapes(self):
        z = IntegerMatrix.zeros(0, 5)
        assert (z.rows, z.cols) == (0, 5)
        assert (z.transpose().rows, z.transpose().cols) == (5, 0)

    def test_ragged_rejected(self):
        with pytest.raises(ValueError):
            IntegerMatrix([[1, 2], [3]])

    def test_mul_identity(self):
        m = IntegerMatrix([[1, 2], [3, 4]])
        assert m.mul(IntegerMatrix.identity(2)) == m

    def test_determinant(self):
        assert IntegerMatrix([[2, 0], [0, 3]]).determinant() == 6
        assert IntegerMatrix([[1, 2], [3, 4]]).determinant() == -2
        assert IntegerMatrix.identity(4).determinant() == 1
        # Bareiss must stay exact on a matrix with large intermediate values
        m = IntegerMatrix([[50, -49, 31], [-47, 50, -50], [31, -50, 50]])
        brute = sum(
            (1 if (p := perm) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)) else -1)
            * m.entries[0][p[0]] * m.entries[1][p[1]] * m.entries[2][p[2]]
            for perm in ((0, 1, 2), (1, 2, 0), (2, 0, 1), (0, 2, 1), (1, 0, 2), (2, 1, 0))
        )
        assert m.determinant() == brute

    def test_hashable(self):
        a = IntegerMatrix([[1, 2]])
        b = IntegerMatrix([[1, 2]])
        assert a == b and hash(a) == hash(b)


class TestSmithNormalForm:
    def test_frozen_example(self):
        s = smith_normal_form(IntegerMatrix([[2, 4], [6, 8]]))
        assert s.invariant_factors == (2, 4)

    def test_transforms_verify(self):
        m = IntegerMatrix([[6, 4, 0], [0, 10, 15]])
        s = smith_normal_form(m, verify=True)
        assert s.verify(m)
        assert s.u.mul(m).mul(s.v) == s.s

    def test_zero_matrix(self):
        s = smith_normal_form(IntegerMatrix.zeros(3, 2))
        assert s.invariant_factors == ()

    def test_empty_matrix(self):
        s = smith_normal_form(IntegerMatrix.zeros(0, 4))
        assert s.invariant_factors == ()

    def test_chained_divisibility(self):
        random.seed(7)
        for _ in range(30):
            rows = random.randrange(1, 7)
            cols = random.randrange(1, 7)
            m = IntegerMatrix(
                [[random.randrange(-20, 21) for _ in range(cols)] for _ in range(rows)]
            )
            facs = smith_normal_form(m, verify=True).invariant_factors
            assert all(facs[i + 1] % facs[i] == 0 for i in range(len(facs) - 1))

    def test_against_naive_oracle(self):
        random.seed(11)
        for _ in range(60):
            rows = random.randrange(1, 7)
            cols = random.randrange(1, 7)
            entries = [[random.randrange(-30, 31) for _ in range(cols)] for _ in range(rows)]
            s = smith_normal_form(IntegerMatrix(entries), verify=True)
            assert list(s.invariant_factors) == naive_invariant_factors(entries)

    def test_against_minor_gcd_oracle(self):
        random.seed(13)
        for _ in range(40):
            n = random.randrange(1, 5)
            entries = [[random.randrange(-9, 10) for _ in range(n)] for _ in range(n)]
            s = smith_normal_form(IntegerMatrix(entries))
            assert list(s.invariant_factors) == minor_gcd_invariant_factors(entries)


class TestBoundaryMatrices:
    def test_minimal_circle_boundary_is_zero(self):
        assert boundary_matrix(minimal_circle(), 1).entries == ((0,),)

    def test_alternating_signs(self):
        x = simplex_boundary(3)  # triangle as a circle
        d1 = boundary_matrix(x, 1)
        assert all(sum(abs(v) for v in row) <= 2 for row in d1.entries)
        # each edge column sums to 0 with signs -1, +1
        for j in range(d1.cols):
            assert sum(d1.entries[i][j] for i in range(d1.rows)) == 0

    def test_out_of_range(self):
        with pytest.raises(DimensionOutOfRangeError):
            boundary_matrix(minimal_circle(), 2)
        with pytest.raises(DimensionOutOfRangeError):
            boundary_matrix(minimal_circle(), 0)


SPHERE_TABLE = [
    (hyperoctahedron, 2, 1),
    (hyperoctahedron, 3, 2),
    (hyperoctahedron, 4, 3),
    (simplex_boundary, 3, 1),
    (simplex_boundary, 4, 2),
    (simplex_boundary, 5, 3),
]


class TestHomology:
    @pytest.mark.parametrize("builder,size,dim", SPHERE_TABLE)
    def test_spheres(self, builder, size, dim):
        x = builder(size)
        for k in range(dim + 1):
            h = homology(x, k)
            expected_rank = 1 if k in (0, dim) else 0
            assert (h.free_rank, h.torsion) == (expected_rank, ())

    def test_projective_plane(self):
        p = rp2()
        assert homology(p, 0).to_dict() == {"ring": "Z", "free_rank": 1, "torsion": []}
        assert homology(p, 1).to_dict() == {"ring": "Z", "free_rank": 0, "torsion": [2]}
        assert homology(p, 2).to_dict() == {"ring": "Z", "free_rank": 0, "torsion": []}

    def test_projective_plane_rationally_trivial(self):
        p = rp2()
        assert homology(p, 1, "Q").free_rank == 0
        assert homology(p, 2, "Q").free_rank == 0

    def test_projective_plane_mod_2(self):
        p = rp2()
        assert [homology(p, k, "Fp", p=2).free_rank for k in (0, 1, 2)] == [1, 1, 1]
        assert [homology(p, k, "Fp", p=3).free_rank for k in (0, 1, 2)] == [1, 0, 0]

    def test_circle(self):
        c = minimal_circle()
        assert homology(c, 1).free_rank == 1
        assert homology(c, 0).free_rank == 1

    def test_disconnected_h0(self):
        x = build_complex([Cell("a", 0, ()), Cell("b", 0, ())])
        assert homology(x, 0).free_rank == 2

    def test_bad_ring(self):
        with pytest.raises(ValueError):
            homology(minimal_circle(), 0, "R")
        with pytest.raises(ValueError):
            homology(minimal_circle(), 0, "Fp", p=4)
        with pytest.raises(ValueError):
            homology(minimal_circle(), 0, "Fp")

    def test_k_out_of_range_is_zero_group(self):
        assert homology(minimal_circle(), 2).is_zero
        assert homology(minimal_circle(), -1).is_zero


class TestCohomology:
    def test_sphere(self):
        x = hyperoctahedron(3)
        assert cohomology(x, 2).free_rank == 1
        assert cohomology(x, 2).torsion == ()

    def test_projective_plane_torsion_shifts_up(self):
        p = rp2()
        assert cohomology(p, 1).to_dict() == {"ring": "Z", "free_rank": 0, "torsion": []}
        assert cohomology(p, 2).to_dict() == {"ring": "Z", "free_rank": 0, "torsion": [2]}

    def test_rational_cohomology_matches_betti(self):
        for x in (hyperoctahedron(3), rp2(), simplex_boundary(4)):
            for k in range(x.dimension + 1):
                assert cohomology(x, k, "Q").free_rank == homology(x, k, "Q").free_rank


class TestDoubleCoverPredicate:
    def test_with_f2_cohomology(self):
        assert has_connected_double_cover(rp2())
        assert has_connected_double_cover(minimal_circle())
        assert not has_connected_double_cover(simplex_boundary(4))
        assert not has_connected_double_cover(suspension(rp2()))

    def test_needs_connected_input(self):
        x = build_complex([Cell("a", 0, ()), Cell("b", 0, ())])
        with pytest.raises(NotConnectedError):
            has_connected_double_cover(x)
