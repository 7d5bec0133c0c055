import pytest
from fractions import Fraction
from hypothesis import assume, given, strategies as st

from core.errors import Degenerate, DimensionMismatch, ZeroVector
from core.exact_geometry import (
    Hyperplane, SphPoint, SubspaceBasis, antipodal, canonical_sph, det, dot, format_scalar, hyperplane_through,
    nullspace, orientation, orthogonal_complement, parse_scalar, primitive, rank, side, sign_normalized, solve, sub,
)


small_ints = st.integers(min_value=-20, max_value=20)
fractions = st.fractions(min_value=-50, max_value=50, max_denominator=30)


@pytest.mark.parametrize("text,expected", [
    ("3", Fraction(3)),
    ("-7/21", Fraction(-1, 3)),
    ("+4/2", Fraction(2)),
    ("0/5", Fraction(0)),
])
def test_parse_scalar(text, expected):
    assert parse_scalar(text) == expected


@pytest.mark.parametrize("text", ["1.5", "a/b", "1//2", "", "1/-2"])
def test_parse_scalar_rejects_malformed(text):
    with pytest.raises(ValueError):
        parse_scalar(text)


def test_parse_scalar_zero_denominator():
    with pytest.raises(ZeroDivisionError):
        parse_scalar("1/0")


def test_format_scalar_is_canonical():
    assert format_scalar(Fraction(6, 4)) == "3/2"
    assert format_scalar(Fraction(-8, 4)) == "-2"
    assert format_scalar(0) == "0"


def test_orientation_of_standard_simplex():
    pts = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]
    assert orientation(pts) == 1
    assert orientation([pts[1], pts[0], pts[2], pts[3]]) == -1


def test_orientation_degenerate_points():
    assert orientation([(0, 0), (1, 1), (2, 2)]) == 0


def test_orientation_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        orientation([(0, 0), (1, 0)])


def test_hyperplane_through_unit_points():
    h = hyperplane_through([(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    assert h.normal == (1, 1, 1)
    assert h.offset == 1
    assert side(h, (0, 0, 0)) == -1
    assert side(h, (1, 1, 1)) == 1


def test_hyperplane_through_collinear_points():
    with pytest.raises(Degenerate):
        hyperplane_through([(0, 0, 0), (1, 1, 1), (2, 2, 2)])


def test_hyperplane_make_is_sign_canonical():
    h = Hyperplane.make((-2, 4), -6)
    assert h.normal == (1, -2)
    assert h.offset == 3


def test_hyperplane_make_oriented_keeps_direction():
    h = Hyperplane.make((-2, 4), -6, oriented=True)
    assert h.normal == (-1, 2)
    assert h.offset == -3


def test_hyperplane_from_linear_euclidean():
    # (a, c) . (x, 1) <= 0 is a . x <= -c
    h = Hyperplane.from_linear((2, 0, 0, -2), mode_euclidean=True)
    assert h == Hyperplane((1, 0, 0), Fraction(1))
    assert h.linear(True) == (1, 0, 0, -1)


def test_zero_normal_rejected():
    with pytest.raises(ZeroVector):
        Hyperplane.make((0, 0, 0), 1)


def test_primitive_and_sign_normalized():
    assert primitive((Fraction(2, 3), Fraction(-4, 3))) == (1, -2)
    assert sign_normalized((Fraction(-2, 3), Fraction(4, 3))) == (1, -2)
    with pytest.raises(ZeroVector):
        primitive((0, 0))


def test_nullspace_basis():
    basis = nullspace([(1, 1, 0), (0, 1, 1)], 3)
    assert len(basis) == 1
    assert all(dot(b, row) == 0 for b in basis for row in [(1, 1, 0), (0, 1, 1)])


def test_solve_singular_returns_none():
    assert solve([(1, 2), (2, 4)], (1, 2)) is None
    assert solve([(2, 0), (0, 4)], (1, 1)) == (Fraction(1, 2), Fraction(1, 4))


def test_subspace_complement_and_coordinates():
    plane = SubspaceBasis.spanning([(1, 0, 0, 0), (0, 1, 0, 0)], 4)
    comp = orthogonal_complement(plane)
    assert comp.dim == 2
    assert all(dot(a, b) == 0 for a in plane.basis for b in comp.basis)
    assert comp.coordinates((5, 7, 0, 3)) == comp.coordinates((0, 0, 0, 3))


def test_subspace_rejects_dependent_basis():
    with pytest.raises(Degenerate):
        SubspaceBasis(((1, 0), (2, 0)), 2)


def test_same_space_ignores_basis_choice():
    a = SubspaceBasis.spanning([(1, 1, 0), (0, 0, 1)], 3)
    b = SubspaceBasis.spanning([(2, 2, 3), (1, 1, -1)], 3)
    assert a.same_space(b)


def test_sph_points():
    p = canonical_sph((Fraction(2), 0, 0))
    assert p == SphPoint((1, 0, 0))
    assert antipodal(p, -p)
    assert not antipodal(p, p)
    with pytest.raises(ZeroVector):
        canonical_sph((0, 0, 0))


# ===== properties =====

@given(st.lists(st.lists(small_ints, min_size=3, max_size=3), min_size=3, max_size=3))
def test_det_sign_flips_on_row_swap(rows):
    swapped = [rows[1], rows[0], rows[2]]
    assert det(swapped) == -det(rows)


@given(st.lists(st.lists(small_ints, min_size=4, max_size=4), min_size=1, max_size=4))
def test_rank_nullity(rows):
    basis = nullspace(rows, 4)
    assert rank(rows) + len(basis) == 4
    assert all(dot(b, r) == 0 for b in basis for r in rows)


@given(st.lists(fractions, min_size=3, max_size=3).filter(any), st.integers(min_value=1, max_value=1000))
def test_primitive_ignores_positive_scaling(vector, c):
    assert primitive(vector) == primitive([c * x for x in vector])


@given(fractions)
def test_format_then_parse_is_identity(value):
    assert parse_scalar(format_scalar(value)) == value


points3 = st.lists(st.lists(fractions, min_size=3, max_size=3), min_size=4, max_size=4)


@given(points3)
def test_orientation_alternates_under_transposition(pts):
    swapped = [pts[0], pts[2], pts[1], pts[3]]
    assert orientation(swapped) == -orientation(pts)
    assert orientation([pts[1], pts[0], pts[2], pts[3]]) == -orientation(pts)


@given(points3, st.integers(min_value=1, max_value=3), st.integers(min_value=1, max_value=3), small_ints)
def test_orientation_ignores_added_point_differences(pts, i, j, c):
    assume(i != j)
    moved = list(pts)
    moved[i] = [a + c * (b - z) for a, b, z in zip(pts[i], pts[j], pts[0])]
    assert orientation(moved) == orientation(pts)


@given(st.lists(st.lists(fractions, min_size=3, max_size=3), min_size=3, max_size=3))
def test_hyperplane_through_contains_its_points(pts):
    assume(rank([sub(p, pts[0]) for p in pts[1:]]) == 2)
    h = hyperplane_through(pts)
    assert all(side(h, p) == 0 for p in pts)


@given(st.lists(st.lists(small_ints, min_size=4, max_size=4), min_size=1, max_size=3))
def test_double_complement_is_the_subspace(rows):
    assume(any(any(r) for r in rows))
    v = SubspaceBasis.spanning(rows, 4)
    assert orthogonal_complement(orthogonal_complement(v)).same_space(v)
