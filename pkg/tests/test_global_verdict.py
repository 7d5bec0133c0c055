import pytest
from dataclasses import replace
from fractions import Fraction

from cli.generators import generate
from core.errors import DegenerateSection, DimensionTooLow, InputInsideS, InternalInconsistency
from core.exact_geometry import Hyperplane, SphPoint, SubspaceBasis
from core.global_verdict import (
    ConvexConeBoundary, ConvexEmbedding, GluedHemispheres, GreatSubsphere, NotLocallyConvex, StructuralReject,
    BoundaryPresentNoGlobalClaim, a_convexity_probe, check_spherical_closed, check_surface, directrix_of_cone,
    WitnessCheck, build_witness, generatrix_section, verify_arc, verify_witness,
)
from core.local_convexity import local_report
from core.surface_model import Mode, PLSurface, validate
from tests.shapes import (
    DENTED, SQUARE, brute_force_hull, cross_polytope, cube, cube_with_coned_top, doubled, octant_sphere,
    perturbed_cube, prism_sides, simplex_boundary, square_cone_sphere, triangulated_cube, wedge_cone_sphere,
)
from utils.prng import SplitMix64


def _cube_halfspaces():
    found = set()
    for i in range(3):
        e = tuple(int(j == i) for j in range(3))
        found.add(Hyperplane(e, Fraction(1)))
        found.add(Hyperplane(tuple(-c for c in e), Fraction(0)))
    return found


def _disjoint_union(a: PLSurface, b: PLSurface) -> PLSurface:
    shift = len(a.vertices)
    facets = tuple(a.facets) + tuple(tuple(i + shift for i in f) for f in b.facets)
    return PLSurface(a.ambient_dim, a.mode, tuple(a.vertices) + tuple(b.vertices), facets)


# ===== Euclidean =====

@pytest.mark.parametrize("surface", [cube(3), triangulated_cube(), cube_with_coned_top()],
                         ids=["cube", "triangulated", "coned-top"])
def test_cube_like_surfaces_embed_convexly(surface):
    verdict = check_surface(surface)
    assert isinstance(verdict, ConvexEmbedding)
    assert verdict.exit_code == 0
    assert set(verdict.witness.halfspaces) == _cube_halfspaces()
    assert verdict.exposed_vertex == 0
    assert verify_witness(surface, verdict.witness)


def test_witness_matches_brute_force_hull():
    s = simplex_boundary(4)
    verdict = check_surface(s)
    assert isinstance(verdict, ConvexEmbedding)
    assert set(verdict.witness.halfspaces) == brute_force_hull(s.vertices)


def test_translated_cube_keeps_verdict():
    verdict = check_surface(cube(3, translate=[5, -2, 7]))
    assert verdict.tag == "ConvexEmbedding"
    assert Hyperplane((1, 0, 0), Fraction(6)) in verdict.witness.halfspaces


def test_perturbed_cube_is_not_locally_convex():
    s = perturbed_cube()
    verdict = check_surface(s)
    assert isinstance(verdict, NotLocallyConvex)
    assert verdict.exit_code == 1
    cert = verdict.certificate
    assert 7 in cert.face or any(7 in s.facets[g] for g in cert.facets)


def test_three_facets_on_a_ridge_is_structural():
    base = simplex_boundary(3)
    s = PLSurface(3, Mode.EUCLIDEAN, base.vertices + ((1, 1, -1),), base.facets + ((0, 1, 4),))
    verdict = check_surface(s)
    assert isinstance(verdict, StructuralReject)
    assert verdict.exit_code == 2


def test_two_euclidean_components_are_structural():
    verdict = check_surface(doubled(cube(3)))
    assert isinstance(verdict, StructuralReject)
    assert verdict.reason == "surface is not connected"


def test_dimension_too_low():
    with pytest.raises(DimensionTooLow) as info:
        check_surface(cube(2))
    assert info.value.exit_code == 3


@pytest.mark.parametrize("polygon,code", [(SQUARE, 0), (DENTED, 1)], ids=["square", "dented"])
def test_bordered_surfaces_get_local_report_only(polygon, code):
    verdict = check_surface(prism_sides(polygon))
    assert isinstance(verdict, BoundaryPresentNoGlobalClaim)
    assert verdict.exit_code == code


# ===== witness re-verification =====

def test_verify_witness_missing_halfspace():
    s = cube(3)
    w = check_surface(s).witness
    check = verify_witness(s, replace(w, halfspaces=w.halfspaces[1:]))
    assert not check
    assert check.clause == "a"


def test_verify_witness_extra_halfspace():
    s = cube(3)
    w = check_surface(s).witness
    extra = Hyperplane((1, 1, 1), Fraction(3))
    check = verify_witness(s, replace(w, halfspaces=w.halfspaces + (extra,)))
    assert not check
    assert check.clause == "b"
    assert check.index == len(w.halfspaces)


def test_verify_witness_vertex_outside():
    s = cube(3)
    w = check_surface(s).witness
    flipped = tuple(h.flipped() if h == Hyperplane((1, 0, 0), Fraction(1)) else h for h in w.halfspaces)
    check = verify_witness(s, replace(w, halfspaces=flipped))
    assert not check
    assert check.clause == "c"


def _open_corner_cut_cube() -> PLSurface:
    """Unit cube with the (1, 1, 1) corner cut off and the cut triangle left open."""
    half = Fraction(1, 2)
    vertices = list(cube(3).vertices[:7]) + [(half, 1, 1), (1, half, 1), (1, 1, half)]
    facets = (
        (0, 1, 2, 3), (0, 1, 4, 5), (0, 2, 4, 6),
        (4, 5, 6, 8, 9), (2, 3, 6, 7, 9), (1, 3, 5, 7, 8),
    )
    return PLSurface(3, Mode.EUCLIDEAN, tuple(vertices), facets, allow_boundary=True)


def test_verify_witness_rejects_facet_vertex_missing_from_surface():
    s = _open_corner_cut_cube()
    w = check_surface(cube(3)).witness
    check = verify_witness(s, w)
    assert not check
    assert check.clause == "d"
    corner_planes = {Hyperplane(e, Fraction(1)) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1))}
    assert w.halfspaces[check.index] in corner_planes


def test_failed_verification_is_an_internal_inconsistency(mocker):
    mocker.patch("core.global_verdict.verify_witness", return_value=WitnessCheck(False, "d", 0))
    with pytest.raises(InternalInconsistency):
        check_surface(cube(3))


@pytest.mark.parametrize("surface", [
    cube(3), triangulated_cube(), cube_with_coned_top(), octant_sphere(), doubled(octant_sphere()),
    wedge_cone_sphere(), square_cone_sphere(), cross_polytope(3, Mode.SPHERICAL),
])
def test_witnesses_of_accepted_surfaces_verify(surface):
    verdict = check_surface(surface)
    assert verify_witness(surface, verdict.witness)


# ===== oracle agreement =====

def test_five_dimensional_hull_matches_oracle():
    generated = generate("hull", {"n": "5", "m": "9", "bound": "20"}, 1)
    verdict = check_surface(generated.surface)
    assert isinstance(verdict, ConvexEmbedding)
    assert set(verdict.witness.halfspaces) == brute_force_hull(generated.surface.vertices)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_perturbed_four_dimensional_hull_agrees_with_oracle(seed):
    generated = generate("perturbed-hull", {"n": "4", "m": "10", "bound": "50"}, seed)
    s = generated.surface
    moved = generated.meta["perturbed_vertex"]
    verdict = check_surface(s)
    assert isinstance(verdict, NotLocallyConvex)
    assert all(h.value(s.vertices[moved]) < 0 for h in brute_force_hull(s.vertices))
    cert = verdict.certificate
    assert moved in cert.face or any(moved in s.facets[g] for g in cert.facets)


# ===== spherical =====

def test_octant_is_a_pointed_cone_boundary():
    verdict = check_surface(octant_sphere())
    assert type(verdict) is ConvexConeBoundary
    assert verdict.jn.pointed
    assert verdict.jn.directrix_dim == -1
    assert verdict.jn.multiplicity == 1
    assert verdict.strict_vertex == 0
    assert len(verdict.witness.halfspaces) == 4
    assert all(h.offset == 0 for h in verdict.witness.halfspaces)


def test_doubled_octant_has_multiplicity_two():
    verdict = check_surface(doubled(octant_sphere()))
    assert type(verdict) is ConvexConeBoundary
    assert verdict.jn.multiplicity == 2
    assert verdict.exit_code == 0


def test_components_with_different_cones_are_rejected():
    verdict = check_spherical_closed(_disjoint_union(octant_sphere(), cross_polytope(3, Mode.SPHERICAL)))
    assert isinstance(verdict, StructuralReject)
    assert verdict.reason == "components bound different cones"


def test_wedge_is_two_glued_hemispheres():
    verdict = check_surface(wedge_cone_sphere())
    assert isinstance(verdict, GluedHemispheres)
    assert isinstance(verdict, ConvexConeBoundary)
    assert verdict.jn.lineality_dim == 2
    assert verdict.jn.directrix_dim == 1
    assert verdict.strict_vertex is None
    assert set(verdict.witness.halfspaces) == {Hyperplane((0, 0, 1, -1)), Hyperplane((0, 0, -1, -1))}
    plane = SubspaceBasis.spanning([(1, 0, 0, 0), (0, 1, 0, 0)], 4)
    assert directrix_of_cone(verdict.witness).same_space(plane)


def test_square_cone_has_a_four_cell_generatrix():
    verdict = check_surface(square_cone_sphere())
    assert type(verdict) is ConvexConeBoundary
    assert verdict.jn.lineality_dim == 1
    generatrix = verdict.jn.generatrix
    assert generatrix.ambient_dim == 2
    assert len(generatrix.facets) == 4
    assert validate(generatrix).passes()


def test_great_sphere():
    s = cross_polytope(3, Mode.SPHERICAL)
    verdict = check_surface(s)
    assert isinstance(verdict, GreatSubsphere)
    assert verdict.jn.generatrix is None
    assert verdict.jn.lineality_dim == 3
    with pytest.raises(DegenerateSection):
        generatrix_section(s, verdict.witness)


def test_pointed_generatrix_is_the_surface():
    s = octant_sphere()
    verdict = check_surface(s)
    assert generatrix_section(s, verdict.witness) is s


# ===== A-convexity probe =====

@pytest.fixture
def octant_witness():
    return check_surface(octant_sphere()).witness


def test_probe_minor_arc(octant_witness):
    cert = a_convexity_probe(octant_witness, SphPoint((-1, 0, 0, 0)), SphPoint((0, -1, 0, 0)))
    assert cert.kind == "minor"
    assert cert.verified
    assert cert.interior == SphPoint((-1, -1, 0, 0))


def test_probe_major_arc(octant_witness):
    cert = a_convexity_probe(octant_witness, SphPoint((1, 1, 1, 0)), SphPoint((1, 1, 0, 1)))
    assert cert.kind == "major"
    assert cert.interior == SphPoint((-2, -2, -1, -1))


def test_probe_same_point(octant_witness):
    x = SphPoint((-1, 0, 0, 0))
    cert = a_convexity_probe(octant_witness, x, x)
    assert cert.kind == "point"
    assert cert.pieces() == []


def test_probe_antipodal_on_supporting_hyperplane(octant_witness):
    cert = a_convexity_probe(octant_witness, SphPoint((1, 0, 0, 0)), SphPoint((-1, 0, 0, 0)))
    assert cert.kind == "supporting"
    assert cert.interior == SphPoint((0, 0, 1, 0))
    assert len(cert.pieces()) == 2


def test_probe_antipodal_off_supporting_hyperplanes(octant_witness):
    cert = a_convexity_probe(octant_witness, SphPoint((1, 1, 1, -1)), SphPoint((-1, -1, -1, 1)))
    assert cert.kind == "antipodal"
    assert cert.interior == SphPoint((1, 0, 0, 0))


def test_probe_rejects_interior_endpoint(octant_witness):
    with pytest.raises(InputInsideS):
        a_convexity_probe(octant_witness, SphPoint((1, 1, 1, 1)), SphPoint((-1, 0, 0, 0)))


def _points_outside(witness, n, rng):
    normals = witness.linear_normals()
    points = []
    while len(points) < 2:
        ray = tuple(rng.randint(-9, 9) for _ in range(n + 1))
        if any(ray) and any(sum(a * y for a, y in zip(normal, ray)) >= 0 for normal in normals):
            points.append(SphPoint(ray))
    return points


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("seed", [1, 2, 3, 4, 5])
def test_random_arcs_avoid_the_open_cone(n, seed):
    s = generate("sph-cone", {"n": str(n), "lineality": "0"}, seed).surface
    witness = build_witness(s, local_report(s, jobs=1).normals)
    x, x2 = _points_outside(witness, n, SplitMix64(seed))
    cert = a_convexity_probe(witness, x, x2)
    assert cert.verified
    assert verify_arc(witness, cert)
