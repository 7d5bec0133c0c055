"""Global convexity verdicts from local convexity plus a covering count.

A closed, connected, locally convex surface is the boundary of the cone
K cut out by its oriented facet hyperplanes once a single generic probe
meets it exactly once (Euclidean) or once per sheet (spherical). The
witness K is exact and re-checkable by ``verify_witness``; spherical
verdicts also carry the lineality decomposition of K.
"""
from dataclasses import dataclass
from typing import ClassVar, Dict, Iterable, List, Optional, Sequence, Tuple

from core.errors import DegenerateSection, DimensionTooLow, InputInsideS, InternalInconsistency
from core.exact_geometry import (
    Hyperplane, IntVector, SphPoint, SubspaceBasis, Vector, add, antipodal, as_vector, dot, orthogonal_complement,
    primitive, rank, scale, sign_normalized, sub,
)
from core.exact_lp import face_generators, find_point, lineality_basis, section_rays
from core.local_convexity import FaceCertificate, LocalReport, exposed_vertex, local_report
from core.surface_model import (
    Mode, PLSurface, ValidationReport, covering_multiplicity, folded_ridge, sheet_count, validate,
)
from utils.logger import setup_logger

logger = setup_logger(__name__)


# ===== Witness =====

@dataclass(frozen=True)
class ConeWitness:
    """Polyhedral cone K = intersection of halfspaces ``normal . x <= offset``.

    Spherical witnesses live in R^{n+1} with zero offsets. Euclidean
    witnesses are the convex body in R^n itself.
    """

    halfspaces: Tuple[Hyperplane, ...]
    lineality: SubspaceBasis
    pointed_part_dim: int
    spherical: bool = True

    def linear_normals(self) -> List[Vector]:
        return [h.linear(not self.spherical) for h in self.halfspaces]

    def contains(self, x: Sequence) -> bool:
        return all(h.value(x) <= 0 for h in self.halfspaces)


def build_witness(s: PLSurface, normals: Iterable[IntVector]) -> ConeWitness:
    """Deduplicated oriented facet hyperplanes of ``s`` as a cone witness."""
    euclid = s.is_euclidean
    halfspaces = sorted(
        {Hyperplane.from_linear(nu, euclid, oriented=True) for nu in normals},
        key=Hyperplane.sort_key,
    )
    space_dim = s.ambient_dim if euclid else s.cone_dim
    directions = [h.normal for h in halfspaces]
    lineality = SubspaceBasis.spanning(lineality_basis(directions, space_dim), space_dim)
    return ConeWitness(
        halfspaces=tuple(halfspaces),
        lineality=lineality,
        pointed_part_dim=space_dim - lineality.dim,
        spherical=not euclid,
    )


def directrix_of_cone(w: ConeWitness) -> SubspaceBasis:
    """Lineality space of K: the common zero set of all facet normals."""
    return w.lineality.canonical()


@dataclass(frozen=True)
class WitnessCheck:
    """Outcome of re-checking a witness; ``clause`` names the failing condition."""

    ok: bool
    clause: str = ""
    index: int = -1
    sheets: int = 0

    def __bool__(self) -> bool:
        return self.ok


def _facet_vertices_on_surface(s: PLSurface, w: ConeWitness, j: int, cells: Sequence[int]) -> bool:
    """Every vertex of the j-th facet of K is a vertex of a surface cell in that hyperplane.

    Spherical facets are compared modulo the lineality of K, where the
    facet cone is pointed and its extreme rays are unique.
    """
    own = {v for g in cells for v in s.facets[g]}
    if not w.spherical:
        le = [(h.normal, h.offset) for h in w.halfspaces]
        points, rays, lines = face_generators(s.ambient_dim, eq=[le[j]], le=le)
        surface_points = {s.vertices[v] for v in own}
        return not rays and not lines and all(p in surface_points for p in points)

    complement = orthogonal_complement(w.lineality)
    le = [(tuple(dot(a, c) for c in complement.basis), 0) for a in w.linear_normals()]
    _, rays, lines = face_generators(complement.dim, eq=[le[j]], le=le)
    directions = set()
    for v in own:
        coords = complement.coordinates(s.rays[v])
        if any(coords):
            directions.add(primitive(coords))
    return not lines and all(r in directions for r in rays)


def verify_witness(s: PLSurface, w: ConeWitness) -> WitnessCheck:
    """Independently re-check that ``s`` covers the boundary of K.

    (a) every facet lies in a witness hyperplane, (b) every witness
    hyperplane carries a facet, (c) every vertex lies in K, (d) within
    each hyperplane the vertices of the facet of K are surface vertices,
    every ridge of a cell there has two unfolded neighbours, and the
    cells cover the facet the same positive number of times.
    """
    euclid = s.is_euclidean
    lines = [sign_normalized(n) for n in w.linear_normals()]
    homogeneous = [as_vector(n) for n in w.linear_normals()]

    members: Dict[IntVector, List[int]] = {line: [] for line in lines}
    for g, cell in enumerate(s.cells):
        if not cell.ok or cell.normal not in members:
            return WitnessCheck(False, "a", g)
        members[cell.normal].append(g)

    for j, line in enumerate(lines):
        if not members[line]:
            return WitnessCheck(False, "b", j)

    for v in s.used_vertices:
        if any(dot(n, s.rays[v]) > 0 for n in homogeneous):
            return WitnessCheck(False, "c", v)

    sheets = None
    for j, line in enumerate(lines):
        in_plane = set(members[line])
        if not _facet_vertices_on_surface(s, w, j, members[line]):
            return WitnessCheck(False, "d", j)
        for ridge, fs in s.ridge_map.items():
            if not in_plane & set(fs):
                continue
            if len(fs) != 2:
                return WitnessCheck(False, "d", j)
            if set(fs) <= in_plane and folded_ridge(s, ridge, fs[0], fs[1]):
                return WitnessCheck(False, "d", j)
        count = sheet_count(s, members[line][0])
        if count < 1 or (sheets is not None and count != sheets):
            return WitnessCheck(False, "d", j, count)
        sheets = count
    logger.debug(f"Witness verified: {len(lines)} halfspaces, {sheets} sheet(s), euclidean={euclid}")
    return WitnessCheck(True, sheets=sheets or 0)


# ===== Verdicts =====

@dataclass(frozen=True)
class JNDecomposition:
    """S = L * T: directrix L = S^d and generatrix T in S^{n-d-1}.

    ``directrix_dim`` is -1 for pointed cones. The generatrix is None when
    the lineality fills the hyperplane (a great subsphere).
    """

    directrix_dim: int
    directrix: SubspaceBasis
    generatrix: Optional[PLSurface]
    multiplicity: int

    @property
    def lineality_dim(self) -> int:
        return self.directrix_dim + 1

    @property
    def pointed(self) -> bool:
        return self.directrix_dim < 0


@dataclass(frozen=True)
class Verdict:
    tag: ClassVar[str] = "Verdict"
    positive: ClassVar[bool] = False

    @property
    def exit_code(self) -> int:
        return 0 if self.positive else 1


@dataclass(frozen=True)
class ConvexEmbedding(Verdict):
    tag: ClassVar[str] = "ConvexEmbedding"
    positive: ClassVar[bool] = True

    witness: ConeWitness
    local: LocalReport
    exposed_vertex: int
    validation: Optional[ValidationReport] = None


@dataclass(frozen=True)
class ConvexConeBoundary(Verdict):
    tag: ClassVar[str] = "ConvexConeBoundary"
    positive: ClassVar[bool] = True

    witness: ConeWitness
    jn: JNDecomposition
    local: LocalReport
    strict_vertex: Optional[int] = None
    validation: Optional[ValidationReport] = None


@dataclass(frozen=True)
class GreatSubsphere(ConvexConeBoundary):
    tag: ClassVar[str] = "GreatSubsphere"


@dataclass(frozen=True)
class GluedHemispheres(ConvexConeBoundary):
    tag: ClassVar[str] = "GluedHemispheres"


@dataclass(frozen=True)
class NotLocallyConvex(Verdict):
    tag: ClassVar[str] = "NotLocallyConvex"

    certificate: FaceCertificate
    local: LocalReport
    validation: Optional[ValidationReport] = None


@dataclass(frozen=True)
class StructuralReject(Verdict):
    tag: ClassVar[str] = "StructuralReject"

    validation: ValidationReport
    reason: str = ""

    @property
    def exit_code(self) -> int:
        return 2


@dataclass(frozen=True)
class BoundaryPresentNoGlobalClaim(Verdict):
    """Local report for a surface with boundary; no global statement is made."""

    tag: ClassVar[str] = "BoundaryPresentNoGlobalClaim"

    local: LocalReport
    validation: ValidationReport

    @property
    def exit_code(self) -> int:
        return 0 if self.local.locally_convex else 1


# ===== Checkers =====

def _structural_reason(rep: ValidationReport, require_connected: bool) -> str:
    if rep.facet_defects:
        return "degenerate or non-convex facet"
    if rep.ridge_defects:
        return "ridge not shared by exactly two facets"
    if rep.vertex_defects:
        return "vertex defect"
    if require_connected and not rep.connected:
        return "surface is not connected"
    if not rep.closed:
        return "surface has boundary"
    return "not a pseudomanifold"


def check_euclidean_closed(s: PLSurface) -> Verdict:
    """Decide whether a closed Euclidean surface bounds a convex body.

    Raises:
        DimensionTooLow: n < 3.
        InternalInconsistency: the constructed witness fails re-verification.
    """
    if s.ambient_dim < 3:
        raise DimensionTooLow(f"Euclidean checks need n >= 3, got n = {s.ambient_dim}")
    rep = validate(s)
    if not rep.passes(require_connected=True) or not rep.closed:
        reason = _structural_reason(rep, True)
        logger.info(f"Structural reject: {reason}")
        return StructuralReject(rep, reason)

    local = local_report(s)
    if not local.locally_convex:
        return NotLocallyConvex(local.first_violation, local, rep)

    witness = build_witness(s, local.normals)
    check = verify_witness(s, witness)
    if not check:
        raise InternalInconsistency(f"witness fails clause ({check.clause}) at index {check.index}")
    if check.sheets != 1:
        raise InternalInconsistency(f"locally convex closed surface covers {check.sheets} sheets")

    v = exposed_vertex(s)
    logger.info(f"✅ Convex embedding: {len(witness.halfspaces)} supporting halfspaces, exposed vertex {v}")
    return ConvexEmbedding(witness=witness, local=local, exposed_vertex=v, validation=rep)


def _component_surface(s: PLSurface, component: Sequence[int]) -> PLSurface:
    return PLSurface(
        ambient_dim=s.ambient_dim,
        mode=s.mode,
        vertices=s.vertices,
        facets=tuple(s.facets[g] for g in component),
        allow_boundary=s.allow_boundary,
    )


def check_spherical_closed(s: PLSurface) -> Verdict:
    """Decide whether a closed spherical surface is a convex cone boundary.

    Several components are allowed when they all cover the same cone;
    the covering multiplicity then counts them.

    Raises:
        DimensionTooLow: n < 3.
        InternalInconsistency: witness re-verification or the sheet count
            disagrees with the covering multiplicity.
    """
    if s.ambient_dim < 3:
        raise DimensionTooLow(f"spherical checks need n >= 3, got n = {s.ambient_dim}")
    rep = validate(s)
    if not rep.passes(require_connected=False) or not rep.closed:
        reason = _structural_reason(rep, False)
        logger.info(f"Structural reject: {reason}")
        return StructuralReject(rep, reason)

    local = local_report(s)
    if not local.locally_convex:
        return NotLocallyConvex(local.first_violation, local, rep)

    comps = s.components
    witnesses = [build_witness(s, [local.normals[g] for g in comp]) for comp in comps]
    if any(w.halfspaces != witnesses[0].halfspaces for w in witnesses[1:]):
        return StructuralReject(rep, "components bound different cones")
    witness = witnesses[0]

    check = verify_witness(s, witness)
    if not check:
        raise InternalInconsistency(f"witness fails clause ({check.clause}) at index {check.index}")
    multiplicity = covering_multiplicity(s)
    if multiplicity != check.sheets:
        raise InternalInconsistency(
            f"covering multiplicity {multiplicity} differs from sheet count {check.sheets}"
        )

    strict = None
    for comp in comps:
        v = exposed_vertex(s, comp)
        if v is None:
            continue
        comp_mult = covering_multiplicity(_component_surface(s, comp))
        if comp_mult != 1:
            raise InternalInconsistency(f"component with strict vertex {v} covers {comp_mult} times")
        if strict is None:
            strict = v

    lineality = directrix_of_cone(witness)
    ell = lineality.dim
    n = s.ambient_dim
    if ell >= n:
        jn = JNDecomposition(ell - 1, lineality, None, multiplicity)
        logger.info(f"✅ Great subsphere covered {multiplicity} time(s)")
        return GreatSubsphere(witness=witness, jn=jn, local=local, strict_vertex=strict, validation=rep)

    generatrix = generatrix_section(s, witness)
    jn = JNDecomposition(ell - 1, lineality, generatrix, multiplicity)
    if ell == n - 1 and len(_distinct_cells(generatrix)) == 2:
        logger.info(f"✅ Two half great spheres glued along S^{ell - 1}, multiplicity {multiplicity}")
        return GluedHemispheres(witness=witness, jn=jn, local=local, strict_vertex=strict, validation=rep)
    logger.info(f"✅ Convex cone boundary: lineality {ell}, multiplicity {multiplicity}")
    return ConvexConeBoundary(witness=witness, jn=jn, local=local, strict_vertex=strict, validation=rep)


def check_with_boundary(s: PLSurface) -> BoundaryPresentNoGlobalClaim:
    """Local convexity at interior faces only; no global claim for bordered surfaces."""
    rep = validate(s)
    local = local_report(s)
    logger.info(f"Surface has {len(s.boundary_ridges())} boundary ridge(s); local check only")
    return BoundaryPresentNoGlobalClaim(local=local, validation=rep)


def check_surface(s: PLSurface) -> Verdict:
    """Route a surface to the checker matching its mode and boundary.

    Raises:
        DimensionTooLow: n < 3.
    """
    if s.ambient_dim < 3:
        raise DimensionTooLow(f"checks need n >= 3, got n = {s.ambient_dim}")
    rep = validate(s)
    if not rep.passes(require_connected=s.is_euclidean):
        return StructuralReject(rep, _structural_reason(rep, s.is_euclidean))
    if not rep.closed:
        return check_with_boundary(s)
    if s.is_euclidean:
        return check_euclidean_closed(s)
    return check_spherical_closed(s)


# ===== Directrix / generatrix =====

def _distinct_cells(s: PLSurface) -> set:
    return {tuple(sorted(s.rays[v] for v in f)) for f in s.facets}


def generatrix_section(s: PLSurface, w: ConeWitness) -> PLSurface:
    """Section of ``s`` by the orthogonal complement of the lineality of K.

    Returns ``s`` itself when K is pointed. Vertices are expressed in an
    exact basis of the complement, so the result lives in S^{n-d-1}.
    Repeated cells from different sheets are kept once per component.

    Raises:
        DegenerateSection: the lineality is n-dimensional or more.
    """
    lineality = directrix_of_cone(w)
    ell = lineality.dim
    if ell == 0:
        return s
    if ell >= s.ambient_dim:
        raise DegenerateSection(f"lineality dimension {ell} leaves no generatrix in S^{s.ambient_dim}")

    complement = orthogonal_complement(lineality)
    m = complement.dim
    vertex_index: Dict[Tuple[int, IntVector], int] = {}
    vertices: List[IntVector] = []
    facets: List[Tuple[int, ...]] = []
    for comp_id, comp in enumerate(s.components):
        seen = set()
        for g in comp:
            rays = section_rays(s.cells[g].rays, lineality.basis)
            if not rays or rank(rays) != m - 1:
                continue
            coords = tuple(sorted(primitive(complement.coordinates(r)) for r in rays))
            if coords in seen:
                continue
            seen.add(coords)
            face = []
            for c in coords:
                key = (comp_id, c)
                if key not in vertex_index:
                    vertex_index[key] = len(vertices)
                    vertices.append(c)
                face.append(vertex_index[key])
            facets.append(tuple(face))
    logger.debug(f"Generatrix section: {len(facets)} cells in S^{m - 1}")
    return PLSurface(ambient_dim=m - 1, mode=Mode.SPHERICAL, vertices=tuple(vertices), facets=tuple(facets))


# ===== A-convexity probe =====

@dataclass(frozen=True)
class ArcCertificate:
    """A great-circle path from ``start`` to ``end`` through ``interior``.

    ``kind`` is point, minor, major, antipodal or supporting. The path is
    the two arcs start -> interior -> end, each shorter than a semicircle.
    """

    start: SphPoint
    end: SphPoint
    interior: SphPoint
    kind: str
    verified: bool = False

    def pieces(self) -> List[Tuple[IntVector, IntVector]]:
        if self.kind == "point":
            return []
        return [(self.start.ray, self.interior.ray), (self.interior.ray, self.end.ray)]


def _outside_interior(normals: Sequence[Vector], y: Sequence) -> bool:
    return any(dot(a, y) >= 0 for a in normals)


def _arc_avoids_interior(normals: Sequence[Vector], p: Sequence, q: Sequence) -> bool:
    """No positive combination of p and q lies in the open cone int K."""
    le = [((-1, 0), 0), ((0, -1), 0)]
    le += [((dot(a, p), dot(a, q)), -1) for a in normals]
    return find_point(2, le=le) is None


def verify_arc(w: ConeWitness, cert: ArcCertificate) -> bool:
    """Re-check that every point of the certified path lies in S^n minus int K."""
    normals = w.linear_normals()
    points = [cert.start.ray, cert.end.ray, cert.interior.ray]
    if not all(_outside_interior(normals, y) for y in points):
        return False
    return all(_arc_avoids_interior(normals, p, q) for p, q in cert.pieces())


def _independent_axis(x: Sequence, within: Optional[Sequence] = None) -> IntVector:
    """First coordinate axis (projected into ``within``^perp) independent of x."""
    dim = len(x)
    for k in range(dim):
        e = tuple(int(i == k) for i in range(dim))
        if within is not None:
            e = sub(scale(dot(within, within), e), scale(within[k], within))
        if any(e) and rank([x, e]) == 2:
            return primitive(e)
    raise InternalInconsistency("no axis independent of the given point")


def a_convexity_probe(w: ConeWitness, x: SphPoint, x2: SphPoint) -> ArcCertificate:
    """Connect two points outside int K by a path that stays outside int K.

    Raises:
        InputInsideS: either point lies in the open cone.
        InternalInconsistency: the constructed path fails verification.
    """
    normals = w.linear_normals()
    if not _outside_interior(normals, x.ray) or not _outside_interior(normals, x2.ray):
        raise InputInsideS("probe endpoints must lie outside the open cone")

    if x == x2:
        return ArcCertificate(x, x2, x, "point", verified=True)

    if antipodal(x, x2):
        supporting = next((a for a in normals if dot(a, x.ray) == 0), None)
        if supporting is not None:
            middle = _independent_axis(x.ray, supporting)
            kind = "supporting"
        else:
            u = _independent_axis(x.ray)
            minus_x = tuple(-c for c in x.ray)
            free = _arc_avoids_interior(normals, x.ray, u) and _arc_avoids_interior(normals, u, minus_x)
            middle = u if free else tuple(-c for c in u)
            kind = "antipodal"
    else:
        through = add(x.ray, x2.ray)
        if not _arc_avoids_interior(normals, x.ray, x2.ray):
            middle = primitive(scale(-1, through))
            kind = "major"
        else:
            middle = primitive(through)
            kind = "minor"

    cert = ArcCertificate(x, x2, SphPoint(primitive(middle)), kind)
    if not verify_arc(w, cert):
        raise InternalInconsistency(f"{kind} arc through {list(cert.interior.ray)} meets the open cone")
    return ArcCertificate(x, x2, cert.interior, kind, verified=True)
