"""Local convexity at every face of a validated surface.

Ridges are classified by dihedral signs, vertices by an explicit
supporting-hyperplane witness of their star and, from link dimension 3
on, by recursively checking the vertex link as a spherical surface.

Co-orientation is derived, not assumed: facet normals are propagated so
that adjacent facets induce opposite orientations on their common ridge,
then each component picks the polarity under which most ridges are
convex.
"""
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from config import settings
from core.errors import BoundaryRidge, HullFailure, InternalInconsistency, NonGenericProbe, NonOrientableLocally
from core.exact_geometry import Hyperplane, IntVector, det, dot, rank, sign
from core.exact_lp import find_point, strictly_separating
from core.surface_model import (
    Face, PLSurface, RidgeRecord, covering_multiplicity, face_link, folded_ridge, interior_point, require_face, validate,
)
from utils.logger import setup_logger

logger = setup_logger(__name__)

Normals = Union[Sequence[IntVector], Mapping[int, IntVector]]


class RidgeClass(str, Enum):
    STRICTLY_CONVEX = "StrictlyConvex"
    FLAT = "Flat"
    REFLEX = "Reflex"


class VertexMethod(str, Enum):
    WITNESS_HULL = "WitnessHull"
    RECURSIVE_LINK = "RecursiveLink"
    BOTH = "Both"


@dataclass(frozen=True)
class RidgeVerdict:
    ridge_index: int
    ridge: Face
    facets: Tuple[int, int]
    ridge_class: RidgeClass
    orientation_consistent: bool
    folded: bool = False


@dataclass(frozen=True)
class VertexVerdict:
    vertex: int
    convex: bool
    method: VertexMethod


@dataclass(frozen=True)
class FaceCertificate:
    """Where and why local convexity fails."""

    face: Face
    kind: str
    facets: Tuple[int, ...] = ()


@dataclass(frozen=True)
class LocalReport:
    ridges: Tuple[RidgeVerdict, ...]
    vertices: Tuple[VertexVerdict, ...]
    violations: Tuple[FaceCertificate, ...]
    normals: Optional[Tuple[IntVector, ...]] = None

    @property
    def first_violation(self) -> Optional[FaceCertificate]:
        return self.violations[0] if self.violations else None

    @property
    def locally_convex(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class StarHullResult:
    """Outcome of the witness-hull test at a face; truthy when convex.

    ``witness`` holds the distinct supporting halfspaces of the star,
    oriented so the star lies on the ``normal . x <= offset`` side.
    """

    convex: bool
    witness: Tuple[Hyperplane, ...] = ()
    reason: str = ""

    def __bool__(self) -> bool:
        return self.convex


# ===== orientation helpers =====

def _ridge_frame(s: PLSurface, ridge: Face) -> List[IntVector]:
    frame: List[IntVector] = []
    for v in ridge:
        candidate = frame + [s.rays[v]]
        if rank(candidate) == len(candidate):
            frame = candidate
        if len(frame) == s.cone_dim - 2:
            break
    return frame


def _off_ridge(s: PLSurface, g: int, ridge: Face) -> List[IntVector]:
    members = set(ridge)
    return [s.rays[v] for v in s.facets[g] if v not in members]


def _induced_sign(s: PLSurface, frame: List[IntVector], g: int, ridge: Face, normal: IntVector) -> int:
    w = _off_ridge(s, g, ridge)[0]
    return sign(det(frame + [w, normal]))


def _neg(v: IntVector) -> IntVector:
    return tuple(-a for a in v)


def _dihedral_signs(s: PLSurface, ridge: Face, g1: int, g2: int,
                    n1: IntVector, n2: IntVector) -> Tuple[set, set]:
    s12 = {sign(dot(n1, w)) for w in _off_ridge(s, g2, ridge)}
    s21 = {sign(dot(n2, w)) for w in _off_ridge(s, g1, ridge)}
    return s12, s21


def _coorient(s: PLSurface) -> Tuple[List[IntVector], Optional[Tuple[Face, Tuple[int, ...]]]]:
    """Propagate normals over each component; return them and the first conflict."""
    normals: List[Optional[IntVector]] = [None] * len(s.facets)
    conflict = None
    frames: Dict[Face, List[IntVector]] = {}
    for comp in s.components:
        seed = comp[0]
        normals[seed] = s.cells[seed].normal
        queue = deque([seed])
        while queue:
            g = queue.popleft()
            for key in s.cells[g].faces:
                ridge = tuple(sorted(key))
                fs = s.ridge_map[ridge]
                if len(fs) != 2:
                    continue
                h = fs[0] if fs[1] == g else fs[1]
                frame = frames.setdefault(ridge, _ridge_frame(s, ridge))
                want = -_induced_sign(s, frame, g, ridge, normals[g])
                candidate = s.cells[h].normal
                if _induced_sign(s, frame, h, ridge, candidate) != want:
                    candidate = _neg(candidate)
                if normals[h] is None:
                    normals[h] = candidate
                    queue.append(h)
                elif normals[h] != candidate and conflict is None:
                    conflict = (ridge, fs)

        outward = inward = 0
        members = set(comp)
        for ridge, fs in s.ridge_map.items():
            if len(fs) != 2 or fs[0] not in members:
                continue
            s12, s21 = _dihedral_signs(s, ridge, fs[0], fs[1], normals[fs[0]], normals[fs[1]])
            if s12 == {-1} and s21 == {-1}:
                outward += 1
            elif s12 == {1} and s21 == {1}:
                inward += 1
        if inward > outward:
            for g in comp:
                normals[g] = _neg(normals[g])
    return normals, conflict


def _classify(s: PLSurface, ridge: Face, g1: int, g2: int,
              n1: IntVector, n2: IntVector) -> Tuple[RidgeClass, bool, bool]:
    """(class, orientation_consistent, folded) for a closed ridge."""
    s12, s21 = _dihedral_signs(s, ridge, g1, g2, n1, n2)
    if s12 == {0} and s21 == {0}:
        if folded_ridge(s, ridge, g1, g2):
            return RidgeClass.REFLEX, False, True
        return RidgeClass.FLAT, True, False
    if s12 == {-1} and s21 == {-1}:
        return RidgeClass.STRICTLY_CONVEX, True, False
    return RidgeClass.REFLEX, False, False


# ===== public operations =====

def ridge_convexity(s: PLSurface, r: RidgeRecord, side_hint: Optional[Normals] = None) -> RidgeVerdict:
    """Classify one ridge as StrictlyConvex, Flat or Reflex.

    With ``side_hint`` (oriented facet normals, e.g. from
    propagate_coorientation) the ridge is judged against that
    co-orientation; without it, against the locally consistent one that
    makes it convex if any does.

    Raises:
        BoundaryRidge: the ridge has a single incident facet.
    """
    if len(r.incident_facets) != 2:
        raise BoundaryRidge(f"ridge {list(r.ridge)} has {len(r.incident_facets)} incident facets")
    g1, g2 = r.incident_facets
    if side_hint is not None:
        n1, n2 = side_hint[g1], side_hint[g2]
    else:
        frame = _ridge_frame(s, r.ridge)
        n1 = s.cells[g1].normal
        n2 = s.cells[g2].normal
        if _induced_sign(s, frame, g2, r.ridge, n2) != -_induced_sign(s, frame, g1, r.ridge, n1):
            n2 = _neg(n2)
        s12, s21 = _dihedral_signs(s, r.ridge, g1, g2, n1, n2)
        if s12 == {1} and s21 == {1}:
            n1, n2 = _neg(n1), _neg(n2)
    ridge_class, consistent, folded = _classify(s, r.ridge, g1, g2, n1, n2)
    return RidgeVerdict(s.ridge_index[r.ridge], r.ridge, (g1, g2), ridge_class, consistent, folded)


def propagate_coorientation(s: PLSurface) -> Tuple[IntVector, ...]:
    """Per-facet oriented normals under which every ridge is convex.

    Raises:
        NonOrientableLocally: no consistent choice exists; carries the ridge.
    """
    normals, conflict = _coorient(s)
    if conflict is not None:
        ridge, fs = conflict
        raise NonOrientableLocally(f"no consistent co-orientation across ridge {list(ridge)}", ridge, fs)
    for ridge, fs in s.ridge_map.items():
        if len(fs) != 2:
            continue
        ridge_class, _, _ = _classify(s, ridge, fs[0], fs[1], normals[fs[0]], normals[fs[1]])
        if ridge_class is RidgeClass.REFLEX:
            raise NonOrientableLocally(f"ridge {list(ridge)} is reflex under every co-orientation", ridge, fs)
    return tuple(normals)


def _tangent_sheets(s: PLSurface, face: Face, star: Sequence[int]) -> int:
    """Star cells whose tangent cone at the face contains a generic probe."""
    fset = set(face)
    tangent = {g: [mu for key, mu in s.cells[g].faces.items() if fset <= key] for g in star}
    base = s.cells[star[0]]
    for attempt in range(settings.PROBE_MAX_ATTEMPTS):
        y = interior_point(base.rays, attempt)
        lines = set()
        generic = True
        for g in star:
            if dot(s.cells[g].normal, y) != 0:
                continue
            lines.add(s.cells[g].normal)
            if any(dot(mu, y) == 0 for mu in tangent[g]):
                generic = False
                break
        if not generic or len(lines) > 1:
            continue
        return sum(
            1 for g in star
            if dot(s.cells[g].normal, y) == 0 and all(dot(mu, y) > 0 for mu in tangent[g])
        )
    raise NonGenericProbe(f"no generic probe near face {list(face)}")


def star_hull_check(s: PLSurface, face) -> StarHullResult:
    """Witness-hull test of local convexity at a face.

    Convex iff (a) every star facet hyperplane has the whole star on one
    side, (b) no flat ridge through the face is folded and none is a
    boundary ridge, and (c) the star covers the tangent cone once.

    Raises:
        FaceNotFound: face is not a face of the surface.
        HullFailure: the star does not span a hyperplane.
    """
    face, star = require_face(s, face)
    star_vertices = sorted({v for g in star for v in s.facets[g]})
    star_rays = [s.rays[v] for v in star_vertices]
    if rank(star_rays) < s.cone_dim - 1:
        raise HullFailure(f"star of {list(face)} is degenerate")

    oriented: Dict[IntVector, IntVector] = {}
    for g in star:
        nu = s.cells[g].normal
        signs = {sign(dot(nu, r)) for r in star_rays}
        if 1 in signs and -1 in signs:
            return StarHullResult(False, reason=f"hyperplane of facet {g} cuts the star")
        oriented[nu] = _neg(nu) if 1 in signs else nu

    fset = set(face)
    for ridge, fs in s.ridge_map.items():
        if not fset <= set(ridge):
            continue
        if len(fs) == 1:
            return StarHullResult(False, reason=f"boundary ridge {list(ridge)} through the face")
        g1, g2 = fs
        if s.cells[g1].normal == s.cells[g2].normal and folded_ridge(s, ridge, g1, g2):
            return StarHullResult(False, reason=f"folded ridge {list(ridge)}")

    sheets = _tangent_sheets(s, face, star)
    if sheets != 1:
        return StarHullResult(False, reason=f"star covers its tangent cone {sheets} times")

    witness = sorted(
        (Hyperplane.from_linear(n, s.is_euclidean, oriented=True) for n in oriented.values()),
        key=Hyperplane.sort_key,
    )
    return StarHullResult(True, tuple(witness))


def recursive_link_check(s: PLSurface, vertex: int) -> bool:
    """Decide local convexity at a vertex through its link.

    A link of ambient dimension >= 3 that is locally convex, closed and
    connected is the boundary of a convex cone; the vertex is convex iff
    that cone is proper and the link covers it once. Smaller links fall
    back to star_hull_check.
    """
    link = face_link(s, (vertex,))
    if link.ambient_dim < 3:
        return bool(star_hull_check(s, (vertex,)))

    report = validate(link)
    if not report.passes():
        logger.debug(f"Link of vertex {vertex} is not a closed connected complex")
        return False
    local = local_report(link, method="link", jobs=1)
    if not local.locally_convex or local.normals is None:
        return False
    halfspaces = set(local.normals)
    if not halfspaces:
        return False
    for n in halfspaces:
        if any(dot(n, r) > 0 for r in link.rays):
            return False
    return covering_multiplicity(link) == 1


def _vertex_check(s: PLSurface, v: int, method: str) -> VertexVerdict:
    link_active = s.ambient_dim - 1 >= 3
    if method == "hull" or not link_active:
        return VertexVerdict(v, bool(star_hull_check(s, (v,))), VertexMethod.WITNESS_HULL)
    if method == "link":
        return VertexVerdict(v, recursive_link_check(s, v), VertexMethod.RECURSIVE_LINK)
    by_hull = bool(star_hull_check(s, (v,)))
    by_link = recursive_link_check(s, v)
    if by_hull != by_link:
        raise InternalInconsistency(
            f"vertex {v}: witness hull says {by_hull}, recursive link says {by_link}"
        )
    return VertexVerdict(v, by_hull, VertexMethod.BOTH)


def _vertex_job(args: Tuple[PLSurface, int, str]) -> VertexVerdict:
    return _vertex_check(*args)


def local_report(s: PLSurface, method: Optional[str] = None, jobs: Optional[int] = None) -> LocalReport:
    """Check every interior ridge and vertex; violations in ridge then vertex order."""
    method = method or settings.VERTEX_CHECK_METHOD
    jobs = jobs or settings.JOBS
    normals, conflict = _coorient(s)
    violations: List[FaceCertificate] = []
    if conflict is not None:
        violations.append(FaceCertificate(conflict[0], "NonOrientable", conflict[1]))

    verdicts = []
    for k, (ridge, fs) in enumerate(s.ridge_map.items()):
        if len(fs) != 2:
            continue
        if conflict is None:
            verdict = ridge_convexity(s, RidgeRecord(ridge, fs), normals)
        else:
            verdict = ridge_convexity(s, RidgeRecord(ridge, fs))
        verdicts.append(verdict)
        if verdict.ridge_class is RidgeClass.REFLEX:
            kind = "FoldedRidge" if verdict.folded else "ReflexRidge"
            violations.append(FaceCertificate(ridge, kind, fs))

    interior = [v for v in s.used_vertices if s.is_interior_face((v,))]
    if jobs > 1 and len(interior) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            vertex_verdicts = list(pool.map(_vertex_job, [(s, v, method) for v in interior]))
    else:
        vertex_verdicts = [_vertex_check(s, v, method) for v in interior]
    for vv in vertex_verdicts:
        if not vv.convex:
            violations.append(FaceCertificate((vv.vertex,), "VertexNotConvex", s.star((vv.vertex,))))

    if violations:
        logger.info(f"Local convexity fails at {len(violations)} face(s), first {violations[0].kind} "
                    f"at {list(violations[0].face)}")
    return LocalReport(
        ridges=tuple(verdicts),
        vertices=tuple(vertex_verdicts),
        violations=tuple(violations),
        normals=tuple(normals) if conflict is None else None,
    )


def exposed_vertex(s: PLSurface, facets: Optional[Sequence[int]] = None) -> Optional[int]:
    """A strictly convex vertex.

    Euclidean: the first vertex of conv(all vertices), found by strict
    separation; for polytopes every hull vertex is exposed. Spherical: the
    first vertex with a hyperplane through it leaving every star neighbor
    strictly on one side. ``facets`` restricts the search to a component.

    Raises:
        InternalInconsistency: Euclidean input without any hull vertex.
    """
    if facets is None:
        candidates = list(s.used_vertices)
    else:
        candidates = sorted({v for g in facets for v in s.facets[g]})
    if s.is_euclidean:
        for v in candidates:
            others = [s.vertices[w] for w in candidates if w != v]
            if strictly_separating(s.vertices[v], others) is not None:
                return v
        raise InternalInconsistency("closed Euclidean surface without a hull vertex")
    for v in candidates:
        neighbors = sorted({w for g in s.star((v,)) for w in s.facets[g] if w != v})
        found = find_point(
            s.cone_dim,
            eq=[(s.rays[v], 0)],
            le=[(s.rays[w], -1) for w in neighbors],
        )
        if found is not None:
            return v
    return None
