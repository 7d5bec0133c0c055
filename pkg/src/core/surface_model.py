"""Realized PL hypersurfaces, combinatorial validation, stars and links.

Both modes share one cone model in R^N with N = n + 1: a Euclidean vertex
x becomes the ray (x, 1) and a spherical vertex already is a ray. A facet
is then a polyhedral cone of rank N - 1 spanning a linear hyperplane with
normal nu, and all side tests are signs of dot products.
"""
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from config import settings
from core.errors import Degenerate, DegenerateStar, FaceNotFound, NonGenericProbe, NotPseudomanifold
from core.exact_geometry import (
    IntVector, SphPoint, SubspaceBasis, Vector, as_vector, combine, dot, is_zero, lift,
    nullspace, orthogonal_complement, primitive, rank, sign_normalized, sub,
)
from core.exact_lp import extreme_indices, find_point, open_halfspace
from utils.logger import setup_logger

logger = setup_logger(__name__)

Face = Tuple[int, ...]


class Mode(str, Enum):
    EUCLIDEAN = "euclidean"
    SPHERICAL = "spherical"


@dataclass(frozen=True)
class CellGeometry:
    """Cone-model geometry of one facet."""

    facet: int
    rays: Tuple[IntVector, ...]
    normal: Optional[IntVector] = None
    # ridge vertex set -> normal within the facet span, positive on the facet
    faces: Dict[FrozenSet[int], IntVector] = field(default_factory=dict, compare=False)
    defect: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.defect is None


@dataclass(frozen=True)
class PLSurface:
    """A finite polytopal (n-1)-complex realized in R^n or S^n.

    Euclidean vertices are coordinate tuples of length n; spherical
    vertices are SphPoints in R^{n+1}. Facets list vertex indices.
    """

    ambient_dim: int
    mode: Mode
    vertices: Tuple[Union[Vector, SphPoint], ...]
    facets: Tuple[Face, ...]
    allow_boundary: bool = False

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.mode is Mode.EUCLIDEAN:
            verts = tuple(as_vector(v) for v in self.vertices)
        else:
            verts = tuple(v if isinstance(v, SphPoint) else SphPoint(primitive(v)) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "facets", tuple(tuple(int(i) for i in f) for f in self.facets))

    @property
    def is_euclidean(self) -> bool:
        return self.mode is Mode.EUCLIDEAN

    @property
    def cone_dim(self) -> int:
        return self.ambient_dim + 1

    @cached_property
    def rays(self) -> Tuple[IntVector, ...]:
        if self.is_euclidean:
            return tuple(primitive(lift(v)) for v in self.vertices)
        return tuple(v.ray for v in self.vertices)

    @cached_property
    def cells(self) -> Tuple[CellGeometry, ...]:
        return tuple(self._cell(i, f) for i, f in enumerate(self.facets))

    @cached_property
    def ridge_map(self) -> Dict[Face, Tuple[int, ...]]:
        """Sorted ridge vertex tuple -> incident facet indices."""
        incidence: Dict[Face, List[int]] = {}
        for cell in self.cells:
            for key in cell.faces:
                incidence.setdefault(tuple(sorted(key)), []).append(cell.facet)
        return {r: tuple(incidence[r]) for r in sorted(incidence)}

    @cached_property
    def ridge_index(self) -> Dict[Face, int]:
        return {r: k for k, r in enumerate(self.ridge_map)}

    @cached_property
    def components(self) -> Tuple[Tuple[int, ...], ...]:
        """Facet index sets of the connected components of the facet adjacency graph."""
        parent = list(range(len(self.facets)))

        def find(i: int) -> int:
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for facets in self.ridge_map.values():
            for a, b in zip(facets, facets[1:]):
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
        groups: Dict[int, List[int]] = {}
        for i in range(len(self.facets)):
            groups.setdefault(find(i), []).append(i)
        return tuple(tuple(g) for _, g in sorted(groups.items()))

    @cached_property
    def used_vertices(self) -> Tuple[int, ...]:
        n_verts = len(self.vertices)
        return tuple(sorted({i for f in self.facets for i in f if 0 <= i < n_verts}))

    def star(self, face: Iterable[int]) -> Tuple[int, ...]:
        face = set(face)
        return tuple(i for i, f in enumerate(self.facets) if face <= set(f))

    def boundary_ridges(self) -> Tuple[Face, ...]:
        return tuple(r for r, fs in self.ridge_map.items() if len(fs) == 1)

    def is_interior_face(self, face: Iterable[int]) -> bool:
        face = set(face)
        return not any(face <= set(r) for r in self.boundary_ridges())

    # ===== cell geometry =====

    def _cell(self, idx: int, facet: Face) -> CellGeometry:
        n_cone = self.cone_dim
        if any(i < 0 or i >= len(self.vertices) for i in facet):
            return CellGeometry(idx, (), defect="vertex index out of range")
        rays = tuple(self.rays[i] for i in facet)
        if len(set(facet)) != len(facet):
            return CellGeometry(idx, rays, defect="repeated vertex")
        if len(facet) < n_cone - 1 or rank(rays) != n_cone - 1:
            return CellGeometry(idx, rays, defect="facet does not span a hyperplane")
        normal = sign_normalized(nullspace(rays, n_cone)[0])
        simplicial = len(facet) == n_cone - 1
        if not simplicial:
            extreme = extreme_indices(rays)
            if len(extreme) != len(rays):
                missing = [facet[i] for i in range(len(rays)) if i not in extreme]
                return CellGeometry(idx, rays, normal, defect=f"non-extreme vertices {missing}")
            if not self.is_euclidean and open_halfspace(rays) is None:
                return CellGeometry(idx, rays, normal, defect="rays not in an open hemisphere")
        faces = _cell_faces(facet, rays, normal, simplicial)
        return CellGeometry(idx, rays, normal, faces)


def _cell_faces(facet: Face, rays: Sequence[IntVector], normal: IntVector,
                simplicial: bool) -> Dict[FrozenSet[int], IntVector]:
    n_cone = len(normal)
    faces: Dict[FrozenSet[int], IntVector] = {}
    if simplicial:
        for k in range(len(rays)):
            subset = [r for i, r in enumerate(rays) if i != k]
            mu = primitive(nullspace(subset + [normal], n_cone)[0])
            if dot(mu, rays[k]) < 0:
                mu = tuple(-a for a in mu)
            faces[frozenset(v for i, v in enumerate(facet) if i != k)] = mu
        return faces
    for positions in combinations(range(len(rays)), n_cone - 2):
        subset = [rays[i] for i in positions]
        if rank(subset) != n_cone - 2:
            continue
        mu = primitive(nullspace(subset + [normal], n_cone)[0])
        values = [dot(mu, r) for r in rays]
        if any(v < 0 for v in values) and any(v > 0 for v in values):
            continue
        if any(v < 0 for v in values):
            mu = tuple(-a for a in mu)
        key = frozenset(facet[i] for i, v in enumerate(values) if v == 0)
        faces.setdefault(key, mu)
    return faces


# ===== Validation =====

@dataclass(frozen=True)
class RidgeRecord:
    ridge: Face
    incident_facets: Tuple[int, ...]


@dataclass(frozen=True)
class ValidationReport:
    pseudomanifold: bool
    connected: bool
    closed: bool
    components: int = 1
    facet_defects: Tuple[int, ...] = ()
    ridge_defects: Tuple[int, ...] = ()
    vertex_defects: Tuple[int, ...] = ()
    allow_boundary: bool = False
    notes: Tuple[str, ...] = ()

    def passes(self, require_connected: bool = True) -> bool:
        return (
            not self.facet_defects
            and not self.ridge_defects
            and not self.vertex_defects
            and self.pseudomanifold
            and (self.closed or self.allow_boundary)
            and (self.connected or not require_connected)
        )


def validate(s: PLSurface) -> ValidationReport:
    """Combinatorial and geometric well-formedness; defects are data."""
    notes: List[str] = []
    facet_defects = []
    for cell in s.cells:
        if not cell.ok:
            facet_defects.append(cell.facet)
            notes.append(f"facet {cell.facet}: {cell.defect}")

    ridge_items = list(s.ridge_map.items())
    pseudomanifold = all(len(fs) <= 2 for _, fs in ridge_items)
    closed = all(len(fs) == 2 for _, fs in ridge_items)
    ridge_defects = []
    for k, (r, fs) in enumerate(ridge_items):
        if len(fs) > 2:
            ridge_defects.append(k)
            notes.append(f"ridge {list(r)}: {len(fs)} incident facets")
        elif len(fs) == 1 and not s.allow_boundary:
            ridge_defects.append(k)

    components = s.components
    vertex_defects = set()
    used = set(s.used_vertices)
    for v in range(len(s.vertices)):
        if v not in used:
            vertex_defects.add(v)
            notes.append(f"vertex {v}: unused")
    for comp in components:
        seen: Dict[Tuple, int] = {}
        for v in sorted({i for f in comp for i in s.facets[f] if 0 <= i < len(s.vertices)}):
            key = s.rays[v]
            if key in seen:
                vertex_defects.update((v, seen[key]))
                notes.append(f"vertex {v}: same coordinates as vertex {seen[key]}")
            else:
                seen[key] = v
    if not facet_defects and pseudomanifold:
        for v in sorted(used):
            if _star_pieces(s, v) > 1:
                vertex_defects.add(v)
                notes.append(f"vertex {v}: pinched star")

    report = ValidationReport(
        pseudomanifold=pseudomanifold,
        connected=len(components) <= 1,
        closed=closed,
        components=len(components),
        facet_defects=tuple(facet_defects),
        ridge_defects=tuple(ridge_defects),
        vertex_defects=tuple(sorted(vertex_defects)),
        allow_boundary=s.allow_boundary,
        notes=tuple(notes),
    )
    if not report.passes(require_connected=False):
        logger.warning(f"⚠️ Validation defects: {len(facet_defects)} facet, "
                       f"{len(ridge_defects)} ridge, {len(vertex_defects)} vertex")
    return report


def _star_pieces(s: PLSurface, v: int) -> int:
    """Number of pieces of the star of v, glued along ridges through v."""
    star = list(s.star((v,)))
    index = {f: k for k, f in enumerate(star)}
    parent = list(range(len(star)))

    def find(i: int) -> int:
        while parent[i] != i:
            i = parent[i]
        return i

    for r, fs in s.ridge_map.items():
        if v in r:
            members = [index[f] for f in fs if f in index]
            for a, b in zip(members, members[1:]):
                parent[find(a)] = find(b)
    return len({find(i) for i in range(len(star))})


def ridges(s: PLSurface) -> List[RidgeRecord]:
    """Every ridge once, lexicographic by vertex indices.

    Raises:
        NotPseudomanifold: some ridge has more than two incident facets.
    """
    records = []
    for r, fs in s.ridge_map.items():
        if len(fs) > 2:
            raise NotPseudomanifold(f"ridge {list(r)} has {len(fs)} incident facets")
        records.append(RidgeRecord(r, fs))
    return records


# ===== Stars and links =====

@dataclass(frozen=True)
class LinkComplex(PLSurface):
    """Spherical complex of directions around a face.

    ``vertex_origins[k]`` lists the surface vertices projecting to link
    vertex k and ``facet_origins[k]`` the surface facet behind link cell k.
    """

    face: Face = ()
    vertex_origins: Tuple[Tuple[int, ...], ...] = ()
    facet_origins: Tuple[int, ...] = ()


def require_face(s: PLSurface, face: Iterable[int]) -> Tuple[Face, Tuple[int, ...]]:
    """Normalize a face and return it with its star.

    Raises:
        FaceNotFound: the vertex set is not a face of every facet containing it,
            or no facet contains it.
    """
    face = tuple(sorted(set(face)))
    star = s.star(face)
    if not face or not star:
        raise FaceNotFound(f"{list(face)} is not a face of the surface")
    for g in star:
        if not _is_face_of_cell(s, face, g):
            raise FaceNotFound(f"{list(face)} is not a face of facet {g}")
    return face, star


def _is_face_of_cell(s: PLSurface, face: Face, g: int) -> bool:
    facet = s.facets[g]
    if len(facet) == s.cone_dim - 1 or set(face) == set(facet):
        return True
    on = [s.rays[v] for v in face]
    off = [s.rays[v] for v in facet if v not in face]
    found = find_point(
        s.cone_dim,
        eq=[(r, 0) for r in on],
        le=[([-a for a in r], -1) for r in off],
    )
    return found is not None


def face_link(s: PLSurface, face: Iterable[int]) -> LinkComplex:
    """Link of a face: the star cut by a small sphere around the face.

    Euclidean faces project v - p (p the vertex average of the face) onto
    the orthogonal complement of aff(F) - p; spherical faces project the
    rays onto the complement of span(F). Coordinates are taken in an
    integer basis of the complement.

    Raises:
        FaceNotFound: face is not a face of the surface.
        DegenerateStar: a star cell collapses under projection.
    """
    face, star = require_face(s, face)
    if s.is_euclidean:
        points = [s.vertices[i] for i in face]
        base = tuple(sum(c) / len(points) for c in zip(*points))
        span = SubspaceBasis.spanning([sub(p, base) for p in points], s.ambient_dim)

        def direction(v: int) -> Vector:
            return sub(s.vertices[v], base)
    else:
        span = SubspaceBasis.spanning([s.rays[i] for i in face], s.cone_dim)

        def direction(v: int) -> Vector:
            return as_vector(s.rays[v])

    complement = orthogonal_complement(span)
    cell_rank = complement.dim - 1
    if cell_rank < 1:
        raise DegenerateStar(f"face {list(face)} has no link")

    projected: Dict[int, IntVector] = {}
    for g in star:
        for v in s.facets[g]:
            if v in face or v in projected:
                continue
            coords = complement.coordinates(direction(v))
            if is_zero(coords):
                raise DegenerateStar(f"vertex {v} lies in the span of face {list(face)}")
            projected[v] = primitive(coords)

    cell_rays: List[List[IntVector]] = []
    for g in star:
        rays = sorted({projected[v] for v in s.facets[g] if v not in face})
        if len(rays) > cell_rank:
            rays = [rays[i] for i in extreme_indices(rays)]
        if rank(rays) != cell_rank or len(rays) < cell_rank:
            raise DegenerateStar(f"facet {g} collapses in the link of {list(face)}")
        cell_rays.append(rays)

    link_rays = sorted({r for rays in cell_rays for r in rays})
    index = {r: k for k, r in enumerate(link_rays)}
    origins = tuple(
        tuple(sorted(v for v, r in projected.items() if r == ray)) for ray in link_rays
    )
    return LinkComplex(
        ambient_dim=cell_rank,
        mode=Mode.SPHERICAL,
        vertices=tuple(SphPoint(r) for r in link_rays),
        facets=tuple(tuple(sorted(index[r] for r in rays)) for rays in cell_rays),
        allow_boundary=s.allow_boundary,
        face=face,
        vertex_origins=origins,
        facet_origins=star,
    )


# ===== Generic probes and covering multiplicity =====

def interior_point(rays: Sequence[Sequence[int]], attempt: int = 0, start: int = 0) -> Vector:
    """Deterministic relative-interior point sum (1 + eps_i) r_i of a cone."""
    k = attempt + start
    coeffs = [1 + Fraction(((i + 1) * (2 * k + 3)) % 89, 89 + 2 * attempt) for i in range(len(rays))]
    return combine(coeffs, rays)


def probe_is_generic(s: PLSurface, y: Sequence, facets: Optional[Iterable[int]] = None) -> bool:
    """No facet boundary passes through y and at most one hyperplane contains it."""
    lines = set()
    for g in (range(len(s.facets)) if facets is None else facets):
        cell = s.cells[g]
        if not cell.ok:
            continue
        if dot(cell.normal, y) != 0:
            continue
        lines.add(cell.normal)
        if any(dot(mu, y) == 0 for mu in cell.faces.values()):
            return False
    return len(lines) <= 1


def count_containing(s: PLSurface, y: Sequence, facets: Optional[Iterable[int]] = None) -> int:
    """Number of facet cones containing the ray y in their relative interior."""
    total = 0
    for g in (range(len(s.facets)) if facets is None else facets):
        cell = s.cells[g]
        if not cell.ok:
            continue
        if dot(cell.normal, y) == 0 and all(dot(mu, y) > 0 for mu in cell.faces.values()):
            total += 1
    return total


def generic_probes(s: PLSurface, facet: int, start: int = 0) -> Iterator[Vector]:
    for attempt in range(settings.PROBE_MAX_ATTEMPTS):
        y = interior_point(s.cells[facet].rays, attempt, start)
        if probe_is_generic(s, y):
            yield y


def sheet_count(s: PLSurface, facet: int, start: Optional[int] = None) -> int:
    """Facets covering a generic point of the given facet.

    ``start`` offsets the probe sequence; it defaults to ``PROBE_SEED``.

    Raises:
        Degenerate: the facet does not span a hyperplane.
        NonGenericProbe: the resampling budget ran out.
    """
    cell = s.cells[facet]
    if not cell.ok:
        raise Degenerate(f"facet {facet} cannot host a probe: {cell.defect}")
    start = settings.PROBE_SEED if start is None else start
    for y in generic_probes(s, facet, start):
        return count_containing(s, y)
    raise NonGenericProbe(f"no generic probe in facet {facet} after {settings.PROBE_MAX_ATTEMPTS} attempts")


def covering_multiplicity(s: PLSurface, probe: Optional[Union[SphPoint, Sequence]] = None,
                          resample: bool = True, start: Optional[int] = None) -> int:
    """Number of facets whose cone contains a generic probe ray.

    Without a probe, one is sampled inside facet ``start`` (mod F), where
    ``start`` defaults to ``PROBE_SEED``. A given probe that is not generic
    is perturbed into a facet containing it when ``resample`` is set.

    Degenerate facets are never counted and never host a probe.

    Raises:
        Degenerate: no facet spans a hyperplane.
        NonGenericProbe: no generic probe found within the attempt bound,
            or a non-generic probe was given with resample=False.
    """
    if not s.facets:
        return 0
    usable = [g for g, cell in enumerate(s.cells) if cell.ok]
    if not usable:
        raise Degenerate("no facet spans a hyperplane")
    start = settings.PROBE_SEED if start is None else start
    if probe is None:
        return sheet_count(s, usable[start % len(usable)], start)

    if isinstance(probe, SphPoint):
        y = as_vector(probe.ray)
    elif s.is_euclidean and len(probe) == s.ambient_dim:
        y = lift(probe)
    else:
        y = as_vector(probe)
    if probe_is_generic(s, y):
        return count_containing(s, y)
    if not resample:
        raise NonGenericProbe("probe lies on a facet boundary")

    logger.debug("Probe is not generic, resampling")
    hosts = [
        g for g, cell in enumerate(s.cells)
        if cell.ok and dot(cell.normal, y) == 0 and all(dot(mu, y) >= 0 for mu in cell.faces.values())
    ]
    if not hosts:
        return 0
    for attempt in range(settings.PROBE_MAX_ATTEMPTS):
        shifted = combine([1, Fraction(1, attempt + 2)], [y, interior_point(s.cells[hosts[0]].rays, attempt, start)])
        if probe_is_generic(s, shifted):
            return count_containing(s, shifted)
    raise NonGenericProbe(f"no generic probe after {settings.PROBE_MAX_ATTEMPTS} attempts")


def folded_ridge(s: PLSurface, ridge: Face, g1: int, g2: int) -> bool:
    """True when g2 lies on the same side of the ridge as g1 within g1's span."""
    mu = s.cells[g1].faces[frozenset(ridge)]
    members = set(ridge)
    return any(dot(mu, s.rays[v]) > 0 for v in s.facets[g2] if v not in members)
