"""Seeded instance generators.

Every generator is a pure function of its parameters and the seed: the
same call yields the same vertex order, facet order and comments.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import gcd
from pathlib import Path
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from cli.surface_file import load
from config import settings
from core.errors import BadParams, Degenerate
from core.exact_geometry import Hyperplane, IntVector, Vector, as_vector, hyperplane_through, primitive, rank, sub
from core.surface_model import Face, Mode, PLSurface
from utils.logger import setup_logger
from utils.prng import SplitMix64

logger = setup_logger(__name__)

MAX_RESAMPLES = 1000


# ===== Exact incremental hull =====

class IncrementalHull:
    """Beneath-beyond convex hull in R^dim over exact rationals.

    Points coplanar with a current facet are refused with Degenerate so
    that every facet stays a simplex and no two facets share a hyperplane.
    """

    def __init__(self, dim: int):
        if dim < 2:
            raise BadParams(f"hull dimension must be at least 2, got {dim}")
        self.dim = dim
        self.points: List[Vector] = []
        # sorted point indices -> halfspace normal . x <= offset containing the hull
        self.facets: Dict[Face, Hyperplane] = {}
        self._inside: Optional[Vector] = None

    def _oriented(self, face: Face) -> Hyperplane:
        h = hyperplane_through([self.points[i] for i in face])
        return h.flipped() if h.value(self._inside) > 0 else h

    def add(self, point: Sequence) -> bool:
        """Insert a point; False when it falls strictly inside the hull.

        Raises:
            Degenerate: the point would break general position.
        """
        point = as_vector(point)
        if len(point) != self.dim:
            raise BadParams(f"point has {len(point)} coordinates, hull dimension is {self.dim}")

        if self._inside is None:
            candidate = self.points + [point]
            if rank([sub(p, candidate[0]) for p in candidate[1:]]) != len(candidate) - 1:
                raise Degenerate("point is affinely dependent on the starting simplex")
            self.points.append(point)
            if len(self.points) == self.dim + 1:
                self._inside = tuple(sum(c) / (self.dim + 1) for c in zip(*self.points))
                for face in combinations(range(self.dim + 1), self.dim):
                    self.facets[face] = self._oriented(face)
            return True

        values = {face: h.value(point) for face, h in self.facets.items()}
        if any(v == 0 for v in values.values()):
            raise Degenerate("point lies on a facet hyperplane")
        visible = [face for face, v in values.items() if v > 0]
        if not visible:
            return False

        ridge_count: Dict[Face, int] = {}
        for face in visible:
            for ridge in combinations(face, self.dim - 1):
                ridge_count[ridge] = ridge_count.get(ridge, 0) + 1
        horizon = [r for r, c in ridge_count.items() if c == 1]

        index = len(self.points)
        self.points.append(point)
        for face in visible:
            del self.facets[face]
        for ridge in horizon:
            face = tuple(sorted(ridge + (index,)))
            self.facets[face] = self._oriented(face)
        return True

    def surface(self) -> PLSurface:
        """Boundary complex on the hull vertices only, in insertion order."""
        used = sorted({i for face in self.facets for i in face})
        relabel = {old: new for new, old in enumerate(used)}
        facets = sorted(tuple(sorted(relabel[i] for i in face)) for face in self.facets)
        return PLSurface(self.dim, Mode.EUCLIDEAN, tuple(self.points[i] for i in used), tuple(facets))

    def halfspaces(self) -> List[Hyperplane]:
        return sorted(self.facets.values(), key=Hyperplane.sort_key)


def random_hull(rng: SplitMix64, dim: int, count: int, bound: int, denominator: int = 1) -> IncrementalHull:
    """Hull of ``count`` random points, resampling points in special position."""
    if count < dim + 1:
        raise BadParams(f"need at least {dim + 1} points in dimension {dim}, got {count}")
    hull = IncrementalHull(dim)
    for _ in range(count):
        for _attempt in range(MAX_RESAMPLES):
            point = tuple(rng.rational(bound, denominator) for _ in range(dim))
            try:
                hull.add(point)
                break
            except Degenerate:
                continue
        else:
            raise BadParams(f"could not place {count} points in general position with bound {bound}")
    return hull


# ===== Generated output =====

@dataclass(frozen=True)
class GeneratedSurface:
    surface: PLSurface
    comments: Tuple[str, ...] = ()
    # metadata for tests and acceptance sweeps; not written to the file
    meta: Dict[str, object] = field(default_factory=dict, compare=False)


def _int_param(params: Mapping[str, str], key: str, default: Optional[int] = None,
               lo: Optional[int] = None, hi: Optional[int] = None) -> int:
    raw = params.get(key)
    if raw is None:
        if default is None:
            raise BadParams(f"missing parameter '{key}'")
        return default
    try:
        value = int(raw)
    except (TypeError, ValueError):
        raise BadParams(f"parameter '{key}' must be an integer, got '{raw}'")
    if lo is not None and value < lo:
        raise BadParams(f"parameter '{key}' must be >= {lo}, got {value}")
    if hi is not None and value > hi:
        raise BadParams(f"parameter '{key}' must be <= {hi}, got {value}")
    return value


def gen_hull(params: Mapping[str, str], seed: int) -> GeneratedSurface:
    """Boundary of the convex hull of m random rational points in R^n."""
    n = _int_param(params, "n", 3, lo=2)
    m = _int_param(params, "m", 20, lo=n + 1)
    bound = _int_param(params, "bound", settings.COORD_BOUND, lo=4)
    den = _int_param(params, "den", 1, lo=1)
    rng = SplitMix64(seed)
    hull = random_hull(rng, n, m, bound, den)
    surface = hull.surface()
    logger.info(f"🎲 hull n={n} m={m}: {len(surface.vertices)} vertices, {len(surface.facets)} facets")
    return GeneratedSurface(
        surface,
        (f"hull n={n} m={m} seed={seed}",),
        {"halfspaces": hull.halfspaces()},
    )


_PULL_FACTORS = (Fraction(1, 2), Fraction(1, 3), Fraction(1, 5), Fraction(1, 8), Fraction(1, 13))


def gen_perturbed_hull(params: Mapping[str, str], seed: int) -> GeneratedSurface:
    """A hull boundary with one vertex pulled strictly inside the hull of the others.

    The combinatorics stay those of the hull, so the moved vertex cannot
    be extreme and the surface is not convex.
    """
    base = gen_hull(params, seed).surface
    n = base.ambient_dim
    rng = SplitMix64(seed ^ 0x5DEECE66D)
    order = list(range(len(base.vertices)))
    rng.shuffle(order)
    for k in order:
        others = [base.vertices[i] for i in range(len(base.vertices)) if i != k]
        inner = IncrementalHull(n)
        try:
            for p in others:
                inner.add(p)
        except Degenerate:
            continue
        centroid = tuple(sum(c) / len(others) for c in zip(*others))
        for t in _PULL_FACTORS:
            moved = tuple(c + t * (v - c) for c, v in zip(centroid, base.vertices[k]))
            if any(h.value(moved) >= 0 for h in inner.facets.values()):
                continue
            vertices = list(base.vertices)
            vertices[k] = moved
            candidate = PLSurface(n, Mode.EUCLIDEAN, tuple(vertices), base.facets)
            if all(cell.ok for cell in candidate.cells):
                logger.info(f"🎲 perturbed hull: vertex {k} pulled by factor {t}")
                return GeneratedSurface(
                    candidate,
                    (f"perturbed-hull n={n} seed={seed}", f"perturbed vertex {k}"),
                    {"perturbed_vertex": k},
                )
    raise BadParams("no vertex could be pulled inside the hull of the others")


def _unimodular(rng: SplitMix64, dim: int) -> List[List[int]]:
    """Random integer matrix of determinant 1 with small entries."""
    lower = [[int(i == j) if j >= i else rng.randint(-1, 1) for j in range(dim)] for i in range(dim)]
    upper = [[int(i == j) if j <= i else rng.randint(-1, 1) for j in range(dim)] for i in range(dim)]
    return [[sum(upper[i][k] * lower[k][j] for k in range(dim)) for j in range(dim)] for i in range(dim)]


def _pointed_cone_cells(rng: SplitMix64, m: int, bound: int) -> Tuple[List[IntVector], List[Face]]:
    """Rays and boundary cells of a random pointed cone in R^m."""
    if m == 1:
        return [], [()]
    if m == 2:
        x1, x2 = sorted(rng.sample(range(-bound, bound + 1), 2))
        return [primitive((x1, 1)), primitive((x2, 1))], [(0,), (1,)]
    hull = random_hull(rng, m - 1, m + 3, bound)
    base = hull.surface()
    rays = [primitive(tuple(v) + (1,)) for v in base.vertices]
    return rays, list(base.facets)


def gen_sph_cone(params: Mapping[str, str], seed: int) -> GeneratedSurface:
    """Triangulated S^n intersected with the boundary of K = L + P.

    L is a linear subspace of the requested dimension and P a random
    pointed cone in a complementary subspace; a unimodular shear hides the
    coordinate split.
    """
    n = _int_param(params, "n", 3, lo=2)
    ell = _int_param(params, "lineality", 0, lo=0, hi=n)
    bound = _int_param(params, "bound", 20, lo=4)
    rng = SplitMix64(seed)
    N = n + 1
    m = N - ell

    p_rays, p_cells = _pointed_cone_cells(rng, m, bound)
    rays: List[IntVector] = []
    for i in range(ell):
        for s in (1, -1):
            rays.append(tuple(s * int(j == i) for j in range(N)))
    offset = len(rays)
    rays += [tuple([0] * ell) + r for r in p_rays]

    facets = []
    for signs in product((0, 1), repeat=ell):
        l_part = tuple(2 * i + s for i, s in enumerate(signs))
        for cell in p_cells:
            facets.append(tuple(sorted(l_part + tuple(offset + c for c in cell))))

    shear = _unimodular(rng, N)
    vertices = [primitive(tuple(sum(shear[i][j] * r[j] for j in range(N)) for i in range(N))) for r in rays]
    surface = PLSurface(n, Mode.SPHERICAL, tuple(vertices), tuple(sorted(facets)))
    logger.info(f"🎲 sph-cone n={n} lineality={ell}: {len(vertices)} vertices, {len(facets)} facets")
    return GeneratedSurface(
        surface,
        (f"sph-cone n={n} lineality={ell} seed={seed}",),
        {"lineality": ell},
    )


def gen_great_sphere(params: Mapping[str, str], seed: int) -> GeneratedSurface:
    """A triangulated great (n-1)-sphere: the cone boundary with lineality n."""
    n = _int_param(params, "n", 3, lo=2)
    generated = gen_sph_cone({**params, "lineality": str(n)}, seed)
    return GeneratedSurface(generated.surface, (f"great-sphere n={n} seed={seed}",), generated.meta)


def double_cover(s: PLSurface) -> PLSurface:
    """Two disjoint copies of the complex with fresh vertex labels."""
    shift = len(s.vertices)
    facets = tuple(s.facets) + tuple(tuple(i + shift for i in f) for f in s.facets)
    return PLSurface(s.ambient_dim, s.mode, tuple(s.vertices) * 2, facets, s.allow_boundary)


def gen_double_cover(params: Mapping[str, str], seed: int) -> GeneratedSurface:
    """Combinatorial doubling of a generated surface or of a file (``source=PATH``)."""
    source = params.get("source")
    if source is not None:
        base = load(Path(source))
        origin = f"source={Path(source).name}"
    else:
        kind = params.get("base", "sph-cone")
        if kind == "double-cover":
            raise BadParams("double-cover cannot use itself as base")
        inner = {k: v for k, v in params.items() if k != "base"}
        base = generator_for(kind)(inner, seed).surface
        origin = f"base={kind}"
    doubled = double_cover(base)
    return GeneratedSurface(doubled, (f"double-cover {origin} seed={seed}",), {"copies": 2})


def _circle_point(t: Fraction) -> Vector:
    """Rational point of the unit circle for the parameter t = tan(angle / 2)."""
    d = 1 + t * t
    return ((1 - t * t) / d, 2 * t / d)


def gen_cylinder_truncated(params: Mapping[str, str], seed: int) -> GeneratedSurface:
    """Star polygon {p/q} times a segment, boundary allowed.

    Consecutive edges of {p/q} always turn the same way, so every
    interior ridge is convex although the polygon overlaps itself.
    """
    p = _int_param(params, "p", 5, lo=3)
    q = _int_param(params, "q", 2, lo=1)
    h = _int_param(params, "h", 1, lo=1)
    if 2 * q >= p or gcd(p, q) != 1:
        raise BadParams(f"need 2q < p and gcd(p, q) = 1, got p={p}, q={q}")
    rng = SplitMix64(seed)
    ts = sorted({Fraction(rng.randint(-40, 40), rng.randint(1, 8)) for _ in range(4 * p)})
    if len(ts) < p:
        raise BadParams("could not draw enough distinct circle points")
    ts = sorted(rng.sample(ts, p))
    ring = [_circle_point(t) for t in ts]
    polygon = [ring[(j * q) % p] for j in range(p)]

    vertices = [tuple(c) + (Fraction(0),) for c in polygon] + [tuple(c) + (Fraction(h),) for c in polygon]
    facets = [(j, (j + 1) % p, p + (j + 1) % p, p + j) for j in range(p)]
    surface = PLSurface(3, Mode.EUCLIDEAN, tuple(vertices), tuple(facets), allow_boundary=True)
    logger.info(f"🎲 cylinder {{{p}/{q}}} x [0, {h}]: {len(facets)} quads")
    return GeneratedSurface(surface, (f"cylinder-truncated p={p} q={q} h={h} seed={seed}",))


_GENERATORS: Dict[str, Callable[[Mapping[str, str], int], GeneratedSurface]] = {
    "hull": gen_hull,
    "perturbed-hull": gen_perturbed_hull,
    "sph-cone": gen_sph_cone,
    "great-sphere": gen_great_sphere,
    "double-cover": gen_double_cover,
    "cylinder-truncated": gen_cylinder_truncated,
}

KINDS = tuple(_GENERATORS)


def generator_for(kind: str) -> Callable[[Mapping[str, str], int], GeneratedSurface]:
    try:
        return _GENERATORS[kind]
    except KeyError:
        raise BadParams(f"unknown generator '{kind}', expected one of: {', '.join(KINDS)}")


def generate(kind: str, params: Mapping[str, str], seed: int) -> GeneratedSurface:
    """Run the named generator."""
    return generator_for(kind)(params, seed)
