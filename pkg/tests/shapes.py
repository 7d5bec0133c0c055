"""Hand-built surfaces and independent oracles shared by the test suites."""
from fractions import Fraction
from itertools import combinations, product
from typing import List, Sequence, Set

from core.exact_geometry import Hyperplane, hyperplane_through, rank, sub
from core.surface_model import Mode, PLSurface


def cube(n: int = 3, translate: Sequence = None) -> PLSurface:
    """Boundary of [0, 1]^n with one facet per coordinate hyperplane."""
    translate = translate or [0] * n
    vertices = [tuple(Fraction(c + t) for c, t in zip(p, translate)) for p in product((0, 1), repeat=n)]
    facets = []
    for i in range(n):
        for b in (0, 1):
            facets.append(tuple(k for k, p in enumerate(product((0, 1), repeat=n)) if p[i] == b))
    return PLSurface(n, Mode.EUCLIDEAN, tuple(vertices), tuple(facets))


def _square_cycles():
    """Each face of the 3-cube as a cyclic vertex index list."""
    index = {p: k for k, p in enumerate(product((0, 1), repeat=3))}
    cycles = []
    for i in range(3):
        j, k = [a for a in range(3) if a != i]
        for b in (0, 1):
            cycle = []
            for u, w in ((0, 0), (1, 0), (1, 1), (0, 1)):
                p = [0, 0, 0]
                p[i], p[j], p[k] = b, u, w
                cycle.append(index[tuple(p)])
            cycles.append(cycle)
    return cycles


def triangulated_cube(moved: dict = None) -> PLSurface:
    """3-cube with every square split along a diagonal; ``moved`` replaces vertices."""
    vertices = [tuple(Fraction(c) for c in p) for p in product((0, 1), repeat=3)]
    for k, p in (moved or {}).items():
        vertices[k] = tuple(Fraction(c) for c in p)
    facets = []
    for a, b, c, d in _square_cycles():
        facets += [(a, b, c), (a, c, d)]
    return PLSurface(3, Mode.EUCLIDEAN, tuple(vertices), tuple(facets))


def perturbed_cube() -> PLSurface:
    """Triangulated cube with the (1, 1, 1) corner pushed inward."""
    return triangulated_cube({7: (Fraction(3, 4), Fraction(3, 4), Fraction(3, 4))})


def cube_with_coned_top() -> PLSurface:
    """3-cube whose top square is coned to a centre vertex (a flat interior vertex)."""
    base = cube(3)
    half = Fraction(1, 2)
    vertices = list(base.vertices) + [(half, half, Fraction(1))]
    centre = len(vertices) - 1
    top = [1, 3, 7, 5]  # (0,0,1), (0,1,1), (1,1,1), (1,0,1) in cyclic order
    facets = [f for f in base.facets if not all(base.vertices[i][2] == 1 for i in f)]
    facets += [(centre, top[a], top[(a + 1) % 4]) for a in range(4)]
    return PLSurface(3, Mode.EUCLIDEAN, tuple(vertices), tuple(facets))


def simplex_boundary(n: int = 3) -> PLSurface:
    vertices = [tuple(Fraction(0) for _ in range(n))]
    vertices += [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    facets = list(combinations(range(n + 1), n))
    return PLSurface(n, Mode.EUCLIDEAN, tuple(vertices), tuple(facets))


def cross_polytope(n: int = 3, mode: Mode = Mode.EUCLIDEAN) -> PLSurface:
    """Boundary of conv(+-e_i); in spherical mode the great (n-1)-sphere x_{n+1} = 0."""
    width = n if mode is Mode.EUCLIDEAN else n + 1
    vertices = []
    for i in range(n):
        for s in (1, -1):
            vertices.append(tuple(s * int(j == i) for j in range(width)))
    facets = [tuple(2 * i + s for i, s in enumerate(signs)) for signs in product((0, 1), repeat=n)]
    return PLSurface(n, mode, tuple(vertices), tuple(facets))


def octant_sphere() -> PLSurface:
    """S^3 intersected with the boundary of the nonnegative orthant of R^4."""
    vertices = [tuple(int(i == j) for j in range(4)) for i in range(4)]
    return PLSurface(3, Mode.SPHERICAL, tuple(vertices), tuple(combinations(range(4), 3)))


def wedge_cone_sphere() -> PLSurface:
    """S^3 with the boundary of K = span(e1, e2) + cone((0,0,1,1), (0,0,-1,1))."""
    vertices = [
        (1, 0, 0, 0), (-1, 0, 0, 0), (0, 1, 0, 0), (0, -1, 0, 0),
        (0, 0, 1, 1), (0, 0, -1, 1),
    ]
    facets = [(i, j, k) for i in (0, 1) for j in (2, 3) for k in (4, 5)]
    return PLSurface(3, Mode.SPHERICAL, tuple(vertices), tuple(facets))


def square_cone_sphere() -> PLSurface:
    """S^3 with the boundary of K = span(e1) + a pointed square cone."""
    square = [(0, 1, 1, 1), (0, -1, 1, 1), (0, -1, -1, 1), (0, 1, -1, 1)]
    vertices = [(1, 0, 0, 0), (-1, 0, 0, 0)] + square
    facets = [(s, 2 + a, 2 + (a + 1) % 4) for s in (0, 1) for a in range(4)]
    return PLSurface(3, Mode.SPHERICAL, tuple(vertices), tuple(facets))


def doubled(s: PLSurface) -> PLSurface:
    shift = len(s.vertices)
    facets = tuple(s.facets) + tuple(tuple(i + shift for i in f) for f in s.facets)
    return PLSurface(s.ambient_dim, s.mode, tuple(s.vertices) * 2, facets, s.allow_boundary)


def prism_sides(polygon: Sequence[Sequence[int]], height: int = 1) -> PLSurface:
    """Side quads of polygon x [0, height]; top and bottom edges are boundary."""
    p = len(polygon)
    vertices = [tuple(Fraction(c) for c in q) + (Fraction(0),) for q in polygon]
    vertices += [tuple(Fraction(c) for c in q) + (Fraction(height),) for q in polygon]
    facets = [(j, (j + 1) % p, p + (j + 1) % p, p + j) for j in range(p)]
    return PLSurface(3, Mode.EUCLIDEAN, tuple(vertices), tuple(facets), allow_boundary=True)


SQUARE = [(0, 0), (2, 0), (2, 2), (0, 2)]
# counter-clockwise with a reflex corner at (2, 1)
DENTED = [(0, 0), (4, 0), (4, 4), (2, 1), (0, 4)]


def brute_force_hull(points: Sequence[Sequence]) -> Set[Hyperplane]:
    """Facet halfspaces of conv(points) by testing every n-subset."""
    n = len(points[0])
    found: Set[Hyperplane] = set()
    for subset in combinations(points, n):
        if rank([sub(p, subset[0]) for p in subset[1:]]) != n - 1:
            continue
        h = hyperplane_through(list(subset))
        values = [h.value(p) for p in points]
        if all(v <= 0 for v in values):
            found.add(h)
        elif all(v >= 0 for v in values):
            found.add(h.flipped())
    return found


def facet_vertex_sets(s: PLSurface) -> List[frozenset]:
    return sorted((frozenset(f) for f in s.facets), key=sorted)
