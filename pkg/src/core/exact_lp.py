"""Exact polyhedral computations on the Parma Polyhedra Library.

Every question the checker asks of a polyhedron (is it empty, give a
point of it, which rays are extreme, what are its lines) goes through
``ppl`` over the integers. Fraction rows are scaled to integer rows on
the way in; generators come back as Fractions or primitive integer
vectors.
"""
from fractions import Fraction
from math import lcm
from typing import List, Optional, Sequence, Tuple

import ppl

from core.exact_geometry import IntVector, Number, Vector, as_vector, is_zero, primitive

Constraint = Tuple[Sequence[Number], Number]


def _integer_row(a: Sequence[Number], b: Number = 0) -> Tuple[List[int], int]:
    values = [Fraction(x) for x in a] + [Fraction(b)]
    m = lcm(*(v.denominator for v in values))
    ints = [int(v * m) for v in values]
    return ints[:-1], ints[-1]


def _expression(coeffs: Sequence[int]) -> ppl.Linear_Expression:
    expr = ppl.Linear_Expression(0)
    for i, c in enumerate(coeffs):
        if c:
            expr = expr + c * ppl.Variable(i)
    return expr


def _coefficients(gen: ppl.Generator, dim: int) -> List[int]:
    return [int(gen.coefficient(ppl.Variable(i))) for i in range(dim)]


def _polyhedron(dim: int, eq: Sequence[Constraint] = (), le: Sequence[Constraint] = ()) -> ppl.C_Polyhedron:
    """{x in R^dim : a . x = b for eq, a . x <= b for le}."""
    poly = ppl.C_Polyhedron(dim, "universe")
    cs = ppl.Constraint_System()
    for a, b in eq:
        row, rhs = _integer_row(a, b)
        cs.insert(_expression(row) == rhs)
    for a, b in le:
        row, rhs = _integer_row(a, b)
        cs.insert(_expression(row) <= rhs)
    poly.add_constraints(cs)
    return poly


def _cone(rays: Sequence[Sequence[Number]], dim: int) -> ppl.C_Polyhedron:
    """cone(rays) in R^dim; zero rays are ignored."""
    gs = ppl.Generator_System()
    gs.insert(ppl.point(ppl.Linear_Expression(0)))
    for r in rays:
        if not is_zero(as_vector(r)):
            gs.insert(ppl.ray(_expression(primitive(r))))
    poly = ppl.C_Polyhedron(dim, "empty")
    poly.add_generators(gs)
    return poly


def _first_point(poly: ppl.C_Polyhedron, dim: int) -> Optional[Vector]:
    if poly.is_empty():
        return None
    for gen in poly.minimized_generators():
        if gen.is_point():
            d = int(gen.divisor())
            return tuple(Fraction(c, d) for c in _coefficients(gen, dim))
    return None


def _rays_and_lines(poly: ppl.C_Polyhedron, dim: int) -> Tuple[List[IntVector], List[IntVector]]:
    rays, lines = [], []
    for gen in poly.minimized_generators():
        if gen.is_ray():
            rays.append(primitive(_coefficients(gen, dim)))
        elif gen.is_line():
            lines.append(primitive(_coefficients(gen, dim)))
    return rays, lines


# ===== Feasibility =====

def feasible_nonneg(rows: Sequence[Sequence[Number]], rhs: Sequence[Number]) -> Optional[Vector]:
    """Find z >= 0 with rows . z = rhs, or None when infeasible."""
    if not rows:
        return ()
    n = len(rows[0])
    nonneg = [(tuple(-int(i == j) for j in range(n)), 0) for i in range(n)]
    return _first_point(_polyhedron(n, eq=list(zip(rows, rhs)), le=nonneg), n)


def find_point(dim: int, eq: Sequence[Constraint] = (), le: Sequence[Constraint] = ()) -> Optional[Vector]:
    """Find free x in R^dim with a . x = b for eq and a . x <= b for le."""
    return _first_point(_polyhedron(dim, eq, le), dim)


def open_halfspace(rays: Sequence[Sequence[Number]]) -> Optional[Vector]:
    """A functional a with a . r >= 1 for every ray, or None."""
    if not rays:
        return None
    dim = len(rays[0])
    return find_point(dim, le=[([-x for x in as_vector(r)], -1) for r in rays])


def strictly_separating(target: Sequence[Number], others: Sequence[Sequence[Number]]) -> Optional[Vector]:
    """A functional a with a . (target - w) >= 1 for every w in others, or None."""
    target = as_vector(target)
    dim = len(target)
    le = [([w_i - t_i for t_i, w_i in zip(target, as_vector(w))], -1) for w in others]
    return find_point(dim, le=le)


# ===== Cones =====

def cone_contains(rays: Sequence[Sequence[Number]], target: Sequence[Number]) -> bool:
    """True iff target is a nonnegative combination of rays."""
    target = as_vector(target)
    dim = len(target)
    divisor = lcm(*(t.denominator for t in target)) if target else 1
    coeffs = [int(t * divisor) for t in target]
    single = ppl.C_Polyhedron(dim, "empty")
    single.add_generator(ppl.point(_expression(coeffs), divisor))
    return _cone(rays, dim).contains(single)


def extreme_indices(rays: Sequence[Sequence[Number]]) -> List[int]:
    """Indices of rays that are not nonnegative combinations of the others."""
    rays = list(rays)
    if not rays:
        return []
    dim = len(rays[0])
    extreme, lines = _rays_and_lines(_cone(rays, dim), dim)
    if lines:
        # extreme rays are not unique modulo lines; decide one ray at a time
        return [i for i, r in enumerate(rays) if not cone_contains(rays[:i] + rays[i + 1:], r)]
    directions = [None if is_zero(as_vector(r)) else primitive(r) for r in rays]
    wanted = set(extreme)
    return [i for i, d in enumerate(directions) if d in wanted and directions.count(d) == 1]


def lineality_basis(normals: Sequence[Sequence[Number]], dim: int) -> List[IntVector]:
    """Lines of the cone {x : a . x <= 0 for every normal a}."""
    _, lines = _rays_and_lines(_polyhedron(dim, le=[(a, 0) for a in normals]), dim)
    return lines


def section_rays(rays: Sequence[Sequence[Number]], normals: Sequence[Sequence[Number]]) -> List[IntVector]:
    """Generators of cone(rays) cut by every hyperplane normal . x = 0.

    Lines of the section are returned as both of their directions.
    """
    rays = list(rays)
    if not rays:
        return []
    dim = len(rays[0])
    poly = _cone(rays, dim)
    cs = ppl.Constraint_System()
    for a in normals:
        row, _ = _integer_row(a)
        cs.insert(_expression(row) == 0)
    poly.add_constraints(cs)
    extreme, lines = _rays_and_lines(poly, dim)
    out = set(extreme)
    for line in lines:
        out.add(line)
        out.add(tuple(-c for c in line))
    return sorted(out)


def face_generators(dim: int, eq: Sequence[Constraint] = (), le: Sequence[Constraint] = ()
                    ) -> Tuple[List[Vector], List[IntVector], List[IntVector]]:
    """(vertices, extreme rays, lines) of a polyhedron given by constraints."""
    poly = _polyhedron(dim, eq, le)
    if poly.is_empty():
        return [], [], []
    points = []
    for gen in poly.minimized_generators():
        if gen.is_point():
            d = int(gen.divisor())
            points.append(tuple(Fraction(c, d) for c in _coefficients(gen, dim)))
    rays, lines = _rays_and_lines(poly, dim)
    return points, rays, lines
