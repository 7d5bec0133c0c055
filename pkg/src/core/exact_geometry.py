"""Exact rational linear algebra and geometric predicates.

Every coordinate in plconvex is a ``fractions.Fraction``; there is no
floating point anywhere in this module. Rank and determinants use
fraction-free (Bareiss) elimination over integers, nullspaces use a
Fraction RREF.

Spherical points live in the cone model: a point of S^n is a positive ray
in R^{n+1}, stored as a primitive integer vector.
"""
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from core.errors import Degenerate, DimensionMismatch, ZeroVector

Scalar = Fraction
Vector = Tuple[Fraction, ...]
IntVector = Tuple[int, ...]
Number = Union[int, Fraction]

_RATIONAL_RE = re.compile(r"^([+-]?\d+)(?:/(\d+))?$")


# ===== Scalars =====

def parse_scalar(text: str) -> Fraction:
    """Parse a rational literal ``p`` or ``p/q``.

    Raises:
        ValueError: malformed literal.
        ZeroDivisionError: zero denominator.
    """
    match = _RATIONAL_RE.match(text.strip())
    if not match:
        raise ValueError(f"not a rational literal: {text!r}")
    num = int(match.group(1))
    den = int(match.group(2)) if match.group(2) is not None else 1
    if den == 0:
        raise ZeroDivisionError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_scalar(value: Number) -> str:
    """Render a rational as ``p/q`` (``p`` when the denominator is 1)."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


# ===== Vectors =====

def as_vector(values: Iterable[Number]) -> Vector:
    return tuple(Fraction(v) for v in values)


def _check_same_length(*vectors: Sequence) -> int:
    lengths = {len(v) for v in vectors}
    if len(lengths) > 1:
        raise DimensionMismatch(f"vector lengths differ: {sorted(lengths)}")
    return lengths.pop() if lengths else 0


def dot(u: Sequence[Number], v: Sequence[Number]) -> Fraction:
    _check_same_length(u, v)
    return sum((Fraction(a) * b for a, b in zip(u, v)), Fraction(0))


def sub(u: Sequence[Number], v: Sequence[Number]) -> Vector:
    _check_same_length(u, v)
    return tuple(Fraction(a) - b for a, b in zip(u, v))


def add(u: Sequence[Number], v: Sequence[Number]) -> Vector:
    _check_same_length(u, v)
    return tuple(Fraction(a) + b for a, b in zip(u, v))


def scale(c: Number, v: Sequence[Number]) -> Vector:
    return tuple(Fraction(c) * a for a in v)


def combine(coeffs: Sequence[Number], vectors: Sequence[Sequence[Number]]) -> Vector:
    """Linear combination sum(c_i * v_i)."""
    if not vectors:
        raise DimensionMismatch("empty combination")
    dim = _check_same_length(*vectors)
    out = [Fraction(0)] * dim
    for c, v in zip(coeffs, vectors):
        c = Fraction(c)
        if c == 0:
            continue
        for i, a in enumerate(v):
            out[i] += c * a
    return tuple(out)


def is_zero(v: Sequence[Number]) -> bool:
    return all(a == 0 for a in v)


def sign(value: Number) -> int:
    return (value > 0) - (value < 0)


def lift(point: Sequence[Number]) -> Vector:
    """Homogenize a Euclidean point x to the ray (x, 1)."""
    return as_vector(point) + (Fraction(1),)


def primitive(v: Sequence[Number]) -> IntVector:
    """Positive rescaling of v to a primitive integer vector.

    Raises:
        ZeroVector: v is zero.
    """
    fracs = as_vector(v)
    if is_zero(fracs):
        raise ZeroVector("cannot normalize the zero vector")
    lcm = 1
    for a in fracs:
        lcm = lcm * a.denominator // gcd(lcm, a.denominator)
    ints = [int(a * lcm) for a in fracs]
    content = reduce(gcd, (abs(a) for a in ints))
    return tuple(a // content for a in ints)


def sign_normalized(v: Sequence[Number]) -> IntVector:
    """Primitive integer vector whose first nonzero entry is positive."""
    p = primitive(v)
    first = next(a for a in p if a != 0)
    return p if first > 0 else tuple(-a for a in p)


# ===== Elimination =====

def _integer_rows(rows: Sequence[Sequence[Number]]) -> Tuple[List[List[int]], int]:
    """Scale each row to integers; return rows and the product of the scale factors."""
    out = []
    factor = 1
    for row in rows:
        fr = as_vector(row)
        lcm = 1
        for a in fr:
            lcm = lcm * a.denominator // gcd(lcm, a.denominator)
        out.append([int(a * lcm) for a in fr])
        factor *= lcm
    return out, factor


def _bareiss(matrix: List[List[int]]) -> Tuple[int, int, List[List[int]]]:
    """Fraction-free row echelon form.

    Returns (rank, sign of row permutation, echelon matrix). Every division
    is exact because intermediate entries are minors of the input.
    """
    m = [row[:] for row in matrix]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    prev = 1
    perm_sign = 1
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        pivot = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if pivot is None:
            continue
        if pivot != r:
            m[r], m[pivot] = m[pivot], m[r]
            perm_sign = -perm_sign
        for i in range(r + 1, nrows):
            for j in range(c + 1, ncols):
                m[i][j] = (m[r][c] * m[i][j] - m[i][c] * m[r][j]) // prev
            m[i][c] = 0
        prev = m[r][c]
        r += 1
    return r, perm_sign, m


def rank(vectors: Sequence[Sequence[Number]]) -> int:
    """Exact rank of a list of vectors.

    Raises:
        DimensionMismatch: vectors of different lengths.
    """
    if not vectors:
        return 0
    _check_same_length(*vectors)
    ints, _ = _integer_rows(vectors)
    return _bareiss(ints)[0]


def det(rows: Sequence[Sequence[Number]]) -> Fraction:
    """Exact determinant of a square matrix."""
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise DimensionMismatch("determinant needs a square matrix")
    if n == 0:
        return Fraction(1)
    ints, factor = _integer_rows(rows)
    r, perm_sign, echelon = _bareiss(ints)
    if r < n:
        return Fraction(0)
    return Fraction(perm_sign * echelon[n - 1][n - 1], factor)


def rref(rows: Sequence[Sequence[Number]]) -> Tuple[List[List[Fraction]], List[int]]:
    """Reduced row echelon form over Fractions; returns (nonzero rows, pivot columns)."""
    m = [list(as_vector(r)) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][c]
        m[r] = [a * inv for a in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def nullspace(rows: Sequence[Sequence[Number]], ncols: Optional[int] = None) -> List[IntVector]:
    """Integer basis of {x : row . x = 0 for every row}."""
    if rows:
        ncols = _check_same_length(*rows)
    if ncols is None:
        raise DimensionMismatch("nullspace of an empty matrix needs ncols")
    reduced, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(reduced, pivots):
            x[p] = -row[f]
        basis.append(primitive(x))
    return basis


def solve(matrix: Sequence[Sequence[Number]], rhs: Sequence[Number]) -> Optional[Vector]:
    """Unique solution of a square nonsingular system, else None."""
    n = len(matrix)
    augmented = [list(as_vector(row)) + [Fraction(b)] for row, b in zip(matrix, rhs)]
    reduced, pivots = rref(augmented)
    if pivots != list(range(n)):
        return None
    return tuple(row[n] for row in reduced)


# ===== Predicates =====

def orientation(pts: Sequence[Sequence[Number]]) -> int:
    """Sign of det[p_1 - p_0, ..., p_n - p_0] for n+1 points in R^n.

    Raises:
        DimensionMismatch: wrong number of points or lengths differ.
    """
    if not pts:
        raise DimensionMismatch("orientation needs points")
    n = _check_same_length(*pts)
    if len(pts) != n + 1:
        raise DimensionMismatch(f"orientation in R^{n} needs {n + 1} points, got {len(pts)}")
    base = pts[0]
    return sign(det([sub(p, base) for p in pts[1:]]))


@dataclass(frozen=True)
class Hyperplane:
    """Affine hyperplane normal . x = offset with a primitive integer normal.

    Spherical hyperplanes have offset 0 and live in R^{n+1}. When the
    hyperplane bounds a halfspace, the halfspace is normal . x <= offset.
    """

    normal: IntVector
    offset: Fraction = Fraction(0)

    @classmethod
    def make(cls, normal: Sequence[Number], offset: Number = 0, oriented: bool = False) -> "Hyperplane":
        """Scale to a primitive integer normal; flip to the sign convention unless oriented."""
        fr = as_vector(normal)
        if is_zero(fr):
            raise ZeroVector("hyperplane normal is zero")
        prim = primitive(fr)
        ratio = Fraction(prim[next(i for i, a in enumerate(prim) if a != 0)]) / fr[
            next(i for i, a in enumerate(fr) if a != 0)
        ]
        h = cls(prim, Fraction(offset) * ratio)
        return h if oriented else h.canonical()

    @classmethod
    def from_linear(cls, normal: Sequence[Number], mode_euclidean: bool, oriented: bool = True) -> "Hyperplane":
        """Convert a homogeneous normal (a, c) of the cone model.

        Euclidean: (a, c) . (x, 1) <= 0 becomes a . x <= -c.
        """
        if mode_euclidean:
            return cls.make(normal[:-1], -Fraction(normal[-1]), oriented=oriented)
        return cls.make(normal, 0, oriented=oriented)

    def canonical(self) -> "Hyperplane":
        first = next(a for a in self.normal if a != 0)
        if first > 0:
            return self
        return Hyperplane(tuple(-a for a in self.normal), -self.offset)

    def flipped(self) -> "Hyperplane":
        return Hyperplane(tuple(-a for a in self.normal), -self.offset)

    def linear(self, mode_euclidean: bool) -> Vector:
        """Homogeneous normal in the cone model."""
        if mode_euclidean:
            return as_vector(self.normal) + (-self.offset,)
        return as_vector(self.normal)

    def value(self, p: Sequence[Number]) -> Fraction:
        return dot(self.normal, p) - self.offset

    def sort_key(self) -> Tuple:
        return (self.normal, self.offset)


def hyperplane_through(pts: Sequence[Sequence[Number]]) -> Hyperplane:
    """Canonical hyperplane through n affinely independent points of R^n.

    Raises:
        DimensionMismatch: wrong number of points or lengths differ.
        Degenerate: the points are affinely dependent.
    """
    if not pts:
        raise DimensionMismatch("hyperplane_through needs points")
    n = _check_same_length(*pts)
    if len(pts) != n:
        raise DimensionMismatch(f"hyperplane in R^{n} needs {n} points, got {len(pts)}")
    base = pts[0]
    diffs = [sub(p, base) for p in pts[1:]]
    if rank(diffs) != n - 1:
        raise Degenerate("points are affinely dependent")
    normal = nullspace(diffs, n)[0]
    return Hyperplane.make(normal, dot(normal, base))


def side(h: Hyperplane, p: Sequence[Number]) -> int:
    """sign(normal . p - offset).

    Raises:
        DimensionMismatch: p has the wrong length.
    """
    return sign(h.value(p))


# ===== Subspaces =====

@dataclass(frozen=True)
class SubspaceBasis:
    """Linearly independent basis of a subspace of R^ambient_dim."""

    basis: Tuple[Vector, ...]
    ambient_dim: int

    def __post_init__(self):
        for b in self.basis:
            if len(b) != self.ambient_dim:
                raise DimensionMismatch("basis vector length differs from ambient dimension")
        if rank(self.basis) != len(self.basis):
            raise Degenerate("basis vectors are linearly dependent")

    @classmethod
    def spanning(cls, vectors: Sequence[Sequence[Number]], ambient_dim: int) -> "SubspaceBasis":
        """Canonical basis of the span of arbitrary vectors."""
        reduced, _ = rref(vectors) if vectors else ([], [])
        return cls(tuple(as_vector(primitive(row)) for row in reduced), ambient_dim)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def canonical(self) -> "SubspaceBasis":
        """Primitive integer RREF rows; equal subspaces give equal results."""
        return SubspaceBasis.spanning(self.basis, self.ambient_dim)

    def same_space(self, other: "SubspaceBasis") -> bool:
        return self.ambient_dim == other.ambient_dim and self.canonical().basis == other.canonical().basis

    def contains(self, v: Sequence[Number]) -> bool:
        return rank(list(self.basis) + [v]) == self.dim

    def coordinates(self, v: Sequence[Number]) -> Vector:
        """Coordinates of the orthogonal projection of v in this basis (Gram solve)."""
        gram = [[dot(a, b) for b in self.basis] for a in self.basis]
        coords = solve(gram, [dot(a, v) for a in self.basis])
        if coords is None:
            raise Degenerate("singular Gram matrix")
        return coords


def orthogonal_complement(b: SubspaceBasis, ambient_dim: Optional[int] = None) -> SubspaceBasis:
    """Exact basis of the orthogonal complement of span(b)."""
    ambient_dim = b.ambient_dim if ambient_dim is None else ambient_dim
    if ambient_dim != b.ambient_dim:
        raise DimensionMismatch("ambient dimension differs from the basis")
    if b.dim == 0:
        basis = [tuple(Fraction(int(i == j)) for j in range(ambient_dim)) for i in range(ambient_dim)]
        return SubspaceBasis(tuple(basis), ambient_dim)
    comp = nullspace(b.basis, ambient_dim)
    return SubspaceBasis.spanning(comp, ambient_dim)


# ===== Spherical points =====

@dataclass(frozen=True)
class SphPoint:
    """A point of S^n: a positive ray in R^{n+1}, primitive integer form."""

    ray: IntVector

    @property
    def dim(self) -> int:
        return len(self.ray)

    def __neg__(self) -> "SphPoint":
        return SphPoint(tuple(-a for a in self.ray))


def canonical_sph(v: Sequence[Number]) -> SphPoint:
    """Canonical representative of the ray through v.

    Raises:
        ZeroVector: v is zero.
    """
    return SphPoint(primitive(v))


def antipodal(p: SphPoint, q: SphPoint) -> bool:
    _check_same_length(p.ray, q.ray)
    return (-p) == q
