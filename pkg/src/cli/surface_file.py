"""The native ``.plx`` surface file format.

    plconvex 1
    # optional comments anywhere
    dim 3
    mode euclidean
    boundary closed
    counts 8 6
    0 0 0            <- V vertex lines: n rationals (n + 1 for spherical)
    ...
    4 0 1 3 2        <- F facet lines: k followed by k 0-based indices

Rationals are ``p`` or ``p/q``. ``write`` emits the canonical form:
reduced fractions, primitive integer rays for spherical vertices, single
spaces and LF line endings.
"""
import re
from fractions import Fraction
from pathlib import Path
from typing import Iterator, List, Optional, Sequence, Tuple, Union

from core.errors import BadIndex, BadRational, Syntax, Unsupported
from core.exact_geometry import format_scalar, parse_scalar
from core.surface_model import Mode, PLSurface
from utils.logger import setup_logger

logger = setup_logger(__name__)

MAGIC = ("plconvex", "1")
_TOKEN = re.compile(r"\S+")

Token = Tuple[str, int]


class _Reader:
    """Iterates over meaningful lines as (line number, [(token, column)])."""

    def __init__(self, text: str):
        self._lines = list(self._tokenize(text))
        self._pos = 0
        self.last_line = text.count("\n") + 1

    @staticmethod
    def _tokenize(text: str) -> Iterator[Tuple[int, List[Token]]]:
        for number, raw in enumerate(text.split("\n"), start=1):
            content = raw.rstrip("\r").split("#", 1)[0]
            tokens = [(m.group(0), m.start() + 1) for m in _TOKEN.finditer(content)]
            if tokens:
                yield number, tokens

    def next(self, what: str) -> Tuple[int, List[Token]]:
        if self._pos >= len(self._lines):
            raise Syntax(f"unexpected end of file, expected {what}", self.last_line, 1)
        item = self._lines[self._pos]
        self._pos += 1
        return item

    def rest(self) -> Optional[Tuple[int, List[Token]]]:
        return self._lines[self._pos] if self._pos < len(self._lines) else None


def _keyword(reader: _Reader, key: str, n_values: int) -> Tuple[int, List[Token]]:
    line, tokens = reader.next(f"'{key}'")
    if tokens[0][0] != key:
        raise Syntax(f"expected '{key}', found '{tokens[0][0]}'", line, tokens[0][1])
    if len(tokens) != n_values + 1:
        raise Syntax(f"'{key}' takes {n_values} value(s)", line, tokens[0][1])
    return line, tokens[1:]


def _int(token: Token, line: int, what: str, minimum: Optional[int] = 0) -> int:
    text, col = token
    if not re.fullmatch(r"[+-]?\d+", text):
        raise Syntax(f"{what} must be an integer, found '{text}'", line, col)
    value = int(text)
    if minimum is not None and value < minimum:
        raise Syntax(f"{what} must be at least {minimum}", line, col)
    return value


def parse(data: Union[str, bytes], mode_override: Optional[Union[str, Mode]] = None) -> PLSurface:
    """Parse a surface file.

    Args:
        data: File contents
        mode_override: Reinterpret the surface in another mode. Euclidean
            vertices x become spherical rays (x, 1); spherical rays with a
            positive last coordinate are dehomogenized.

    Raises:
        Syntax: malformed header, counts or line layout.
        BadRational: a coordinate is not p or p/q with q != 0.
        BadIndex: a facet refers to a missing vertex.
        Unsupported: hyperbolic mode, or an override that cannot be applied.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise Syntax(f"file is not UTF-8: {e}", 1, 1) from e
    reader = _Reader(data)

    line, tokens = reader.next("header")
    if tuple(t for t, _ in tokens) != MAGIC:
        raise Syntax("missing 'plconvex 1' header", line, tokens[0][1])

    line, (dim_token,) = _keyword(reader, "dim", 1)
    n = _int(dim_token, line, "dim", minimum=1)

    line, (mode_token,) = _keyword(reader, "mode", 1)
    mode_name = mode_token[0].lower()
    if mode_name == "hyperbolic":
        raise Unsupported("hyperbolic surfaces are not supported: local convexity implies nothing global there")
    if mode_name not in ("euclidean", "spherical"):
        raise Syntax(f"unknown mode '{mode_token[0]}'", line, mode_token[1])
    mode = Mode(mode_name)

    line, (boundary_token,) = _keyword(reader, "boundary", 1)
    if boundary_token[0] not in ("allowed", "closed"):
        raise Syntax("boundary must be 'allowed' or 'closed'", line, boundary_token[1])
    allow_boundary = boundary_token[0] == "allowed"

    line, (v_token, f_token) = _keyword(reader, "counts", 2)
    n_vertices = _int(v_token, line, "vertex count")
    n_facets = _int(f_token, line, "facet count")

    width = n if mode is Mode.EUCLIDEAN else n + 1
    vertices = []
    for _ in range(n_vertices):
        line, tokens = reader.next("a vertex line")
        if len(tokens) != width:
            raise Syntax(f"vertex line needs {width} coordinates, found {len(tokens)}", line, tokens[0][1])
        coords = []
        for text, col in tokens:
            try:
                coords.append(parse_scalar(text))
            except (ValueError, ZeroDivisionError) as e:
                raise BadRational(f"bad rational '{text}'", line, col) from e
        if mode is Mode.SPHERICAL and not any(coords):
            raise BadRational("spherical vertex is the zero vector", line, tokens[0][1])
        vertices.append(tuple(coords))

    facets = []
    for _ in range(n_facets):
        line, tokens = reader.next("a facet line")
        k = _int(tokens[0], line, "facet size", minimum=1)
        if len(tokens) != k + 1:
            raise Syntax(f"facet declares {k} vertices but lists {len(tokens) - 1}", line, tokens[0][1])
        face = []
        for token in tokens[1:]:
            index = _int(token, line, "vertex index", minimum=None)
            if not 0 <= index < n_vertices:
                raise BadIndex(f"vertex index {index} out of range 0..{n_vertices - 1}", line, token[1])
            face.append(index)
        facets.append(tuple(face))

    extra = reader.rest()
    if extra is not None:
        raise Syntax("unexpected content after the last facet", extra[0], extra[1][0][1])

    surface = PLSurface(n, mode, tuple(vertices), tuple(facets), allow_boundary)
    logger.debug(f"Parsed {mode.value} surface in dimension {n}: {n_vertices} vertices, {n_facets} facets")
    if mode_override is not None and Mode(mode_override) is not mode:
        surface = convert_mode(surface, Mode(mode_override))
    return surface


def convert_mode(s: PLSurface, mode: Mode) -> PLSurface:
    """Re-express a surface in the other model through the cone lift.

    Raises:
        Unsupported: a spherical vertex is not in the open upper hemisphere.
    """
    if mode is s.mode:
        return s
    if mode is Mode.SPHERICAL:
        vertices = tuple(tuple(v) + (1,) for v in s.vertices)
    else:
        vertices = []
        for k, v in enumerate(s.vertices):
            if v.ray[-1] <= 0:
                raise Unsupported(f"vertex {k} is not in the open upper hemisphere; cannot dehomogenize")
            vertices.append(tuple(Fraction(a, v.ray[-1]) for a in v.ray[:-1]))
        vertices = tuple(vertices)
    logger.info(f"Mode override: reading the surface as {mode.value}")
    return PLSurface(s.ambient_dim, mode, vertices, s.facets, s.allow_boundary)


def dumps(s: PLSurface, comments: Sequence[str] = ()) -> str:
    """Canonical text of a surface."""
    lines = ["plconvex 1"]
    lines += [f"# {c}" for c in comments]
    lines += [
        f"dim {s.ambient_dim}",
        f"mode {s.mode.value}",
        f"boundary {'allowed' if s.allow_boundary else 'closed'}",
        f"counts {len(s.vertices)} {len(s.facets)}",
    ]
    for v in s.vertices:
        coords = v if s.is_euclidean else v.ray
        lines.append(" ".join(format_scalar(c) for c in coords))
    for f in s.facets:
        lines.append(" ".join(str(x) for x in (len(f),) + tuple(f)))
    return "\n".join(lines) + "\n"


def write(s: PLSurface, comments: Sequence[str] = ()) -> bytes:
    return dumps(s, comments).encode("utf-8")


def load(path: Union[str, Path], mode_override: Optional[Union[str, Mode]] = None) -> PLSurface:
    path = Path(path)
    surface = parse(path.read_bytes(), mode_override)
    logger.info(f"📄 Loaded {path.name}: {len(surface.vertices)} vertices, {len(surface.facets)} facets")
    return surface


def save(path: Union[str, Path], s: PLSurface, comments: Sequence[str] = ()) -> Path:
    path = Path(path)
    path.write_bytes(write(s, comments))
    logger.info(f"💾 Wrote {path}")
    return path
