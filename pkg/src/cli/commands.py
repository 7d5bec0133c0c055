"""The check, decompose and gen commands.

Each command returns its exit code together with the report document;
``main`` only parses arguments and prints.
"""
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Dict, Iterator, Mapping, Optional, Tuple, Union

from cli.generators import GeneratedSurface, generate
from cli.report import ReportDoc, build_report, error_report, witness_doc
from cli.surface_file import load, save
from config import settings
from core.errors import BadParams, InternalInconsistency, PLConvexError, SurfaceFileError, Unsupported
from core.global_verdict import ConvexConeBoundary, ConvexEmbedding, Verdict, check_surface
from utils.logger import setup_logger

logger = setup_logger(__name__)

PathLike = Union[str, Path]


@contextmanager
def _timed(timings: Dict[str, str], key: str) -> Iterator[None]:
    start = time.perf_counter()
    try:
        yield
    finally:
        if settings.REPORT_TIMINGS:
            timings[key] = f"{time.perf_counter() - start:.3f}s"


def _error_tag(e: PLConvexError) -> str:
    if isinstance(e, SurfaceFileError):
        return "FileError"
    if isinstance(e, Unsupported):
        return "Unsupported"
    return type(e).__name__


def _handle(e: PLConvexError) -> Tuple[int, ReportDoc]:
    if isinstance(e, InternalInconsistency):
        logger.error(f"❌ Internal inconsistency: {e}", exc_info=True)
    elif e.exit_code == 1:
        logger.warning(f"⚠️ {type(e).__name__}: {e}")
    else:
        logger.error(f"❌ {type(e).__name__}: {e}")
    return e.exit_code, error_report(_error_tag(e), e.exit_code, str(e))


def _write_witness(verdict: Verdict, path: PathLike) -> None:
    if isinstance(verdict, (ConvexEmbedding, ConvexConeBoundary)):
        Path(path).write_text(witness_doc(verdict.witness).model_dump_json(indent=2) + "\n", encoding="utf-8")
        logger.info(f"💾 Witness written to {path}")
    else:
        logger.warning(f"⚠️ Verdict {verdict.tag} has no witness; {path} not written")


def cmd_check(path: PathLike, mode_override: Optional[str] = None,
              witness_out: Optional[PathLike] = None) -> Tuple[int, ReportDoc]:
    """Check one surface file.

    Returns:
        (exit code, report): 0 positive, 1 negative, 2 structural or file
        error, 3 unsupported, 4 internal inconsistency
    """
    timings: Dict[str, str] = {}
    try:
        with _timed(timings, "load"):
            surface = load(path, mode_override)
        with _timed(timings, "check"):
            verdict = check_surface(surface)
    except PLConvexError as e:
        return _handle(e)

    if witness_out is not None:
        _write_witness(verdict, witness_out)
    doc = build_report(verdict, surface)
    doc.timings = timings
    logger.info(f"Verdict for {Path(path).name}: {verdict.tag} (exit {verdict.exit_code})")
    return verdict.exit_code, doc


def generatrix_path(path: PathLike) -> Path:
    path = Path(path)
    return path.with_name(f"{path.stem}.generatrix.plx")


def cmd_decompose(path: PathLike, mode_override: Optional[str] = None,
                  witness_out: Optional[PathLike] = None) -> Tuple[int, ReportDoc]:
    """Directrix/generatrix decomposition of a closed spherical surface.

    The generatrix section is written next to the input as
    ``<stem>.generatrix.plx`` unless the surface is a great subsphere.
    """
    timings: Dict[str, str] = {}
    try:
        with _timed(timings, "load"):
            surface = load(path, mode_override)
        if surface.is_euclidean:
            raise Unsupported("decompose needs a spherical surface; try --mode-override spherical")
        with _timed(timings, "check"):
            verdict = check_surface(surface)
    except PLConvexError as e:
        return _handle(e)

    if witness_out is not None:
        _write_witness(verdict, witness_out)
    generatrix_file = None
    if isinstance(verdict, ConvexConeBoundary) and verdict.jn.generatrix is not None:
        target = generatrix_path(path)
        comments = (
            f"generatrix of {Path(path).name}",
            f"lineality {verdict.jn.lineality_dim}, multiplicity {verdict.jn.multiplicity}",
        )
        save(target, verdict.jn.generatrix, comments)
        generatrix_file = target.name
    doc = build_report(verdict, surface, generatrix_file)
    doc.timings = timings
    return verdict.exit_code, doc


def parse_params(pairs) -> Dict[str, str]:
    """``key=value`` strings to a dict.

    Raises:
        BadParams: a pair has no '='.
    """
    params: Dict[str, str] = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise BadParams(f"expected key=value, got '{pair}'")
        params[key.strip()] = value.strip()
    return params


def cmd_gen(kind: str, params: Mapping[str, str], seed: Optional[int] = None,
            out: Optional[PathLike] = None) -> Tuple[int, GeneratedSurface]:
    """Generate a surface and optionally save it.

    Raises:
        BadParams: unknown kind or parameter out of range.
    """
    seed = settings.DEFAULT_SEED if seed is None else seed
    generated = generate(kind, params, seed)
    if out is not None:
        save(out, generated.surface, generated.comments)
    return 0, generated
