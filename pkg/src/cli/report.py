"""Report documents emitted by the command line.

Reports are pydantic models so that the JSON schema stays stable and is
validated on construction. Every rational is a "p/q" string; arrays are
index-sorted; nothing depends on wall-clock time unless timings are
explicitly enabled.
"""
from typing import Dict, List, Optional, Union

from pydantic import BaseModel, Field

from core.exact_geometry import format_scalar
from core.global_verdict import (
    BoundaryPresentNoGlobalClaim, ConeWitness, ConvexConeBoundary, ConvexEmbedding, JNDecomposition,
    NotLocallyConvex, StructuralReject, Verdict,
)
from core.local_convexity import FaceCertificate, LocalReport, RidgeClass
from core.surface_model import PLSurface, ValidationReport


class WitnessDoc(BaseModel):
    # each row is the normal followed by the offset: normal . x <= offset
    halfspaces: List[List[str]]
    lineality: List[List[str]]
    pointed_part_dim: int


class JNDoc(BaseModel):
    directrix_dim: Union[int, str]
    lineality_dim: int
    multiplicity: int
    embedded: bool
    generatrix_cells: Optional[int] = None
    generatrix_file: Optional[str] = None


class ViolationDoc(BaseModel):
    face: List[int]
    kind: str
    facets: List[int] = Field(default_factory=list)


class ValidationDoc(BaseModel):
    pseudomanifold: bool
    connected: bool
    closed: bool
    components: int
    facet_defects: List[int] = Field(default_factory=list)
    ridge_defects: List[int] = Field(default_factory=list)
    vertex_defects: List[int] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)


class LocalDoc(BaseModel):
    ridges_checked: int
    strictly_convex: int
    flat: int
    reflex: int
    vertices_checked: int
    vertex_method: Optional[str] = None


class ReportDoc(BaseModel):
    verdict: str
    exit_code: int
    mode: Optional[str] = None
    ambient_dim: Optional[int] = None
    witness: Optional[WitnessDoc] = None
    jn: Optional[JNDoc] = None
    exposed_vertex: Optional[int] = None
    strict_vertex: Optional[int] = None
    violations: List[ViolationDoc] = Field(default_factory=list)
    local: Optional[LocalDoc] = None
    validation: Optional[ValidationDoc] = None
    reason: Optional[str] = None
    error: Optional[str] = None
    timings: Dict[str, str] = Field(default_factory=dict)


# ===== Converters =====

def _rows(vectors) -> List[List[str]]:
    return [[format_scalar(a) for a in v] for v in vectors]


def witness_doc(w: ConeWitness) -> WitnessDoc:
    return WitnessDoc(
        halfspaces=[[format_scalar(a) for a in h.normal] + [format_scalar(h.offset)] for h in w.halfspaces],
        lineality=_rows(w.lineality.canonical().basis),
        pointed_part_dim=w.pointed_part_dim,
    )


def jn_doc(jn: JNDecomposition, generatrix_file: Optional[str] = None) -> JNDoc:
    return JNDoc(
        directrix_dim="pointed" if jn.pointed else jn.directrix_dim,
        lineality_dim=jn.lineality_dim,
        multiplicity=jn.multiplicity,
        embedded=jn.multiplicity == 1,
        generatrix_cells=None if jn.generatrix is None else len(jn.generatrix.facets),
        generatrix_file=generatrix_file,
    )


def violation_doc(c: FaceCertificate) -> ViolationDoc:
    return ViolationDoc(face=list(c.face), kind=c.kind, facets=sorted(c.facets))


def validation_doc(v: ValidationReport) -> ValidationDoc:
    return ValidationDoc(
        pseudomanifold=v.pseudomanifold,
        connected=v.connected,
        closed=v.closed,
        components=v.components,
        facet_defects=list(v.facet_defects),
        ridge_defects=list(v.ridge_defects),
        vertex_defects=list(v.vertex_defects),
        notes=list(v.notes),
    )


def local_doc(local: LocalReport) -> LocalDoc:
    classes = [r.ridge_class for r in local.ridges]
    methods = sorted({vv.method.value for vv in local.vertices})
    return LocalDoc(
        ridges_checked=len(classes),
        strictly_convex=classes.count(RidgeClass.STRICTLY_CONVEX),
        flat=classes.count(RidgeClass.FLAT),
        reflex=classes.count(RidgeClass.REFLEX),
        vertices_checked=len(local.vertices),
        vertex_method=methods[0] if len(methods) == 1 else None,
    )


def build_report(verdict: Verdict, s: Optional[PLSurface] = None,
                 generatrix_file: Optional[str] = None) -> ReportDoc:
    """Convert a verdict into its report document."""
    doc = ReportDoc(verdict=verdict.tag, exit_code=verdict.exit_code)
    if s is not None:
        doc.mode = s.mode.value
        doc.ambient_dim = s.ambient_dim

    if isinstance(verdict, ConvexEmbedding):
        doc.witness = witness_doc(verdict.witness)
        doc.exposed_vertex = verdict.exposed_vertex
    elif isinstance(verdict, ConvexConeBoundary):
        doc.witness = witness_doc(verdict.witness)
        doc.jn = jn_doc(verdict.jn, generatrix_file)
        doc.strict_vertex = verdict.strict_vertex
    elif isinstance(verdict, NotLocallyConvex):
        doc.violations = [violation_doc(c) for c in verdict.local.violations]
    elif isinstance(verdict, StructuralReject):
        doc.reason = verdict.reason
    elif isinstance(verdict, BoundaryPresentNoGlobalClaim):
        doc.violations = [violation_doc(c) for c in verdict.local.violations]

    local = getattr(verdict, "local", None)
    if local is not None:
        doc.local = local_doc(local)
    validation = getattr(verdict, "validation", None)
    if validation is not None:
        doc.validation = validation_doc(validation)
    return doc


def error_report(tag: str, exit_code: int, message: str) -> ReportDoc:
    return ReportDoc(verdict=tag, exit_code=exit_code, error=message)


# ===== Renderers =====

def to_json(doc: ReportDoc) -> str:
    return doc.model_dump_json(indent=2) + "\n"


def to_text(doc: ReportDoc) -> str:
    """Human-readable summary with the same content as the JSON."""
    lines = [f"verdict: {doc.verdict} (exit {doc.exit_code})"]
    if doc.mode is not None:
        lines.append(f"surface: {doc.mode}, n = {doc.ambient_dim}")
    if doc.error:
        lines.append(f"error: {doc.error}")
    if doc.reason:
        lines.append(f"reason: {doc.reason}")
    if doc.witness is not None:
        lines.append(f"witness: {len(doc.witness.halfspaces)} halfspaces (normal . x <= offset)")
        for row in doc.witness.halfspaces:
            lines.append(f"  [{' '.join(row[:-1])}] <= {row[-1]}")
        lines.append(f"lineality: dim {len(doc.witness.lineality)}")
        for row in doc.witness.lineality:
            lines.append(f"  [{' '.join(row)}]")
    if doc.jn is not None:
        lines.append(f"directrix dim: {doc.jn.directrix_dim}, multiplicity: {doc.jn.multiplicity}, "
                     f"embedded: {'yes' if doc.jn.embedded else 'no'}")
        if doc.jn.generatrix_file:
            lines.append(f"generatrix: {doc.jn.generatrix_file} ({doc.jn.generatrix_cells} cells)")
    if doc.exposed_vertex is not None:
        lines.append(f"exposed vertex: {doc.exposed_vertex}")
    if doc.strict_vertex is not None:
        lines.append(f"strictly convex vertex: {doc.strict_vertex}")
    for v in doc.violations:
        lines.append(f"violation: {v.kind} at face {v.face} (facets {v.facets})")
    if doc.local is not None:
        lines.append(f"ridges: {doc.local.ridges_checked} checked, {doc.local.strictly_convex} convex, "
                     f"{doc.local.flat} flat, {doc.local.reflex} reflex; vertices: {doc.local.vertices_checked}")
    if doc.validation is not None:
        val = doc.validation
        lines.append(f"validation: pseudomanifold={val.pseudomanifold} connected={val.connected} "
                     f"closed={val.closed} components={val.components}")
        for note in val.notes:
            lines.append(f"  {note}")
    for key, value in sorted(doc.timings.items()):
        lines.append(f"time {key}: {value}")
    return "\n".join(lines) + "\n"


def render(doc: ReportDoc, fmt: str) -> str:
    return to_text(doc) if fmt == "text" else to_json(doc)
