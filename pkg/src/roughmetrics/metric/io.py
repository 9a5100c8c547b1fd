"""JSON space and ordered-set files."""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Optional

from pydantic import ValidationError

from ..constructions.registry import build_space
from ..core.errors import MetricViolationError, SpaceFormatError
from ..core.models import ConstructionSpec, OrderedSetDocument, SpaceDocument, SpaceKind
from ..ordered.ordered_set import OrderedSet
from .analysis import snowflake, validate
from .space import FiniteMetricSpace

logger = logging.getLogger(__name__)


def _read_json(path: Path) -> Any:
    if not path.exists():
        raise FileNotFoundError(f"Space file not found: {path}")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise SpaceFormatError(
            f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from e


def _field(error: ValidationError) -> str:
    first = error.errors()[0]
    return ".".join(str(part) for part in first["loc"]) or "<root>"


def _require(value: Optional[Any], field: str, kind: str) -> Any:
    if value is None:
        raise SpaceFormatError(f"Space of kind {kind} needs '{field}'", field)
    return value


def space_from_document(doc: SpaceDocument) -> FiniteMetricSpace:
    """
    Build the space a document describes, without checking the metric axioms.

    Raises:
        SpaceFormatError: If a field required by the kind is missing
        StructuralError: If the data is malformed
    """
    kind = SpaceKind(doc.kind)
    if kind == SpaceKind.CONSTRUCTION:
        family = _require(doc.family, "family", kind.value)
        space = build_space(ConstructionSpec(family=family, params=doc.params or {}))
    elif kind == SpaceKind.SNOWFLAKE:
        base = space_from_document(_require(doc.base, "base", kind.value))
        space = snowflake(base, _require(doc.alpha, "alpha", kind.value))
    elif kind == SpaceKind.MATRIX:
        matrix = _require(doc.matrix, "matrix", kind.value)
        space = FiniteMetricSpace.from_matrix(matrix, labels=doc.points)
    else:
        coords = _require(doc.coords, "coords", kind.value)
        space = FiniteMetricSpace.from_coords(coords, norm=kind.value, labels=doc.points)

    if doc.name:
        space.name = doc.name
    return space


def document_from_space(space: FiniteMetricSpace) -> SpaceDocument:
    """Compact document: construction reference, snowflake wrapper, coordinates or matrix."""
    labels = list(space.labels)
    if space.construction is not None:
        return SpaceDocument(
            name=space.name,
            kind=SpaceKind.CONSTRUCTION,
            family=space.construction.family,
            params=space.construction.params,
        )
    if space.kind is SpaceKind.SNOWFLAKE:
        assert space.base is not None
        return SpaceDocument(
            name=space.name,
            kind=SpaceKind.SNOWFLAKE,
            points=labels,
            alpha=space.alpha,
            base=document_from_space(space.base),
        )
    if space.coords is not None:
        return SpaceDocument(
            name=space.name, kind=space.kind, points=labels, coords=space.coords.tolist()
        )
    return SpaceDocument(
        name=space.name, kind=SpaceKind.MATRIX, points=labels, matrix=space.matrix.tolist()
    )


def _checked(space: FiniteMetricSpace, source: str, tol: Optional[float]) -> FiniteMetricSpace:
    report = validate(space, tol)
    if not report.passed:
        logger.error(f"{source}: {len(report.violations)} metric violation(s)")
        raise MetricViolationError(f"{source} is not a metric space", report)
    return space


def parse_space(
    data: Any, source: str = "<data>", tol: Optional[float] = None
) -> FiniteMetricSpace:
    """
    Validate decoded JSON against the space schema and the metric axioms.

    Raises:
        SpaceFormatError: On a schema mismatch, naming the offending field
        MetricViolationError: If the space is not a metric within tol
    """
    try:
        doc = SpaceDocument.model_validate(data)
    except ValidationError as e:
        raise SpaceFormatError(f"{source}: {e.errors()[0]['msg']}", _field(e)) from e
    return _checked(space_from_document(doc), source, tol)


def load_space(path: Path, tol: Optional[float] = None) -> FiniteMetricSpace:
    """
    Load and validate a space file.

    Args:
        path: JSON space file
        tol: Tolerance of the metric check (settings default when None)

    Raises:
        FileNotFoundError: If the file does not exist
        SpaceFormatError: On invalid JSON (with line) or schema mismatch (with field)
        MetricViolationError: If the loaded space violates the metric axioms
    """
    space = parse_space(_read_json(path), str(path), tol)
    logger.debug(f"Loaded {space!r} from {path}")
    return space


def save_space(space: FiniteMetricSpace, path: Path) -> None:
    """Write a space file; floats keep their shortest round-trip representation."""
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = document_from_space(space)
    path.write_text(doc.model_dump_json(indent=2, exclude_none=True) + "\n", encoding="utf-8")
    logger.debug(f"Saved {space!r} to {path}")


def load_ordered_set(path: Path, tol: Optional[float] = None) -> OrderedSet:
    """
    Load an ordered-set file, or a plain space file taken in label order.

    The ``space`` entry is either an inline space document or a path relative
    to the ordered-set file.
    """
    data = _read_json(path)
    if isinstance(data, dict) and "kind" in data:
        return OrderedSet(parse_space(data, str(path), tol))

    try:
        doc = OrderedSetDocument.model_validate(data)
    except ValidationError as e:
        raise SpaceFormatError(f"{path}: {e.errors()[0]['msg']}", _field(e)) from e

    if isinstance(doc.space, str):
        space = load_space(path.parent / doc.space, tol)
    else:
        space = _checked(space_from_document(doc.space), str(path), tol)
    return OrderedSet(space, doc.order)


def save_ordered_set(s: OrderedSet, path: Path) -> None:
    """Write an ordered set with its space inline."""
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = OrderedSetDocument(space=document_from_space(s.space), order=s.order)
    path.write_text(doc.model_dump_json(indent=2, exclude_none=True) + "\n", encoding="utf-8")
