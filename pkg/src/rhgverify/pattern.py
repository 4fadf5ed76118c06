"""Measurement patterns, logical-boundary targets and the circuit text format.

A pattern lists the Z-measured primal edges (primal defect lines) and the
Z-measured faces (dual defect lines, via the identification of dual edges with
primal faces); every other bulk qubit is X-measured. The logical input sits in
the plane x = 0 and the output in the plane x = s1 - 1.
"""

import logging
import re
from collections import Counter
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .complex import CellRef, LatticeShape, in_lattice
from .errors import CircuitSyntaxError, InputError

logger = logging.getLogger(__name__)


class TargetKind(str, Enum):
    """Which lattice a correlation surface lives on."""
    PRIMAL = "primal"
    DUAL = "dual"

    @property
    def cell_dimension(self) -> int:
        """Dimension of the primal cells that make up a boundary of this kind."""
        return 1 if self is TargetKind.PRIMAL else 2


def cell_key(cell: CellRef) -> Tuple[int, Tuple[int, ...]]:
    """Canonical order: orientation first, then coordinates."""
    if cell.dimension in (1, 2):
        return cell.axis, cell.coords
    return 0, cell.coords


def sorted_cells(cells: Iterable[CellRef]) -> List[CellRef]:
    return sorted(cells, key=cell_key)


class MeasurementPattern(BaseModel):
    """Z-measured cells of a lattice; the rest of the bulk is measured in X."""

    model_config = ConfigDict(frozen=True)

    shape: LatticeShape = Field(..., description="Lattice the pattern lives on")
    primal_z: FrozenSet[CellRef] = Field(default_factory=frozenset, description="Z-measured edges")
    dual_z: FrozenSet[CellRef] = Field(default_factory=frozenset, description="Z-measured faces")

    @model_validator(mode="after")
    def check_cells(self) -> "MeasurementPattern":
        for name, cells, dimension in (("primal_z", self.primal_z, 1), ("dual_z", self.dual_z, 2)):
            for cell in cells:
                if cell.dimension != dimension:
                    raise ValueError(f"{name} holds {cell}, expected {dimension}-cells")
                if not in_lattice(self.shape, cell):
                    raise ValueError(f"{cell} lies outside the {self.shape} lattice")
        return self

    def measured_cells(self) -> List[CellRef]:
        """Measured cells in canonical order: primal edges, then dual faces."""
        return sorted_cells(self.primal_z) + sorted_cells(self.dual_z)


class LogicalTarget(BaseModel):
    """A logical operator on the in/out planes that a correlation surface must bound."""

    model_config = ConfigDict(frozen=True)

    id: str = Field(..., description="Identifier, unique within a circuit")
    kind: TargetKind = Field(..., description="Primal (edges) or dual (faces)")
    boundary: FrozenSet[CellRef] = Field(default_factory=frozenset, description="Boundary cells")
    description: str = Field("", description="Free text, e.g. the operator mapping")

    @field_validator("id")
    @classmethod
    def check_id(cls, v: str) -> str:
        if not re.fullmatch(r"[A-Za-z0-9_.\-]+", v):
            raise ValueError(f"target id {v!r} must be a single word")
        return v

    @field_validator("description")
    @classmethod
    def clean_description(cls, v: str) -> str:
        return " ".join(v.split())

    @model_validator(mode="after")
    def check_dimension(self) -> "LogicalTarget":
        expected = self.kind.cell_dimension
        for cell in self.boundary:
            if cell.dimension != expected:
                raise ValueError(f"{self.kind.value} target {self.id} holds {cell}")
        return self


class CircuitSpec(BaseModel):
    """A measurement pattern together with the targets it must realize."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(..., description="Circuit name")
    pattern: MeasurementPattern
    targets: Tuple[LogicalTarget, ...] = Field(default_factory=tuple)
    metadata: Dict[str, str] = Field(default_factory=dict, description="Free key/value annotations")

    @field_validator("name")
    @classmethod
    def check_name(cls, v: str) -> str:
        if not re.fullmatch(r"[A-Za-z0-9_.\-]+", v):
            raise ValueError(f"circuit name {v!r} must be a single word")
        return v

    @model_validator(mode="after")
    def check_targets(self) -> "CircuitSpec":
        counts = Counter(t.id for t in self.targets)
        duplicates = sorted(i for i, n in counts.items() if n > 1)
        if duplicates:
            raise ValueError(f"duplicate target id(s): {', '.join(duplicates)}")
        for target in self.targets:
            for cell in target.boundary:
                if not in_lattice(self.pattern.shape, cell):
                    raise ValueError(f"target {target.id}: {cell} lies outside the lattice")
        return self

    def __hash__(self) -> int:
        return hash((self.name, self.pattern, self.targets))

    def target(self, target_id: str) -> LogicalTarget:
        for t in self.targets:
            if t.id == target_id:
                return t
        raise InputError(f"circuit {self.name} has no target {target_id!r}")


def build_spec(**fields) -> CircuitSpec:
    """Construct a :class:`CircuitSpec`, reporting validation failures as input errors."""
    try:
        return CircuitSpec(**fields)
    except ValidationError as e:
        raise InputError(_first_message(e)) from e


def _first_message(error: ValidationError) -> str:
    first = error.errors()[0]
    return str(first.get("ctx", {}).get("error", first["msg"]))


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------

SECTIONS = {"PRIMAL_Z": 1, "DUAL_Z": 2}
_TOKEN = re.compile(r"\S+")


class _Line:
    __slots__ = ("number", "tokens", "columns")

    def __init__(self, number: int, text: str):
        self.number = number
        matches = list(_TOKEN.finditer(text))
        self.tokens = [m.group() for m in matches]
        self.columns = [m.start() + 1 for m in matches]

    def error(self, message: str, token: int = 0) -> CircuitSyntaxError:
        column = self.columns[token] if token < len(self.columns) else None
        return CircuitSyntaxError(message, line=self.number, column=column)


class _Parser:
    """Line-oriented state machine over the circuit format."""

    def __init__(self, text: str):
        self.text = text
        self.shape: Optional[LatticeShape] = None
        self.name = "circuit"
        self.metadata: Dict[str, str] = {}
        self.cells = {1: [], 2: []}
        self.targets: List[LogicalTarget] = []
        self.section: Optional[int] = None
        self.open_target: Optional[dict] = None

    def run(self) -> CircuitSpec:
        last: Optional[_Line] = None
        for number, raw in enumerate(self.text.splitlines(), start=1):
            line = _Line(number, raw.split("#", 1)[0])
            if not line.tokens:
                continue
            last = line
            self.feed(line)
        if self.open_target is not None:
            raise CircuitSyntaxError(
                f"target {self.open_target['id']} is missing END", line=self.open_target["line"]
            )
        if self.shape is None:
            raise CircuitSyntaxError("missing SHAPE line", line=last.number if last else 1)
        pattern = MeasurementPattern(
            shape=self.shape, primal_z=frozenset(self.cells[1]), dual_z=frozenset(self.cells[2])
        )
        return build_spec(
            name=self.name, pattern=pattern, targets=tuple(self.targets), metadata=self.metadata
        )

    def feed(self, line: _Line) -> None:
        keyword = line.tokens[0]
        if self.open_target is not None:
            if keyword == "END":
                self.close_target(line)
            else:
                self.add_cell(line, self.open_target["cells"], self.open_target["dimension"])
            return
        if keyword == "SHAPE":
            self.read_shape(line)
        elif keyword == "NAME":
            self.expect(line, 2)
            self.name = line.tokens[1]
        elif keyword == "META":
            if len(line.tokens) < 2:
                raise line.error("META needs a key")
            self.metadata[line.tokens[1]] = " ".join(line.tokens[2:])
        elif keyword == "SECTION":
            self.expect(line, 2)
            if line.tokens[1] not in SECTIONS:
                raise line.error(f"unknown section {line.tokens[1]!r}", 1)
            self.section = SECTIONS[line.tokens[1]]
        elif keyword == "TARGET":
            self.open(line)
        elif keyword == "END":
            raise line.error("END without an open TARGET")
        elif self.section is not None:
            self.add_cell(line, self.cells[self.section], self.section)
        else:
            raise line.error(f"unexpected {keyword!r} outside any section")

    @staticmethod
    def expect(line: _Line, count: int) -> None:
        if len(line.tokens) != count:
            raise line.error(f"{line.tokens[0]} takes {count - 1} argument(s), got {len(line.tokens) - 1}")

    def read_shape(self, line: _Line) -> None:
        if self.shape is not None:
            raise line.error("SHAPE given twice")
        self.expect(line, 4)
        try:
            sides = [int(t) for t in line.tokens[1:]]
        except ValueError:
            raise line.error("SHAPE needs three integers", 1) from None
        try:
            self.shape = LatticeShape.of(sides)
        except InputError as e:
            raise line.error(str(e), 1) from None

    def open(self, line: _Line) -> None:
        if len(line.tokens) < 3:
            raise line.error("TARGET needs an id and PRIMAL or DUAL")
        kind = line.tokens[2].upper()
        if kind not in ("PRIMAL", "DUAL"):
            raise line.error(f"target kind must be PRIMAL or DUAL, got {line.tokens[2]!r}", 2)
        target_id = line.tokens[1]
        if any(t.id == target_id for t in self.targets):
            raise line.error(f"duplicate target id {target_id!r}", 1)
        kind = TargetKind(kind.lower())
        self.open_target = {
            "id": target_id,
            "kind": kind,
            "dimension": kind.cell_dimension,
            "description": " ".join(line.tokens[3:]),
            "cells": [],
            "line": line.number,
        }
        self.section = None

    def close_target(self, line: _Line) -> None:
        spec = self.open_target
        self.open_target = None
        try:
            self.targets.append(
                LogicalTarget(
                    id=spec["id"],
                    kind=spec["kind"],
                    boundary=frozenset(spec["cells"]),
                    description=spec["description"],
                )
            )
        except ValidationError as e:
            raise CircuitSyntaxError(_first_message(e), line=spec["line"]) from e

    def add_cell(self, line: _Line, bucket: List[CellRef], dimension: int) -> None:
        if self.shape is None:
            raise line.error("SHAPE must come before any cell")
        if len(line.tokens) != 6:
            raise line.error(f"expected 6 coordinates, got {len(line.tokens)}")
        try:
            cell = CellRef.from_text(dimension, line.tokens)
        except InputError as e:
            raise line.error(str(e)) from None
        if not in_lattice(self.shape, cell):
            raise line.error(f"{cell.to_text()} is out of range for shape {self.shape}")
        if cell in bucket:
            raise line.error(f"duplicate cell {cell.to_text()}")
        bucket.append(cell)


def parse_circuit(text: str) -> CircuitSpec:
    """Parse the circuit text format into a validated :class:`CircuitSpec`."""
    return _Parser(text).run()


def serialize_circuit(spec: CircuitSpec) -> str:
    """Canonical text form; ``parse_circuit`` inverts it exactly."""
    shape = spec.pattern.shape
    lines = [f"SHAPE {shape.s1} {shape.s2} {shape.s3}", f"NAME {spec.name}"]
    for key in sorted(spec.metadata):
        value = " ".join(spec.metadata[key].split())
        lines.append(f"META {key} {value}".rstrip())
    for section, cells in (("PRIMAL_Z", spec.pattern.primal_z), ("DUAL_Z", spec.pattern.dual_z)):
        lines.append(f"SECTION {section}")
        lines.extend(cell.to_text() for cell in sorted_cells(cells))
    for target in spec.targets:
        header = f"TARGET {target.id} {target.kind.value.upper()} {target.description}"
        lines.append(header.rstrip())
        lines.extend(f"  {cell.to_text()}" for cell in sorted_cells(target.boundary))
        lines.append("END")
    return "\n".join(lines) + "\n"


def load_circuit(path: str) -> CircuitSpec:
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except (IOError, UnicodeDecodeError) as e:
        raise InputError(f"cannot read circuit file {path}: {e}") from e
    try:
        return parse_circuit(text)
    except CircuitSyntaxError as e:
        raise CircuitSyntaxError(f"{path}: {e.detail}", line=e.line, column=e.column) from e


def save_circuit(spec: CircuitSpec, path: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as f:
            f.write(serialize_circuit(spec))
    except IOError as e:
        raise InputError(f"cannot write circuit file {path}: {e}") from e


# ---------------------------------------------------------------------------
# Checks and test hooks
# ---------------------------------------------------------------------------

def _odd(points: Iterable[Tuple[int, ...]]) -> List[Tuple[int, ...]]:
    counts = Counter(points)
    return sorted(p for p, n in counts.items() if n % 2)


def _fmt(point: Tuple[int, ...]) -> str:
    return "(" + ", ".join(CellRef(0, point).to_text().split()) + ")"


def validate_pattern(pattern: MeasurementPattern) -> List[str]:
    """Warnings for defect lines that stop inside the bulk.

    Primal lines must end on a boundary plane; dual lines must end in the
    outermost cube layer or leave the lattice through a surface face.
    """
    warnings = []
    top = [2 * (s - 1) for s in pattern.shape.sides]
    ends = _odd(p for edge in pattern.primal_z for p in (edge.coords[:3], edge.coords[3:]))
    for vertex in ends:
        if not any(c == 0 or c == t for c, t in zip(vertex, top)):
            warnings.append(f"primal Z-line ends inside the bulk at vertex {_fmt(vertex)}")
    ends = _odd(p for face in pattern.dual_z for p in (face.coords[:3], face.coords[3:]))
    for cube in ends:
        virtual = any(c < 1 or c > t - 1 for c, t in zip(cube, top))
        if virtual:
            continue
        if not any(c == 1 or c == t - 1 for c, t in zip(cube, top)):
            warnings.append(f"dual Z-line ends inside the bulk at cube {_fmt(cube)}")
    return warnings


class Plane(str, Enum):
    IN = "in"
    OUT = "out"
    INTERIOR = "interior"


def plane_of(shape: LatticeShape, kind: TargetKind, cell: CellRef) -> Plane:
    """Where a target cell sits: the input plane, the output plane or the bulk."""
    c = cell.coords
    if kind is TargetKind.PRIMAL:
        first, last = 0, 2 * (shape.s1 - 1)
    else:
        # dual cells live one half-step inside the primal planes
        first, last = 1, 2 * shape.s1 - 3
    if c[0] == c[3] == first:
        return Plane.IN
    if c[0] == c[3] == last:
        return Plane.OUT
    return Plane.INTERIOR


def target_planes(spec: CircuitSpec) -> Dict[str, Dict[CellRef, Plane]]:
    shape = spec.pattern.shape
    return {t.id: {cell: plane_of(shape, t.kind, cell) for cell in t.boundary} for t in spec.targets}


def target_warnings(spec: CircuitSpec) -> List[str]:
    warnings = []
    for target_id, planes in target_planes(spec).items():
        interior = [cell for cell, plane in planes.items() if plane is Plane.INTERIOR]
        if interior:
            warnings.append(
                f"target {target_id} has {len(interior)} cell(s) off the in/out planes, "
                f"e.g. {sorted_cells(interior)[0].to_text()}"
            )
    return warnings


def corrupt(pattern: MeasurementPattern, n: int) -> MeasurementPattern:
    """Copy of ``pattern`` with its n-th measured cell (1-based, canonical order) un-measured."""
    measured = pattern.measured_cells()
    if not 1 <= n <= len(measured):
        raise InputError(f"cannot corrupt cell {n}: the pattern measures {len(measured)} cells")
    victim = measured[n - 1]
    logger.debug("Removing measured cell %s", victim)
    return MeasurementPattern(
        shape=pattern.shape,
        primal_z=pattern.primal_z - {victim},
        dual_z=pattern.dual_z - {victim},
    )
