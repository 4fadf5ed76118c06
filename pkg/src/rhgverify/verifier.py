"""Existence of correlation surfaces for a measurement pattern.

A primal target is realized when some 2-chain avoiding the Z-measured faces
has the target as its boundary relative to the Z-measured edges; dual targets
are the same question on the dual lattice. Both reduce to a GF(2) solvability
test ``rank(op) == rank(op | b)`` on a masked boundary matrix.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from .complex import ChainComplex, CellRef, cell_boundary, outermost_edges
from .config import worker_count
from .errors import InputError, OracleLimitError
from .gf2 import BitMatrix, BitVector, solvability, solve
from .pattern import CircuitSpec, LogicalTarget, MeasurementPattern, TargetKind, target_warnings, validate_pattern

logger = logging.getLogger(__name__)

DEFAULT_ORACLE_LIMIT = 20


class RelativeOperators(BaseModel):
    """Boundary operators of the complex relative to the measured cells."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    d2r: BitMatrix = Field(..., description="Primal relative boundary, edges x faces")
    d2r_dual: BitMatrix = Field(..., description="Smoothed dual relative boundary, faces x edges")
    measured_edges: Tuple[int, ...] = Field(..., description="Indices of Z-measured edges")
    measured_faces: Tuple[int, ...] = Field(..., description="Indices of Z-measured faces")
    smoothed_edges: Tuple[int, ...] = Field(..., description="Indices of outermost edges")

    def operator(self, kind: TargetKind) -> BitMatrix:
        return self.d2r if kind is TargetKind.PRIMAL else self.d2r_dual


class TargetResult(BaseModel):
    """Verdict and rank statistics for one target."""

    id: str
    kind: TargetKind
    accepted: bool
    rank: int = Field(..., description="Rank of the relative operator")
    aug_rank: int = Field(..., description="Rank of the operator augmented with the target")
    witness: Optional[Tuple[CellRef, ...]] = Field(None, description="A surface, when requested")
    description: str = ""

    @property
    def witness_size(self) -> Optional[int]:
        return None if self.witness is None else len(self.witness)


class VerificationReport(BaseModel):
    """Per-target results in the circuit's target order."""

    name: str
    shape: Tuple[int, int, int]
    results: Tuple[TargetResult, ...] = Field(default_factory=tuple)
    warnings: Tuple[str, ...] = Field(default_factory=tuple)
    elapsed: float = Field(0.0, description="Wall-clock seconds")

    @property
    def accepted(self) -> bool:
        return all(r.accepted for r in self.results)

    @property
    def rejected(self) -> List[str]:
        return [r.id for r in self.results if not r.accepted]


def _check_shape(complex_: ChainComplex, pattern: MeasurementPattern) -> None:
    if pattern.shape != complex_.shape:
        raise InputError(f"pattern shape {pattern.shape} does not match lattice {complex_.shape}")


def smooth_dual(complex_: ChainComplex, d2r_dual: BitMatrix) -> BitMatrix:
    """Drop the outermost edges so half dual cells at the surface never take part."""
    return d2r_dual.zero_columns(outermost_edges(complex_))


def relative_operators(complex_: ChainComplex, pattern: MeasurementPattern) -> RelativeOperators:
    _check_shape(complex_, pattern)
    edges = tuple(sorted(complex_.index_of(c) for c in pattern.primal_z))
    faces = tuple(sorted(complex_.index_of(c) for c in pattern.dual_z))
    d2r = complex_.d2.zero_rows(edges).zero_columns(faces)
    d2r_dual = smooth_dual(complex_, complex_.d2.transpose().zero_rows(faces).zero_columns(edges))
    logger.debug(
        "Relative operators: %d measured edges, %d measured faces", len(edges), len(faces)
    )
    return RelativeOperators(
        d2r=d2r,
        d2r_dual=d2r_dual,
        measured_edges=edges,
        measured_faces=faces,
        smoothed_edges=tuple(outermost_edges(complex_)),
    )


def target_vector(complex_: ChainComplex, target: LogicalTarget) -> BitVector:
    dimension = target.kind.cell_dimension
    for cell in target.boundary:
        if cell.dimension != dimension:
            raise InputError(f"{target.kind.value} target {target.id} contains {cell}")
    return complex_.chain(dimension, target.boundary)


def check_witness(ops: RelativeOperators, kind: TargetKind, target: BitVector, witness: BitVector) -> bool:
    """Re-multiply a witness through the relative operator."""
    return ops.operator(kind).matvec(witness) == target


def _check_target(
    complex_: ChainComplex, ops: RelativeOperators, target: LogicalTarget, want_witness: bool
) -> TargetResult:
    op = ops.operator(target.kind)
    b = target_vector(complex_, target)
    rank, aug_rank = solvability(op, b)
    accepted = rank == aug_rank
    witness = None
    if accepted and want_witness:
        x = solve(op, b)
        if x is None or not check_witness(ops, target.kind, b, x):
            raise AssertionError(f"witness for {target.id} fails re-multiplication")
        # primal surfaces are faces, dual surfaces are (dual faces identified with) edges
        witness = tuple(complex_.cells_of(3 - target.kind.cell_dimension, x))
    logger.debug("Target %s: rank %d, augmented rank %d", target.id, rank, aug_rank)
    return TargetResult(
        id=target.id,
        kind=target.kind,
        accepted=accepted,
        rank=rank,
        aug_rank=aug_rank,
        witness=witness,
        description=target.description,
    )


def verify(
    complex_: ChainComplex,
    spec: CircuitSpec,
    want_witness: bool = False,
    workers: Optional[int] = None,
) -> VerificationReport:
    """Check every target of ``spec``; independent targets run on a thread pool."""
    started = time.perf_counter()
    warnings = validate_pattern(spec.pattern) + target_warnings(spec)
    for warning in warnings:
        logger.warning(warning)
    ops = relative_operators(complex_, spec.pattern)
    threads = worker_count(workers)
    if threads > 1 and len(spec.targets) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda t: _check_target(complex_, ops, t, want_witness), spec.targets))
    else:
        results = [_check_target(complex_, ops, t, want_witness) for t in spec.targets]
    elapsed = time.perf_counter() - started
    logger.info(
        "Verified %s: %d/%d targets accepted in %.2fs",
        spec.name, sum(r.accepted for r in results), len(results), elapsed,
    )
    return VerificationReport(
        name=spec.name,
        shape=spec.pattern.shape.sides,
        results=tuple(results),
        warnings=tuple(warnings),
        elapsed=elapsed,
    )


def verdict_vector(report: VerificationReport) -> Tuple[Tuple[str, bool], ...]:
    """``(id, accepted)`` pairs, for comparing equivalent patterns."""
    return tuple((r.id, r.accepted) for r in report.results)


# ---------------------------------------------------------------------------
# Exhaustive oracle
# ---------------------------------------------------------------------------

def _edge_cofaces(complex_: ChainComplex) -> Dict[CellRef, List[CellRef]]:
    cofaces: Dict[CellRef, List[CellRef]] = {edge: [] for edge in complex_.cells[1]}
    for face in complex_.cells[2]:
        for edge in cell_boundary(face):
            cofaces[edge].append(face)
    return cofaces


def _mask(cells: Iterable[CellRef], position: Dict[CellRef, int]) -> int:
    mask = 0
    for cell in cells:
        if cell in position:
            mask ^= 1 << position[cell]
    return mask


def brute_force_surface_exists(
    complex_: ChainComplex,
    pattern: MeasurementPattern,
    target: LogicalTarget,
    max_free_cells: int = DEFAULT_ORACLE_LIMIT,
    support: Optional[Sequence[CellRef]] = None,
) -> bool:
    """Search all 2-chains over the free cells for one bounding ``target``.

    Exponential in the number of free cells and built from cell geometry
    alone, so it shares no code with the rank test. ``support`` restricts the
    search to a subset of free cells; a hit is then still a valid surface.
    """
    _check_shape(complex_, pattern)
    if target.kind is TargetKind.PRIMAL:
        free = [f for f in complex_.cells[2] if f not in pattern.dual_z]
        blocked = pattern.primal_z
        rows = {edge: i for i, edge in enumerate(complex_.cells[1]) if edge not in blocked}
        boundary = {face: cell_boundary(face) for face in free}
        target_cells, row_dimension = target.boundary, 1
    else:
        cofaces = _edge_cofaces(complex_)
        outer = {complex_.cells[1][i] for i in outermost_edges(complex_)}
        free = [e for e in complex_.cells[1] if e not in pattern.primal_z and e not in outer]
        rows = {face: i for i, face in enumerate(complex_.cells[2]) if face not in pattern.dual_z}
        boundary = {edge: cofaces[edge] for edge in free}
        target_cells, row_dimension = target.boundary, 2
    if any(cell.dimension != row_dimension for cell in target_cells):
        raise InputError(f"{target.kind.value} target {target.id} has cells of the wrong dimension")
    if support is not None:
        allowed = set(support)
        free = [cell for cell in free if cell in allowed]
    if len(free) > max_free_cells:
        raise OracleLimitError(
            f"oracle would enumerate 2^{len(free)} chains (limit 2^{max_free_cells})"
        )
    # a target on a masked cell can never be a relative boundary
    all_rows = {cell: i for i, cell in enumerate(complex_.cells[row_dimension])}
    wanted = _mask(target_cells, all_rows)
    masks = [_mask(boundary[cell], rows) for cell in free]
    current = 0
    if current == wanted:
        return True
    for step in range(1, 1 << len(masks)):
        bit = (step & -step).bit_length() - 1
        current ^= masks[bit]
        if current == wanted:
            return True
    return False
