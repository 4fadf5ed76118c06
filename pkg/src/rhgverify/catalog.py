"""Built-in circuits, described by the geometry of their defect lines.

Every entry is assembled from a few waypoints (straight primal lines, dual
paths through cube corners, loops) rather than listed cell by cell; ``catalog
export`` writes the expanded cell lists in the circuit text format. Cube
positions are given by their lowest corner, so the cube with midpoint
(0.5, 1.5, 1.5) is written (0, 1, 1).

Logical qubits are defect pairs running along x from the input plane x = 0
to the output plane x = s1 - 1.
"""

import logging
from collections import Counter
from typing import Callable, Dict, Iterable, List, Sequence, Tuple

from .complex import AXES, CellRef, LatticeShape, cell_boundary
from .errors import InputError
from .pattern import CircuitSpec, LogicalTarget, MeasurementPattern, TargetKind, build_spec

logger = logging.getLogger(__name__)

Point = Tuple[int, int, int]


# ---------------------------------------------------------------------------
# Geometry helpers
# ---------------------------------------------------------------------------

def mod2(*groups: Iterable[CellRef]) -> frozenset:
    """Cells occurring an odd number of times across ``groups`` (chain addition)."""
    counts = Counter(cell for group in groups for cell in group)
    return frozenset(cell for cell, n in counts.items() if n % 2)


def x_line(length: int, y: int, z: int) -> List[CellRef]:
    """Primal defect line along x through every slab, at transverse position (y, z)."""
    return [CellRef.edge((x, y, z), (x + 1, y, z)) for x in range(length - 1)]


def segment(start: Point, axis: int, steps: int) -> List[CellRef]:
    """``steps`` consecutive edges from ``start`` along ``axis``."""
    edges = []
    point = list(start)
    for _ in range(steps):
        nxt = list(point)
        nxt[axis] += 1
        edges.append(CellRef.edge(point, nxt))
        point = nxt
    return edges


def cube_path(corners: Sequence[Point]) -> List[CellRef]:
    """Dual defect line through consecutive face-adjacent cubes."""
    faces = []
    for p, q in zip(corners, corners[1:]):
        if sorted(abs(a - b) for a, b in zip(p, q)) != [0, 0, 1]:
            raise InputError(f"cubes {p} and {q} are not face-adjacent")
        faces.append(CellRef.face(p, q))
    return faces


def cube_loop(corners: Sequence[Point]) -> List[CellRef]:
    return cube_path(list(corners) + [corners[0]])


def walk(start: Point, moves: Sequence[Tuple[int, int]]) -> List[Point]:
    """Cube corners visited from ``start`` by (axis, signed step count) moves."""
    corners = [tuple(start)]
    for axis, count in moves:
        step = 1 if count > 0 else -1
        for _ in range(abs(count)):
            nxt = list(corners[-1])
            nxt[axis] += step
            corners.append(tuple(nxt))
    return corners


def plaquette(low: Point, high: Point) -> List[CellRef]:
    """Boundary of the face separating cubes ``low`` and ``high``."""
    return cell_boundary(CellRef.face(low, high))


def edge_ring(edge: CellRef) -> List[CellRef]:
    """The four faces containing ``edge``: a small dual loop around it."""
    along = edge.axis
    v = [c // 2 for c in edge.coords[:3]]
    faces = []
    for normal in AXES:
        if normal == along:
            continue
        other = 3 - along - normal
        for shift in (-1, 0):
            p = list(v)
            p[other] += shift
            p[normal] -= 1
            q = list(p)
            q[normal] += 1
            faces.append(CellRef.face(p, q))
    return faces


def line_tube_ends(length: int, y: int, z: int) -> frozenset:
    """Dual rings around an x-line in the first and last slab."""
    first = CellRef.edge((0, y, z), (1, y, z))
    last = CellRef.edge((length - 2, y, z), (length - 1, y, z))
    return mod2(edge_ring(first), edge_ring(last))


def pair_segments(length: int, y: int, z0: int, z1: int) -> frozenset:
    """Primal segments joining two lines at (y, z0) and (y, z1) on both planes."""
    return mod2(segment((0, y, z0), 2, z1 - z0), segment((length - 1, y, z0), 2, z1 - z0))


def _target(target_id: str, kind: TargetKind, cells: Iterable[CellRef], description: str) -> LogicalTarget:
    return LogicalTarget(id=target_id, kind=kind, boundary=mod2(cells), description=description)


def _spec(name, sides, primal, dual, targets, **metadata) -> CircuitSpec:
    pattern = MeasurementPattern(
        shape=LatticeShape.of(sides), primal_z=mod2(primal), dual_z=mod2(dual)
    )
    return build_spec(name=name, pattern=pattern, targets=tuple(targets), metadata=metadata)


PRIMAL = TargetKind.PRIMAL
DUAL = TargetKind.DUAL


# ---------------------------------------------------------------------------
# Entries
# ---------------------------------------------------------------------------

def identity() -> CircuitSpec:
    """One primal qubit carried straight from input to output."""
    sides = (4, 5, 6)
    length = sides[0]
    lower, upper = x_line(length, 2, 2), x_line(length, 2, 4)
    targets = [
        _target("z_pair", PRIMAL, pair_segments(length, 2, 2, 4), "Z -> Z"),
        _target("x_ring", DUAL, line_tube_ends(length, 2, 2), "X -> X"),
    ]
    return _spec(
        "identity", sides, lower + upper, [], targets,
        gate="identity",
        layout="primal lines at (y,z)=(2,2) and (2,4)",
    )


def _cnot_dual_line(dy: int, length: int, braided: bool) -> List[Point]:
    # enters and leaves through surface faces so the rings around it cannot be capped
    if not braided:
        return walk((-1, 1 + dy, 1), [(0, length)])
    # wraps over and around the first primal line
    return walk(
        (-1, 1 + dy, 1),
        [(0, 2), (2, 2), (0, 1), (1, 2), (0, 1), (2, -2), (0, 1), (1, -2), (0, 2)],
    )


def cnot(braided: bool = True) -> CircuitSpec:
    """A dual control qubit braided around one primal line of the target qubit.

    With ``braided=False`` the control lines run straight past the target,
    which implements the identity on both qubits and must reject the
    entangling targets.
    """
    sides = (7, 9, 8)
    length = sides[0]
    p1, p2 = x_line(length, 3, 3), x_line(length, 3, 6)
    d1 = cube_path(_cnot_dual_line(0, length, braided))
    d2 = cube_path(_cnot_dual_line(4, length, braided))
    last = length - 1
    control_ring_in = plaquette((-1, 1, 1), (0, 1, 1))
    control_ring_out = plaquette((last - 1, 1, 1), (last, 1, 1))

    def dual_bridge(slab: int) -> List[CellRef]:
        return cube_path(walk((slab, 1, 1), [(1, 4)]))

    targets = [
        _target("x_control", DUAL,
                mod2(dual_bridge(0), dual_bridge(last - 1),
                     edge_ring(CellRef.edge((last - 1, 3, 3), (last, 3, 3)))),
                "X1 -> X1 X2"),
        _target("z_target", PRIMAL,
                mod2(pair_segments(length, 3, 3, 6), control_ring_out),
                "Z2 -> Z1 Z2"),
        _target("z_control", PRIMAL, mod2(control_ring_in, control_ring_out), "Z1 -> Z1"),
        _target("x_target", DUAL, line_tube_ends(length, 3, 3), "X2 -> X2"),
    ]
    layout = "dual control pair in slabs y=1 and y=5, entering and leaving through surface faces"
    if braided:
        layout += ", braided around primal line (y,z)=(3,3)"
    return _spec(
        "cnot" if braided else "cnot_unbraided", sides, p1 + p2, d1 + d2, targets,
        gate="CNOT" if braided else "identity",
        layout=layout,
    )


def _loop_pair_lines(length: int) -> List[CellRef]:
    return x_line(length, 2, 3) + x_line(length, 2, 5) + x_line(length, 5, 3) + x_line(length, 5, 5)


def _loop_pair_targets(length: int) -> List[LogicalTarget]:
    last = length - 1
    r12 = pair_segments(length, 2, 3, 5)
    r34 = pair_segments(length, 5, 3, 5)
    square_in = plaquette((-1, 3, 1), (0, 3, 1))
    square_out = plaquette((last - 1, 3, 1), (last, 3, 1))
    t1 = line_tube_ends(length, 2, 3)
    t3 = line_tube_ends(length, 5, 3)
    return [
        _target("r12_r34", PRIMAL, mod2(r12, r34), "Z on both pairs"),
        _target("square_in", PRIMAL, square_in, "trivial loop on the input plane"),
        _target("square_out", PRIMAL, square_out, "trivial loop on the output plane"),
        _target("r12_r34_square", PRIMAL, mod2(r12, r34, square_in), "Z on both pairs times a trivial loop"),
        _target("tube_p1", DUAL, t1, "X around line 1"),
        _target("tube_p3", DUAL, t3, "X around line 3"),
        _target("tube_p2", DUAL, line_tube_ends(length, 2, 5), "X around line 2"),
        _target("tube_p4", DUAL, line_tube_ends(length, 5, 5), "X around line 4"),
        _target("tube_p1_p3", DUAL, mod2(t1, t3), "X around lines 1 and 3"),
    ]


def _flat_loop(slab: int, y0: int, y1: int, z: int) -> List[CellRef]:
    """Dual loop in one slab around the rectangle y in (y0, y1 + 1), z in (z, z + 2)."""
    span = y1 - y0
    return cube_loop(walk((slab, y0, z), [(1, span), (2, 1), (1, -span)]))


def _folded_loop(slab: int, y0: int, y1: int, z: int) -> List[CellRef]:
    """The same loop with its upper row pushed into the next slab."""
    span = y1 - y0
    return cube_loop(walk((slab, y0, z), [(1, span), (0, 1), (2, 1), (1, -span), (0, -1)]))


def loop_pair_a() -> CircuitSpec:
    """A flat dual loop around lines 1 and 3 of two primal qubits."""
    sides = (5, 8, 8)
    return _spec(
        "loop_pair_a", sides, _loop_pair_lines(sides[0]), _flat_loop(2, 1, 5, 2),
        _loop_pair_targets(sides[0]),
        gate="loop",
        layout="dual loop in slab x=2 around lines (2,3) and (5,3)",
    )


def loop_pair_b() -> CircuitSpec:
    """The loop of ``loop_pair_a`` folded across two slabs."""
    sides = (5, 8, 8)
    return _spec(
        "loop_pair_b", sides, _loop_pair_lines(sides[0]), _folded_loop(1, 1, 5, 2),
        _loop_pair_targets(sides[0]),
        gate="loop",
        layout="dual loop folded over slabs x=1 and x=2 around lines (2,3) and (5,3)",
    )


def _eight_lines(length: int) -> List[CellRef]:
    cells = []
    for y in range(2, 10):
        cells += x_line(length, y, 3) + x_line(length, y, 6)
    return cells


def _eight_line_targets(length: int) -> List[LogicalTarget]:
    pairs = {i: pair_segments(length, y, 3, 6) for i, y in enumerate(range(2, 10), start=1)}
    t1 = line_tube_ends(length, 2, 3)
    t8 = line_tube_ends(length, 9, 3)
    targets = [
        _target(f"r{i}_r{i + 1}", PRIMAL, mod2(pairs[i], pairs[i + 1]), f"Z on pairs {i} and {i + 1}")
        for i in (1, 3, 5, 7)
    ]
    targets += [
        _target("r1_r8", PRIMAL, mod2(pairs[1], pairs[8]), "Z on pairs 1 and 8"),
        _target("r_all", PRIMAL, mod2(*pairs.values()), "Z on all eight pairs"),
        _target("tube_p1", DUAL, t1, "X around line 1"),
        _target("tube_p8", DUAL, t8, "X around line 8"),
        _target("tube_p1_p8", DUAL, mod2(t1, t8), "X around lines 1 and 8"),
    ]
    return targets


def _loop_pair_parity(length: int) -> List[LogicalTarget]:
    return [
        _target("r12", PRIMAL, pair_segments(length, 2, 3, 5), "Z on the first pair alone"),
        _target("r34", PRIMAL, pair_segments(length, 5, 3, 5), "Z on the second pair alone"),
    ]


def _eight_line_parity(length: int) -> List[LogicalTarget]:
    pairs = {i: pair_segments(length, y, 3, 6) for i, y in enumerate(range(2, 10), start=1)}
    return [
        _target("r1", PRIMAL, pairs[1], "Z on pair 1 alone"),
        _target("r8", PRIMAL, pairs[8], "Z on pair 8 alone"),
        _target("r1_r2_r3", PRIMAL, mod2(pairs[1], pairs[2], pairs[3]), "Z on pairs 1 to 3"),
    ]


def eight_line_loop() -> CircuitSpec:
    """One dual loop around eight primal lines in a single slab."""
    sides = (5, 12, 8)
    return _spec(
        "eight_line_loop", sides, _eight_lines(sides[0]), _flat_loop(2, 1, 9, 2),
        _eight_line_targets(sides[0]),
        gate="loop",
        layout="dual loop in slab x=2 around lines (2..9,3)",
    )


def folded_box() -> CircuitSpec:
    """The eight-line loop folded into a box spanning two slabs."""
    sides = (5, 12, 8)
    return _spec(
        "folded_box", sides, _eight_lines(sides[0]), _folded_loop(1, 1, 9, 2),
        _eight_line_targets(sides[0]),
        gate="loop",
        layout="dual loop folded over slabs x=1 and x=2 around lines (2..9,3)",
    )


_ENTRIES: Dict[str, Callable[[], CircuitSpec]] = {
    "identity": identity,
    "cnot": cnot,
    "loop_pair_a": loop_pair_a,
    "loop_pair_b": loop_pair_b,
    "eight_line_loop": eight_line_loop,
    "folded_box": folded_box,
}

EQUIVALENT_PAIRS = (("loop_pair_a", "loop_pair_b"), ("eight_line_loop", "folded_box"))


def entry_names() -> List[str]:
    return list(_ENTRIES)


def get_entry(name: str) -> CircuitSpec:
    try:
        builder = _ENTRIES[name]
    except KeyError:
        raise InputError(f"unknown catalog entry {name!r}; choose from {', '.join(_ENTRIES)}") from None
    return builder()


def catalog() -> List[CircuitSpec]:
    """All built-in circuits in a fixed order."""
    return [builder() for builder in _ENTRIES.values()]


_PARITY: Dict[str, Callable[[int], List[LogicalTarget]]] = {
    "loop_pair_a": _loop_pair_parity,
    "loop_pair_b": _loop_pair_parity,
    "eight_line_loop": _eight_line_parity,
    "folded_box": _eight_line_parity,
}


def parity_targets(spec: CircuitSpec) -> List[LogicalTarget]:
    """Targets on an odd number of the pairs a loop entry encloses.

    The loop pierces each enclosed pair surface once, so all of these must be
    rejected; without the loop they would be accepted.
    """
    try:
        builder = _PARITY[spec.name]
    except KeyError:
        raise InputError(f"{spec.name} has no enclosing loop") from None
    return builder(spec.pattern.shape.s1)
