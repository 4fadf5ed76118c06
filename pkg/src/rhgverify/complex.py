"""The rectangular-cuboid cell complex underlying the RHG cluster state.

Primal vertices sit on integer points of ``[0, s1) x [0, s2) x [0, s3)`` and
primal cubes are centred on half-integer points. Edges are written as the pair
of vertices they join and faces as the pair of cube midpoints they separate,
so a single sextuple grammar covers both. A face on the surface of the cuboid
separates one real cube from a virtual one just outside (a coordinate of -0.5
or ``s_i - 0.5``).

All coordinates are stored doubled, as integers: vertices have even doubled
coordinates and cube midpoints odd ones.
"""

import itertools
import logging
from fractions import Fraction
from typing import Dict, Iterable, List, NamedTuple, Sequence, Set, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .errors import InputError
from .gf2 import BitMatrix, BitVector

logger = logging.getLogger(__name__)

AXES = (0, 1, 2)
AXIS_NAMES = ("x", "y", "z")


class LatticeShape(BaseModel):
    """Number of primal vertices along each axis."""

    model_config = ConfigDict(frozen=True)

    s1: int = Field(..., description="Primal vertices along x")
    s2: int = Field(..., description="Primal vertices along y")
    s3: int = Field(..., description="Primal vertices along z")

    @field_validator("s1", "s2", "s3")
    @classmethod
    def check_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError(f"side length must be at least 1, got {v}")
        return v

    @classmethod
    def of(cls, values: Union["LatticeShape", Sequence[int]]) -> "LatticeShape":
        """Coerce a triple into a shape, reporting bad values as input errors."""
        if isinstance(values, LatticeShape):
            return values
        values = list(values)
        if len(values) != 3:
            raise InputError(f"a shape needs three side lengths, got {len(values)}")
        try:
            return cls(s1=values[0], s2=values[1], s3=values[2])
        except ValidationError as e:
            raise InputError(f"invalid shape {tuple(values)}: {e.errors()[0]['msg']}") from e

    @property
    def sides(self) -> Tuple[int, int, int]:
        return self.s1, self.s2, self.s3

    def __str__(self) -> str:
        return f"{self.s1}x{self.s2}x{self.s3}"


def _double(value) -> int:
    doubled = Fraction(value) * 2
    if doubled.denominator != 1:
        raise InputError(f"coordinate {value} is not a multiple of 0.5")
    return int(doubled)


def _half_text(value: int) -> str:
    if value % 2 == 0:
        return str(value // 2)
    return f"{value / 2:.1f}"


class CellRef(NamedTuple):
    """An n-cell named by its coordinates (doubled internally).

    Dimension 0 and 3 carry a point triple, dimensions 1 and 2 a sextuple of
    two adjacent points with the smaller one first. The dense index of a cell
    is looked up through :meth:`ChainComplex.index_of`.
    """

    dimension: int
    coords: Tuple[int, ...]

    @classmethod
    def from_halves(cls, dimension: int, values: Sequence) -> "CellRef":
        """Build a cell from external (half-integer) coordinates."""
        if dimension not in (0, 1, 2, 3):
            raise InputError(f"cell dimension must be 0..3, got {dimension}")
        cell = cls(dimension, tuple(_double(v) for v in values))
        cell.check_form()
        return cell

    @classmethod
    def from_text(cls, dimension: int, tokens: Sequence[str]) -> "CellRef":
        try:
            return cls.from_halves(dimension, [Fraction(t) for t in tokens])
        except (ValueError, ZeroDivisionError) as e:
            raise InputError(f"bad coordinate in {' '.join(tokens)!r}") from e

    @classmethod
    def vertex(cls, x: int, y: int, z: int) -> "CellRef":
        return cls(0, (2 * x, 2 * y, 2 * z))

    @classmethod
    def cube(cls, i: int, j: int, k: int) -> "CellRef":
        """The cube whose lowest corner is vertex (i, j, k)."""
        return cls(3, (2 * i + 1, 2 * j + 1, 2 * k + 1))

    @classmethod
    def edge(cls, u: Sequence[int], v: Sequence[int]) -> "CellRef":
        """The edge joining integer vertices ``u`` and ``v`` (any order)."""
        a, b = sorted((tuple(u), tuple(v)))
        cell = cls(1, tuple(2 * c for c in a + b))
        cell.check_form()
        return cell

    @classmethod
    def face(cls, p: Sequence[int], q: Sequence[int]) -> "CellRef":
        """The face between cubes with lowest corners ``p`` and ``q`` (any order).

        Cube corners may lie one step outside the lattice to name a surface face.
        """
        a, b = sorted((tuple(p), tuple(q)))
        cell = cls(2, tuple(2 * c + 1 for c in a + b))
        cell.check_form()
        return cell

    def check_form(self) -> None:
        """Raise :class:`InputError` unless the coordinates have this cell's form."""
        n, c = self.dimension, self.coords
        parity = 0 if n in (0, 1) else 1
        size = 3 if n in (0, 3) else 6
        if len(c) != size:
            raise InputError(f"a {n}-cell needs {size} coordinates, got {len(c)}")
        if any(v % 2 != parity for v in c):
            kind = "integers" if parity == 0 else "half-integers ending in .5"
            raise InputError(f"coordinates of a {n}-cell must be {kind}: {self.to_text()}")
        if size == 6:
            steps = [c[i + 3] - c[i] for i in AXES]
            if sorted(steps) != [0, 0, 2]:
                raise InputError(f"cell {self.to_text()} does not join two adjacent points")

    @property
    def axis(self) -> int:
        """Orientation of an edge or face: the axis along which its two points differ."""
        if self.dimension not in (1, 2):
            raise InputError("only edges and faces have an orientation")
        return next(i for i in AXES if self.coords[i + 3] != self.coords[i])

    def to_text(self) -> str:
        return " ".join(_half_text(v) for v in self.coords)

    def __str__(self) -> str:
        return f"{self.dimension}-cell({self.to_text()})"


def _offset(point: Tuple[int, ...], axis: int, delta: int) -> Tuple[int, ...]:
    moved = list(point)
    moved[axis] += delta
    return tuple(moved)


def cell_boundary(cell: CellRef) -> List[CellRef]:
    """The (n-1)-cells incident to ``cell``, without any range check."""
    n, c = cell.dimension, cell.coords
    if n == 1:
        return [CellRef(0, c[:3]), CellRef(0, c[3:])]
    if n == 2:
        normal = cell.axis
        centre = tuple((c[i] + c[i + 3]) // 2 for i in AXES)
        edges = []
        for along in AXES:
            if along == normal:
                continue
            across = 3 - normal - along
            for side in (-1, 1):
                mid = _offset(centre, across, side)
                a, b = _offset(mid, along, -1), _offset(mid, along, 1)
                edges.append(CellRef(1, a + b))
        return edges
    if n == 3:
        faces = []
        for axis in AXES:
            below = _offset(c, axis, -2)
            above = _offset(c, axis, 2)
            faces.append(CellRef(2, below + c))
            faces.append(CellRef(2, c + above))
        return faces
    raise InputError("a vertex has no boundary")


def in_lattice(shape: LatticeShape, cell: CellRef) -> bool:
    """Range check of a well-formed cell against a shape, without building the complex."""
    top = [2 * (s - 1) for s in shape.sides]
    c = cell.coords
    if cell.dimension == 0:
        return all(0 <= c[i] <= top[i] for i in AXES)
    if cell.dimension == 1:
        return all(0 <= c[i] and c[i + 3] <= top[i] for i in AXES)
    if cell.dimension == 3:
        return all(1 <= c[i] <= top[i] - 1 for i in AXES)
    normal = cell.axis
    for i in AXES:
        if i == normal:
            if not 0 <= (c[i] + c[i + 3]) // 2 <= top[i]:
                return False
        elif not 1 <= c[i] <= top[i] - 1:
            return False
    return True


def _enumerate_cells(shape: LatticeShape) -> Tuple[List[CellRef], ...]:
    sides = shape.sides
    vertices = [CellRef.vertex(*p) for p in itertools.product(*(range(s) for s in sides))]
    cubes = [CellRef.cube(*p) for p in itertools.product(*(range(s - 1) for s in sides))]
    edges: List[CellRef] = []
    faces: List[CellRef] = []
    for axis in AXES:
        extents = [range(s - 1) if i == axis else range(s) for i, s in enumerate(sides)]
        for p in itertools.product(*extents):
            edges.append(CellRef.edge(p, _offset(p, axis, 1)))
        # the face normal to ``axis`` at plane X separates cubes X-1 and X
        extents = [range(s) if i == axis else range(s - 1) for i, s in enumerate(sides)]
        for p in itertools.product(*extents):
            faces.append(CellRef.face(_offset(p, axis, -1), p))
    return vertices, edges, faces, cubes


class ChainComplex:
    """Cells of a cuboid lattice with their indices and boundary matrices.

    Cells of each dimension are ordered by orientation (x, y, z) and then
    lexicographically by coordinates. Instances are read-only after
    construction.
    """

    def __init__(self, shape: LatticeShape):
        self.shape = shape
        self.cells = _enumerate_cells(shape)
        self._index: Tuple[Dict[CellRef, int], ...] = tuple(
            {cell: i for i, cell in enumerate(group)} for group in self.cells
        )
        self.d1 = self._incidence(1)
        self.d2 = self._incidence(2)
        self.d3 = self._incidence(3)

    def _incidence(self, n: int) -> BitMatrix:
        rows: List[int] = []
        cols: List[int] = []
        lower = self._index[n - 1]
        for j, cell in enumerate(self.cells[n]):
            for face in cell_boundary(cell):
                if face in lower:
                    rows.append(lower[face])
                    cols.append(j)
        dense = np.zeros((len(self.cells[n - 1]), len(self.cells[n])), dtype=np.uint8)
        dense[rows, cols] = 1
        return BitMatrix.from_dense(dense)

    @property
    def m(self) -> Tuple[int, int, int, int]:
        return tuple(len(group) for group in self.cells)

    def contains(self, cell: CellRef) -> bool:
        return 0 <= cell.dimension <= 3 and cell in self._index[cell.dimension]

    def index_of(self, cell: CellRef) -> int:
        try:
            return self._index[cell.dimension][cell]
        except (KeyError, IndexError):
            raise InputError(f"{cell} is not a cell of the {self.shape} lattice") from None

    def cell(self, n: int, index: int) -> CellRef:
        if not 0 <= index < len(self.cells[n]):
            raise InputError(f"no {n}-cell with index {index}")
        return self.cells[n][index]

    def boundary_of(self, cell: CellRef) -> Set[CellRef]:
        """Cells of dimension n-1 bounding ``cell`` (surface faces of a cube included)."""
        self.index_of(cell)
        if cell.dimension == 0:
            raise InputError("a vertex has no boundary")
        return {face for face in cell_boundary(cell) if self.contains(face)}

    def boundary_matrix(self, n: int) -> BitMatrix:
        if n not in (1, 2, 3):
            raise InputError(f"boundary dimension must be 1..3, got {n}")
        return (self.d1, self.d2, self.d3)[n - 1]

    def coboundary_matrix(self, n: int) -> BitMatrix:
        """Coboundary from n-cochains to (n+1)-cochains."""
        return self.boundary_matrix(n + 1).transpose()

    def chain(self, n: int, cells: Iterable[CellRef]) -> BitVector:
        """The mod-2 sum of ``cells`` as a vector over the n-cells."""
        indices = []
        for cell in cells:
            if cell.dimension != n:
                raise InputError(f"expected a {n}-cell, got {cell}")
            indices.append(self.index_of(cell))
        return BitVector.from_indices(len(self.cells[n]), indices)

    def cells_of(self, n: int, vector: BitVector) -> List[CellRef]:
        return [self.cells[n][i] for i in vector.support()]

    def on_boundary_plane(self, vertex: CellRef) -> bool:
        """True when a vertex lies on one of the six faces of the cuboid."""
        return any(c == 0 or c == 2 * (s - 1) for c, s in zip(vertex.coords, self.shape.sides))

    def __repr__(self) -> str:
        return f"ChainComplex(shape={self.shape}, m={self.m})"


def build_complex(shape: Union[LatticeShape, Sequence[int]]) -> ChainComplex:
    shape = LatticeShape.of(shape)
    complex_ = ChainComplex(shape)
    logger.debug("Built %s lattice with cell counts %s", shape, complex_.m)
    return complex_


def boundary_of(complex_: ChainComplex, cell: CellRef) -> Set[CellRef]:
    return complex_.boundary_of(cell)


def boundary_matrix(complex_: ChainComplex, n: int) -> BitMatrix:
    return complex_.boundary_matrix(n)


def dual_boundary_matrix(complex_: ChainComplex) -> BitMatrix:
    """Boundary of dual 2-chains, written on primal cells: the m2 x m1 matrix d2^T."""
    return complex_.d2.transpose()


def outermost_edges(complex_: ChainComplex) -> List[int]:
    """Indices of edges with an endpoint on a boundary plane of the cuboid."""
    return [
        i
        for i, edge in enumerate(complex_.cells[1])
        if any(complex_.on_boundary_plane(v) for v in cell_boundary(edge))
    ]


def expected_counts(shape: LatticeShape) -> Tuple[int, int, int, int]:
    """Closed-form cell counts m0..m3."""
    s1, s2, s3 = shape.sides
    m0 = s1 * s2 * s3
    m1 = s2 * s3 * (s1 - 1) + s1 * s3 * (s2 - 1) + s1 * s2 * (s3 - 1)
    m2 = s1 * (s2 - 1) * (s3 - 1) + s2 * (s1 - 1) * (s3 - 1) + s3 * (s1 - 1) * (s2 - 1)
    m3 = (s1 - 1) * (s2 - 1) * (s3 - 1)
    return m0, m1, m2, m3


class LatticeInfo(BaseModel):
    """Cell counts and boundary-matrix dimensions of a lattice."""

    shape: Tuple[int, int, int] = Field(..., description="Side lengths")
    m0: int = Field(..., description="Number of vertices")
    m1: int = Field(..., description="Number of edges")
    m2: int = Field(..., description="Number of faces")
    m3: int = Field(..., description="Number of cubes")
    d1: Tuple[int, int] = Field(..., description="Dimensions of the edge boundary matrix")
    d2: Tuple[int, int] = Field(..., description="Dimensions of the face boundary matrix")
    d3: Tuple[int, int] = Field(..., description="Dimensions of the cube boundary matrix")

    @classmethod
    def of(cls, complex_: ChainComplex) -> "LatticeInfo":
        m0, m1, m2, m3 = complex_.m
        return cls(
            shape=complex_.shape.sides,
            m0=m0,
            m1=m1,
            m2=m2,
            m3=m3,
            d1=complex_.d1.shape,
            d2=complex_.d2.shape,
            d3=complex_.d3.shape,
        )
