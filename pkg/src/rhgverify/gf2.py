"""Dense linear algebra over GF(2) on word-packed rows.

Rows are packed little-endian into ``uint64`` words so that a row operation is
a single vectorized XOR. Column ``j`` of a row lives in word ``j // 64`` at bit
``j % 64``.
"""

import logging
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import InputError

logger = logging.getLogger(__name__)

WORD = 64
WORD_DTYPE = np.dtype("<u8")
_ONE = np.uint64(1)


def _word_count(n: int) -> int:
    return (n + WORD - 1) // WORD


def _pack(dense: np.ndarray) -> np.ndarray:
    """Pack a 2-D 0/1 array into rows of little-endian uint64 words."""
    rows, cols = dense.shape
    width = _word_count(cols) * WORD
    if width == 0:
        return np.zeros((rows, 0), dtype=WORD_DTYPE)
    padded = np.zeros((rows, width), dtype=np.uint8)
    padded[:, :cols] = np.asarray(dense, dtype=np.uint8) & 1
    packed = np.packbits(padded, axis=-1, bitorder="little")
    return np.ascontiguousarray(packed).view(WORD_DTYPE)


def _unpack(words: np.ndarray, cols: int) -> np.ndarray:
    rows = words.shape[0]
    if cols == 0:
        return np.zeros((rows, 0), dtype=np.uint8)
    as_bytes = np.ascontiguousarray(words, dtype=WORD_DTYPE).view(np.uint8)
    return np.unpackbits(as_bytes, axis=-1, bitorder="little")[:, :cols]


def _bit_mask(col: int) -> Tuple[int, np.uint64]:
    word, bit = divmod(col, WORD)
    return word, _ONE << np.uint64(bit)


class BitVector:
    """A packed vector over GF(2)."""

    __slots__ = ("length", "words")

    def __init__(self, length: int, words: Optional[np.ndarray] = None):
        if length < 0:
            raise InputError(f"vector length must be nonnegative, got {length}")
        self.length = length
        if words is None:
            words = np.zeros(_word_count(length), dtype=WORD_DTYPE)
        self.words = words

    @classmethod
    def zeros(cls, length: int) -> "BitVector":
        return cls(length)

    @classmethod
    def from_dense(cls, values: Sequence[int]) -> "BitVector":
        dense = np.asarray(values, dtype=np.uint8).reshape(1, -1)
        return cls(dense.shape[1], _pack(dense)[0])

    @classmethod
    def from_indices(cls, length: int, indices: Iterable[int]) -> "BitVector":
        """Vector with a one at every listed index (repeated indices cancel)."""
        dense = np.zeros(length, dtype=np.uint8)
        for index in indices:
            if not 0 <= index < length:
                raise InputError(f"index {index} out of range for length {length}")
            dense[index] ^= 1
        return cls.from_dense(dense)

    def to_dense(self) -> np.ndarray:
        return _unpack(self.words.reshape(1, -1), self.length)[0]

    def support(self) -> List[int]:
        return np.flatnonzero(self.to_dense()).tolist()

    @property
    def weight(self) -> int:
        return int(self.to_dense().sum())

    def is_zero(self) -> bool:
        return not self.words.any()

    def get(self, index: int) -> int:
        word, mask = _bit_mask(index)
        return int((self.words[word] & mask) != 0)

    def copy(self) -> "BitVector":
        return BitVector(self.length, self.words.copy())

    def __xor__(self, other: "BitVector") -> "BitVector":
        if self.length != other.length:
            raise InputError(f"length mismatch: {self.length} vs {other.length}")
        return BitVector(self.length, self.words ^ other.words)

    __add__ = __xor__

    def __len__(self) -> int:
        return self.length

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return self.length == other.length and np.array_equal(self.words, other.words)

    def __hash__(self) -> int:
        return hash((self.length, self.words.tobytes()))

    def __repr__(self) -> str:
        return f"BitVector(length={self.length}, support={self.support()})"


class BitMatrix:
    """A dense binary matrix with row-major packed storage."""

    __slots__ = ("rows", "cols", "words")

    def __init__(self, rows: int, cols: int, words: Optional[np.ndarray] = None):
        if rows < 0 or cols < 0:
            raise InputError(f"matrix dimensions must be nonnegative, got {rows}x{cols}")
        self.rows = rows
        self.cols = cols
        if words is None:
            words = np.zeros((rows, _word_count(cols)), dtype=WORD_DTYPE)
        self.words = words

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @classmethod
    def from_dense(cls, values) -> "BitMatrix":
        dense = np.asarray(values, dtype=np.uint8)
        if dense.ndim != 2:
            raise InputError(f"expected a 2-D array, got {dense.ndim} dimensions")
        return cls(dense.shape[0], dense.shape[1], _pack(dense))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    def to_dense(self) -> np.ndarray:
        return _unpack(self.words, self.cols)

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.rows, self.cols, self.words.copy())

    def get(self, i: int, j: int) -> int:
        word, mask = _bit_mask(j)
        return int((self.words[i, word] & mask) != 0)

    def row(self, i: int) -> BitVector:
        return BitVector(self.cols, self.words[i].copy())

    def column(self, j: int) -> BitVector:
        return BitVector.from_dense(self.to_dense()[:, j])

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_dense(self.to_dense().T)

    @property
    def T(self) -> "BitMatrix":
        return self.transpose()

    def matmul(self, other: "BitMatrix") -> "BitMatrix":
        if self.cols != other.rows:
            raise InputError(f"cannot multiply {self.shape} by {other.shape}")
        # float64 products are exact while the inner dimension stays below 2**53
        left = self.to_dense().astype(np.float64)
        right = other.to_dense().astype(np.float64)
        product = (left @ right).astype(np.int64) & 1
        return BitMatrix.from_dense(product)

    __matmul__ = matmul

    def matvec(self, vector: BitVector) -> BitVector:
        if self.cols != vector.length:
            raise InputError(f"cannot multiply {self.shape} by vector of length {vector.length}")
        product = self.to_dense().astype(np.int64) @ vector.to_dense().astype(np.int64)
        return BitVector.from_dense(product & 1)

    def zero_rows(self, indices: Iterable[int]) -> "BitMatrix":
        result = self.copy()
        index = np.fromiter(indices, dtype=np.int64)
        if index.size:
            result.words[index] = 0
        return result

    def zero_columns(self, indices: Iterable[int]) -> "BitMatrix":
        result = self.copy()
        keep = np.ones((1, self.cols), dtype=np.uint8)
        index = np.fromiter(indices, dtype=np.int64)
        if index.size == 0:
            return result
        keep[0, index] = 0
        result.words &= _pack(keep)[0]
        return result

    def hstack_vector(self, vector: BitVector) -> "BitMatrix":
        """Append ``vector`` as an extra rightmost column."""
        if vector.length != self.rows:
            raise InputError(f"augmenting column has length {vector.length}, expected {self.rows}")
        dense = np.hstack([self.to_dense(), vector.to_dense().reshape(-1, 1)])
        return BitMatrix.from_dense(dense)

    def column_weights(self) -> np.ndarray:
        return self.to_dense().sum(axis=0)

    def is_zero(self) -> bool:
        return not self.words.any()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.words, other.words)

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.words.tobytes()))

    def __repr__(self) -> str:
        return f"BitMatrix(rows={self.rows}, cols={self.cols})"


def _eliminate(words: np.ndarray, cols: int, reduce: bool = False) -> List[int]:
    """Gaussian elimination in place on packed rows.

    Columns are scanned left to right and the first row at or below the current
    pivot row with a one becomes the pivot. With ``reduce`` the pivot column is
    cleared above the pivot too (reduced echelon form). Returns pivot columns;
    pivot ``i`` sits in row ``i`` afterwards.
    """
    rows = words.shape[0]
    pivots: List[int] = []
    r = 0
    for col in range(cols):
        if r == rows:
            break
        word, mask = _bit_mask(col)
        hits = np.flatnonzero(words[r:, word] & mask)
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            words[[r, p]] = words[[p, r]]
        pivot_row = words[r].copy()
        if reduce:
            targets = np.flatnonzero(words[:, word] & mask)
            targets = targets[targets != r]
        else:
            targets = r + 1 + np.flatnonzero(words[r + 1:, word] & mask)
        if targets.size:
            words[targets] ^= pivot_row
        pivots.append(col)
        r += 1
    return pivots


def rank(matrix: BitMatrix) -> int:
    """GF(2) rank; the input is left untouched."""
    return len(_eliminate(matrix.words.copy(), matrix.cols))


def solvability(matrix: BitMatrix, target: BitVector) -> Tuple[int, int]:
    """Return ``(rank(M), rank(M | b))`` from a single elimination pass."""
    augmented = matrix.hstack_vector(target)
    pivots = _eliminate(augmented.words, augmented.cols)
    base = sum(1 for col in pivots if col < matrix.cols)
    return base, len(pivots)


def solvable(matrix: BitMatrix, target: BitVector) -> bool:
    """True iff ``M x = b`` has a solution over GF(2) (Rouché–Capelli)."""
    base, augmented = solvability(matrix, target)
    return base == augmented


def solve(matrix: BitMatrix, target: BitVector) -> Optional[BitVector]:
    """Some ``x`` with ``M x = b``, or ``None`` when the system is inconsistent.

    Free variables are set to zero, so the result depends only on the inputs.
    """
    augmented = matrix.hstack_vector(target)
    pivots = _eliminate(augmented.words, augmented.cols, reduce=True)
    if pivots and pivots[-1] == matrix.cols:
        return None
    solution = np.zeros(matrix.cols, dtype=np.uint8)
    rhs = _unpack(augmented.words, augmented.cols)[:, matrix.cols]
    for row, col in enumerate(pivots):
        solution[col] = rhs[row]
    return BitVector.from_dense(solution)
