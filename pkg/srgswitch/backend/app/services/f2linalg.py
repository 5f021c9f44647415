"""
Dense linear algebra over GF(2).

Rows are bit-packed into uint64 words: column j of a row lives in word
j // 64 at bit j % 64 (least significant bit first). Padding bits past the
last column are always zero. Values are immutable once built; every
operation returns a fresh matrix or vector.

The elimination kernels are compiled with numba and work on a private copy
of the packed rows, so a 64x64 rank is a few microseconds.
"""

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np
from numba import njit

from app.errors import DimensionError

WORD_BITS = 64

_ONE = np.uint64(1)
_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)


def word_count(cols: int) -> int:
    return (cols + WORD_BITS - 1) // WORD_BITS


# ---------------------------------------------------------------------------
# Kernels
# ---------------------------------------------------------------------------


@njit(cache=True)
def popcount64(x):
    x = x - ((x >> _ONE) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return np.int64((x * _H01) >> np.uint64(56))


@njit(cache=True)
def rank_kernel(words, ncols):
    """GF(2) rank by forward elimination; pivots scan columns left to right."""
    a = words.copy()
    nrows, nwords = a.shape
    rank = 0
    for c in range(ncols):
        if rank == nrows:
            break
        w = c >> 6
        bit = _ONE << np.uint64(c & 63)
        pivot = -1
        for i in range(rank, nrows):
            if a[i, w] & bit:
                pivot = i
                break
        if pivot < 0:
            continue
        if pivot != rank:
            for k in range(nwords):
                t = a[rank, k]
                a[rank, k] = a[pivot, k]
                a[pivot, k] = t
        for i in range(pivot + 1, nrows):
            if a[i, w] & bit:
                for k in range(w, nwords):
                    a[i, k] ^= a[rank, k]
        rank += 1
    return rank


@njit(cache=True)
def _solve_kernel(words, ncols, rhs):
    a = words.copy()
    b = rhs.copy()
    nrows, nwords = a.shape
    pivot_cols = np.full(nrows, -1, dtype=np.int64)
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        w = c >> 6
        bit = _ONE << np.uint64(c & 63)
        pivot = -1
        for i in range(r, nrows):
            if a[i, w] & bit:
                pivot = i
                break
        if pivot < 0:
            continue
        if pivot != r:
            for k in range(nwords):
                t = a[r, k]
                a[r, k] = a[pivot, k]
                a[pivot, k] = t
            tb = b[r]
            b[r] = b[pivot]
            b[pivot] = tb
        for i in range(nrows):
            if i != r and (a[i, w] & bit):
                for k in range(w, nwords):
                    a[i, k] ^= a[r, k]
                b[i] ^= b[r]
        pivot_cols[r] = c
        r += 1

    x = np.zeros(ncols, dtype=np.uint8)
    for i in range(r, nrows):
        if b[i]:
            return False, x
    for i in range(r):
        x[pivot_cols[i]] = b[i]
    return True, x


@njit(cache=True)
def _matvec_kernel(words, vec):
    nrows, nwords = words.shape
    out = np.zeros(nrows, dtype=np.uint8)
    for i in range(nrows):
        acc = np.int64(0)
        for k in range(nwords):
            acc += popcount64(words[i, k] & vec[k])
        out[i] = acc & 1
    return out


# ---------------------------------------------------------------------------
# Packing
# ---------------------------------------------------------------------------


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a 2-D 0/1 array into rows of uint64 words."""
    bits = np.asarray(bits)
    if bits.ndim != 2:
        raise DimensionError(f"expected a 2-D bit array, got {bits.ndim}-D")
    rows, cols = bits.shape
    nwords = word_count(cols)
    if nwords == 0:
        return np.zeros((rows, 0), dtype=np.uint64)
    padded = np.zeros((rows, nwords * WORD_BITS), dtype=np.uint8)
    padded[:, :cols] = np.mod(bits.astype(np.int64), 2)
    packed = np.packbits(padded, axis=1, bitorder="little")
    return packed.view("<u8").astype(np.uint64)


def unpack_bits(words: np.ndarray, cols: int) -> np.ndarray:
    rows = words.shape[0]
    if cols == 0:
        return np.zeros((rows, 0), dtype=np.uint8)
    as_bytes = np.ascontiguousarray(words, dtype="<u8").view(np.uint8)
    return np.unpackbits(as_bytes, axis=1, bitorder="little")[:, :cols]


def _padding_mask(cols: int) -> np.uint64:
    used = cols % WORD_BITS
    if used == 0:
        return np.uint64(0)
    return ~np.uint64((1 << used) - 1)


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class F2Matrix:
    words: np.ndarray
    rows: int
    cols: int

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise DimensionError(f"negative shape {self.rows}x{self.cols}")
        words = np.ascontiguousarray(self.words, dtype=np.uint64)
        if words.shape != (self.rows, word_count(self.cols)):
            raise DimensionError(
                f"packed rows have shape {words.shape}, expected "
                f"{(self.rows, word_count(self.cols))} for {self.rows}x{self.cols}"
            )
        if self.rows and words.shape[1] and np.any(words[:, -1] & _padding_mask(self.cols)):
            raise DimensionError("padding bits past the last column must be zero")
        words.flags.writeable = False
        object.__setattr__(self, "words", words)

    @classmethod
    def from_dense(cls, array) -> "F2Matrix":
        bits = np.asarray(array)
        if bits.ndim != 2:
            raise DimensionError(f"expected a 2-D array, got {bits.ndim}-D")
        return cls(pack_bits(bits), bits.shape[0], bits.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def to_dense(self) -> np.ndarray:
        return unpack_bits(self.words, self.cols)

    def copy_words(self) -> np.ndarray:
        """A writable copy of the packed rows, for kernels that mutate."""
        return np.array(self.words, dtype=np.uint64, copy=True)

    def __getitem__(self, index: tuple[int, int]) -> int:
        i, j = index
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise DimensionError(f"entry ({i}, {j}) outside {self.rows}x{self.cols}")
        return int((int(self.words[i, j // WORD_BITS]) >> (j % WORD_BITS)) & 1)

    def row(self, i: int) -> "F2Vector":
        return F2Vector(self.words[i].copy(), self.cols)

    def transpose(self) -> "F2Matrix":
        return F2Matrix.from_dense(self.to_dense().T)

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and np.array_equal(self.to_dense(), self.to_dense().T)

    def has_zero_diagonal(self) -> bool:
        return not np.any(np.diagonal(self.to_dense()))

    def __eq__(self, other) -> bool:
        if not isinstance(other, F2Matrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.words, other.words)

    __hash__ = None

    def __repr__(self) -> str:
        return f"F2Matrix({self.rows}x{self.cols})"


@dataclass(frozen=True, eq=False)
class F2Vector:
    words: np.ndarray
    length: int

    def __post_init__(self):
        words = np.ascontiguousarray(self.words, dtype=np.uint64).reshape(-1)
        if words.shape != (word_count(self.length),):
            raise DimensionError(f"packed vector has {words.size} words for length {self.length}")
        if words.size and words[-1] & _padding_mask(self.length):
            raise DimensionError("padding bits past the last entry must be zero")
        words.flags.writeable = False
        object.__setattr__(self, "words", words)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "F2Vector":
        arr = np.asarray(bits if isinstance(bits, np.ndarray) else list(bits), dtype=np.int64).reshape(1, -1)
        return cls(pack_bits(arr)[0], arr.shape[1])

    def to_bits(self) -> np.ndarray:
        return unpack_bits(self.words.reshape(1, -1), self.length)[0]

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise DimensionError(f"index {i} outside vector of length {self.length}")
        return int((int(self.words[i // WORD_BITS]) >> (i % WORD_BITS)) & 1)

    def weight(self) -> int:
        return int(self.to_bits().sum())

    def __eq__(self, other) -> bool:
        if not isinstance(other, F2Vector):
            return NotImplemented
        return self.length == other.length and np.array_equal(self.words, other.words)

    __hash__ = None

    def __repr__(self) -> str:
        return f"F2Vector({''.join(str(b) for b in self.to_bits())})"


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------


def zeros(rows: int, cols: int) -> F2Matrix:
    return F2Matrix(np.zeros((rows, word_count(cols)), dtype=np.uint64), rows, cols)


def all_ones(rows: int, cols: int) -> F2Matrix:
    return F2Matrix.from_dense(np.ones((rows, cols), dtype=np.uint8))


def identity(n: int) -> F2Matrix:
    return F2Matrix.from_dense(np.eye(n, dtype=np.uint8))


def ones_vector(n: int) -> F2Vector:
    return F2Vector.from_bits(np.ones(n, dtype=np.uint8))


def unit_vector(n: int, i: int) -> F2Vector:
    bits = np.zeros(n, dtype=np.uint8)
    bits[i] = 1
    return F2Vector.from_bits(bits)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def rank2(m: F2Matrix) -> int:
    """Row rank over GF(2). `m` is left untouched."""
    if m.rows == 0 or m.cols == 0:
        return 0
    return int(rank_kernel(m.words, m.cols))


def solve2(m: F2Matrix, b: F2Vector) -> Optional[F2Vector]:
    """Some x with m·x = b over GF(2), or None when b is not in the column space."""
    if b.length != m.rows:
        raise DimensionError(f"right-hand side has length {b.length}, matrix has {m.rows} rows")
    if m.rows == 0:
        return F2Vector.from_bits(np.zeros(m.cols, dtype=np.uint8))
    if m.cols == 0:
        return F2Vector.from_bits([]) if b.weight() == 0 else None
    ok, x = _solve_kernel(m.words, m.cols, b.to_bits())
    if not ok:
        return None
    return F2Vector.from_bits(x)


def in_colspace(m: F2Matrix, v: F2Vector) -> bool:
    return solve2(m, v) is not None


def add2(m1: F2Matrix, m2: F2Matrix) -> F2Matrix:
    if m1.shape != m2.shape:
        raise DimensionError(f"cannot add {m1.rows}x{m1.cols} and {m2.rows}x{m2.cols}")
    return F2Matrix(np.bitwise_xor(m1.words, m2.words), m1.rows, m1.cols)


def mul2(m: F2Matrix, v: F2Vector) -> F2Vector:
    if v.length != m.cols:
        raise DimensionError(f"vector of length {v.length} against {m.cols} columns")
    if m.rows == 0:
        return F2Vector.from_bits([])
    if m.cols == 0:
        return F2Vector.from_bits(np.zeros(m.rows, dtype=np.uint8))
    return F2Vector.from_bits(_matvec_kernel(m.words, v.words))


def kron2(m1: F2Matrix, m2: F2Matrix) -> F2Matrix:
    """Kronecker product over GF(2), built one block row of m1 at a time."""
    rows, cols = m1.rows * m2.rows, m1.cols * m2.cols
    out = np.zeros((rows, word_count(cols)), dtype=np.uint64)
    if rows and cols:
        d1, d2 = m1.to_dense(), m2.to_dense()
        r2 = m2.rows
        for i1 in range(m1.rows):
            out[i1 * r2:(i1 + 1) * r2] = pack_bits(np.kron(d1[i1:i1 + 1], d2))
    return F2Matrix(out, rows, cols)
