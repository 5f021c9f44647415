"""
Square (+1,-1)-matrices and graphical Hadamard matrices.

Entries are held one bit each in an F2Matrix, bit 1 standing for -1, so the
graph of a graphical Hadamard matrix H is just its bit matrix
(A_H = (J - H)/2) and a Kronecker product is A (x) J + J (x) B over GF(2).
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from numba import njit, prange

from app.errors import HadamardError
from app.schemas import SrgParams
from app.services.f2linalg import F2Matrix, add2, all_ones, kron2, popcount64
from app.services.graphs import Graph, from_adjacency

logger = logging.getLogger(__name__)

PLUS, MINUS = "+", "-"


@dataclass(frozen=True, eq=False)
class SignMatrix:
    neg: F2Matrix  # bit 1 <=> entry -1

    def __post_init__(self):
        if self.neg.rows != self.neg.cols:
            raise HadamardError(f"sign matrix must be square, got {self.neg.rows}x{self.neg.cols}")

    @property
    def n(self) -> int:
        return self.neg.rows

    def entries(self) -> np.ndarray:
        return 1 - 2 * self.neg.to_dense().astype(np.int64)

    def __getitem__(self, index: tuple[int, int]) -> int:
        return -1 if self.neg[index] else 1

    def __neg__(self) -> "SignMatrix":
        return negate(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SignMatrix):
            return NotImplemented
        return self.neg == other.neg

    __hash__ = None

    def __repr__(self) -> str:
        return f"SignMatrix(n={self.n})"


def from_entries(entries) -> SignMatrix:
    arr = np.asarray(entries, dtype=np.int64)
    if arr.ndim != 2:
        raise HadamardError(f"expected a 2-D array of signs, got {arr.ndim}-D")
    if not np.all((arr == 1) | (arr == -1)):
        raise HadamardError("every entry must be +1 or -1")
    return SignMatrix(F2Matrix.from_dense(arr == -1))


def h1() -> SignMatrix:
    return from_entries([
        [1, -1, 1, 1],
        [-1, 1, 1, 1],
        [1, 1, 1, -1],
        [1, 1, -1, 1],
    ])


def h2() -> SignMatrix:
    """2I - J: +1 on the diagonal, -1 elsewhere."""
    return from_entries(2 * np.eye(4, dtype=np.int64) - 1)


def negate(h: SignMatrix) -> SignMatrix:
    return SignMatrix(add2(h.neg, all_ones(h.n, h.n)))


# ---------------------------------------------------------------------------
# Predicates
# ---------------------------------------------------------------------------


@njit(cache=True, parallel=True)
def _rows_orthogonal(words, n):
    """Rows i != j agree in exactly n/2 places, i.e. H H^T = nI."""
    nwords = words.shape[1]
    half = n // 2
    bad = np.zeros(n, dtype=np.uint8)
    for i in prange(n):
        for j in range(i + 1, n):
            diff = 0
            for k in range(nwords):
                diff += popcount64(words[i, k] ^ words[j, k])
            if diff != half:
                bad[i] = 1
                break
    return bad


def is_hadamard(h: SignMatrix) -> bool:
    if h.n <= 1:
        return True
    if h.n % 2:
        return False
    return not np.any(_rows_orthogonal(h.neg.words, h.n))


def row_sums(h: SignMatrix) -> np.ndarray:
    return h.entries().sum(axis=1)


def column_sums(h: SignMatrix) -> np.ndarray:
    return h.entries().sum(axis=0)


def is_graphical(h: SignMatrix) -> bool:
    diag = np.diagonal(h.neg.to_dense())
    return h.neg.is_symmetric() and bool(np.all(diag == diag[0]))


def is_regular(h: SignMatrix) -> bool:
    sums = np.concatenate([row_sums(h), column_sums(h)])
    return bool(np.all(sums == sums[0]))


def is_normalized(h: SignMatrix) -> bool:
    bits = h.neg.to_dense()
    return not (np.any(bits[0]) or np.any(bits[:, 0]))


def row_sum_sign(h: SignMatrix) -> int:
    """epsilon with every row summing to epsilon * sqrt(n)."""
    root = math.isqrt(h.n)
    if root * root != h.n:
        raise HadamardError(f"row_sum_sign: order {h.n} is not a perfect square")
    if not is_hadamard(h):
        raise HadamardError("row_sum_sign: matrix is not Hadamard")
    if not is_regular(h):
        raise HadamardError("row_sum_sign: matrix is not regular")
    total = int(row_sums(h)[0])
    if abs(total) != root:
        raise HadamardError(f"row_sum_sign: row sum {total} is not +-{root}")
    return 1 if total > 0 else -1


# ---------------------------------------------------------------------------
# Transformations
# ---------------------------------------------------------------------------


def normalize(h: SignMatrix) -> SignMatrix:
    """Negate rows, then columns, until the first row and column are all +1."""
    if not is_hadamard(h):
        raise HadamardError("normalize: matrix is not Hadamard")
    bits = h.neg.to_dense().copy()
    bits ^= bits[:, :1].copy()
    bits ^= bits[:1, :].copy()
    return SignMatrix(F2Matrix.from_dense(bits))


def kron(a: SignMatrix, b: SignMatrix) -> SignMatrix:
    # (-1)^x (-1)^y = (-1)^(x+y)
    left = kron2(a.neg, all_ones(b.n, b.n))
    right = kron2(all_ones(a.n, a.n), b.neg)
    return SignMatrix(add2(left, right))


def kron_all(*factors: SignMatrix) -> SignMatrix:
    if not factors:
        raise HadamardError("kron_all needs at least one factor")
    out = factors[0]
    for factor in factors[1:]:
        out = kron(out, factor)
    return out


# ---------------------------------------------------------------------------
# Graphs
# ---------------------------------------------------------------------------


def graph_of(h: SignMatrix) -> Graph:
    """G_H with adjacency (J - H)/2; H is replaced by -H when its diagonal is -1."""
    if not is_graphical(h):
        raise HadamardError("graph_of: matrix is not graphical (symmetric with constant diagonal)")
    if h.n and h.neg[0, 0]:
        h = negate(h)
    return from_adjacency(h.neg, [str(i + 1) for i in range(h.n)])


def hadamard_of(g: Graph) -> tuple[SignMatrix, bool]:
    """H = J - 2A (diagonal +1) and whether it is a Hadamard matrix."""
    h = SignMatrix(g.adj)
    ok = is_hadamard(h)
    logger.debug(f"hadamard_of: order {h.n} graph gives {'a' if ok else 'no'} Hadamard matrix")
    return h, ok


def normalized_graph(j: int) -> Graph:
    """Graph of the normalized graphical Hadamard matrix of order 4^j (K1 for j = 0)."""
    if j < 0:
        raise HadamardError(f"normalized_graph: j must be >= 0, got {j}")
    h = from_entries([[1]])
    base = normalize(h1())
    for _ in range(j):
        h = kron(h, base)
    return graph_of(h)


def regular_srg_params(h: SignMatrix) -> SrgParams:
    """(n, n/2 - e*sqrt(n)/2, n/4 - e*sqrt(n)/2, n/4 - e*sqrt(n)/2) for regular graphical H."""
    if not is_graphical(h):
        raise HadamardError("regular_srg_params: matrix is not graphical")
    if h.neg[0, 0]:
        h = negate(h)
    eps = row_sum_sign(h)
    n, shift = h.n, eps * math.isqrt(h.n) // 2
    return SrgParams(n=n, k=n // 2 - shift, lambda_=n // 4 - shift, mu=n // 4 - shift)


def normalized_srg_params(h: SignMatrix) -> SrgParams:
    """(n-1, n/2, n/4, n/4): the graph of normalized graphical H minus its isolated vertex."""
    if h.n <= 4:
        raise HadamardError(f"normalized_srg_params: needs order > 4, got {h.n}")
    if not is_hadamard(h):
        raise HadamardError("normalized_srg_params: matrix is not Hadamard")
    if not is_graphical(h):
        raise HadamardError("normalized_srg_params: matrix is not graphical")
    if not is_normalized(h):
        raise HadamardError("normalized_srg_params: first row and column are not all +1")
    return SrgParams(n=h.n - 1, k=h.n // 2, lambda_=h.n // 4, mu=h.n // 4)


# ---------------------------------------------------------------------------
# Text format: one row per line, "+" / "-" per entry, no separators
# ---------------------------------------------------------------------------


def parse_sign_matrix(text: str) -> SignMatrix:
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    n = len(lines)
    for i, line in enumerate(lines, start=1):
        if len(line) != n:
            raise HadamardError(f"line {i} has {len(line)} entries, expected {n}")
        bad = set(line) - {PLUS, MINUS}
        if bad:
            raise HadamardError(f"line {i} contains {''.join(sorted(bad))!r}, only '+' and '-' allowed")
    bits = np.array([[ch == MINUS for ch in line] for line in lines], dtype=np.uint8).reshape(n, n)
    return SignMatrix(F2Matrix.from_dense(bits))


def format_sign_matrix(h: SignMatrix) -> str:
    bits = h.neg.to_dense()
    return "\n".join("".join(MINUS if b else PLUS for b in row) for row in bits) + "\n"

