"""
Seidel switching and Godsil-McKay (GM) switching.

A GM set W induces a regular subgraph and every vertex outside W has |W|,
|W|/2 or 0 neighbours in W. Switching complements, inside W, the
neighbourhood of each |W|/2 vertex. Both switches change the adjacency
matrix by a perturbation of 2-rank at most 2, so the 2-rank moves by
-2, 0 or +2.

The kernels here work on the packed rows of F2Matrix directly; a candidate
set is carried as a word mask over the vertex set.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence, Union

import numpy as np
from numba import njit, prange

from app.errors import InvalidSwitchingSetError, OddSwitchingSetError
from app.services.f2linalg import F2Matrix, popcount64, rank_kernel, word_count
from app.services.graphs import (
    Graph,
    check_vertex,
    neighbors,
    resolve_vertices,
    two_rank,
)

logger = logging.getLogger(__name__)

_ONE = np.uint64(1)
ENUMERATION_BUFFER = 1024


@dataclass(frozen=True)
class VertexSet:
    members: tuple[int, ...]
    universe: int

    def __post_init__(self):
        members = tuple(sorted(int(v) for v in self.members))
        if len(set(members)) != len(members):
            raise InvalidSwitchingSetError(f"vertex set repeats a vertex: {list(members)}")
        for v in members:
            if not 0 <= v < self.universe:
                raise InvalidSwitchingSetError(f"vertex {v} outside 0..{self.universe - 1}")
        object.__setattr__(self, "members", members)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __contains__(self, v) -> bool:
        return v in self.members

    def complement(self) -> "VertexSet":
        inside = set(self.members)
        return VertexSet(tuple(v for v in range(self.universe) if v not in inside), self.universe)

    def indicator(self) -> np.ndarray:
        bits = np.zeros(self.universe, dtype=np.uint8)
        bits[list(self.members)] = 1
        return bits

    def mask(self) -> np.ndarray:
        return _mask_of(np.asarray(self.members, dtype=np.int64), self.universe)


@dataclass(frozen=True)
class GmClassification:
    inside: VertexSet
    full: tuple[int, ...]
    half: tuple[int, ...]
    zero: tuple[int, ...]
    induced_degree: int


def vertex_set(g: Graph, tokens: Iterable[Union[str, int]], by_index: bool = False) -> VertexSet:
    """Labels (or indices) of g as a VertexSet."""
    return VertexSet(tuple(resolve_vertices(g, tokens, by_index=by_index)), g.n)


def set_labels(g: Graph, x: VertexSet) -> list[str]:
    return [g.label_of(v) for v in x]


def _mask_of(members: np.ndarray, n: int) -> np.ndarray:
    mask = np.zeros(word_count(n), dtype=np.uint64)
    for v in members:
        mask[v // 64] |= np.uint64(1) << np.uint64(v % 64)
    return mask


def _check_universe(g: Graph, x: VertexSet) -> None:
    if x.universe != g.n:
        raise InvalidSwitchingSetError(f"vertex set over {x.universe} vertices used on a graph with {g.n}")


# ---------------------------------------------------------------------------
# Kernels
# ---------------------------------------------------------------------------


@njit(cache=True)
def _counts_in(words, wmask):
    """Neighbours in W for every vertex."""
    n, nwords = words.shape
    out = np.zeros(n, dtype=np.int64)
    for v in range(n):
        c = 0
        for k in range(nwords):
            c += popcount64(words[v, k] & wmask[k])
        out[v] = c
    return out


@njit(cache=True)
def _is_gm_set(words, members, wmask):
    n, nwords = words.shape
    size = members.shape[0]
    half = size // 2
    degree = -1
    for t in range(size):
        w = members[t]
        c = 0
        for k in range(nwords):
            c += popcount64(words[w, k] & wmask[k])
        if degree < 0:
            degree = c
        elif c != degree:
            return False
    for v in range(n):
        if (wmask[v >> 6] >> np.uint64(v & 63)) & _ONE:
            continue
        c = 0
        for k in range(nwords):
            c += popcount64(words[v, k] & wmask[k])
        if c != 0 and c != half and c != size:
            return False
    return True


@njit(cache=True)
def _apply_gm(words, members, wmask):
    """In place: complement the W-neighbourhood of every |W|/2 vertex."""
    n, nwords = words.shape
    half = members.shape[0] // 2
    for v in range(n):
        if (wmask[v >> 6] >> np.uint64(v & 63)) & _ONE:
            continue
        c = 0
        for k in range(nwords):
            c += popcount64(words[v, k] & wmask[k])
        if c == half:
            for k in range(nwords):
                words[v, k] ^= wmask[k]
            bit = _ONE << np.uint64(v & 63)
            for t in range(members.shape[0]):
                words[members[t], v >> 6] ^= bit


@njit(cache=True)
def _set_mask(members, nwords):
    mask = np.zeros(nwords, dtype=np.uint64)
    for t in range(members.shape[0]):
        v = members[t]
        mask[v >> 6] |= _ONE << np.uint64(v & 63)
    return mask


@njit(cache=True, parallel=True)
def _switched_ranks_kernel(words, n, sets):
    nsets = sets.shape[0]
    nwords = words.shape[1]
    ranks = np.zeros(nsets, dtype=np.int64)
    for s in prange(nsets):
        members = sets[s]
        mask = _set_mask(members, nwords)
        a = words.copy()
        _apply_gm(a, members, mask)
        ranks[s] = rank_kernel(a, n)
    return ranks


@njit(cache=True)
def _enumerate_gm_kernel(words, n, size, capacity):
    """Every GM set of the given size, sorted index tuples in lexicographic order."""
    nwords = words.shape[1]
    out = np.empty((capacity, size), dtype=np.int64)
    found = 0
    combo = np.arange(size).astype(np.int64)
    while True:
        mask = _set_mask(combo, nwords)
        if _is_gm_set(words, combo, mask):
            if found == out.shape[0]:
                grown = np.empty((2 * out.shape[0], size), dtype=np.int64)
                grown[:found] = out[:found]
                out = grown
            out[found] = combo
            found += 1
        i = size - 1
        while i >= 0 and combo[i] == n - size + i:
            i -= 1
        if i < 0:
            break
        combo[i] += 1
        for j in range(i + 1, size):
            combo[j] = combo[j - 1] + 1
    return out[:found].copy()


# ---------------------------------------------------------------------------
# Seidel switching
# ---------------------------------------------------------------------------


def seidel_switch(g: Graph, x: VertexSet) -> Graph:
    """Complement every edge between X and V \\ X."""
    _check_universe(g, x)
    if not 0 < len(x) < g.n:
        raise InvalidSwitchingSetError(
            f"seidel_switch: X must be a proper nonempty subset, got {len(x)} of {g.n} vertices"
        )
    ind = x.indicator()
    cross = np.outer(ind, 1 - ind) | np.outer(1 - ind, ind)
    dense = g.adj.to_dense() ^ cross.astype(np.uint8)
    return Graph(F2Matrix.from_dense(dense), g.labels)


def seidel_isolate(g: Graph, x: int) -> Graph:
    """Seidel switch at the neighbourhood of x, which leaves x isolated."""
    check_vertex(g, x)
    around = neighbors(g, x)
    if not around:
        raise InvalidSwitchingSetError(f"seidel_isolate: vertex {g.label_of(x)} is already isolated")
    if len(around) == g.n - 1:
        raise InvalidSwitchingSetError(f"seidel_isolate: vertex {g.label_of(x)} is adjacent to every other vertex")
    return seidel_switch(g, VertexSet(tuple(around), g.n))


def seidel_matrix(g: Graph) -> np.ndarray:
    """S = J - 2A - I."""
    a = g.adj.to_dense().astype(np.int64)
    return np.ones((g.n, g.n), dtype=np.int64) - 2 * a - np.eye(g.n, dtype=np.int64)


# ---------------------------------------------------------------------------
# Godsil-McKay switching
# ---------------------------------------------------------------------------


def _check_gm_size(size: int) -> None:
    if size % 2:
        raise OddSwitchingSetError(f"GM set must have even size, got {size}")
    if size < 2:
        raise InvalidSwitchingSetError(f"GM set must have at least 2 vertices, got {size}")


def classify_gm(g: Graph, w: VertexSet) -> Optional[GmClassification]:
    _check_universe(g, w)
    _check_gm_size(len(w))
    counts = _counts_in(g.adj.words, w.mask())
    inside = counts[list(w.members)]
    if np.any(inside != inside[0]):
        return None
    size, half = len(w), len(w) // 2
    full: list[int] = []
    halves: list[int] = []
    zero: list[int] = []
    for v in range(g.n):
        if v in w:
            continue
        c = int(counts[v])
        if c == size:
            full.append(v)
        elif c == half:
            halves.append(v)
        elif c == 0:
            zero.append(v)
        else:
            return None
    return GmClassification(w, tuple(full), tuple(halves), tuple(zero), int(inside[0]))


def is_gm_set(g: Graph, w: VertexSet) -> bool:
    return classify_gm(g, w) is not None


def _require_gm(g: Graph, w: VertexSet, op: str) -> GmClassification:
    cls = classify_gm(g, w)
    if cls is None:
        raise InvalidSwitchingSetError(f"{op}: {set_labels(g, w)} is not a GM switching set")
    return cls


def gm_switch(g: Graph, w: VertexSet) -> Graph:
    cls = _require_gm(g, w, "gm_switch")
    words = g.adj.copy_words()
    _apply_gm(words, np.asarray(w.members, dtype=np.int64), w.mask())
    logger.debug(f"gm_switch: {len(cls.half)} vertices switched against {set_labels(g, w)}")
    return Graph(F2Matrix(words, g.n, g.n), g.labels)


def rank_delta(g: Graph, w: VertexSet) -> int:
    return two_rank(gm_switch(g, w)) - two_rank(g)


def gm_set_array(g: Graph, size: int) -> np.ndarray:
    """All GM sets of the given size as rows of sorted indices, in lexicographic order."""
    _check_gm_size(size)
    if size > g.n:
        raise InvalidSwitchingSetError(f"GM set size {size} exceeds the {g.n} vertices")
    sets = _enumerate_gm_kernel(g.adj.words, g.n, size, ENUMERATION_BUFFER)
    logger.debug(f"gm_set_array: {len(sets)} GM sets of size {size} on {g.n} vertices")
    return sets


def switched_ranks(g: Graph, sets: Union[np.ndarray, Sequence[VertexSet]]) -> np.ndarray:
    """2-rank of the GM switch of g at each set. Every set must be a valid GM set."""
    if not isinstance(sets, np.ndarray):
        for w in sets:
            _check_universe(g, w)
        sets = np.array([w.members for w in sets], dtype=np.int64)
    sets = np.ascontiguousarray(sets, dtype=np.int64)
    if sets.size == 0:
        return np.zeros(0, dtype=np.int64)
    if sets.ndim != 2:
        raise InvalidSwitchingSetError(f"expected a 2-D array of sets, got {sets.ndim}-D")
    _check_gm_size(sets.shape[1])
    return _switched_ranks_kernel(g.adj.words, g.n, sets)
