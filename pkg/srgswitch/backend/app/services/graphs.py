"""
Simple undirected graphs stored as symmetric, zero-diagonal GF(2) adjacency
matrices, with optional vertex labels.

Label schemes:
  - Sp(2m,2): the 2m-bit string x1..x2m of the vertex, e.g. "100000".
    Vertices are ordered by the integer value of that string, so "100000"
    is index 31 in Sp(6,2).
  - products: comma-joined factor labels, e.g. "1,2,3", laid out
    lexicographically, so (a,b,c) over {1..4}^3 is (a-1)*16 + (b-1)*4 + (c-1).
Parentheses and whitespace are ignored on lookup: "(1, 2, 3)" == "1,2,3".
"""

import logging
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

import networkx as nx
import numpy as np
from numba import njit, prange

from app.errors import (
    Graph6Error,
    InvalidGraphError,
    ParameterRangeError,
    UnknownLabelError,
)
from app.schemas import Family, SrgParams
from app.services.f2linalg import (
    F2Matrix,
    in_colspace,
    ones_vector,
    popcount64,
    rank2,
)

logger = logging.getLogger(__name__)

MAX_SP_M = 6  # Sp(12,2) has 4095 vertices
GRAPH6_HEADER = b">>graph6<<"

_ONE = np.uint64(1)
_LABEL_NOISE = re.compile(r"[()\s]")


def normalize_label(label: str) -> str:
    return _LABEL_NOISE.sub("", str(label))


@dataclass(frozen=True, eq=False)
class Graph:
    adj: F2Matrix
    labels: Optional[tuple[str, ...]] = None
    _index: dict = field(init=False, repr=False, default_factory=dict)

    def __post_init__(self):
        if self.adj.rows != self.adj.cols:
            raise InvalidGraphError(f"adjacency must be square, got {self.adj.rows}x{self.adj.cols}")
        if not self.adj.has_zero_diagonal():
            raise InvalidGraphError("adjacency has a nonzero diagonal entry (loop)")
        if not self.adj.is_symmetric():
            raise InvalidGraphError("adjacency is not symmetric")
        if self.labels is not None:
            labels = tuple(normalize_label(label) for label in self.labels)
            if len(labels) != self.adj.rows:
                raise InvalidGraphError(
                    f"{len(labels)} labels given for {self.adj.rows} vertices"
                )
            index = {label: i for i, label in enumerate(labels)}
            if len(index) != len(labels):
                raise InvalidGraphError("vertex labels must be pairwise distinct")
            object.__setattr__(self, "labels", labels)
            object.__setattr__(self, "_index", index)

    @property
    def n(self) -> int:
        return self.adj.rows

    def label_of(self, v: int) -> str:
        return self.labels[v] if self.labels is not None else str(v)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.adj == other.adj

    __hash__ = None

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={edge_count(self)})"


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------


def from_adjacency(m: Union[F2Matrix, np.ndarray], labels: Optional[Sequence[str]] = None) -> Graph:
    if not isinstance(m, F2Matrix):
        m = F2Matrix.from_dense(np.asarray(m))
    return Graph(m, tuple(labels) if labels is not None else None)


def from_edges(n: int, edges: Iterable[tuple[int, int]], labels: Optional[Sequence[str]] = None) -> Graph:
    dense = np.zeros((n, n), dtype=np.uint8)
    for u, v in edges:
        if u == v:
            raise InvalidGraphError(f"loop at vertex {u}")
        dense[u, v] = dense[v, u] = 1
    return from_adjacency(dense, labels)


def empty_graph(n: int) -> Graph:
    return from_adjacency(np.zeros((n, n), dtype=np.uint8), [str(i + 1) for i in range(n)])


def complete_graph(n: int) -> Graph:
    dense = np.ones((n, n), dtype=np.uint8) - np.eye(n, dtype=np.uint8)
    return from_adjacency(dense, [str(i + 1) for i in range(n)])


def k1() -> Graph:
    return empty_graph(1)


def two_k2() -> Graph:
    """2K2 on "1".."4" with edges {1,2} and {3,4}."""
    return from_edges(4, [(0, 1), (2, 3)], ["1", "2", "3", "4"])


def k4() -> Graph:
    return complete_graph(4)


def sp(m: int) -> Graph:
    """Symplectic graph Sp(2m,2): nonzero vectors of GF(2)^2m, adjacent when
    x1y2 + x2y1 + ... + x_{2m-1}y_{2m} + x_{2m}y_{2m-1} = 1."""
    if not 1 <= m <= MAX_SP_M:
        raise ParameterRangeError(f"sp: m must lie in [1, {MAX_SP_M}], got {m}")
    width = 2 * m
    values = np.arange(1, 2 ** width, dtype=np.int64)
    shifts = np.arange(width - 1, -1, -1, dtype=np.int64)
    coords = ((values[:, None] >> shifts[None, :]) & 1).astype(np.uint8)
    odd, even = coords[:, 0::2], coords[:, 1::2]
    form = (odd @ even.T + even @ odd.T) % 2
    labels = [format(int(v), f"0{width}b") for v in values]
    logger.debug(f"sp: built Sp({width},2) on {len(values)} vertices")
    return from_adjacency(form.astype(np.uint8), labels)


def lattice4() -> Graph:
    """L(4) = 2K2 x_H 2K2."""
    from app.services.product import seidel_product

    return seidel_product(two_k2(), two_k2())


SHRIKHANDE_COCLIQUE = ("1,1", "2,2", "3,3", "4,4")


def shrikhande() -> Graph:
    """Seidel switch of L(4) at the coclique {(1,1),(2,2),(3,3),(4,4)}."""
    from app.services.switching import seidel_switch, vertex_set

    lattice = lattice4()
    return seidel_switch(lattice, vertex_set(lattice, SHRIKHANDE_COCLIQUE))


def clebsch() -> Graph:
    """2K2 x_H K4, the graph of H1 (x) H2."""
    from app.services.product import seidel_product

    return seidel_product(two_k2(), k4())


# ---------------------------------------------------------------------------
# Inspection
# ---------------------------------------------------------------------------


def degree_sequence(g: Graph) -> tuple[int, ...]:
    return tuple(int(d) for d in g.adj.to_dense().sum(axis=1))


def edge_count(g: Graph) -> int:
    return sum(degree_sequence(g)) // 2


def neighbors(g: Graph, v: int) -> list[int]:
    check_vertex(g, v)
    return [int(u) for u in np.flatnonzero(g.adj.to_dense()[v])]


def is_isolated(g: Graph, v: int) -> bool:
    return not neighbors(g, v)


def isolated_vertices(g: Graph) -> list[int]:
    return [int(v) for v in np.flatnonzero(g.adj.to_dense().sum(axis=1) == 0)]


def two_rank(g: Graph) -> int:
    return rank2(g.adj)


def ones_in_colspace(g: Graph) -> bool:
    return in_colspace(g.adj, ones_vector(g.n))


def check_vertex(g: Graph, v: int) -> None:
    if not 0 <= v < g.n:
        raise InvalidGraphError(f"vertex {v} outside 0..{g.n - 1}")


def label_index(g: Graph, label: str) -> int:
    if g.labels is None:
        raise UnknownLabelError(f"graph on {g.n} vertices carries no labels, cannot resolve {label!r}")
    key = normalize_label(label)
    try:
        return g._index[key]
    except KeyError:
        raise UnknownLabelError(f"no vertex labelled {label!r}") from None


def resolve_vertices(g: Graph, tokens: Iterable[Union[str, int]], by_index: bool = False) -> list[int]:
    """Map labels (or, with by_index, integer indices) to vertex indices."""
    out: list[int] = []
    for token in tokens:
        if by_index or isinstance(token, (int, np.integer)):
            v = int(token)
            check_vertex(g, v)
            out.append(v)
        else:
            out.append(label_index(g, token))
    return out


# ---------------------------------------------------------------------------
# Strong regularity
# ---------------------------------------------------------------------------


@njit(cache=True, parallel=True)
def _common_neighbor_kernel(words, n):
    nwords = words.shape[1]
    degrees = np.zeros(n, dtype=np.int64)
    row_lambda = np.full(n, -1, dtype=np.int64)
    row_mu = np.full(n, -1, dtype=np.int64)
    conflict = np.zeros(n, dtype=np.uint8)
    for i in prange(n):
        d = 0
        for k in range(nwords):
            d += popcount64(words[i, k])
        degrees[i] = d
    for i in prange(n):
        lam = -1
        mu = -1
        for j in range(i + 1, n):
            common = 0
            for k in range(nwords):
                common += popcount64(words[i, k] & words[j, k])
            if (words[i, j >> 6] >> np.uint64(j & 63)) & _ONE:
                if lam < 0:
                    lam = common
                elif lam != common:
                    conflict[i] = 1
                    break
            else:
                if mu < 0:
                    mu = common
                elif mu != common:
                    conflict[i] = 1
                    break
        row_lambda[i] = lam
        row_mu[i] = mu
    return degrees, row_lambda, row_mu, conflict


def _single_value(values: np.ndarray) -> Optional[int]:
    seen = np.unique(values[values >= 0])
    if seen.size != 1:
        return None
    return int(seen[0])


def check_srg(g: Graph) -> Optional[SrgParams]:
    """(n,k,lambda,mu) when A^2 = kI + lambda*A + mu*(J-I-A), else None.

    Counts are exact integers. Empty and complete graphs give None since
    lambda (resp. mu) is not determined.
    """
    if g.n < 2:
        return None
    degrees, row_lambda, row_mu, conflict = _common_neighbor_kernel(g.adj.words, g.n)
    if np.any(degrees != degrees[0]) or np.any(conflict):
        return None
    lam = _single_value(row_lambda)
    mu = _single_value(row_mu)
    if lam is None or mu is None:
        return None
    return SrgParams(n=g.n, k=int(degrees[0]), lambda_=lam, mu=mu)


def srg_params(family: Family, m: int) -> SrgParams:
    """P0(m) = (2^2m - 1, 2^(2m-1), 2^(2m-2), 2^(2m-2));
    P+-(m) = (2^2m, 2^(2m-1) +- 2^(m-1), 2^(2m-2) +- 2^(m-1), same)."""
    _check_family_m(family, m)
    if family == "P0":
        return SrgParams(n=4 ** m - 1, k=2 ** (2 * m - 1), lambda_=2 ** (2 * m - 2), mu=2 ** (2 * m - 2))
    sign = 1 if family == "Pplus" else -1
    shift = sign * 2 ** (m - 1)
    return SrgParams(
        n=4 ** m,
        k=2 ** (2 * m - 1) + shift,
        lambda_=2 ** (2 * m - 2) + shift,
        mu=2 ** (2 * m - 2) + shift,
    )


def feasible_2rank_interval(family: Family, m: int) -> tuple[int, int]:
    """Known bounds on the 2-rank of an SRG with parameters P0(m) or P+-(m)."""
    _check_family_m(family, m)
    if m < 2:
        raise ParameterRangeError(f"feasible_2rank_interval: the bounds need m >= 2, got {m}")
    top = 2 ** (2 * m - 1) - 2 ** (m - 1)
    if family == "P0":
        return 2 * m, top - 2
    return 2 * m + 2, top


def family_of(params: SrgParams) -> Optional[tuple[Family, int]]:
    """Which of P0(m), P+(m), P-(m) the parameters belong to, if any."""
    for m in range(1, MAX_SP_M + 2):
        for family in ("P0", "Pplus", "Pminus"):
            if family == "P0" and m < 2:
                continue
            if srg_params(family, m) == params:
                return family, m
    return None


def _check_family_m(family: str, m: int) -> None:
    if family not in ("P0", "Pplus", "Pminus"):
        raise ParameterRangeError(f"unknown parameter family {family!r}")
    low = 2 if family == "P0" else 1
    if m < low:
        raise ParameterRangeError(f"{family} needs m >= {low}, got {m}")


# ---------------------------------------------------------------------------
# Vertex surgery
# ---------------------------------------------------------------------------


def add_isolated(g: Graph, label: Optional[str] = None) -> Graph:
    dense = np.zeros((g.n + 1, g.n + 1), dtype=np.uint8)
    dense[:g.n, :g.n] = g.adj.to_dense()
    labels = None
    if g.labels is not None:
        if label is None:
            label = str(g.n + 1) if str(g.n + 1) not in g._index else f"v{g.n}"
        labels = list(g.labels) + [label]
    return from_adjacency(dense, labels)


def drop_vertex(g: Graph, v: int) -> Graph:
    check_vertex(g, v)
    dense = np.delete(np.delete(g.adj.to_dense(), v, axis=0), v, axis=1)
    labels = None if g.labels is None else [label for i, label in enumerate(g.labels) if i != v]
    return from_adjacency(dense, labels)


def induced_subgraph(g: Graph, vertices: Sequence[int]) -> Graph:
    for v in vertices:
        check_vertex(g, v)
    idx = np.asarray(vertices, dtype=np.int64)
    dense = g.adj.to_dense()[np.ix_(idx, idx)]
    labels = None if g.labels is None else [g.labels[v] for v in vertices]
    return from_adjacency(dense, labels)


# ---------------------------------------------------------------------------
# Interchange
# ---------------------------------------------------------------------------


def to_networkx(g: Graph) -> nx.Graph:
    out = nx.Graph()
    out.add_nodes_from(range(g.n))
    rows, cols = np.nonzero(np.triu(g.adj.to_dense(), 1))
    out.add_edges_from(zip(rows.tolist(), cols.tolist()))
    return out


def from_networkx(h: nx.Graph, labels: Optional[Sequence[str]] = None) -> Graph:
    nodes = list(h.nodes())
    dense = nx.to_numpy_array(h, nodelist=nodes, dtype=np.uint8, weight=None)
    return from_adjacency(dense, labels)


def graph6_encode(g: Graph) -> bytes:
    return nx.to_graph6_bytes(to_networkx(g), header=False).rstrip(b"\n")


def _graph6_order(data: bytes) -> tuple[int, int]:
    """Vertex count and the offset where the edge bits start."""
    if data[0] != 126:
        return data[0] - 63, 1
    if len(data) < 4:
        raise Graph6Error("graph6 size prefix is truncated")
    if data[1] != 126:
        return (data[1] - 63) << 12 | (data[2] - 63) << 6 | (data[3] - 63), 4
    if len(data) < 8:
        raise Graph6Error("graph6 size prefix is truncated")
    n = 0
    for b in data[2:8]:
        n = (n << 6) | (b - 63)
    return n, 8


def graph6_decode(data: Union[bytes, str]) -> Graph:
    if isinstance(data, str):
        data = data.encode("ascii")
    data = data.strip()
    if data.startswith(GRAPH6_HEADER):
        data = data[len(GRAPH6_HEADER):]
    if not data:
        raise Graph6Error("empty graph6 string")
    if any(b < 63 or b > 126 for b in data):
        raise Graph6Error("graph6 bytes must lie in 63..126")

    n, offset = _graph6_order(data)
    body = data[offset:]
    bits = n * (n - 1) // 2
    expected = -(-bits // 6)
    if len(body) != expected:
        kind = "truncated" if len(body) < expected else "has trailing bytes"
        raise Graph6Error(f"graph6 for n={n} {kind}: {len(body)} edge bytes, expected {expected}")
    padding = expected * 6 - bits
    if padding and (body[-1] - 63) & ((1 << padding) - 1):
        raise Graph6Error("graph6 padding bits are not zero")

    try:
        h = nx.from_graph6_bytes(data)
    except (nx.NetworkXError, ValueError) as e:
        raise Graph6Error(f"malformed graph6: {e}") from e
    return from_networkx(h, [str(i + 1) for i in range(n)])
