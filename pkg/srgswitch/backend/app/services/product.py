"""
The Hadamard graph product and the prescribed-rank construction built on it.

seidel_product(G1, G2) is the graph whose Seidel matrix is
(S1 + I) (x) (S2 + I) - I. Over GF(2) its adjacency is A1 (x) J + J (x) A2,
so for graphs of graphical Hadamard matrices it is the graph of their
Kronecker product. Vertices are pairs laid out lexicographically,
(x1, x2) -> n2 * x1 + x2, labelled "a,b".
"""

import logging
from typing import Callable, Optional, Sequence

from app.errors import NotStronglyRegularError, ParameterRangeError, PlanError
from app.schemas import Family, HeadKind, ProductPlan, SrgParams
from app.services.f2linalg import add2, all_ones, kron2
from app.services.graphs import (
    Graph,
    add_isolated,
    check_srg,
    clebsch,
    drop_vertex,
    isolated_vertices,
    k1,
    k4,
    lattice4,
    ones_in_colspace,
    shrikhande,
    sp,
    srg_params,
    two_k2,
    two_rank,
)
from app.services.hadamard import normalized_graph
from app.services.switching import seidel_isolate

logger = logging.getLogger(__name__)

FACTOR_ORDER = 64
FACTOR_M = 3
P0_FACTOR_RANKS = (6, 24)
PM_FACTOR_RANKS = (8, 26)
MAX_PRODUCT_ORDER = 4 ** 7


# ---------------------------------------------------------------------------
# Product and its 2-rank
# ---------------------------------------------------------------------------


def seidel_product(g1: Graph, g2: Graph) -> Graph:
    n = g1.n * g2.n
    if n > MAX_PRODUCT_ORDER:
        raise ParameterRangeError(f"seidel_product: {n} vertices exceeds the supported {MAX_PRODUCT_ORDER}")
    adj = add2(kron2(g1.adj, all_ones(g2.n, g2.n)), kron2(all_ones(g1.n, g1.n), g2.adj))
    assert adj.has_zero_diagonal()
    labels = None
    if g1.labels is not None and g2.labels is not None:
        labels = [f"{a},{b}" for a in g1.labels for b in g2.labels]
    return Graph(adj, tuple(labels) if labels is not None else None)


def product_all(graphs: Sequence[Graph]) -> Graph:
    """Left-associated product G0 x G1 x ... x Gl."""
    if not graphs:
        raise PlanError("product_all needs at least one graph")
    out = graphs[0]
    for g in graphs[1:]:
        out = seidel_product(out, g)
    return out


def _combine(left: tuple[int, bool], right: tuple[int, bool]) -> tuple[int, bool]:
    """(2-rank, 1 in Col2) of a product from the same pair for its factors."""
    (r1, ones1), (r2, ones2) = left, right
    rank = r1 + r2 - 2 if ones1 and ones2 else r1 + r2
    return rank, ones1 or ones2


def rank_profile(g: Graph) -> tuple[int, bool]:
    return two_rank(g), ones_in_colspace(g)


def predicted_2rank(g1: Graph, g2: Graph) -> int:
    return _combine(rank_profile(g1), rank_profile(g2))[0]


def ones_in_colspace_product(g1: Graph, g2: Graph) -> bool:
    return ones_in_colspace(g1) or ones_in_colspace(g2)


# ---------------------------------------------------------------------------
# Named graphs
# ---------------------------------------------------------------------------


def _g_minus_3() -> Graph:
    return product_all([two_k2(), two_k2(), two_k2()])


def _g_plus_3() -> Graph:
    return product_all([two_k2(), two_k2(), k4()])


def _g_minus_3_prime() -> Graph:
    return seidel_product(shrikhande(), two_k2())


def _g_plus_3_prime() -> Graph:
    return seidel_product(shrikhande(), k4())


NAMED_GRAPHS: dict[str, Callable[[], Graph]] = {
    "sp3": lambda: sp(3),
    "2k2": two_k2,
    "k4": k4,
    "k1": k1,
    "lattice4": lattice4,
    "shrikhande": shrikhande,
    "clebsch": clebsch,
    "g-3": _g_minus_3,
    "g'-3": _g_minus_3_prime,
    "g+3": _g_plus_3,
    "g'+3": _g_plus_3_prime,
}

# names that take an order parameter m
PARAMETRIC_GRAPHS: dict[str, Callable[[int], Graph]] = {
    "sp": sp,
    "normalized": normalized_graph,
}


def named_graph(name: str, m: Optional[int] = None) -> Graph:
    key = name.strip().lower()
    if key in PARAMETRIC_GRAPHS:
        if m is None:
            raise ParameterRangeError(f"named_graph: {name!r} needs m")
        return PARAMETRIC_GRAPHS[key](m)
    if key not in NAMED_GRAPHS:
        known = ", ".join(list(NAMED_GRAPHS) + list(PARAMETRIC_GRAPHS))
        raise ParameterRangeError(f"unknown graph name {name!r} (known: {known})")
    g = NAMED_GRAPHS[key]()
    logger.debug(f"named_graph: built {key} on {g.n} vertices")
    return g


# ---------------------------------------------------------------------------
# Construction of SRGs with prescribed 2-rank
# ---------------------------------------------------------------------------


def head_kind(family: Family, m: int) -> HeadKind:
    rest = m - FACTOR_M * (m // FACTOR_M)
    if family == "P0":
        return "k1" if rest == 0 else "normalized"
    return ("k1", "2k2", "2k2x2k2")[rest]


def head_graph(plan: ProductPlan) -> Graph:
    if plan.head == "k1":
        return k1()
    if plan.head == "2k2":
        return two_k2()
    if plan.head == "2k2x2k2":
        return lattice4()
    return normalized_graph(plan.m - FACTOR_M * (plan.m // FACTOR_M))


def hadamard_factor(g: Graph, label: Optional[str] = None) -> Graph:
    """A P0(m) SRG plus an isolated vertex: the graph of a normalized graphical Hadamard matrix."""
    params = check_srg(g)
    if params is None or params.n + 1 not in (4 ** k for k in range(2, 8)):
        raise NotStronglyRegularError(f"hadamard_factor: expected an SRG with parameters P0(m), got {params}")
    m = (params.n + 1).bit_length() // 2
    if params != srg_params("P0", m):
        raise NotStronglyRegularError(f"hadamard_factor: parameters {params} are not P0({m})")
    return add_isolated(g, label)


def isolate_to_p0(g: Graph, x: int = 0) -> Graph:
    """Seidel-isolate x in a P+-(m) SRG and drop it, leaving a P0(m) SRG."""
    params = check_srg(g)
    family = _pm_family(params)
    if family is None:
        raise NotStronglyRegularError(f"isolate_to_p0: expected parameters P+(m) or P-(m), got {params}")
    m = g.n.bit_length() // 2
    if m < 2:
        raise PlanError(f"isolate_to_p0: P0({m}) is not defined")
    out = drop_vertex(seidel_isolate(g, x), x)
    target = srg_params("P0", m)
    if check_srg(out) != target:
        raise PlanError(f"isolate_to_p0: result fails check_srg for {target}")
    logger.info(f"isolate_to_p0: {family}({m}) rank {two_rank(g)} -> P0({m}) rank {two_rank(out)}")
    return out


def _pm_family(params: Optional[SrgParams]) -> Optional[Family]:
    if params is None or params.n < 4 or params.n & (params.n - 1) or params.n.bit_length() % 2 == 0:
        return None
    m = params.n.bit_length() // 2
    for family in ("Pplus", "Pminus"):
        if params == srg_params(family, m):
            return family
    return None


def _check_factor(family: Family, g: Graph, i: int) -> tuple[Family, int]:
    """Validate factor i (1-based) and return its own family and 2-rank."""
    if g.n != FACTOR_ORDER:
        raise PlanError(f"factor {i} has {g.n} vertices, expected {FACTOR_ORDER}")
    rank = two_rank(g)
    if family == "P0":
        isolated = isolated_vertices(g)
        if len(isolated) != 1:
            raise PlanError(f"factor {i} needs exactly one isolated vertex, has {len(isolated)}")
        if check_srg(drop_vertex(g, isolated[0])) != srg_params("P0", FACTOR_M):
            raise PlanError(f"factor {i} minus its isolated vertex is not an SRG with parameters P0(3)")
        low, high = P0_FACTOR_RANKS
        own: Family = "P0"
    else:
        own = _pm_family(check_srg(g))
        if own is None:
            raise PlanError(f"factor {i} is not an SRG with parameters P+(3) or P-(3)")
        if not ones_in_colspace(g):
            raise PlanError(f"factor {i} does not have the all-ones vector in its 2-column space")
        low, high = PM_FACTOR_RANKS
    if rank % 2 or not low <= rank <= high:
        raise PlanError(f"factor {i} has 2-rank {rank}, outside [{low}, {high}]")
    return own, rank


def make_plan(family: Family, m: int, factors: Sequence[Graph]) -> ProductPlan:
    """Plan for family(m) from measured factors; the head follows from m - 3*floor(m/3)."""
    if family not in ("P0", "Pplus", "Pminus"):
        raise PlanError(f"unknown family {family!r}")
    low = 2 if family == "P0" else 1
    if m < low:
        raise PlanError(f"{family} needs m >= {low}, got {m}")
    ell = m // FACTOR_M
    if len(factors) != ell:
        raise PlanError(f"m={m} needs {ell} factors of order {FACTOR_ORDER}, got {len(factors)}")
    ranks: list[int] = []
    plus_count = 0
    for i, g in enumerate(factors, start=1):
        own, rank = _check_factor(family, g, i)
        plus_count += own == "Pplus"
        ranks.append(rank)
    if family != "P0":
        produced = "Pplus" if plus_count % 2 else "Pminus"
        if produced != family:
            raise PlanError(f"{plus_count} factors with parameters P+(3) give {produced}({m}), not {family}({m})")
    return ProductPlan(family=family, m=m, factor_ranks=ranks, head=head_kind(family, m))


def plan_rank(plan: ProductPlan) -> int:
    """2-rank the construction reaches, chaining the product rank rule."""
    rest = plan.m - FACTOR_M * (plan.m // FACTOR_M)
    if plan.family == "P0":
        return 2 * rest + sum(plan.factor_ranks)
    profile = {"k1": (0, False), "2k2": (4, True), "2k2x2k2": (6, True)}[plan.head]
    for rank in plan.factor_ranks:
        profile = _combine(profile, (rank, True))
    return profile[0]


def theorem_main_construct(plan: ProductPlan, factors: Sequence[Graph]) -> Graph:
    """G0 x G1 x ... x Gl with every claim about the result checked directly."""
    ell = plan.m // FACTOR_M
    if len(plan.factor_ranks) != ell or len(factors) != ell:
        raise PlanError(
            f"m={plan.m} needs {ell} factors, plan lists {len(plan.factor_ranks)} and {len(factors)} were given"
        )
    expected_head = head_kind(plan.family, plan.m)
    if plan.head != expected_head:
        raise PlanError(f"head {plan.head!r} does not fit {plan.family}({plan.m}); expected {expected_head!r}")
    measured = make_plan(plan.family, plan.m, factors)
    for i, (declared, actual) in enumerate(zip(plan.factor_ranks, measured.factor_ranks), start=1):
        if declared != actual:
            raise PlanError(f"factor {i} has 2-rank {actual}, plan says {declared}")

    g = product_all([head_graph(plan), *factors])
    rank = two_rank(g)
    expected = plan_rank(plan)
    if rank != expected:
        raise PlanError(f"constructed graph has 2-rank {rank}, the product rule gives {expected}")

    target = srg_params(plan.family, plan.m)
    if plan.family == "P0":
        isolated = isolated_vertices(g)
        if len(isolated) != 1:
            raise PlanError(f"constructed graph has {len(isolated)} isolated vertices, expected 1")
        params = check_srg(drop_vertex(g, isolated[0]))
    else:
        params = check_srg(g)
    if params != target:
        raise PlanError(f"constructed graph has parameters {params}, expected {target}")
    logger.info(f"theorem_main_construct: {plan.family}({plan.m}) on {g.n} vertices, 2-rank {rank}")
    return g


def construct(family: Family, m: int, factors: Sequence[Graph]) -> tuple[ProductPlan, Graph]:
    plan = make_plan(family, m, factors)
    return plan, theorem_main_construct(plan, factors)


def achievable_ranks(family: Family, m: int) -> list[int]:
    """Even 2-ranks the construction reaches for family(m) with the published factors."""
    if family not in ("P0", "Pplus", "Pminus"):
        raise ParameterRangeError(f"unknown parameter family {family!r}")
    ell = m // FACTOR_M
    if family == "P0":
        if m < 2:
            raise ParameterRangeError(f"P0 needs m >= 2, got {m}")
        return list(range(2 * m, 2 * (m + 9 * ell) + 1, 2))
    if m < 1:
        raise ParameterRangeError(f"{family} needs m >= 1, got {m}")
    if family == "Pplus" and ell == 0:
        # no P+(3) factor to flip the sign of the heads
        return []
    return list(range(2 * (m + 1), 2 * (m + 1 + 9 * ell) + 1, 2))
