import itertools

import numpy as np
import pytest

from app.errors import HadamardError
from app.services.graphs import check_srg, complete_graph, drop_vertex, is_isolated, two_k2, two_rank
from app.services.hadamard import (
    column_sums,
    format_sign_matrix,
    from_entries,
    graph_of,
    h1,
    h2,
    hadamard_of,
    is_graphical,
    is_hadamard,
    is_normalized,
    is_regular,
    kron,
    kron_all,
    negate,
    normalize,
    normalized_graph,
    normalized_srg_params,
    parse_sign_matrix,
    regular_srg_params,
    row_sum_sign,
    row_sums,
)


def test_base_matrices():
    for h in (h1(), h2()):
        assert is_hadamard(h)
        assert is_graphical(h)
        assert is_regular(h)
    assert row_sum_sign(h1()) == 1
    assert row_sum_sign(h2()) == -1


def test_graphs_of_base_matrices():
    assert graph_of(h1()) == two_k2()
    assert graph_of(h2()) == complete_graph(4)
    assert graph_of(negate(h1())) == two_k2()


def test_non_hadamard_matrices():
    assert not is_hadamard(from_entries(np.ones((4, 4), dtype=int)))
    assert not is_hadamard(from_entries(np.ones((3, 3), dtype=int)))
    with pytest.raises(HadamardError):
        from_entries([[1, 0], [1, 1]])


def test_kron_closure():
    factors = {"h1": h1(), "h2": h2(), "n1": normalize(h1()), "h1xh2": kron(h1(), h2())}
    for (name_a, a), (name_b, b) in itertools.product(factors.items(), repeat=2):
        h = kron(a, b)
        assert h.n == a.n * b.n, (name_a, name_b)
        assert is_hadamard(h), (name_a, name_b)
        assert is_graphical(h), (name_a, name_b)
        assert is_regular(h) == (is_regular(a) and is_regular(b)), (name_a, name_b)
        if is_normalized(a) and is_normalized(b):
            assert is_normalized(h), (name_a, name_b)


def test_all_pairwise_products_are_regular_graphical_hadamard():
    for a, b in itertools.product((h1(), h2()), repeat=2):
        h = kron(a, b)
        assert h.n == 16
        assert is_hadamard(h)
        assert is_graphical(h)
        assert is_regular(h)
        params = regular_srg_params(h)
        assert check_srg(graph_of(h)) == params


def test_order_16_graphs():
    assert check_srg(graph_of(kron(h1(), h2()))).as_tuple() == (16, 10, 6, 6)
    assert check_srg(graph_of(kron(h1(), h1()))).as_tuple() == (16, 6, 2, 2)
    assert check_srg(graph_of(kron(h2(), h2()))).as_tuple() == (16, 6, 2, 2)


def test_kron_entries_multiply():
    a, b = h1(), h2()
    assert np.array_equal(kron(a, b).entries(), np.kron(a.entries(), b.entries()))


def test_row_and_column_sums_of_triple_product():
    h = kron_all(h1(), h1(), h2())
    assert is_hadamard(h)
    assert set(row_sums(h)) == {-8}
    assert set(column_sums(h)) == {-8}
    assert regular_srg_params(h).as_tuple() == (64, 36, 20, 20)


def test_normalize():
    n = normalize(h1())
    assert is_normalized(n)
    assert is_hadamard(n)
    assert n.entries().tolist() == [
        [1, 1, 1, 1],
        [1, 1, -1, -1],
        [1, -1, 1, -1],
        [1, -1, -1, 1],
    ]
    assert normalize(n) == n
    assert normalize(negate(n)) == n


def test_normalize_requires_hadamard():
    with pytest.raises(HadamardError):
        normalize(from_entries(np.ones((4, 4), dtype=int)))


def test_normalized_graphs():
    g = normalized_graph(1)
    assert g.n == 4
    assert is_isolated(g, 0)
    assert two_rank(g) == 2
    assert normalized_graph(0).n == 1
    g2 = normalized_graph(2)
    assert is_isolated(g2, 0)
    assert two_rank(g2) == 4
    with pytest.raises(HadamardError):
        normalized_graph(-1)


def test_normalized_srg_params():
    h = normalize(kron_all(h1(), h1(), h1()))
    assert normalized_srg_params(h).as_tuple() == (63, 32, 16, 16)
    with pytest.raises(HadamardError):
        normalized_srg_params(h1())


def test_normalized_srg_params_validates_the_matrix():
    n1 = normalize(h1())
    with pytest.raises(HadamardError, match="not Hadamard"):
        normalized_srg_params(from_entries(np.ones((16, 16), dtype=int)))
    with pytest.raises(HadamardError, match="first row and column"):
        normalized_srg_params(kron_all(h1(), h1(), h1()))
    # swapping two columns keeps it Hadamard and normalized but breaks the diagonal
    swapped = kron(n1, n1).entries().copy()
    swapped[:, [1, 2]] = swapped[:, [2, 1]]
    h = from_entries(swapped)
    assert is_hadamard(h) and is_normalized(h)
    with pytest.raises(HadamardError, match="not graphical"):
        normalized_srg_params(h)


@pytest.mark.parametrize("h", [
    kron(normalize(h1()), normalize(h1())),
    normalize(kron(h1(), h2())),
    normalize(kron_all(h1(), h1(), h2())),
    kron_all(normalize(h1()), normalize(h1()), normalize(h1())),
], ids=["n1xn1", "norm(h1xh2)", "norm(h1xh1xh2)", "n1xn1xn1"])
def test_normalized_graph_minus_its_isolated_vertex_is_strongly_regular(h):
    assert is_graphical(h) and is_normalized(h)
    g = graph_of(h)
    assert is_isolated(g, 0)
    n = h.n
    assert check_srg(drop_vertex(g, 0)).as_tuple() == (n - 1, n // 2, n // 4, n // 4)
    assert check_srg(drop_vertex(g, 0)) == normalized_srg_params(h)


def test_hadamard_of_graph():
    h, ok = hadamard_of(two_k2())
    assert ok
    assert h == h1()
    _, ok = hadamard_of(complete_graph(3))
    assert not ok


def test_graph_of_rejects_non_graphical():
    h = from_entries([[1, 1], [1, -1]])
    assert is_hadamard(h)
    assert not is_graphical(h)
    with pytest.raises(HadamardError):
        graph_of(h)


def test_row_sum_sign_errors():
    with pytest.raises(HadamardError):
        row_sum_sign(from_entries([[1, 1], [1, -1]]))
    with pytest.raises(HadamardError):
        row_sum_sign(normalize(h1()))


def test_text_format():
    text = format_sign_matrix(h1())
    assert text.splitlines()[0] == "+-++"
    assert parse_sign_matrix(text) == h1()
    assert parse_sign_matrix("\n+-\n-+\n\n").n == 2
    with pytest.raises(HadamardError):
        parse_sign_matrix("+-\n+0\n")
    with pytest.raises(HadamardError):
        parse_sign_matrix("+-+\n-+\n")
