import pytest

from tropabp.families import (
    CostGraph,
    complete_bipartite,
    complete_graph,
    cyclic_permutations,
    format_graph,
    hc_poly,
    inner_product_poly,
    k_matching_poly,
    parse_graph,
    perm_poly,
    shortest_path_poly,
)
from tropabp.poly import BudgetExceeded, func_equal, poly_eval, poly_substitute
from tropabp.semiring import INF, Mode


def monos(f):
    return set(f.terms)


def test_perm_small():
    assert perm_poly(1).terms == {(1,): 0}
    assert monos(perm_poly(2)) == {(1, 0, 0, 1), (0, 1, 1, 0)}
    assert len(perm_poly(3)) == 6


def test_perm_values():
    f = perm_poly(3)
    assert poly_eval(f, [0] * 9) == 0
    assert poly_eval(f, [INF] * 3 + [0] * 6) is INF


def test_perm_limit():
    with pytest.raises(BudgetExceeded):
        perm_poly(7)


def test_hc_counts():
    assert monos(hc_poly(2)) == {(0, 1, 1, 0)}
    assert len(hc_poly(3)) == 2
    assert len(hc_poly(4)) == 6


def test_cyclic_permutations_are_single_cycles():
    for n in range(2, 6):
        cyc = list(cyclic_permutations(n))
        assert len(cyc) == len(set(cyc))
        for s in cyc:
            seen, v = set(), 0
            while v not in seen:
                seen.add(v)
                v = s[v]
            assert len(seen) == n


def test_paths_in_k23():
    g = complete_bipartite(2, 3)
    f = shortest_path_poly(g, 0, 1)
    assert len(f) == 3
    assert all(sum(e) == 2 for e in f.terms)


def test_two_matchings_of_k4():
    f = k_matching_poly(complete_graph(4), 2)
    assert len(f) == 3


def test_matching_renames_to_inner_product():
    g = complete_graph(4)
    f = k_matching_poly(g, 2, Mode.RPLUS)
    # Edges of K4 in order: 01 02 03 12 13 23; matchings pair 01-23, 02-13, 03-12.
    order = [(0, 1), (0, 2), (0, 3), (2, 3), (1, 3), (1, 2)]
    perm = [g.edges.index(e) for e in order]
    renamed = poly_substitute(inner_product_poly(3, Mode.RPLUS), [("var", perm[i]) for i in range(6)], 6)
    assert func_equal(f, renamed)


def test_inner_product():
    f = inner_product_poly(3)
    assert monos(f) == {(1, 0, 0, 1, 0, 0), (0, 1, 0, 0, 1, 0), (0, 0, 1, 0, 0, 1)}


def test_path_budget():
    with pytest.raises(BudgetExceeded):
        shortest_path_poly(complete_graph(7), 0, 6, budget=10)


def test_directed_paths():
    g = CostGraph(3, True, [(0, 1), (1, 2), (0, 2), (2, 1)], 0, 2)
    f = shortest_path_poly(g)
    assert monos(f) == {(1, 1, 0, 0), (0, 0, 1, 0)}


def test_graph_validation():
    with pytest.raises(ValueError):
        CostGraph(2, False, [(0, 0)])
    with pytest.raises(ValueError):
        CostGraph(2, False, [(0, 1), (1, 0)])
    with pytest.raises(ValueError):
        CostGraph(2, False, [(0, 2)])


def test_graph_text_roundtrip():
    g = CostGraph(4, True, [(0, 1), (2, 3)], 0, 3)
    assert parse_graph(format_graph(g)) == g
    with pytest.raises(ValueError, match="line 2"):
        parse_graph("graph n=3\n0 x\n")
    with pytest.raises(ValueError, match="line 1"):
        parse_graph("edges\n")
